//! Linearized plant, closed-loop polynomials, and root-locus gain tuning.
//!
//! Linearizing the pressure force and torque about the undeformed
//! configuration collapses the fiber geometry into two constants,
//!
//! ```text
//! C1 = πR²(1 − 2cot²Γ)      (axial force per unit pressure, m²)
//! C2 = 2πR³cot Γ            (torque per unit pressure, m³)
//! ```
//!
//! so the rotation channel becomes the linear loop
//! `I·φ̈ + c_t·φ̇ + k_t·φ = −C2·P + M_l`. Closing a PID around it yields a
//! rational transfer function in each gain; sweeping that gain and tracking
//! the closed-loop poles across the sweep is the classical root-locus view
//! used here to pick gains. Pole finding is an Aberth–Ehrlich simultaneous
//! iteration (with closed forms below cubic), verified against a residual
//! bound so a silently bad root cannot escape; classification separates
//! stable, marginal, and unstable pole sets with a scale-aware tolerance and
//! reports the dominant (slowest) mode with its damping ratio.
//!
//! The same linearization can be integrated in time with the identical PID
//! and saturation via [`simulate_linearized`], which is how the small-signal
//! model is compared against the full fiber-geometry dynamics.

use crate::dynamics::{DynamicsError, Plant, Pressure, State};
use crate::geometry::Geometry;
use crate::ode::{self, Options, Solution};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearError {
    #[error("polynomial has no nonzero coefficients")]
    ZeroPolynomial,
    #[error("transfer function is improper: deg(num) = {num_degree} > deg(den) = {den_degree}")]
    Improper {
        num_degree: usize,
        den_degree: usize,
    },
    #[error("closed-loop polynomial degree drops at gain {gain}; locus branch count would change")]
    DegreeDrop { gain: f64 },
    #[error("root iteration left residual {residual:.3e} above the bound {bound:.3e}")]
    NoConvergence { residual: f64, bound: f64 },
    #[error("gain must be finite and non-negative, got {0}")]
    InvalidGain(f64),
    #[error("need at least one {0}")]
    EmptyInput(&'static str),
}

/// Pressure-to-force constants (C1, C2) of the linearized model.
pub fn pressure_force_constants(geom: &Geometry) -> (f64, f64) {
    let gamma = geom.winding_angle_rad;
    let cot = gamma.cos() / gamma.sin();
    let r2 = geom.radius_m * geom.radius_m;
    let c1 = std::f64::consts::PI * r2 * (1.0 - 2.0 * cot * cot);
    let c2 = 2.0 * std::f64::consts::PI * r2 * geom.radius_m * cot;
    (c1, c2)
}

/// State derivative of the linearized plant under pressure `p`.
pub fn linearized_rhs(plant: &Plant, state: &State, pressure_pa: f64) -> [f64; 5] {
    let (c1, c2) = pressure_force_constants(&plant.geometry);
    let e = &plant.elastomer;
    let s_ddot = (plant.loads.axial_n - e.k_e * state.s_m - e.c_e * state.s_dot + c1 * pressure_pa)
        / plant.body.mass_kg;
    let phi_ddot =
        (plant.loads.torque_nm - e.k_t * state.phi_rad - e.c_t * state.phi_dot - c2 * pressure_pa)
            / plant.body.inertia_kg_m2;
    [state.s_dot, state.phi_dot, s_ddot, phi_ddot, state.phi_rad]
}

/// Integrate the linearized plant under the same pressure input (including
/// PID saturation) as the full model.
pub fn simulate_linearized(
    plant: &Plant,
    pressure: &Pressure,
    initial: State,
    t_end: f64,
    opts: &Options,
) -> Result<Solution<5>, DynamicsError> {
    if let Pressure::Constant(p) = pressure {
        if !(p.is_finite() && *p >= 0.0) {
            return Err(DynamicsError::InvalidPressure(*p));
        }
    }
    let winding = plant.geometry.winding_angle_rad;
    let solution = ode::solve(
        |t, y: &[f64; 5]| {
            let state = State::from_array(*y);
            let p = pressure.at(t, &state, winding);
            Ok::<_, crate::geometry::GeometryError>(linearized_rhs(plant, &state, p))
        },
        0.0,
        t_end,
        initial.to_array(),
        opts,
    )?;
    Ok(solution)
}

/// Rational transfer function with coefficients in descending powers of s.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

/// Which PID gain a root-locus sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptGain {
    Proportional,
    Integral,
    Derivative,
}

/// Open-loop transfer function of the rotation loop with respect to the
/// swept gain, the remaining gains held at their values in `gains`.
///
/// Proportional and integral sweeps take the derivative term as absent (its
/// path is swept separately); the derivative sweep keeps both other gains in
/// the fixed part. Closing the loop at gain K is `den + K·num`.
pub fn rotation_loop_tf(
    plant: &Plant,
    gains: &crate::control::PidGains,
    swept: SweptGain,
) -> RationalTF {
    let (_, c2) = pressure_force_constants(&plant.geometry);
    let i = plant.body.inertia_kg_m2;
    let c_t = plant.elastomer.c_t;
    let k_t = plant.elastomer.k_t;
    match swept {
        SweptGain::Proportional => RationalTF {
            num: vec![-c2, 0.0],
            den: vec![i, c_t, k_t, -c2 * gains.k_i],
        },
        SweptGain::Integral => RationalTF {
            num: vec![-c2],
            den: vec![i, c_t, k_t - c2 * gains.k_p, 0.0],
        },
        SweptGain::Derivative => RationalTF {
            num: vec![-c2, 0.0, 0.0],
            den: vec![i, c_t, k_t - c2 * gains.k_p, -c2 * gains.k_i],
        },
    }
}

/// Characteristic polynomial of the loop closed at gain `k`: den + k·num,
/// the numerator right-aligned to the denominator.
pub fn closed_loop_poly(tf: &RationalTF, k: f64) -> Result<Vec<f64>, LinearError> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(LinearError::InvalidGain(k));
    }
    let num = trim_leading_zeros(&tf.num);
    let den = trim_leading_zeros(&tf.den);
    if den.is_empty() {
        return Err(LinearError::ZeroPolynomial);
    }
    if num.len() > den.len() {
        return Err(LinearError::Improper {
            num_degree: num.len() - 1,
            den_degree: den.len() - 1,
        });
    }
    let offset = den.len() - num.len();
    let mut closed: Vec<f64> = den.to_vec();
    for (j, &c) in num.iter().enumerate() {
        closed[offset + j] += k * c;
    }
    if closed[0] == 0.0 {
        return Err(LinearError::DegreeDrop { gain: k });
    }
    Ok(closed)
}

fn trim_leading_zeros(coeffs: &[f64]) -> &[f64] {
    let start = coeffs
        .iter()
        .position(|&c| c != 0.0)
        .unwrap_or(coeffs.len());
    &coeffs[start..]
}

/// All roots of a real polynomial given in descending powers.
///
/// Degrees one and two use closed forms; higher degrees run the
/// Aberth–Ehrlich simultaneous iteration on the monic normalization.
/// Trailing zero coefficients become exact roots at the origin. Every root
/// is checked against the residual bound
/// `|p(z)| ≤ 1e−8·max|coeff|·max(1, |z|)^deg` before being returned. Roots
/// come back sorted by real part, then imaginary part.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, LinearError> {
    let trimmed = trim_leading_zeros(coeffs);
    if trimmed.is_empty() {
        return Err(LinearError::ZeroPolynomial);
    }
    let zeros_at_origin = trimmed.iter().rev().take_while(|&&c| c == 0.0).count();
    let core = &trimmed[..trimmed.len() - zeros_at_origin];
    let deg_core = core.len() - 1;

    let mut roots: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    match deg_core {
        0 => {}
        1 => roots.push(Complex64::new(-core[1] / core[0], 0.0)),
        2 => roots.extend(quadratic_roots(core[0], core[1], core[2])),
        _ => roots.extend(aberth(core)?),
    }

    // Residual verification against the full polynomial.
    let deg = trimmed.len() - 1;
    let max_coeff = trimmed.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for &z in &roots {
        let residual = horner_complex(trimmed, z).norm();
        let bound = 1e-8 * max_coeff * z.norm().max(1.0).powi(deg as i32);
        // NaN residuals must also land in the error arm.
        if residual > bound || residual.is_nan() {
            return Err(LinearError::NoConvergence { residual, bound });
        }
    }

    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(roots)
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        // Avoid cancellation: compute the larger-magnitude root first.
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            // b = 0 and c = 0: double root at the origin.
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn horner_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// p(z) and p′(z) for a monic complex-coefficient polynomial.
fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn aberth(core: &[f64]) -> Result<Vec<Complex64>, LinearError> {
    let n = core.len() - 1;
    let monic: Vec<f64> = core.iter().map(|c| c / core[0]).collect();
    // Cauchy-style inclusion radius for the starting circle, with a small
    // angular offset so real axes of symmetry don't trap the iteration.
    let radius = 1.0 + monic.iter().skip(1).fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..1000 {
        let mut all_small = true;
        for k in 0..n {
            let (p, dp) = horner_with_derivative(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 {
                // Stationary point: nudge off it instead of dividing by zero.
                Complex64::new(1e-12 * (1.0 + z[k].norm()), 0.0)
            } else {
                p / dp
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * sum;
            let correction = if denom.norm() == 0.0 { w } else { w / denom };
            z[k] -= correction;
            if correction.norm() > 1e-13 * (1.0 + z[k].norm()) {
                all_small = false;
            }
        }
        if all_small {
            return Ok(z);
        }
    }
    // Let the caller's residual check decide whether the iterate is usable.
    Ok(z)
}

/// Pole trajectories of `den + K·num` across a gain sweep, matched into
/// continuous branches.
#[derive(Debug, Clone, PartialEq)]
pub struct RootLocus {
    pub gains: Vec<f64>,
    /// `branches[b][i]` is the pole of branch `b` at `gains[i]`.
    pub branches: Vec<Vec<Complex64>>,
}

impl RootLocus {
    /// All poles at sweep index `i`.
    pub fn poles_at(&self, i: usize) -> Vec<Complex64> {
        self.branches.iter().map(|b| b[i]).collect()
    }
}

/// Sweep the closed-loop poles over `gains`, pairing roots between
/// consecutive gains by nearest-neighbor distance so each branch is a
/// continuous trajectory.
pub fn root_locus(tf: &RationalTF, gains: &[f64]) -> Result<RootLocus, LinearError> {
    if gains.is_empty() {
        return Err(LinearError::EmptyInput("gain"));
    }
    let mut branches: Vec<Vec<Complex64>> = Vec::new();
    let mut previous: Vec<Complex64> = Vec::new();
    for (i, &k) in gains.iter().enumerate() {
        let closed = closed_loop_poly(tf, k)?;
        let roots = poly_roots(&closed)?;
        if i == 0 {
            branches = roots.iter().map(|&r| vec![r]).collect();
            previous = roots;
            continue;
        }
        if roots.len() != previous.len() {
            return Err(LinearError::DegreeDrop { gain: k });
        }
        // Greedy nearest-neighbor assignment of new roots to branches.
        let mut taken = vec![false; roots.len()];
        let mut next = previous.clone();
        for (b, &prev) in previous.iter().enumerate() {
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for (j, &r) in roots.iter().enumerate() {
                if !taken[j] {
                    let d = (r - prev).norm();
                    if d < best_d {
                        best_d = d;
                        best = j;
                    }
                }
            }
            taken[best] = true;
            next[b] = roots[best];
            branches[b].push(roots[best]);
        }
        previous = next;
    }
    Ok(RootLocus {
        gains: gains.to_vec(),
        branches,
    })
}

/// Default sweep grid: 200 log-spaced gains covering two decades on either
/// side of a reference gain.
pub fn default_gain_grid(k_ref: f64) -> Result<Vec<f64>, LinearError> {
    if !(k_ref.is_finite() && k_ref > 0.0) {
        return Err(LinearError::InvalidGain(k_ref));
    }
    let (lo, hi) = ((k_ref / 100.0).ln(), (k_ref * 100.0).ln());
    Ok((0..200)
        .map(|i| (lo + (hi - lo) * i as f64 / 199.0).exp())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

/// The slowest closed-loop mode: the pole with the largest real part, with
/// second-order damping read off it (ζ = 1 for a real pole).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantMode {
    pub pole: Complex64,
    pub damping_ratio: f64,
    pub natural_frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub verdict: Stability,
    pub max_real_part: f64,
    /// Scale-aware boundary tolerance the verdict was decided with.
    pub tolerance: f64,
    pub dominant: DominantMode,
}

/// Classify a closed-loop pole set.
///
/// The imaginary-axis tolerance scales with the pole magnitudes
/// (`1e−9·max(1, max|z|)`): a pole to the right of +τ makes the set
/// unstable, any pole within ±τ of the axis makes it marginal, otherwise the
/// set is stable.
pub fn classify_stability(poles: &[Complex64]) -> Result<StabilityReport, LinearError> {
    if poles.is_empty() {
        return Err(LinearError::EmptyInput("pole"));
    }
    let max_norm = poles.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let tolerance = 1e-9 * max_norm.max(1.0);
    let max_real_part = poles.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re));
    let verdict = if max_real_part > tolerance {
        Stability::Unstable
    } else if poles.iter().any(|z| z.re.abs() <= tolerance) {
        Stability::Marginal
    } else {
        Stability::Stable
    };
    // Dominant mode: rightmost pole; prefer the upper half-plane member of a
    // conjugate pair for a deterministic report.
    let dominant_pole = *poles
        .iter()
        .filter(|z| (z.re - max_real_part).abs() <= tolerance.max(1e-12 * max_norm))
        .max_by(|a, b| a.im.partial_cmp(&b.im).unwrap())
        .unwrap_or(&poles[0]);
    let dominant = if dominant_pole.im.abs() > tolerance {
        DominantMode {
            pole: dominant_pole,
            damping_ratio: -dominant_pole.re / dominant_pole.norm(),
            natural_frequency: dominant_pole.norm(),
        }
    } else {
        DominantMode {
            pole: Complex64::new(dominant_pole.re, 0.0),
            damping_ratio: 1.0,
            natural_frequency: dominant_pole.re.abs(),
        }
    };
    Ok(StabilityReport {
        verdict,
        max_real_part,
        tolerance,
        dominant,
    })
}

#[cfg(test)]
mod tests {
    // Oracle values are pinned at full f64 precision on purpose.
    #![allow(clippy::excessive_precision)]

    use super::*;
    use crate::control::PidGains;
    use crate::dynamics::{BodyParams, Loads};
    use crate::geometry::ElastomerParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const DEG: f64 = std::f64::consts::PI / 180.0;

    fn torsional_plant() -> Plant {
        Plant {
            geometry: Geometry::new(-40.0 * DEG, 0.12, 0.007).unwrap(),
            elastomer: ElastomerParams::new(10110.1, 0.18557, 5.0, 0.005).unwrap(),
            body: BodyParams::thin_ring(0.028, 0.007).unwrap(),
            loads: Loads::default(),
        }
    }

    #[test]
    fn linearization_constants() {
        let geom = Geometry::new(40.0 * DEG, 0.11, 0.007).unwrap();
        let (c1, c2) = pressure_force_constants(&geom);
        assert_relative_eq!(c1, -2.8333116001029444e-4, max_relative = 1e-14);
        assert_relative_eq!(c2, 2.5683869713288844e-6, max_relative = 1e-14);
        // Mirrored winding flips the torque constant only.
        let neg = Geometry::new(-40.0 * DEG, 0.11, 0.007).unwrap();
        let (c1n, c2n) = pressure_force_constants(&neg);
        assert_relative_eq!(c1n, c1, max_relative = 1e-15);
        assert_relative_eq!(c2n, -c2, max_relative = 1e-15);
    }

    #[test]
    fn proportional_sweep_polynomials() {
        let plant = torsional_plant();
        let gains = PidGains::with_default_ceiling(0.0, 1.2e6, 0.0).unwrap();
        let tf = rotation_loop_tf(&plant, &gains, SweptGain::Proportional);
        assert_eq!(tf.num.len(), 2);
        assert_relative_eq!(tf.num[0], 2.5683869713288844e-6, max_relative = 1e-14);
        assert_eq!(tf.num[1], 0.0);
        assert_relative_eq!(tf.den[3], 3.0820643655946613, max_relative = 1e-14);

        let closed = closed_loop_poly(&tf, 32000.0).unwrap();
        assert_relative_eq!(closed[0], 1.372e-6, max_relative = 1e-15);
        assert_relative_eq!(closed[1], 0.005, max_relative = 1e-15);
        assert_relative_eq!(closed[2], 0.2677583830825243, max_relative = 1e-13);
    }

    #[test]
    fn tuned_proportional_gain_gives_three_real_stable_poles() {
        let plant = torsional_plant();
        let gains = PidGains::with_default_ceiling(0.0, 1.2e6, 0.0).unwrap();
        let tf = rotation_loop_tf(&plant, &gains, SweptGain::Proportional);
        let roots = poly_roots(&closed_loop_poly(&tf, 32000.0).unwrap()).unwrap();
        let expected = [-3590.129227380552, -37.499768980267017, -16.685872443845672];
        assert_eq!(roots.len(), 3);
        for (root, want) in roots.iter().zip(expected) {
            assert_relative_eq!(root.re, want, max_relative = 1e-10);
            assert!(root.im.abs() < 1e-8 * root.re.abs());
        }

        let report = classify_stability(&roots).unwrap();
        assert_eq!(report.verdict, Stability::Stable);
        assert_eq!(report.dominant.damping_ratio, 1.0);
        assert_relative_eq!(
            report.dominant.natural_frequency,
            16.685872443845672,
            max_relative = 1e-9
        );
    }

    #[test]
    fn mirrored_winding_is_unstable_under_the_same_gains() {
        // Closing the same loop on the positively wound plant flips the loop
        // sign; by the pole test that configuration cannot be stabilized this
        // way.
        let plant = Plant {
            geometry: Geometry::new(40.0 * DEG, 0.12, 0.007).unwrap(),
            ..torsional_plant()
        };
        let gains = PidGains::with_default_ceiling(0.0, 1.2e6, 0.0).unwrap();
        let tf = rotation_loop_tf(&plant, &gains, SweptGain::Proportional);
        let roots = poly_roots(&closed_loop_poly(&tf, 32000.0).unwrap()).unwrap();
        let report = classify_stability(&roots).unwrap();
        assert_eq!(report.verdict, Stability::Unstable);
        assert!(report.max_real_part > 10.0);
    }

    #[test]
    fn integral_sweep_base_polynomial_has_an_integrator_pole() {
        let plant = torsional_plant();
        let gains = PidGains::with_default_ceiling(32000.0, 0.0, 0.0).unwrap();
        let tf = rotation_loop_tf(&plant, &gains, SweptGain::Integral);
        assert_eq!(tf.num.len(), 1);
        let roots = poly_roots(&tf.den).unwrap();
        assert_eq!(roots.len(), 3);
        assert_relative_eq!(roots[0].re, -3589.95225972, max_relative = 1e-8);
        assert_relative_eq!(roots[1].re, -54.362609089, max_relative = 1e-8);
        assert_eq!(roots[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn low_degree_roots_are_closed_form() {
        assert_eq!(
            poly_roots(&[2.0, -6.0]).unwrap(),
            vec![Complex64::new(3.0, 0.0)]
        );
        let pair = poly_roots(&[1.0, 2.0, 5.0]).unwrap();
        assert_abs_diff_eq!(pair[0].re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pair[0].im, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pair[1].im, 2.0, epsilon = 1e-14);
        assert_eq!(
            poly_roots(&[4.0, 0.0, 0.0]).unwrap(),
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
        );
        assert!(poly_roots(&[3.0]).unwrap().is_empty());
        assert!(matches!(
            poly_roots(&[0.0, 0.0]),
            Err(LinearError::ZeroPolynomial)
        ));
    }

    #[test]
    fn planted_sextic_is_recovered() {
        // (s+3)²(s−2)(s−0.5)(s²+2s+17) expanded.
        let coeffs = [1.0, 5.5, 19.0, 33.0, -109.0, -262.5, 153.0];
        let roots = poly_roots(&coeffs).unwrap();
        assert_eq!(roots.len(), 6);
        let expect = [
            Complex64::new(-3.0, 0.0),
            Complex64::new(-3.0, 0.0),
            Complex64::new(-1.0, -4.0),
            Complex64::new(-1.0, 4.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        for want in expect {
            let nearest = roots
                .iter()
                .map(|r| (r - want).norm())
                .fold(f64::INFINITY, f64::min);
            // The double root at −3 is ill-conditioned by nature; simple
            // roots come back far tighter.
            let tol = if (want.re + 3.0).abs() < 1e-9 {
                2e-6
            } else {
                1e-8
            };
            assert!(nearest < tol, "root {want} missed by {nearest:.2e}");
        }
    }

    #[test]
    fn locus_branches_are_continuous_and_conjugate_closed() {
        let plant = torsional_plant();
        let gains = PidGains::with_default_ceiling(0.0, 1.2e6, 0.0).unwrap();
        let tf = rotation_loop_tf(&plant, &gains, SweptGain::Proportional);
        let grid = default_gain_grid(32000.0).unwrap();
        let locus = root_locus(&tf, &grid).unwrap();
        assert_eq!(locus.branches.len(), 3);
        assert!(locus.branches.iter().all(|b| b.len() == grid.len()));
        for i in 0..grid.len() {
            let poles = locus.poles_at(i);
            for p in &poles {
                assert!(p.re.is_finite() && p.im.is_finite());
                if p.im.abs() > 1e-6 * p.norm() {
                    let conj_dist = poles
                        .iter()
                        .map(|q| (q - p.conj()).norm())
                        .fold(f64::INFINITY, f64::min);
                    assert!(conj_dist < 1e-6 * p.norm().max(1.0), "unpaired pole {p}");
                }
            }
        }
        // Branch steps should be small fractions of the pole scale across a
        // 200-point log grid.
        for branch in &locus.branches {
            for w in branch.windows(2) {
                let step = (w[1] - w[0]).norm();
                assert!(
                    step < 0.35 * (w[0].norm() + w[1].norm() + 1.0),
                    "jump {step:.3e} between {} and {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn default_grid_spans_two_decades_each_way() {
        let grid = default_gain_grid(32000.0).unwrap();
        assert_eq!(grid.len(), 200);
        assert_relative_eq!(grid[0], 320.0, max_relative = 1e-12);
        assert_relative_eq!(grid[199], 3.2e6, max_relative = 1e-12);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(default_gain_grid(0.0).is_err());
    }

    #[test]
    fn marginal_and_underdamped_classification() {
        let marginal =
            classify_stability(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)]).unwrap();
        assert_eq!(marginal.verdict, Stability::Marginal);

        // ζ = 0.5 pair: dominant mode must report the pair's damping.
        let poles = [
            Complex64::new(-1.0, 3.0f64.sqrt()),
            Complex64::new(-1.0, -3.0f64.sqrt()),
            Complex64::new(-50.0, 0.0),
        ];
        let report = classify_stability(&poles).unwrap();
        assert_eq!(report.verdict, Stability::Stable);
        assert_relative_eq!(report.dominant.damping_ratio, 0.5, max_relative = 1e-12);
        assert_relative_eq!(report.dominant.natural_frequency, 2.0, max_relative = 1e-12);
        assert!(report.dominant.pole.im > 0.0);
    }

    #[test]
    fn improper_and_degenerate_inputs_are_rejected() {
        let improper = RationalTF {
            num: vec![1.0, 0.0, 0.0],
            den: vec![1.0, 1.0],
        };
        assert!(matches!(
            closed_loop_poly(&improper, 1.0),
            Err(LinearError::Improper { .. })
        ));
        let cancelling = RationalTF {
            num: vec![-1.0, 0.0],
            den: vec![1.0, 1.0],
        };
        assert!(matches!(
            closed_loop_poly(&cancelling, 1.0),
            Err(LinearError::DegreeDrop { .. })
        ));
        assert!(matches!(
            closed_loop_poly(&cancelling, f64::NAN),
            Err(LinearError::InvalidGain(_))
        ));
        let tf = RationalTF {
            num: vec![1.0],
            den: vec![1.0, 1.0],
        };
        assert!(matches!(
            root_locus(&tf, &[]),
            Err(LinearError::EmptyInput(_))
        ));
        assert!(matches!(
            classify_stability(&[]),
            Err(LinearError::EmptyInput(_))
        ));
    }

    #[test]
    fn linearized_time_response_approximates_the_full_model_at_small_pressure() {
        let plant = torsional_plant();
        let p = Pressure::Constant(50.0);
        let opts = Options::default();
        let lin = simulate_linearized(&plant, &p, State::default(), 0.05, &opts).unwrap();
        let full = crate::dynamics::simulate(&plant, &p, State::default(), 0.05, &opts).unwrap();
        let (_, y_lin) = lin.last();
        let end = full.final_state();
        assert_relative_eq!(y_lin[0], end.s_m, max_relative = 5e-3);
        assert_relative_eq!(y_lin[1], end.phi_rad, max_relative = 5e-3);
    }
}

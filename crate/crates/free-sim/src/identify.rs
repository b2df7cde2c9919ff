//! Parameter identification and material utilities.
//!
//! The lumped model's four elastomer coefficients are not handbook numbers;
//! they come from bench measurements. This module packages the reductions
//! used for that:
//!
//! - **Stiffness regression** ([`fit_stiffness`]): least-squares slope of
//!   force against displacement, through the origin by default (a spring law
//!   has no offset), with an intercept mode for drifted data.
//! - **Static back-out** ([`backout_stiffness`]): invert the static force
//!   balance at a measured pressurized deflection to read k_e and k_t
//!   directly. Near the critical fiber angle arctan√2 the axial pressure
//!   force vanishes and the axial deflection with it, so the division is
//!   refused inside a 2° guard band.
//! - **Log-decrement damping** ([`log_decrement_damping`]): successive
//!   positive peaks of a free decay give the decrement δ, damping ratio
//!   ζ = δ/√(4π² + δ²), frequencies, and the viscous coefficient
//!   c = 2ζω_n·m.
//! - **Normalized RMSD** ([`rmsd_displacement`], [`rmsd_force_moment`]) for
//!   model-vs-measurement comparisons.
//! - **Material utilities**: thin-walled-cylinder radial expansion under
//!   pressure and the first-order Ogden strain-energy density in the
//!   incompressible limit (the α = 2 case degenerates to neo-Hookean).

use crate::dynamics::Loads;
use crate::geometry::{
    critical_winding_angle, pressure_axial_force, pressure_torque, DeformedConfig, Geometry,
    GeometryError,
};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("length mismatch: {left} samples vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),
    #[error("measured {which} is zero; static back-out needs a finite deflection")]
    ZeroDisplacement { which: &'static str },
    #[error(
        "fiber angle {gamma_rad:.4} rad lies within 2° of the critical angle arctan√2; \
         the axial back-out is ill-conditioned there"
    )]
    NearCriticalAngle { gamma_rad: f64 },
    #[error("found {found} positive peaks; the log decrement needs at least 3")]
    InsufficientPeaks { found: usize },
    #[error("peak amplitudes grow (mean log decrement {delta:.3e}); not a decaying free response")]
    NonDecaying { delta: f64 },
    #[error("stretch product λ1·λ2·λ3 = {product} violates incompressibility")]
    IncompressibilityViolated { product: f64 },
}

/// Regression flavor for [`fit_stiffness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// k = Σ(x·F)/Σx²; the line is forced through the origin.
    ThroughOrigin,
    /// Ordinary least squares with a free intercept.
    WithIntercept,
}

/// Fitted spring law F = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessFit {
    pub slope: f64,
    /// Zero in [`FitMode::ThroughOrigin`].
    pub intercept: f64,
}

/// Least-squares stiffness from (displacement, force) samples.
pub fn fit_stiffness(samples: &[(f64, f64)], mode: FitMode) -> Result<StiffnessFit, IdentifyError> {
    match mode {
        FitMode::ThroughOrigin => {
            let sxx: f64 = samples.iter().map(|(x, _)| x * x).sum();
            if sxx == 0.0 {
                return Err(IdentifyError::DegenerateData("all displacements are zero"));
            }
            let sxf: f64 = samples.iter().map(|(x, f)| x * f).sum();
            Ok(StiffnessFit {
                slope: sxf / sxx,
                intercept: 0.0,
            })
        }
        FitMode::WithIntercept => {
            let n = samples.len() as f64;
            if samples.len() < 2 {
                return Err(IdentifyError::DegenerateData(
                    "intercept fit needs at least two samples",
                ));
            }
            let x_mean: f64 = samples.iter().map(|(x, _)| x).sum::<f64>() / n;
            let f_mean: f64 = samples.iter().map(|(_, f)| f).sum::<f64>() / n;
            let sxx: f64 = samples.iter().map(|(x, _)| (x - x_mean).powi(2)).sum();
            if sxx == 0.0 {
                return Err(IdentifyError::DegenerateData(
                    "displacements are all identical",
                ));
            }
            let sxf: f64 = samples
                .iter()
                .map(|(x, f)| (x - x_mean) * (f - f_mean))
                .sum();
            let slope = sxf / sxx;
            Ok(StiffnessFit {
                slope,
                intercept: f_mean - slope * x_mean,
            })
        }
    }
}

/// Invert the static force balance at a measured pressurized deflection:
/// with the deformed fiber angle and radius evaluated at (s, φ),
///
/// ```text
/// k_e = (F_l + πr²P(1 − 2cot²γ)) / s
/// k_t = (M_l − 2πr³P·cot γ) / φ
/// ```
///
/// Refused within 2° of the critical fiber angle, where the axial pressure
/// force crosses zero and s is no longer a usable divisor.
pub fn backout_stiffness(
    geom: &Geometry,
    loads: &Loads,
    pressure_pa: f64,
    s_meas: f64,
    phi_meas: f64,
) -> Result<(f64, f64), IdentifyError> {
    if s_meas == 0.0 {
        return Err(IdentifyError::ZeroDisplacement {
            which: "elongation",
        });
    }
    if phi_meas == 0.0 {
        return Err(IdentifyError::ZeroDisplacement { which: "rotation" });
    }
    let cfg = DeformedConfig::at(geom, s_meas, phi_meas)?;
    let gamma = cfg.fiber_angle_rad;
    let two_deg = 2.0 * std::f64::consts::PI / 180.0;
    if (gamma.abs() - critical_winding_angle()).abs() <= two_deg {
        return Err(IdentifyError::NearCriticalAngle { gamma_rad: gamma });
    }
    let k_e = (loads.axial_n + pressure_axial_force(cfg.radius_m, gamma, pressure_pa)) / s_meas;
    let k_t = (loads.torque_nm + pressure_torque(cfg.radius_m, gamma, pressure_pa)) / phi_meas;
    Ok((k_e, k_t))
}

/// Average per-pressure stiffness estimates (P, k_e, k_t) into single
/// representative values.
pub fn averaged_stiffness(per_pressure: &[(f64, f64, f64)]) -> Result<(f64, f64), IdentifyError> {
    if per_pressure.is_empty() {
        return Err(IdentifyError::DegenerateData("no per-pressure estimates"));
    }
    let n = per_pressure.len() as f64;
    let k_e = per_pressure.iter().map(|(_, k, _)| k).sum::<f64>() / n;
    let k_t = per_pressure.iter().map(|(_, _, k)| k).sum::<f64>() / n;
    Ok((k_e, k_t))
}

/// Damping identified from a free-decay trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingEstimate {
    /// Mean log decrement δ over successive positive peaks.
    pub log_decrement: f64,
    pub damping_ratio: f64,
    pub damped_frequency: f64,
    pub natural_frequency: f64,
    /// c = 2ζω_n·(inertia-like), in N·s/m or N·m·s/rad depending on channel.
    pub damping_coefficient: f64,
    /// Number of positive peaks the estimate is based on.
    pub peaks: usize,
}

/// Log-decrement damping identification on a sampled free decay.
///
/// Peaks are strict three-sample local maxima with positive amplitude,
/// refined to sub-sample accuracy with a parabolic fit. `inertia_like` is
/// the mass for the axial channel or the rotary inertia for the torsional
/// one, turning 2ζω_n into the viscous coefficient.
pub fn log_decrement_damping(
    t: &[f64],
    x: &[f64],
    inertia_like: f64,
) -> Result<DampingEstimate, IdentifyError> {
    if t.len() != x.len() {
        return Err(IdentifyError::LengthMismatch {
            left: t.len(),
            right: x.len(),
        });
    }
    let mut peak_times = Vec::new();
    let mut peak_amps = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        if x[i] > x[i - 1] && x[i] > x[i + 1] && x[i] > 0.0 {
            // Parabola through the three samples: vertex offset −d1/d2 in
            // units of the local sample spacing, amplitude lift −d1²/(2 d2).
            let d1 = 0.5 * (x[i + 1] - x[i - 1]);
            let d2 = x[i + 1] - 2.0 * x[i] + x[i - 1];
            let h = 0.5 * (t[i + 1] - t[i - 1]);
            if d2 < 0.0 {
                peak_times.push(t[i] - d1 / d2 * h);
                peak_amps.push(x[i] - d1 * d1 / (2.0 * d2));
            } else {
                peak_times.push(t[i]);
                peak_amps.push(x[i]);
            }
        }
    }
    if peak_amps.len() < 3 {
        return Err(IdentifyError::InsufficientPeaks {
            found: peak_amps.len(),
        });
    }
    let n_ratios = (peak_amps.len() - 1) as f64;
    let delta = peak_amps
        .windows(2)
        .map(|w| (w[0] / w[1]).ln())
        .sum::<f64>()
        / n_ratios;
    if delta < -1e-9 {
        return Err(IdentifyError::NonDecaying { delta });
    }
    let mean_spacing = (peak_times[peak_times.len() - 1] - peak_times[0]) / n_ratios;
    let damped_frequency = 2.0 * std::f64::consts::PI / mean_spacing;
    let damping_ratio = delta / (4.0 * std::f64::consts::PI.powi(2) + delta * delta).sqrt();
    let natural_frequency = damped_frequency / (1.0 - damping_ratio * damping_ratio).sqrt();
    Ok(DampingEstimate {
        log_decrement: delta,
        damping_ratio,
        damped_frequency,
        natural_frequency,
        damping_coefficient: 2.0 * damping_ratio * natural_frequency * inertia_like,
        peaks: peak_amps.len(),
    })
}

/// Normalized root-mean-square deviation between measured and simulated
/// series: √((1/n)Σ((exp−sim)/x_max)²).
pub fn rmsd_displacement(exp: &[f64], sim: &[f64], x_max: f64) -> Result<f64, IdentifyError> {
    if exp.len() != sim.len() {
        return Err(IdentifyError::LengthMismatch {
            left: exp.len(),
            right: sim.len(),
        });
    }
    if exp.is_empty() {
        return Err(IdentifyError::DegenerateData("no samples"));
    }
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(IdentifyError::DegenerateData("normalizer must be positive"));
    }
    let sum: f64 = exp
        .iter()
        .zip(sim)
        .map(|(e, s)| {
            let d = (e - s) / x_max;
            d * d
        })
        .sum();
    Ok((sum / exp.len() as f64).sqrt())
}

/// Combined force-and-moment normalized RMSD:
/// √((1/n)Σ[((ΔF)/F_max)² + ((ΔM)/M_max)²]).
pub fn rmsd_force_moment(
    f_exp: &[f64],
    f_sim: &[f64],
    m_exp: &[f64],
    m_sim: &[f64],
    f_max: f64,
    m_max: f64,
) -> Result<f64, IdentifyError> {
    if f_exp.len() != f_sim.len() {
        return Err(IdentifyError::LengthMismatch {
            left: f_exp.len(),
            right: f_sim.len(),
        });
    }
    if f_exp.len() != m_exp.len() || m_exp.len() != m_sim.len() {
        return Err(IdentifyError::LengthMismatch {
            left: f_exp.len(),
            right: m_exp.len(),
        });
    }
    if f_exp.is_empty() {
        return Err(IdentifyError::DegenerateData("no samples"));
    }
    if !(f_max > 0.0 && m_max > 0.0 && f_max.is_finite() && m_max.is_finite()) {
        return Err(IdentifyError::DegenerateData(
            "normalizers must be positive",
        ));
    }
    let sum: f64 = (0..f_exp.len())
        .map(|i| {
            let df = (f_exp[i] - f_sim[i]) / f_max;
            let dm = (m_exp[i] - m_sim[i]) / m_max;
            df * df + dm * dm
        })
        .sum();
    Ok((sum / f_exp.len() as f64).sqrt())
}

/// Radial expansion of a closed thin-walled cylinder under internal
/// pressure: δ_r = p·r²/(b·E)·(1 − ν/2).
///
/// Wall thickness `b` and modulus `e` must be positive.
pub fn thin_wall_expansion(p: f64, r: f64, b: f64, e: f64, nu: f64) -> f64 {
    debug_assert!(b > 0.0 && e > 0.0, "thin-wall expansion needs b, E > 0");
    p * r * r / (b * e) * (1.0 - nu / 2.0)
}

/// First-order Ogden material constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OgdenParams {
    /// Shear-like modulus μ (Pa).
    pub mu: f64,
    /// Strain-hardening exponent α (dimensionless, nonzero).
    pub alpha: f64,
}

/// First-order Ogden strain-energy density in the incompressible limit:
/// Ψ = (2μ/α)(λ1^α + λ2^α + λ3^α − 3).
///
/// The stretches must be positive and satisfy λ1·λ2·λ3 = 1 within 1e−9
/// (volume preservation); the volumetric term is dropped entirely. With
/// α = 2 this reduces to the neo-Hookean form μ(Σλ² − 3).
pub fn ogden_energy(l1: f64, l2: f64, l3: f64, params: &OgdenParams) -> Result<f64, IdentifyError> {
    if !(l1 > 0.0 && l2 > 0.0 && l3 > 0.0) {
        return Err(IdentifyError::DegenerateData("stretches must be positive"));
    }
    if params.alpha == 0.0 {
        return Err(IdentifyError::DegenerateData(
            "Ogden exponent must be nonzero",
        ));
    }
    let product = l1 * l2 * l3;
    if (product - 1.0).abs() > 1e-9 {
        return Err(IdentifyError::IncompressibilityViolated { product });
    }
    let a = params.alpha;
    Ok(2.0 * params.mu / a * (l1.powf(a) + l2.powf(a) + l3.powf(a) - 3.0))
}

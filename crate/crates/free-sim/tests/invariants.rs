//! Property-based invariants: relations that must hold for *every* valid
//! input, checked over randomized inputs with shrinking.
//!
//! Case counts are tuned per block — algebraic properties run the default
//! 256 cases, while properties that integrate the dynamics run a handful of
//! cases each to keep the suite fast.

use free_sim::control::{
    ChainedTrajectory, CubicTrajectory, PidGains, Reference, ReferenceSample, StepSchedule,
    Waypoint,
};
use free_sim::dynamics::{
    simulate_closed_loop, simulate_constant_pressure, static_equilibrium, BodyParams, Loads, Plant,
    State,
};
use free_sim::geometry::{
    critical_winding_angle, pressure_axial_force, pressure_torque, DeformedConfig, ElastomerParams,
    Geometry,
};
use free_sim::identify::{
    backout_stiffness, fit_stiffness, ogden_energy, rmsd_displacement, FitMode, OgdenParams,
};
use free_sim::linear::{closed_loop_poly, poly_roots, rotation_loop_tf, SweptGain};
use free_sim::ode::{Options, Tolerances};
use free_sim::units::{deg_to_rad, pa_to_psi, psi_to_pa, rad_to_deg};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEG: f64 = std::f64::consts::PI / 180.0;

/// A winding angle from either sign family, away from 0 and ±90°.
fn winding_angle() -> impl Strategy<Value = f64> {
    (prop::bool::ANY, 5.0..80.0f64).prop_map(|(neg, mag)| if neg { -mag * DEG } else { mag * DEG })
}

fn geometry_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (winding_angle(), 0.05..0.3f64, 0.002..0.02f64)
}

proptest! {
    /// Deformed kinematics invert analytically: from (γ, r) the original
    /// (s, φ) can be recovered.
    #[test]
    fn kinematics_round_trip(
        (angle, length, radius) in geometry_params(),
        cos_scale in 0.2..0.98f64,
        phi_frac in -0.4..0.4f64,
    ) {
        let geom = Geometry::new(angle, length, radius).unwrap();
        // Choose s so that (L+s)·cosΓ/L lands at cos_scale ∈ (0, 1).
        let s = length * (cos_scale / angle.cos().abs() - 1.0);
        // Choose φ as a fraction of the relaxed denominator so r stays
        // positive and finite.
        let phi = phi_frac * geom.radius_denominator_offset();
        let config = DeformedConfig::at(&geom, s, phi);
        prop_assume!(config.is_ok());
        let config = config.unwrap();
        let gamma = config.fiber_angle_rad;
        let r = config.radius_m;

        let s_back = length * (gamma.cos() / angle.cos() - 1.0);
        let phi_back = length * gamma.tan() / r - geom.radius_denominator_offset();
        prop_assert!((s_back - s).abs() < 1e-9 * length);
        prop_assert!((phi_back - phi).abs() < 1e-9 * (1.0 + phi.abs()));
    }

    /// The undeformed state maps to the as-built fiber angle and radius.
    #[test]
    fn relaxed_state_is_identity((angle, length, radius) in geometry_params()) {
        let geom = Geometry::new(angle, length, radius).unwrap();
        let config = DeformedConfig::at(&geom, 0.0, 0.0).unwrap();
        prop_assert!((config.fiber_angle_rad - angle).abs() < 1e-12);
        prop_assert!((config.radius_m - radius).abs() < 1e-12 * radius);
    }

    /// Mirrored winding gives mirrored kinematics: γ and r are odd/even
    /// under (Γ, φ) → (−Γ, −φ).
    #[test]
    fn mirrored_winding_mirrors_kinematics(
        (angle, length, radius) in geometry_params(),
        cos_scale in 0.3..0.95f64,
        phi_frac in -0.3..0.3f64,
    ) {
        let geom = Geometry::new(angle, length, radius).unwrap();
        let mirror = Geometry::new(-angle, length, radius).unwrap();
        let s = length * (cos_scale / angle.cos().abs() - 1.0);
        let phi = phi_frac * geom.radius_denominator_offset();
        let fwd = DeformedConfig::at(&geom, s, phi);
        let rev = DeformedConfig::at(&mirror, s, -phi);
        prop_assume!(fwd.is_ok() && rev.is_ok());
        let (fwd, rev) = (fwd.unwrap(), rev.unwrap());
        prop_assert!((fwd.fiber_angle_rad + rev.fiber_angle_rad).abs() < 1e-12);
        prop_assert!((fwd.radius_m - rev.radius_m).abs() < 1e-12 * radius.max(fwd.radius_m));
    }

    /// The axial pressure force changes sign exactly at the critical fiber
    /// angle: contraction below it, elongation above it.
    #[test]
    fn axial_force_sign_flips_at_critical_angle(
        r in 0.002..0.02f64,
        p in 1e3..1e5f64,
        offset in 0.01..0.5f64,
        sign in prop::bool::ANY,
    ) {
        let crit = critical_winding_angle();
        let gamma = if sign { crit + offset * (1.4 - crit) } else { crit - offset * crit };
        let force = pressure_axial_force(r, gamma, p);
        if sign {
            prop_assert!(force > 0.0, "γ above critical must elongate, got {force}");
        } else {
            prop_assert!(force < 0.0, "γ below critical must contract, got {force}");
        }
    }

    /// Pressure torque is odd in the fiber angle and always unscrews the
    /// winding: its sign is opposite the angle's.
    #[test]
    fn pressure_torque_is_odd_and_unwinds(
        r in 0.002..0.02f64,
        p in 1e3..1e5f64,
        gamma_mag in 0.1..1.4f64,
    ) {
        let plus = pressure_torque(r, gamma_mag, p);
        let minus = pressure_torque(r, -gamma_mag, p);
        prop_assert!((plus + minus).abs() <= 1e-12 * plus.abs().max(1.0));
        prop_assert!(plus < 0.0 && minus > 0.0);
    }

    /// Commanded pressure is always inside the supply limits, whatever the
    /// gains, errors, and winding sign.
    #[test]
    fn pid_output_respects_supply_limits(
        k_p in 0.0..1e6f64,
        k_i in 0.0..1e7f64,
        k_d in 0.0..1e5f64,
        p_max in 1e3..2e5f64,
        phi_d in -2.0..2.0f64,
        phi in -2.0..2.0f64,
        phi_dot in -50.0..50.0f64,
        err_int in -10.0..10.0f64,
        angle in winding_angle(),
    ) {
        let gains = PidGains::new(k_p, k_i, k_d, p_max).unwrap();
        let reference = ReferenceSample { phi_d, phi_d_dot: 0.0, phi_d_int: 0.0 };
        let p = gains.pressure(&reference, phi, phi_dot, err_int, angle);
        prop_assert!((0.0..=p_max).contains(&p), "pressure {p} outside [0, {p_max}]");
    }

    /// Cubic references meet their boundary conditions and never overshoot
    /// the endpoint band.
    #[test]
    fn cubic_reference_stays_in_band(
        phi_0 in -2.0..2.0f64,
        delta in -3.0..3.0f64,
        t_f in 0.1..10.0f64,
        frac in 0.0..1.0f64,
    ) {
        prop_assume!(delta.abs() > 1e-9);
        let phi_f = phi_0 + delta;
        let cubic = CubicTrajectory::new(phi_0, phi_f, t_f).unwrap();
        prop_assert!((cubic.sample(0.0).phi_d - phi_0).abs() < 1e-12);
        prop_assert!((cubic.sample(t_f).phi_d - phi_f).abs() < 1e-12 * (1.0 + phi_f.abs()));
        prop_assert!(cubic.sample(0.0).phi_d_dot.abs() < 1e-12);
        prop_assert!(cubic.sample(t_f).phi_d_dot.abs() < 1e-12 * (1.0 + delta.abs() / t_f));
        let mid = cubic.sample(frac * t_f).phi_d;
        let (lo, hi) = (phi_0.min(phi_f), phi_0.max(phi_f));
        let slack = 1e-12 * (1.0 + delta.abs());
        prop_assert!(mid >= lo - slack && mid <= hi + slack, "cubic left [{lo}, {hi}] at {mid}");
    }

    /// The reference's carried integral differentiates back to the
    /// setpoint (central difference, interior points only).
    #[test]
    fn reference_integral_matches_setpoint(
        phi_a in 0.1..1.5f64,
        phi_b in 0.1..1.5f64,
        duration in 0.5..3.0f64,
        frac in 0.05..0.95f64,
    ) {
        let references = [
            Reference::Constant(phi_a),
            Reference::Steps(StepSchedule::new(vec![(phi_a, duration), (phi_b, duration)]).unwrap()),
            Reference::Cubic(CubicTrajectory::new(phi_a, phi_b, duration).unwrap()),
            Reference::Chained(ChainedTrajectory::new(
                phi_a,
                &[Waypoint { target_rad: phi_b, move_duration_s: duration, dwell_s: duration }],
            ).unwrap()),
        ];
        let h = 1e-5;
        for reference in &references {
            // Stay inside the first segment/move so no kink falls in the
            // difference stencil.
            let t = (frac * duration).clamp(2.0 * h, duration - 2.0 * h);
            let derivative =
                (reference.sample(t + h).phi_d_int - reference.sample(t - h).phi_d_int) / (2.0 * h);
            let setpoint = reference.sample(t).phi_d;
            prop_assert!(
                (derivative - setpoint).abs() < 1e-6 * (1.0 + setpoint.abs()),
                "d/dt ∫φ_d = {derivative} vs φ_d = {setpoint}"
            );
        }
    }

    /// Chained trajectories are continuous in setpoint and integral at
    /// every junction, and dwells hold the target exactly.
    #[test]
    fn chained_reference_is_continuous(
        start in -1.0..1.0f64,
        t1 in 0.3..2.0f64,
        d1 in 0.1..2.0f64,
        t2 in 0.3..2.0f64,
        d2 in 0.1..2.0f64,
        target_1 in -1.5..1.5f64,
        target_2 in -1.5..1.5f64,
    ) {
        let chained = ChainedTrajectory::new(
            start,
            &[
                Waypoint { target_rad: target_1, move_duration_s: t1, dwell_s: d1 },
                Waypoint { target_rad: target_2, move_duration_s: t2, dwell_s: d2 },
            ],
        )
        .unwrap();
        let eps = 1e-9;
        for junction in [t1, t1 + d1, t1 + d1 + t2, t1 + d1 + t2 + d2] {
            let left = chained.sample(junction - eps);
            let right = chained.sample(junction + eps);
            prop_assert!((left.phi_d - right.phi_d).abs() < 1e-6);
            prop_assert!((left.phi_d_int - right.phi_d_int).abs() < 1e-6);
        }
        // Mid-dwell holds the first target with zero rate.
        let mid_dwell = chained.sample(t1 + 0.5 * d1);
        prop_assert!((mid_dwell.phi_d - target_1).abs() < 1e-12);
        prop_assert_eq!(mid_dwell.phi_d_dot, 0.0);
        // Past the schedule the last target persists.
        let past = chained.sample(t1 + d1 + t2 + d2 + 5.0);
        prop_assert!((past.phi_d - target_2).abs() < 1e-12);
    }

    /// A step schedule keeps returning its final setpoint after the
    /// schedule ends, with the integral growing linearly.
    #[test]
    fn step_schedule_persists_after_end(
        phi_a in -1.0..1.0f64,
        phi_b in -1.0..1.0f64,
        dur in 0.2..2.0f64,
        extra in 0.1..5.0f64,
    ) {
        let steps = StepSchedule::new(vec![(phi_a, dur), (phi_b, dur)]).unwrap();
        let end = steps.duration();
        let at_end = steps.sample(end);
        let later = steps.sample(end + extra);
        prop_assert!((later.phi_d - phi_b).abs() < 1e-12);
        prop_assert_eq!(later.phi_d_dot, 0.0);
        prop_assert!(
            (later.phi_d_int - at_end.phi_d_int - phi_b * extra).abs() < 1e-9 * (1.0 + end + extra)
        );
    }

    /// Degree-n polynomials yield n roots that close under conjugation and
    /// satisfy a backward-stable residual bound.
    #[test]
    fn poly_roots_conjugate_closure_and_residual(
        coeffs in prop::collection::vec(-10.0..10.0f64, 3..=7),
        leading in 0.5..5.0f64,
    ) {
        let mut poly = vec![leading];
        poly.extend(&coeffs);
        let degree = poly.len() - 1;
        let roots = poly_roots(&poly).unwrap();
        prop_assert_eq!(roots.len(), degree);

        let max_coeff = poly.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let horner = |z: Complex64| poly.iter().fold(Complex64::ZERO, |acc, &c| acc * z + c);
        for &z in &roots {
            let bound = 1e-7 * max_coeff * z.norm().max(1.0).powi(degree as i32);
            prop_assert!(horner(z).norm() <= bound, "residual at {z} exceeds {bound:.2e}");
            // The conjugate must also appear (within matching tolerance).
            let conj = z.conj();
            let nearest = roots
                .iter()
                .map(|w| (w - conj).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(
                nearest <= 1e-6 * z.norm().max(1.0),
                "conjugate of {z} missing from root set"
            );
        }
    }

    /// Planted distinct real roots are recovered by the solver.
    #[test]
    fn planted_real_roots_are_recovered(
        seeds in prop::collection::vec(0.1..20.0f64, 3..=6),
    ) {
        // Spread the seeds into strictly separated negative roots.
        let mut roots: Vec<f64> = seeds
            .iter()
            .scan(0.0f64, |acc, &gap| {
                *acc += gap + 0.1;
                Some(-*acc)
            })
            .collect();
        let mut poly = vec![1.0];
        for &r in &roots {
            let mut next = vec![0.0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            poly = next;
        }
        let mut found = poly_roots(&poly).unwrap();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        found.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (expect, got) in roots.iter().zip(&found) {
            prop_assert!(
                (got.re - expect).abs() < 1e-6 * expect.abs().max(1.0) && got.im.abs() < 1e-6,
                "planted {expect} recovered as {got}"
            );
        }
    }

    /// The closed-loop characteristic polynomial evaluates identically to
    /// den(x) + K·num(x) at arbitrary points — the alignment of the two
    /// polynomials is exact.
    #[test]
    fn closed_loop_poly_is_den_plus_k_num(
        k in 1.0..1e5f64,
        x in -100.0..100.0f64,
    ) {
        let plant = Plant {
            geometry: Geometry::new(-40.0 * DEG, 0.12, 0.007).unwrap(),
            elastomer: ElastomerParams::new(16478.0, 0.0862, 0.34, 3.97e-5).unwrap(),
            body: BodyParams::thin_ring(0.028, 0.007).unwrap(),
            loads: Loads::default(),
        };
        let gains = PidGains::new(32000.0, 1.2e6, 0.0, psi_to_pa(10.0)).unwrap();
        let tf = rotation_loop_tf(&plant, &gains, SweptGain::Proportional);
        let closed = closed_loop_poly(&tf, k).unwrap();
        let eval = |poly: &[f64]| poly.iter().fold(0.0f64, |acc, &c| acc * x + c);
        let expect = eval(&tf.den) + k * eval(&tf.num);
        let scale = closed.iter().fold(0.0f64, |m, c| m.max(c.abs())) * x.abs().max(1.0).powi(3);
        prop_assert!((eval(&closed) - expect).abs() <= 1e-12 * scale);
    }

    /// Static stiffness back-out inverts the forward static balance for
    /// arbitrary planted stiffnesses, windings, and pressures.
    #[test]
    fn stiffness_backout_inverts_forward_model(
        k_e in 2e3..3e4f64,
        k_t in 0.02..0.5f64,
        gamma_deg in prop::sample::select(vec![-70.0, -40.0, -25.0, 20.0, 35.0, 50.0, 65.0]),
        p_psi in 0.5..10.0f64,
    ) {
        let plant = Plant {
            geometry: Geometry::new(gamma_deg * DEG, 0.11, 0.004).unwrap(),
            elastomer: ElastomerParams::new(k_e, k_t, 5.0, 0.005).unwrap(),
            body: BodyParams::thin_ring(0.028, 0.004).unwrap(),
            loads: Loads::default(),
        };
        let pressure = psi_to_pa(p_psi);
        let eq = static_equilibrium(&plant, pressure);
        prop_assume!(eq.is_ok());
        let eq = eq.unwrap();
        let (k_e_hat, k_t_hat) =
            backout_stiffness(&plant.geometry, &plant.loads, pressure, eq.s_m, eq.phi_rad)
                .unwrap();
        prop_assert!((k_e_hat - k_e).abs() < 1e-6 * k_e, "k_e {k_e} → {k_e_hat}");
        prop_assert!((k_t_hat - k_t).abs() < 1e-6 * k_t, "k_t {k_t} → {k_t_hat}");
    }

    /// Least-squares fits recover a planted line from noisy samples.
    #[test]
    fn stiffness_fit_recovers_planted_slope(
        slope in 1e2..2e4f64,
        intercept_frac in -0.2..0.2f64,
        seed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x_max = 2e-2;
        let intercept = intercept_frac * slope * x_max;
        let samples: Vec<(f64, f64)> = (1..=25)
            .map(|i| {
                let x = x_max * i as f64 / 25.0;
                let noise = 1e-3 * slope * x_max * rng.random_range(-1.0..1.0);
                (x, slope * x + intercept + noise)
            })
            .collect();
        let fit = fit_stiffness(&samples, FitMode::WithIntercept).unwrap();
        prop_assert!(
            (fit.slope - slope).abs() < 0.01 * slope,
            "slope {slope} recovered as {}",
            fit.slope
        );
        prop_assert!(
            (fit.intercept - intercept).abs() < 0.01 * slope * x_max,
            "intercept {intercept} recovered as {}",
            fit.intercept
        );
    }

    /// RMSD is zero on identical traces, symmetric, and scales exactly for
    /// constant offsets.
    #[test]
    fn rmsd_basic_properties(
        values in prop::collection::vec(-1.0..1.0f64, 4..40),
        offset in 0.01..0.5f64,
        x_max in 0.5..2.0f64,
    ) {
        let identical = rmsd_displacement(&values, &values, x_max).unwrap();
        prop_assert_eq!(identical, 0.0);
        let shifted: Vec<f64> = values.iter().map(|v| v + offset).collect();
        let fwd = rmsd_displacement(&values, &shifted, x_max).unwrap();
        let rev = rmsd_displacement(&shifted, &values, x_max).unwrap();
        prop_assert!((fwd - rev).abs() < 1e-15);
        prop_assert!((fwd - offset / x_max).abs() < 1e-12);
    }

    /// One-term strain energy is zero at rest, symmetric under stretch
    /// permutation, and — because Σλ^α ≥ 3 for any volume-preserving
    /// triple — carries the sign of μ·α, so it is non-negative exactly
    /// when the parameters satisfy the usual stability convention.
    #[test]
    fn ogden_energy_rest_sign_and_symmetry(
        mu in 1e4..1e6f64,
        alpha_mag in 0.3..5.0f64,
        alpha_neg in prop::bool::ANY,
        l1 in 0.5..2.0f64,
        l2 in 0.5..2.0f64,
    ) {
        let alpha = if alpha_neg { -alpha_mag } else { alpha_mag };
        let params = OgdenParams { mu, alpha };
        let rest = ogden_energy(1.0, 1.0, 1.0, &params).unwrap();
        prop_assert_eq!(rest, 0.0);
        let l3 = 1.0 / (l1 * l2);
        let energy = ogden_energy(l1, l2, l3, &params).unwrap();
        prop_assert!(
            energy * alpha.signum() >= -1e-9 * mu,
            "energy {energy} violates sign(Ψ) = sign(μ·α)"
        );
        let permuted = ogden_energy(l3, l1, l2, &params).unwrap();
        prop_assert!((energy - permuted).abs() <= 1e-12 * energy.abs().max(mu * 1e-12));
    }

    /// Unit conversions are exact round trips.
    #[test]
    fn unit_round_trips(v in 0.001..1e4f64) {
        prop_assert!((pa_to_psi(psi_to_pa(v)) - v).abs() <= 1e-12 * v);
        prop_assert!((rad_to_deg(deg_to_rad(v)) - v).abs() <= 1e-12 * v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Closed-loop pressure stays inside the supply range along the whole
    /// trajectory, not just at the controller output.
    #[test]
    fn closed_loop_pressure_stays_in_supply(setpoint_deg in 10.0..75.0f64) {
        let plant = Plant {
            geometry: Geometry::new(-40.0 * DEG, 0.12, 0.007).unwrap(),
            elastomer: ElastomerParams::new(16478.0, 0.0862, 0.34, 3.97e-5).unwrap(),
            body: BodyParams::thin_ring(0.028, 0.007).unwrap(),
            loads: Loads::default(),
        };
        let p_max = psi_to_pa(10.0);
        let gains = PidGains::new(10342.0, 94803.0, 0.0, p_max).unwrap();
        let out = simulate_closed_loop(
            &plant,
            gains,
            Reference::Constant(setpoint_deg * DEG),
            State::default(),
            1.0,
            &Options::default(),
        )
        .unwrap();
        let series = out.sample_series(501).unwrap();
        for &p in &series.p_pa {
            prop_assert!((0.0..=p_max * (1.0 + 1e-12)).contains(&p));
        }
    }

    /// Starting at the static equilibrium, the state stays put.
    #[test]
    fn equilibrium_is_a_fixed_point(p_psi in 0.5..9.0f64) {
        let plant = Plant {
            geometry: Geometry::new(40.0 * DEG, 0.11, 0.007).unwrap(),
            elastomer: ElastomerParams::new(10110.0, 0.18, 5.0, 0.005).unwrap(),
            body: BodyParams::thin_ring(0.028, 0.007).unwrap(),
            loads: Loads::default(),
        };
        let pressure = psi_to_pa(p_psi);
        let eq = static_equilibrium(&plant, pressure).unwrap();
        let initial = State { s_m: eq.s_m, phi_rad: eq.phi_rad, ..State::default() };
        let out = simulate_constant_pressure(&plant, pressure, initial, 0.05, &Options::default())
            .unwrap();
        let last = out.final_state();
        prop_assert!((last.s_m - eq.s_m).abs() < 1e-6 * eq.s_m.abs().max(1e-4));
        prop_assert!((last.phi_rad - eq.phi_rad).abs() < 1e-6 * eq.phi_rad.abs().max(1e-4));
    }

    /// Tightening solver tolerances tightens the error against the exact
    /// damped-oscillator solution.
    #[test]
    fn tolerance_tightening_improves_accuracy(s0_mm in 2.0..15.0f64) {
        let plant = Plant {
            geometry: Geometry::new(40.0 * DEG, 0.11, 0.007).unwrap(),
            elastomer: ElastomerParams::new(10110.0, 0.18, 5.0, 0.005).unwrap(),
            body: BodyParams::thin_ring(0.028, 0.007).unwrap(),
            loads: Loads::default(),
        };
        let s0 = s0_mm * 1e-3;
        let (k_e, c_e, m) = (10110.0f64, 5.0f64, 0.028f64);
        let zeta = c_e / (2.0 * (k_e * m).sqrt());
        let omega_n = (k_e / m).sqrt();
        let omega_d = omega_n * (1.0 - zeta * zeta).sqrt();
        let t_end = 0.05;
        let exact = |t: f64| {
            s0 * (-zeta * omega_n * t).exp()
                * ((omega_d * t).cos() + zeta * omega_n / omega_d * (omega_d * t).sin())
        };
        let max_err = |opts: &Options| {
            let out = simulate_constant_pressure(
                &plant,
                0.0,
                State { s_m: s0, ..State::default() },
                t_end,
                opts,
            )
            .unwrap();
            (0..=400)
                .map(|i| {
                    let t = t_end * i as f64 / 400.0;
                    (out.state_at(t).unwrap().s_m - exact(t)).abs() / s0
                })
                .fold(0.0f64, f64::max)
        };
        let loose = max_err(&Options::default());
        let tight = max_err(&Options {
            tol: Tolerances::new(1e-10, 1e-13),
            ..Options::default()
        });
        prop_assert!(loose < 1e-3, "default-tolerance error {loose:.2e} too large");
        prop_assert!(tight < 1e-8, "tight-tolerance error {tight:.2e} too large");
        prop_assert!(tight < loose, "tightening tolerances did not reduce error");
    }
}

/// Deterministic companion checks for the randomized suite: the RNG-seeded
/// fit property above uses uniform noise; this pins one seed so a change in
/// RNG behavior is caught as a plain diff rather than a shrink report.
#[test]
fn seeded_fit_is_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let first: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let second: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
    assert_eq!(first, second);
}

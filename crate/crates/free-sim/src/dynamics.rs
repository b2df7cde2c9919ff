//! Lumped-parameter FREE dynamics.
//!
//! The actuator is reduced to two degrees of freedom measured at the moving
//! end cap: elongation `s` and rotation `φ`. An attached rigid payload
//! carries the translational mass and the rotary inertia; the elastomer
//! contributes linear stiffness and viscous damping on both channels; the
//! pressure enters through the fiber-constrained force and torque from
//! [`crate::geometry`]. The resulting equations of motion are
//!
//! ```text
//! m·s̈ = F_l − k_e·s − c_e·ṡ + πr²P(1 − 2cot²γ)
//! I·φ̈ = M_l − k_t·φ − c_t·φ̇ − 2πr³P·cot γ
//! ```
//!
//! with `γ(s)` and `r(s, φ)` the deformed fiber angle and radius. The state
//! vector is `[s, φ, ṡ, φ̇, ∫φ dt]`; the trailing integral is carried by the
//! integrator itself so the PID integral channel sees exactly the same
//! quadrature error as the motion it acts on — none beyond the solver
//! tolerance.
//!
//! Besides time simulation ([`simulate`]) the module solves the static force
//! balance directly ([`static_equilibrium`]) with a damped Newton iteration,
//! seeded from the exact zero-pressure solution and falling back to pressure
//! continuation when a cold start stalls. Near the fiber-geometry fold —
//! shallow winding angles at high pressure, where the radial blow-up
//! overwhelms the elastomer — no static balance exists at all, and the
//! search reports that honestly instead of returning a stale iterate.

use crate::control::{PidGains, Reference};
use crate::geometry::{
    pressure_axial_force, pressure_torque, DeformedConfig, ElastomerParams, Geometry, GeometryError,
};
use crate::ode::{self, Options, Solution};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("time integration failed: {0}")]
    Integration(#[from] ode::SolveError<GeometryError>),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
    #[error("pressure must be non-negative and finite, got {0} Pa")]
    InvalidPressure(f64),
    #[error("resampling needs at least two points, got {0}")]
    InvalidSampleCount(usize),
    #[error("run was integrated without dense output; cannot resample")]
    NoDenseOutput,
    #[error(
        "no static balance found at P = {pressure_pa} Pa (best residual norm {residual:.3e}); \
         the configuration may sit past the radial fold where no equilibrium exists"
    )]
    NoEquilibrium { pressure_pa: f64, residual: f64 },
}

/// Payload inertia attached to the moving end cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyParams {
    pub mass_kg: f64,
    pub inertia_kg_m2: f64,
}

impl BodyParams {
    pub fn new(mass_kg: f64, inertia_kg_m2: f64) -> Result<Self, DynamicsError> {
        for (name, value) in [("mass_kg", mass_kg), ("inertia_kg_m2", inertia_kg_m2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(DynamicsError::NonPositiveParam { name, value });
            }
        }
        Ok(Self {
            mass_kg,
            inertia_kg_m2,
        })
    }

    /// End-cap modeled as a thin ring of the tube radius: I = m·r².
    pub fn thin_ring(mass_kg: f64, radius_m: f64) -> Result<Self, DynamicsError> {
        if !(radius_m.is_finite() && radius_m > 0.0) {
            return Err(DynamicsError::NonPositiveParam {
                name: "radius_m",
                value: radius_m,
            });
        }
        Self::new(mass_kg, mass_kg * radius_m * radius_m)
    }
}

/// Constant external load on the end cap.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Loads {
    /// Axial force F_l (N), positive along elongation.
    pub axial_n: f64,
    /// Torque M_l (N·m), positive along rotation.
    pub torque_nm: f64,
}

/// Full simulation state: elongation, rotation, their rates, and the running
/// rotation integral used by the PID integral channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub s_m: f64,
    pub phi_rad: f64,
    pub s_dot: f64,
    pub phi_dot: f64,
    /// ∫₀ᵗ φ dτ, integrated alongside the motion.
    pub err_int: f64,
}

impl State {
    pub fn to_array(self) -> [f64; 5] {
        [
            self.s_m,
            self.phi_rad,
            self.s_dot,
            self.phi_dot,
            self.err_int,
        ]
    }

    pub fn from_array(y: [f64; 5]) -> Self {
        Self {
            s_m: y[0],
            phi_rad: y[1],
            s_dot: y[2],
            phi_dot: y[3],
            err_int: y[4],
        }
    }
}

/// Everything fixed about a FREE and its payload: geometry, elastomer,
/// inertia, and external load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub geometry: Geometry,
    pub elastomer: ElastomerParams,
    pub body: BodyParams,
    pub loads: Loads,
}

impl Plant {
    /// Accelerations (s̈, φ̈) at the given configuration and pressure.
    pub fn accelerations(
        &self,
        s: f64,
        phi: f64,
        s_dot: f64,
        phi_dot: f64,
        pressure_pa: f64,
    ) -> Result<(f64, f64), GeometryError> {
        let cfg = DeformedConfig::at(&self.geometry, s, phi)?;
        let force = self.loads.axial_n
            + self.elastomer.force(s, s_dot)
            + pressure_axial_force(cfg.radius_m, cfg.fiber_angle_rad, pressure_pa);
        let torque = self.loads.torque_nm
            + self.elastomer.moment(phi, phi_dot)
            + pressure_torque(cfg.radius_m, cfg.fiber_angle_rad, pressure_pa);
        Ok((force / self.body.mass_kg, torque / self.body.inertia_kg_m2))
    }

    /// State derivative for the five-component state vector.
    pub fn rhs(&self, state: &State, pressure_pa: f64) -> Result<[f64; 5], GeometryError> {
        let (s_ddot, phi_ddot) = self.accelerations(
            state.s_m,
            state.phi_rad,
            state.s_dot,
            state.phi_dot,
            pressure_pa,
        )?;
        Ok([state.s_dot, state.phi_dot, s_ddot, phi_ddot, state.phi_rad])
    }
}

/// Pressure input: either held constant or produced by the rotation PID.
#[derive(Debug, Clone, PartialEq)]
pub enum Pressure {
    Constant(f64),
    Pid {
        gains: PidGains,
        reference: Reference,
    },
}

impl Pressure {
    /// Commanded pressure at time `t` in the given state.
    pub fn at(&self, t: f64, state: &State, winding_angle_rad: f64) -> f64 {
        match self {
            Pressure::Constant(p) => *p,
            Pressure::Pid { gains, reference } => gains.pressure(
                &reference.sample(t),
                state.phi_rad,
                state.phi_dot,
                state.err_int,
                winding_angle_rad,
            ),
        }
    }

    pub fn reference(&self) -> Option<&Reference> {
        match self {
            Pressure::Constant(_) => None,
            Pressure::Pid { reference, .. } => Some(reference),
        }
    }
}

/// Uniformly resampled run history, one row per instant.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub s_m: Vec<f64>,
    pub phi_rad: Vec<f64>,
    pub s_dot: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub p_pa: Vec<f64>,
    pub gamma_rad: Vec<f64>,
    pub r_m: Vec<f64>,
    /// Reference rotation, present only for closed-loop runs.
    pub phi_d_rad: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// A completed simulation: the plant and input it ran with, plus the solver
/// trace (with dense output for resampling).
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub plant: Plant,
    pub pressure: Pressure,
    pub solution: Solution<5>,
}

impl SimOutput {
    pub fn final_state(&self) -> State {
        State::from_array(self.solution.last().1)
    }

    pub fn t_end(&self) -> f64 {
        self.solution.last().0
    }

    /// State interpolated at `t` (requires the run to have kept dense output).
    pub fn state_at(&self, t: f64) -> Option<State> {
        self.solution.sample(t).map(State::from_array)
    }

    /// Resample the run on a uniform grid of `n` points spanning [0, t_end],
    /// recomputing pressure and deformed geometry at each instant.
    pub fn sample_series(&self, n: usize) -> Result<TimeSeries, DynamicsError> {
        if n < 2 {
            return Err(DynamicsError::InvalidSampleCount(n));
        }
        if self.solution.dense.is_none() {
            return Err(DynamicsError::NoDenseOutput);
        }
        let t_end = self.t_end();
        let times: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
        self.series_at(&times)
    }

    /// Resample at explicit instants within [0, t_end].
    pub fn series_at(&self, times: &[f64]) -> Result<TimeSeries, DynamicsError> {
        let winding = self.plant.geometry.winding_angle_rad;
        let mut ts = TimeSeries {
            t: Vec::with_capacity(times.len()),
            s_m: Vec::with_capacity(times.len()),
            phi_rad: Vec::with_capacity(times.len()),
            s_dot: Vec::with_capacity(times.len()),
            phi_dot: Vec::with_capacity(times.len()),
            p_pa: Vec::with_capacity(times.len()),
            gamma_rad: Vec::with_capacity(times.len()),
            r_m: Vec::with_capacity(times.len()),
            phi_d_rad: self
                .pressure
                .reference()
                .map(|_| Vec::with_capacity(times.len())),
        };
        for &t in times {
            let state = self.state_at(t).ok_or(DynamicsError::NoDenseOutput)?;
            let cfg = DeformedConfig::at(&self.plant.geometry, state.s_m, state.phi_rad)?;
            ts.t.push(t);
            ts.s_m.push(state.s_m);
            ts.phi_rad.push(state.phi_rad);
            ts.s_dot.push(state.s_dot);
            ts.phi_dot.push(state.phi_dot);
            ts.p_pa.push(self.pressure.at(t, &state, winding));
            ts.gamma_rad.push(cfg.fiber_angle_rad);
            ts.r_m.push(cfg.radius_m);
            if let (Some(col), Some(reference)) = (ts.phi_d_rad.as_mut(), self.pressure.reference())
            {
                col.push(reference.sample(t).phi_d);
            }
        }
        Ok(ts)
    }
}

/// Integrate the plant from `initial` to `t_end` under the given pressure
/// input.
pub fn simulate(
    plant: &Plant,
    pressure: &Pressure,
    initial: State,
    t_end: f64,
    opts: &Options,
) -> Result<SimOutput, DynamicsError> {
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
            plant.rhs(&state, p)
        },
        0.0,
        t_end,
        initial.to_array(),
        opts,
    )?;
    Ok(SimOutput {
        plant: *plant,
        pressure: pressure.clone(),
        solution,
    })
}

/// Convenience wrapper: constant-pressure run from rest.
pub fn simulate_constant_pressure(
    plant: &Plant,
    pressure_pa: f64,
    initial: State,
    t_end: f64,
    opts: &Options,
) -> Result<SimOutput, DynamicsError> {
    simulate(
        plant,
        &Pressure::Constant(pressure_pa),
        initial,
        t_end,
        opts,
    )
}

/// Convenience wrapper: closed-loop run under the rotation PID.
pub fn simulate_closed_loop(
    plant: &Plant,
    gains: PidGains,
    reference: Reference,
    initial: State,
    t_end: f64,
    opts: &Options,
) -> Result<SimOutput, DynamicsError> {
    simulate(
        plant,
        &Pressure::Pid { gains, reference },
        initial,
        t_end,
        opts,
    )
}

/// A static force balance and the residual it was accepted at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub s_m: f64,
    pub phi_rad: f64,
    /// Remaining axial imbalance (N).
    pub residual_force_n: f64,
    /// Remaining torque imbalance (N·m).
    pub residual_torque_nm: f64,
    /// Total Newton iterations spent (all continuation stages included).
    pub iterations: usize,
}

/// Static balance residual (F, M) at a trial configuration: the right-hand
/// sides of the equations of motion with all rates zero.
pub fn static_residual(
    plant: &Plant,
    s: f64,
    phi: f64,
    pressure_pa: f64,
) -> Result<(f64, f64), GeometryError> {
    let cfg = DeformedConfig::at(&plant.geometry, s, phi)?;
    let f = plant.loads.axial_n - plant.elastomer.k_e * s
        + pressure_axial_force(cfg.radius_m, cfg.fiber_angle_rad, pressure_pa);
    let m = plant.loads.torque_nm - plant.elastomer.k_t * phi
        + pressure_torque(cfg.radius_m, cfg.fiber_angle_rad, pressure_pa);
    Ok((f, m))
}

/// Residual plus its analytic Jacobian with respect to (s, φ).
fn residual_and_jacobian(
    plant: &Plant,
    s: f64,
    phi: f64,
    p: f64,
) -> Result<([f64; 2], [[f64; 2]; 2]), GeometryError> {
    let geom = &plant.geometry;
    let cfg = DeformedConfig::at(geom, s, phi)?;
    let (gamma, r) = (cfg.fiber_angle_rad, cfg.radius_m);
    let (sin_g, cos_g) = gamma.sin_cos();
    let cot = cos_g / sin_g;
    let csc2 = 1.0 / (sin_g * sin_g);
    let den = geom.radius_denominator_offset() + phi;
    // γ = ±arccos((L+s)cosΓ/L) ⇒ dγ/ds = −cosΓ/(L sinγ); the winding sign
    // cancels against the sign of sinγ.
    let dgamma_ds = -geom.winding_angle_rad.cos() / (geom.length_m * sin_g);
    // r = L tanγ / den ⇒ ∂r/∂s = L sec²γ·γ′/den, ∂r/∂φ = −r/den.
    let dr_ds = geom.length_m * (1.0 / (cos_g * cos_g)) * dgamma_ds / den;
    let dr_dphi = -r / den;

    let g1 = plant.loads.axial_n - plant.elastomer.k_e * s + pressure_axial_force(r, gamma, p);
    let g2 = plant.loads.torque_nm - plant.elastomer.k_t * phi + pressure_torque(r, gamma, p);

    let pi_p = std::f64::consts::PI * p;
    let d1s = -plant.elastomer.k_e
        + pi_p * (2.0 * r * dr_ds * (1.0 - 2.0 * cot * cot) + 4.0 * r * r * cot * csc2 * dgamma_ds);
    let d1p = pi_p * 2.0 * r * dr_dphi * (1.0 - 2.0 * cot * cot);
    let d2s = -2.0 * pi_p * (3.0 * r * r * dr_ds * cot - r * r * r * csc2 * dgamma_ds);
    let d2p = -plant.elastomer.k_t - 6.0 * pi_p * r * r * dr_dphi * cot;
    Ok(([g1, g2], [[d1s, d1p], [d2s, d2p]]))
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// One damped-Newton solve from `x0`; returns the iterate and iteration
/// count, or `None` if it stalled.
fn newton_from(plant: &Plant, p: f64, x0: [f64; 2]) -> Option<([f64; 2], usize)> {
    const TARGET: f64 = 1e-12;
    const ACCEPTABLE: f64 = 1e-10;
    const MAX_ITER: usize = 100;
    let mut x = x0;
    let (mut res, mut jac) = residual_and_jacobian(plant, x[0], x[1], p).ok()?;
    for it in 0..MAX_ITER {
        let n0 = norm2(res);
        if n0 < TARGET {
            return Some((x, it));
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = [
            (-res[0] * jac[1][1] + res[1] * jac[0][1]) / det,
            (-res[1] * jac[0][0] + res[0] * jac[1][0]) / det,
        ];
        // Backtracking line search: demand a fixed fraction of the Newton
        // decrease; geometry-domain violations just shorten the step.
        let mut lambda = 1.0;
        let mut advanced = false;
        while lambda > 1e-12 {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            if let Ok((r_trial, j_trial)) = residual_and_jacobian(plant, trial[0], trial[1], p) {
                if norm2(r_trial) < (1.0 - 0.25 * lambda) * n0 {
                    x = trial;
                    res = r_trial;
                    jac = j_trial;
                    advanced = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !advanced {
            return None;
        }
    }
    (norm2(res) < ACCEPTABLE).then_some((x, MAX_ITER))
}

/// Solve the static force balance at the given pressure.
///
/// The iteration is seeded with the exact zero-pressure solution
/// `(F_l/k_e, M_l/k_t)` and, if a cold start stalls, retried with pressure
/// continuation in 2, 4, then 8 stages. Requires strictly positive
/// stiffnesses (they define both the seed and a well-posed balance).
pub fn static_equilibrium(plant: &Plant, pressure_pa: f64) -> Result<Equilibrium, DynamicsError> {
    if !(pressure_pa.is_finite() && pressure_pa >= 0.0) {
        return Err(DynamicsError::InvalidPressure(pressure_pa));
    }
    for (name, value) in [("k_e", plant.elastomer.k_e), ("k_t", plant.elastomer.k_t)] {
        if value <= 0.0 {
            return Err(DynamicsError::NonPositiveParam { name, value });
        }
    }
    let seed = [
        plant.loads.axial_n / plant.elastomer.k_e,
        plant.loads.torque_nm / plant.elastomer.k_t,
    ];

    let mut best_residual = f64::INFINITY;
    let mut total_iters = 0usize;
    let attempt = |stages: usize| -> Option<([f64; 2], usize)> {
        let mut x = seed;
        let mut iters = 0usize;
        for k in 1..=stages {
            let p_k = pressure_pa * k as f64 / stages as f64;
            let (x_k, it) = newton_from(plant, p_k, x)?;
            x = x_k;
            iters += it;
        }
        Some((x, iters))
    };

    for stages in [1usize, 2, 4, 8] {
        if let Some((x, iters)) = attempt(stages) {
            total_iters += iters;
            let (f, m) = static_residual(plant, x[0], x[1], pressure_pa)?;
            return Ok(Equilibrium {
                s_m: x[0],
                phi_rad: x[1],
                residual_force_n: f,
                residual_torque_nm: m,
                iterations: total_iters,
            });
        }
        // Track how close the best failed attempt got, for the error report.
        if let Ok((f, m)) = static_residual(plant, seed[0], seed[1], pressure_pa) {
            best_residual = best_residual.min(norm2([f, m]));
        }
    }
    Err(DynamicsError::NoEquilibrium {
        pressure_pa,
        residual: best_residual,
    })
}

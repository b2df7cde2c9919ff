//! Pressure PID law and rotation references.
//!
//! The controller regulates the end-cap rotation φ with pressure as the only
//! actuation, and pressure is one-sided: the FREE can only be inflated. Two
//! conventions are folded into one law here. The PID expression
//!
//! ```text
//! u = K_p(φ_d − φ) + K_d(φ̇_d − φ̇) + K_i(∫φ_d − ∫φ)
//! ```
//!
//! is mapped to pressure as `P = clamp(−sign(cot Γ)·u, 0, P_max)`: a
//! positively wound FREE rotates negative under pressure, so its errors must
//! be inverted, while a negatively wound FREE takes `u` directly. Saturation
//! at `P_max` (and at zero — no vacuum) is the only nonlinearity.
//!
//! References carry three channels: the setpoint φ_d, its rate, and its
//! running integral ∫φ_d dt in closed form. Closed-form integrals avoid a
//! quadrature error source entirely — the integral channel of the controller
//! compares two exactly-integrated quantities.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("{name} must be non-negative and finite, got {value}")]
    NegativeGain { name: &'static str, value: f64 },
    #[error("pressure ceiling must be positive and finite, got {0} Pa")]
    InvalidCeiling(f64),
    #[error("segment/move duration must be positive and finite, got {0} s")]
    InvalidDuration(f64),
    #[error("dwell must be non-negative and finite, got {0} s")]
    InvalidDwell(f64),
    #[error("reference needs at least one segment")]
    Empty,
}

/// PID gains in pressure units, plus the saturation ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    /// Proportional gain, Pa/rad.
    pub k_p: f64,
    /// Integral gain, Pa/(rad·s).
    pub k_i: f64,
    /// Derivative gain, Pa·s/rad.
    pub k_d: f64,
    /// Saturation ceiling, Pa.
    pub p_max: f64,
}

impl PidGains {
    pub fn new(k_p: f64, k_i: f64, k_d: f64, p_max: f64) -> Result<Self, ControlError> {
        for (name, value) in [("k_p", k_p), ("k_i", k_i), ("k_d", k_d)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ControlError::NegativeGain { name, value });
            }
        }
        if !(p_max.is_finite() && p_max > 0.0) {
            return Err(ControlError::InvalidCeiling(p_max));
        }
        Ok(Self {
            k_p,
            k_i,
            k_d,
            p_max,
        })
    }

    /// Gains with the conventional 10 psi ceiling.
    pub fn with_default_ceiling(k_p: f64, k_i: f64, k_d: f64) -> Result<Self, ControlError> {
        Self::new(k_p, k_i, k_d, 10.0 * crate::units::PA_PER_PSI)
    }

    /// Commanded pressure for the current tracking errors.
    ///
    /// `err_int` is the plant-side running integral ∫φ dt; the reference
    /// supplies its own integral channel, so the integral error is the
    /// difference of two closed-form quantities.
    pub fn pressure(
        &self,
        reference: &ReferenceSample,
        phi: f64,
        phi_dot: f64,
        err_int: f64,
        winding_angle_rad: f64,
    ) -> f64 {
        let u = self.k_p * (reference.phi_d - phi)
            + self.k_d * (reference.phi_d_dot - phi_dot)
            + self.k_i * (reference.phi_d_int - err_int);
        (-winding_angle_rad.signum() * u).clamp(0.0, self.p_max)
    }
}

/// One instant of a rotation reference: setpoint, rate, and exact integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub phi_d: f64,
    pub phi_d_dot: f64,
    /// ∫₀ᵗ φ_d dτ, carried in closed form.
    pub phi_d_int: f64,
}

/// Cubic rotation reference φ(t) = a₀ + a₂t² + a₃t³ meeting position and
/// zero-velocity constraints at both ends of the move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicTrajectory {
    pub phi_0: f64,
    pub phi_f: f64,
    pub t_f: f64,
    /// [a₀, a₁, a₂, a₃] with a₁ = 0 by the start-at-rest constraint.
    pub coeffs: [f64; 4],
}

impl CubicTrajectory {
    /// Solve the four boundary constraints for the cubic's coefficients:
    /// a₀ = φ₀, a₁ = 0, a₂ = 3Δ/t_f², a₃ = −2Δ/t_f³ with Δ = φ_f − φ₀.
    pub fn new(phi_0: f64, phi_f: f64, t_f: f64) -> Result<Self, ControlError> {
        if !(t_f.is_finite() && t_f > 0.0) {
            return Err(ControlError::InvalidDuration(t_f));
        }
        let delta = phi_f - phi_0;
        let coeffs = [
            phi_0,
            0.0,
            3.0 * delta / (t_f * t_f),
            -2.0 * delta / (t_f * t_f * t_f),
        ];
        Ok(Self {
            phi_0,
            phi_f,
            t_f,
            coeffs,
        })
    }

    /// Reference channels at time `t`; holds φ_f (integral continuing
    /// linearly) once the move is over.
    pub fn sample(&self, t: f64) -> ReferenceSample {
        let delta = self.phi_f - self.phi_0;
        let (tf, tf2, tf3) = (
            self.t_f,
            self.t_f * self.t_f,
            self.t_f * self.t_f * self.t_f,
        );
        if t <= tf {
            let [a0, _, a2, a3] = self.coeffs;
            ReferenceSample {
                phi_d: a0 + a2 * t * t + a3 * t * t * t,
                phi_d_dot: 2.0 * a2 * t + 3.0 * a3 * t * t,
                phi_d_int: self.phi_0 * t + delta * (t.powi(3) / tf2 - t.powi(4) / (2.0 * tf3)),
            }
        } else {
            // ∫ over the whole move collapses to the mean level times t_f.
            let int_move = 0.5 * (self.phi_0 + self.phi_f) * tf;
            ReferenceSample {
                phi_d: self.phi_f,
                phi_d_dot: 0.0,
                phi_d_int: int_move + self.phi_f * (t - tf),
            }
        }
    }
}

/// Piecewise-constant setpoint schedule: (setpoint, duration) segments, the
/// last setpoint held forever after.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSchedule {
    segments: Vec<(f64, f64)>,
    /// Segment end times and the exact integral accumulated up to each end.
    boundaries: Vec<(f64, f64)>,
}

impl StepSchedule {
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self, ControlError> {
        if segments.is_empty() {
            return Err(ControlError::Empty);
        }
        let mut boundaries = Vec::with_capacity(segments.len());
        let (mut t_acc, mut int_acc) = (0.0, 0.0);
        for &(setpoint, duration) in &segments {
            if !(duration.is_finite() && duration > 0.0) {
                return Err(ControlError::InvalidDuration(duration));
            }
            t_acc += duration;
            int_acc += setpoint * duration;
            boundaries.push((t_acc, int_acc));
        }
        Ok(Self {
            segments,
            boundaries,
        })
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    /// Total scheduled duration (the last setpoint persists past it).
    pub fn duration(&self) -> f64 {
        self.boundaries.last().map_or(0.0, |&(t, _)| t)
    }

    pub fn sample(&self, t: f64) -> ReferenceSample {
        let idx = self.boundaries.partition_point(|&(t_end, _)| t_end <= t);
        let (setpoint, t_start, int_start) = if idx < self.segments.len() {
            let (t_start, int_start) = if idx == 0 {
                (0.0, 0.0)
            } else {
                self.boundaries[idx - 1]
            };
            (self.segments[idx].0, t_start, int_start)
        } else {
            let (t_end, int_end) = *self.boundaries.last().unwrap();
            (self.segments.last().unwrap().0, t_end, int_end)
        };
        ReferenceSample {
            phi_d: setpoint,
            phi_d_dot: 0.0,
            phi_d_int: int_start + setpoint * (t - t_start),
        }
    }
}

/// One leg of a chained trajectory: move to `target_rad` over
/// `move_duration_s`, then hold for `dwell_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub target_rad: f64,
    pub move_duration_s: f64,
    pub dwell_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PhaseKind {
    Move(CubicTrajectory),
    Hold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Phase {
    t_start: f64,
    t_end: f64,
    int_start: f64,
    kind: PhaseKind,
}

/// C¹-continuous concatenation of cubic moves and holds through a list of
/// waypoints. Every junction has zero reference velocity by construction, so
/// position and rate are continuous and the integral channel accumulates
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainedTrajectory {
    phases: Vec<Phase>,
    final_level: f64,
}

impl ChainedTrajectory {
    pub fn new(start_rad: f64, waypoints: &[Waypoint]) -> Result<Self, ControlError> {
        if waypoints.is_empty() {
            return Err(ControlError::Empty);
        }
        let mut phases = Vec::new();
        let (mut t_acc, mut int_acc, mut level) = (0.0, 0.0, start_rad);
        for wp in waypoints {
            if !(wp.move_duration_s.is_finite() && wp.move_duration_s > 0.0) {
                return Err(ControlError::InvalidDuration(wp.move_duration_s));
            }
            if !(wp.dwell_s.is_finite() && wp.dwell_s >= 0.0) {
                return Err(ControlError::InvalidDwell(wp.dwell_s));
            }
            let cubic = CubicTrajectory::new(level, wp.target_rad, wp.move_duration_s)?;
            phases.push(Phase {
                t_start: t_acc,
                t_end: t_acc + wp.move_duration_s,
                int_start: int_acc,
                kind: PhaseKind::Move(cubic),
            });
            t_acc += wp.move_duration_s;
            int_acc += 0.5 * (level + wp.target_rad) * wp.move_duration_s;
            level = wp.target_rad;
            if wp.dwell_s > 0.0 {
                phases.push(Phase {
                    t_start: t_acc,
                    t_end: t_acc + wp.dwell_s,
                    int_start: int_acc,
                    kind: PhaseKind::Hold(level),
                });
                t_acc += wp.dwell_s;
                int_acc += level * wp.dwell_s;
            }
        }
        Ok(Self {
            phases,
            final_level: level,
        })
    }

    /// End of the last scheduled phase (the final level holds past it).
    pub fn duration(&self) -> f64 {
        self.phases.last().map_or(0.0, |p| p.t_end)
    }

    pub fn sample(&self, t: f64) -> ReferenceSample {
        let idx = self.phases.partition_point(|p| p.t_end <= t);
        if idx >= self.phases.len() {
            let last = self.phases.last().unwrap();
            let int_end = match last.kind {
                PhaseKind::Move(c) => last.int_start + 0.5 * (c.phi_0 + c.phi_f) * c.t_f,
                PhaseKind::Hold(level) => last.int_start + level * (last.t_end - last.t_start),
            };
            return ReferenceSample {
                phi_d: self.final_level,
                phi_d_dot: 0.0,
                phi_d_int: int_end + self.final_level * (t - last.t_end),
            };
        }
        let phase = &self.phases[idx];
        let local = t - phase.t_start;
        match phase.kind {
            PhaseKind::Move(c) => {
                let s = c.sample(local);
                ReferenceSample {
                    phi_d_int: phase.int_start + s.phi_d_int,
                    ..s
                }
            }
            PhaseKind::Hold(level) => ReferenceSample {
                phi_d: level,
                phi_d_dot: 0.0,
                phi_d_int: phase.int_start + level * local,
            },
        }
    }
}

/// A rotation reference of any supported shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Fixed setpoint from t = 0.
    Constant(f64),
    Steps(StepSchedule),
    Cubic(CubicTrajectory),
    Chained(ChainedTrajectory),
}

impl Reference {
    pub fn sample(&self, t: f64) -> ReferenceSample {
        match self {
            Reference::Constant(phi_d) => ReferenceSample {
                phi_d: *phi_d,
                phi_d_dot: 0.0,
                phi_d_int: phi_d * t,
            },
            Reference::Steps(s) => s.sample(t),
            Reference::Cubic(c) => c.sample(t),
            Reference::Chained(c) => c.sample(t),
        }
    }
}

//! Kinematics and pressure force terms of a single FREE.
//!
//! A FREE is described in its relaxed state by the winding angle Γ, length L,
//! and radius R ([`Geometry`]). Under an elongation `s` and end-cap rotation
//! `φ` the inextensible fibers force the deformed fiber angle γ and radius r
//! to follow
//!
//! ```text
//! γ = arccos((L + s)·cos Γ / L)          (same sign family as Γ)
//! r = L·tan γ / (L·tan Γ / R + φ)
//! ```
//!
//! Internal pressure then acts on the end cap and through the fiber tension,
//! producing a net axial force π r² P (1 − 2 cot² γ) and a torque
//! −2π r³ P cot γ about the tube axis. The sign convention keeps Γ signed:
//! a positive winding angle rotates the end cap in the negative direction
//! under pressure, and mirroring Γ mirrors the torque.
//!
//! All angles are radians, all lengths meters, all pressures pascals.

use thiserror::Error;

/// Errors from kinematic evaluation or parameter validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("winding angle must satisfy 0 < |Γ| < π/2, got {0} rad")]
    WindingAngle(f64),
    #[error("length must be positive and finite, got {0} m")]
    Length(f64),
    #[error("radius must be positive and finite, got {0} m")]
    Radius(f64),
    #[error("{name} must be non-negative and finite, got {value}")]
    NegativeParam { name: &'static str, value: f64 },
    #[error("fiber inextensibility violated at s = {s} m: (L+s)·cosΓ/L = {arg} > 1")]
    OverElongated { s: f64, arg: f64 },
    #[error("tube over-contracted at s = {s} m: (L+s)·cosΓ/L = {arg} ≤ 0")]
    OverContracted { s: f64, arg: f64 },
    #[error("rotation φ = {phi} rad puts the radius denominator at {den} (singular)")]
    Singular { phi: f64, den: f64 },
    #[error("rotation φ = {phi} rad is beyond the radius pole (r = {r} m ≤ 0)")]
    RadiusCollapse { phi: f64, r: f64 },
    #[error("fiber angle γ = 0 has no defined fiber tension")]
    ZeroFiberAngle,
}

/// Relaxed description of a FREE: winding angle Γ (signed), length L, radius R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Winding angle Γ in radians, signed; 0 < |Γ| < π/2.
    pub winding_angle_rad: f64,
    /// Relaxed length L in meters, > 0.
    pub length_m: f64,
    /// Relaxed radius R in meters, > 0.
    pub radius_m: f64,
}

impl Geometry {
    pub fn new(
        winding_angle_rad: f64,
        length_m: f64,
        radius_m: f64,
    ) -> Result<Self, GeometryError> {
        if !winding_angle_rad.is_finite()
            || winding_angle_rad == 0.0
            || winding_angle_rad.abs() >= std::f64::consts::FRAC_PI_2
        {
            return Err(GeometryError::WindingAngle(winding_angle_rad));
        }
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(GeometryError::Length(length_m));
        }
        if !(radius_m.is_finite() && radius_m > 0.0) {
            return Err(GeometryError::Radius(radius_m));
        }
        Ok(Self {
            winding_angle_rad,
            length_m,
            radius_m,
        })
    }

    /// Sign of the winding angle (= sign of cot Γ for |Γ| < π/2).
    ///
    /// The pressure torque drives φ opposite to this sign, which is what the
    /// controller's sign rule compensates for.
    pub fn winding_sign(&self) -> f64 {
        self.winding_angle_rad.signum()
    }

    /// The constant part of the radius denominator, L·tan Γ / R.
    ///
    /// The deformed radius diverges as φ approaches the negative of this
    /// value, so it sets both the admissible rotation range and the relative
    /// singularity guard.
    pub fn radius_denominator_offset(&self) -> f64 {
        self.length_m * self.winding_angle_rad.tan() / self.radius_m
    }

    /// The lumped model treats the wall as thin; this reports whether the
    /// tube is stubby enough (R > L/10) that the assumption is questionable.
    /// Construction never fails on it — the caller decides whether to warn.
    pub fn violates_thin_tube_assumption(&self) -> bool {
        self.radius_m > self.length_m / 10.0
    }

    /// Deformed fiber angle γ for an elongation s.
    ///
    /// Inextensible fibers tie the helix pitch to the tube length:
    /// γ = arccos((L+s)·cosΓ/L), carried in Γ's sign family. Over-elongation
    /// (argument > 1) would require the fibers to stretch; over-contraction
    /// (argument ≤ 0) would fold the helix past 90°. Both are rejected.
    pub fn deformed_fiber_angle(&self, s: f64) -> Result<f64, GeometryError> {
        let arg = (self.length_m + s) * self.winding_angle_rad.cos() / self.length_m;
        if arg > 1.0 {
            return Err(GeometryError::OverElongated { s, arg });
        }
        if arg <= 0.0 {
            return Err(GeometryError::OverContracted { s, arg });
        }
        Ok(self.winding_sign() * arg.acos())
    }

    /// Deformed radius r for a fiber angle γ and rotation φ.
    ///
    /// r = L·tanγ / (L·tanΓ/R + φ). The denominator is guarded relative to
    /// its relaxed value (|den| > 1e−9·|L·tanΓ/R|), and rotations past the
    /// pole (which would flip r negative) are rejected.
    pub fn deformed_radius(&self, gamma: f64, phi: f64) -> Result<f64, GeometryError> {
        let den0 = self.radius_denominator_offset();
        let den = den0 + phi;
        if den.abs() <= 1e-9 * den0.abs() {
            return Err(GeometryError::Singular { phi, den });
        }
        let r = self.length_m * gamma.tan() / den;
        if r <= 0.0 {
            return Err(GeometryError::RadiusCollapse { phi, r });
        }
        Ok(r)
    }
}

/// Deformed configuration of a FREE at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedConfig {
    /// Deformed fiber angle γ (radians, Γ's sign family).
    pub fiber_angle_rad: f64,
    /// Deformed radius r (meters, > 0).
    pub radius_m: f64,
    /// Elongation s (meters; negative = contraction).
    pub elongation_m: f64,
    /// End-cap rotation φ (radians).
    pub rotation_rad: f64,
}

impl DeformedConfig {
    /// Evaluate the deformed kinematics at (s, φ).
    pub fn at(geom: &Geometry, s: f64, phi: f64) -> Result<Self, GeometryError> {
        let gamma = geom.deformed_fiber_angle(s)?;
        let r = geom.deformed_radius(gamma, phi)?;
        Ok(Self {
            fiber_angle_rad: gamma,
            radius_m: r,
            elongation_m: s,
            rotation_rad: phi,
        })
    }
}

/// Linear elastomer restoring/damping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElastomerParams {
    /// Extensional stiffness k_e (N/m).
    pub k_e: f64,
    /// Torsional stiffness k_t (N·m/rad).
    pub k_t: f64,
    /// Extensional damping c_e (N·s/m).
    pub c_e: f64,
    /// Torsional damping c_t (N·m·s/rad).
    pub c_t: f64,
}

impl ElastomerParams {
    pub fn new(k_e: f64, k_t: f64, c_e: f64, c_t: f64) -> Result<Self, GeometryError> {
        for (name, value) in [("k_e", k_e), ("k_t", k_t), ("c_e", c_e), ("c_t", c_t)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(GeometryError::NegativeParam { name, value });
            }
        }
        Ok(Self { k_e, k_t, c_e, c_t })
    }

    /// Elastomer axial restoring force F_e = −k_e·s − c_e·ṡ.
    pub fn force(&self, s: f64, s_dot: f64) -> f64 {
        -self.k_e * s - self.c_e * s_dot
    }

    /// Elastomer restoring moment M_e = −k_t·φ − c_t·φ̇.
    pub fn moment(&self, phi: f64, phi_dot: f64) -> f64 {
        -self.k_t * phi - self.c_t * phi_dot
    }
}

/// Net axial pressure force on the end cap, π r² P (1 − 2 cot² γ).
///
/// The end-cap term π r² P pushes outward; the fiber tension pulls back with
/// twice the cot² γ weight, so the sign flips at the critical winding angle.
pub fn pressure_axial_force(r: f64, gamma: f64, p: f64) -> f64 {
    let cot = gamma.cos() / gamma.sin();
    std::f64::consts::PI * r * r * p * (1.0 - 2.0 * cot * cot)
}

/// Pressure torque about the tube axis, −2π r³ P cot γ.
///
/// Odd in γ: a positively wound FREE rotates in the negative direction under
/// pressure and vice versa.
pub fn pressure_torque(r: f64, gamma: f64, p: f64) -> f64 {
    let cot = gamma.cos() / gamma.sin();
    -2.0 * std::f64::consts::PI * r.powi(3) * p * cot
}

/// Net tension carried by the fiber winding, 2π r² P cot γ / sin γ.
///
/// This is the hoop-stress resultant the fibers must carry; it diverges as
/// the helix straightens (γ → 0), which is rejected.
pub fn fiber_tension(r: f64, gamma: f64, p: f64) -> Result<f64, GeometryError> {
    if gamma == 0.0 {
        return Err(GeometryError::ZeroFiberAngle);
    }
    let s = gamma.sin();
    Ok(2.0 * std::f64::consts::PI * r * r * p * (gamma.cos() / s) / s)
}

/// The critical winding angle arctan √2 ≈ 54.7356°, where the net axial
/// pressure force vanishes and elongation reverses sign.
pub fn critical_winding_angle() -> f64 {
    std::f64::consts::SQRT_2.atan()
}

/// Axial extension ratio λ_z = (L + s)/L.
pub fn extension_ratio(length: f64, s: f64) -> f64 {
    debug_assert!(length > 0.0);
    (length + s) / length
}

//! Unit conversions for the CLI boundary.
//!
//! The library computes in SI throughout; these helpers exist so configs and
//! reports can speak psi and degrees, the units the lab equipment uses.

/// Pascals per psi (conventional conversion constant).
pub const PA_PER_PSI: f64 = 6894.757;

pub fn psi_to_pa(psi: f64) -> f64 {
    psi * PA_PER_PSI
}

pub fn pa_to_psi(pa: f64) -> f64 {
    pa / PA_PER_PSI
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_psi_ceiling() {
        assert_eq!(psi_to_pa(10.0), 10.0 * PA_PER_PSI);
        assert!((psi_to_pa(10.0) - 68947.57).abs() < 1e-9);
    }

    #[test]
    fn round_trip_is_identity() {
        for x in [0.0, 1.0, 3.5, 10.0, 101.325] {
            assert!((pa_to_psi(psi_to_pa(x)) - x).abs() <= 1e-12 * x.abs());
            assert!((rad_to_deg(deg_to_rad(x)) - x).abs() <= 1e-12 * x.abs());
        }
    }
}

//! Classical lossless ring coupled to a fibre, and its input-output limit.
//!
//! With field reflection `r` and transmission `t = √(1 − r²)` at the
//! coupler and round-trip phase `φ`, the fibre transfer function is
//! `(−t + e^{iφ}) / (1 − t e^{iφ})`. Identifying `κτ = r²` and
//! `φ = (ω − ω_c)τ` it tends to `(κ/2 + iΔω)/(κ/2 − iΔω)` as `r → 0`, with an
//! `O(r²)` error on the resonance scale `|Δω| ≲ κ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CascadeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalRingSpec {
    /// Field reflection coefficient at the coupler.
    pub r: f64,
    /// Round-trip time.
    pub tau: f64,
    pub omega_c: f64,
    /// Ring radius; kept for bookkeeping, the phase map does not use it.
    pub ring_radius: f64,
}

impl ClassicalRingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(CascadeError::invalid("r", format!("must lie in (0, 1), got {}", self.r)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(CascadeError::invalid("tau", format!("must be positive, got {}", self.tau)));
        }
        if !self.omega_c.is_finite() {
            return Err(CascadeError::invalid("omega_c", "not finite"));
        }
        if !(self.ring_radius.is_finite() && self.ring_radius > 0.0) {
            return Err(CascadeError::invalid(
                "ring_radius",
                format!("must be positive, got {}", self.ring_radius),
            ));
        }
        Ok(())
    }

    pub fn transmission(&self) -> f64 {
        (1.0 - self.r * self.r).max(0.0).sqrt()
    }

    /// `κ = r² / τ`.
    pub fn kappa(&self) -> f64 {
        self.r * self.r / self.tau
    }

    /// `φ = (ω − ω_c) τ`.
    pub fn phase(&self, omega: f64) -> f64 {
        (omega - self.omega_c) * self.tau
    }
}

pub fn classical_transfer(spec: &ClassicalRingSpec, phi: f64) -> Complex64 {
    let t = spec.transmission();
    let e = Complex64::from_polar(1.0, phi);
    (e - t) / (1.0 - e * t)
}

pub fn inout_transfer(omega: f64, omega_c: f64, kappa: f64) -> Complex64 {
    let z = Complex64::new(0.5 * kappa, omega - omega_c);
    z / z.conj()
}

/// Largest `|classical − inout|` over detunings `ω − ω_c` in
/// `detuning_grid` with `|φ| ≤ r²`, both normalized to 1 at resonance.
pub fn correspondence_error(spec: &ClassicalRingSpec, detuning_grid: &[f64]) -> f64 {
    let kappa = spec.kappa();
    let c0 = classical_transfer(spec, 0.0);
    let q0 = inout_transfer(0.0, 0.0, kappa);
    let limit = spec.r * spec.r * (1.0 + 1e-12);
    detuning_grid
        .iter()
        .filter_map(|&d| {
            let phi = d * spec.tau;
            (phi.abs() <= limit).then(|| {
                let c = classical_transfer(spec, phi) / c0;
                let q = inout_transfer(spec.omega_c + d, spec.omega_c, kappa) / q0;
                (c - q).norm()
            })
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ring(r: f64) -> ClassicalRingSpec {
        ClassicalRingSpec {
            r,
            tau: 1.0,
            omega_c: 0.0,
            ring_radius: 1.0,
        }
    }

    #[test]
    fn examples() {
        assert_abs_diff_eq!((classical_transfer(&ring(0.3), 0.0) - 1.0).norm(), 0.0, epsilon = 1e-15);
        let open = ClassicalRingSpec { r: 1.0, ..ring(0.5) };
        let phi = 0.7;
        assert_abs_diff_eq!(
            (classical_transfer(&open, phi) - Complex64::from_polar(1.0, phi)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(inout_transfer(2.0, 2.0, 1.0), Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!((inout_transfer(0.5, 0.0, 1.0) - Complex64::i()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn radius_is_inert() {
        let a = ring(0.05);
        let b = ClassicalRingSpec { ring_radius: 7.0, ..a };
        let grid: Vec<f64> = (-50..=50).map(|i| i as f64 * 5e-5).collect();
        assert_eq!(correspondence_error(&a, &grid), correspondence_error(&b, &grid));
    }

    #[test]
    fn validation() {
        assert!(ring(0.05).validate().is_ok());
        assert!(ring(1.0).validate().is_err());
        assert!(ClassicalRingSpec { tau: 0.0, ..ring(0.1) }.validate().is_err());
    }
}

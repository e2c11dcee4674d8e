//! Time-dependent forcing supplied through its curl.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

/// Supplies curl F(·, t) as Fourier coefficients. F itself is recovered by
/// Biot–Savart, so div F = 0 throughout.
pub trait Forcing: Send + Sync {
    /// Mean-free coefficients of curl F at time `t`, or `None` when F = 0.
    fn curl_coefficients(&self, grid: &GridSpec, t: f64) -> Option<Vec<Complex64>>;

    fn label(&self) -> String;

    fn curl_field(&self, grid: &GridSpec, t: f64) -> SpectralField {
        match self.curl_coefficients(grid, t) {
            Some(c) => SpectralField::from_spectral(grid, c).expect("coefficient count matches grid"),
            None => SpectralField::zeros(grid),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {
    fn curl_coefficients(&self, _: &GridSpec, _: f64) -> Option<Vec<Complex64>> {
        None
    }

    fn label(&self) -> String {
        "none".into()
    }
}

/// curl F = A·(G_σ(· − c(t)) − (2π)⁻²) with G_σ the periodised unit-mass
/// Gaussian and c(t) moving on a circle of radius `orbit_radius` about 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotatingBlob {
    pub amplitude: f64,
    pub width: f64,
    pub orbit_radius: f64,
    pub angular_speed: f64,
}

impl Default for RotatingBlob {
    fn default() -> Self {
        RotatingBlob { amplitude: 1.0, width: 0.3, orbit_radius: 1.0, angular_speed: 1.0 }
    }
}

impl RotatingBlob {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.amplitude.is_finite() && self.orbit_radius.is_finite()) {
            return Err(Error::Config(format!("invalid rotating blob forcing {self:?}")));
        }
        if !self.angular_speed.is_finite() {
            return Err(Error::Config("angular speed must be finite".into()));
        }
        Ok(())
    }

    pub fn centre(&self, t: f64) -> (f64, f64) {
        let theta = self.angular_speed * t;
        (self.orbit_radius * theta.cos(), self.orbit_radius * theta.sin())
    }
}

impl Forcing for RotatingBlob {
    fn curl_coefficients(&self, grid: &GridSpec, t: f64) -> Option<Vec<Complex64>> {
        let (c1, c2) = self.centre(t);
        let cut = grid.dealias_cutoff() as i64;
        let norm = self.amplitude / (4.0 * PI * PI);
        let s2 = self.width * self.width;
        let coeffs = (0..grid.len())
            .map(|idx| {
                let (k1, k2) = grid.wavevector(idx);
                if (k1 == 0 && k2 == 0) || k1.abs() > cut || k2.abs() > cut {
                    return Complex64::new(0.0, 0.0);
                }
                let kk = (k1 * k1 + k2 * k2) as f64;
                let phase = -(k1 as f64 * c1 + k2 as f64 * c2);
                Complex64::from_polar(norm * (-0.5 * s2 * kk).exp(), phase)
            })
            .collect();
        Some(coeffs)
    }

    fn label(&self) -> String {
        format!(
            "rotating_blob(A={}, width={}, R={}, omega={})",
            self.amplitude, self.width, self.orbit_radius, self.angular_speed
        )
    }
}

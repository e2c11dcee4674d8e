//! Spectral calculus on the torus: Dirichlet kernels, low-mode projection,
//! Biot–Savart reconstruction and Sobolev-type norms.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{SpectralField, VelocityField};
use crate::grid::GridSpec;
use crate::quadrature::{integrate_breaks, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One-dimensional Dirichlet kernel d_N(z) = Σ_{|k|≤N} e^{ikz}.
pub fn dirichlet_kernel_1d(n: u32, z: f64) -> f64 {
    let m = 2.0 * n as f64 + 1.0;
    let s = (0.5 * z).sin();
    if s == 0.0 {
        return m;
    }
    (0.5 * m * z).sin() / s
}

/// Square Dirichlet kernel D_N(z1, z2) = d_N(z1) d_N(z2).
pub fn dirichlet_kernel_2d(n: u32, z1: f64, z2: f64) -> f64 {
    dirichlet_kernel_1d(n, z1) * dirichlet_kernel_1d(n, z2)
}

/// Smallest admissible grid that resolves D_N with room to spare.
pub fn dirichlet_grid(n: u32) -> Result<GridSpec> {
    let want = (8 * (n as usize + 1)).max(8);
    GridSpec::new(want.next_power_of_two())
}

/// D_N sampled on `grid`.
pub fn dirichlet_field(grid: &GridSpec, n: u32) -> SpectralField {
    SpectralField::from_fn(grid, |x1, x2| dirichlet_kernel_2d(n, x1, x2))
}

/// ∫_{𝕋²} D_N² via the Plancherel sum of the sampled kernel.
///
/// The exact value is [2π(2N+1)]².
pub fn dirichlet_l2_mass(n: u32) -> Result<f64> {
    let grid = dirichlet_grid(n)?;
    Ok(dirichlet_field(&grid, n).l2_sq_spectral())
}

/// ∫_ρ^π d_N(x)² dx by adaptive quadrature; bounded above by π²/ρ.
pub fn dirichlet_tail_mass(n: u32, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < PI) {
        return Err(Error::Domain(format!("tail mass needs 0 < ρ < π, got {rho}")));
    }
    // One break point per half-period of the numerator.
    let period = 2.0 * PI / (2.0 * n as f64 + 1.0);
    let mut points = vec![rho];
    let mut x = (rho / period).floor() * period + period;
    while x < PI {
        points.push(x);
        x += period;
    }
    points.push(PI);
    integrate_breaks(|x| dirichlet_kernel_1d(n, x).powi(2), &points, Tolerance::new(1e-13, 1e-12))
}

/// Fourier projection onto |k|_∞ < N.
///
/// Equivalently (2π)⁻² f ⋆ D_{N−1}. `n_modes` must lie within the
/// dealiased band so that products of projected fields stay exact.
pub fn project_low_modes(f: &SpectralField, n_modes: usize) -> Result<SpectralField> {
    let cutoff = f.grid().dealias_cutoff();
    if n_modes > cutoff {
        return Err(Error::Domain(format!("projection order {n_modes} exceeds resolved band {cutoff}")));
    }
    let n = n_modes as i64;
    Ok(f.map_spectral(|k1, k2, c| if k1.abs() < n && k2.abs() < n { c } else { Complex64::new(0.0, 0.0) }))
}

/// Plain torus convolution (f ⋆ g)(x) = ∫ f(x−y) g(y) dy, computed in
/// Fourier space as (2π)² f̂ ĝ.
pub fn convolve(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    if f.grid() != g.grid() {
        return Err(Error::Grid("convolution of fields on different grids".into()));
    }
    let area = (2.0 * PI).powi(2);
    let spectral = f.spectral().iter().zip(g.spectral()).map(|(a, b)| a * b * area).collect();
    SpectralField::from_spectral(f.grid(), spectral)
}

/// Velocity with curl u = ω and div u = 0: û(k) = i (k₂, −k₁) ω̂(k) / |k|².
pub fn biot_savart(omega: &SpectralField) -> Result<VelocityField> {
    if !omega.is_mean_free() {
        return Err(Error::Domain(format!("Biot–Savart needs mean-free vorticity (mean = {:.3e})", omega.mean())));
    }
    let u1 = omega.map_spectral(|k1, k2, c| {
        let kk = (k1 * k1 + k2 * k2) as f64;
        if kk == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            I * k2 as f64 * c / kk
        }
    });
    let u2 = omega.map_spectral(|k1, k2, c| {
        let kk = (k1 * k1 + k2 * k2) as f64;
        if kk == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -I * k1 as f64 * c / kk
        }
    });
    Ok(VelocityField { u1, u2 })
}

/// Partial derivative ∂f/∂x_axis (axis 0 or 1). The Nyquist mode is dropped.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    let nyq = (f.grid().n() / 2) as i64;
    f.map_spectral(|k1, k2, c| {
        let k = if axis == 0 { k1 } else { k2 };
        if k1.abs() == nyq || k2.abs() == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            I * k as f64 * c
        }
    })
}

/// ‖∇f‖₂ = ((2π)² Σ |k|² |f̂(k)|²)^{1/2}.
pub fn gradient_l2(f: &SpectralField) -> f64 {
    gradient_l2_sq(f).sqrt()
}

pub fn gradient_l2_sq(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let area = (2.0 * PI).powi(2);
    area * f
        .spectral()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let (k1, k2) = grid.wavevector(idx);
            (k1 * k1 + k2 * k2) as f64 * c.norm_sqr()
        })
        .sum::<f64>()
}

/// Zeroes every mode with |k|_∞ above the 2/3-rule cutoff.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let cut = f.grid().dealias_cutoff() as i64;
    f.map_spectral(|k1, k2, c| if k1.abs() <= cut && k2.abs() <= cut { c } else { Complex64::new(0.0, 0.0) })
}

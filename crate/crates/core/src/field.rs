use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Relative size of the zero mode below which a field counts as mean-free.
pub const MEAN_FREE_TOL: f64 = 1e-12;

/// Real scalar field on the torus, held in both physical and Fourier form.
///
/// Fourier coefficients follow f̂(k) = (2π)⁻² ∫ f e^{-ik·x} dx, so the
/// Plancherel identity reads ‖f‖₂² = (2π)² Σ_k |f̂(k)|².
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: GridSpec,
    physical: Vec<f64>,
    spectral: Vec<Complex64>,
    mean_free: bool,
}

impl SpectralField {
    pub fn from_physical(grid: &GridSpec, physical: Vec<f64>) -> Result<Self> {
        if physical.len() != grid.len() {
            return Err(Error::Grid(format!("expected {} grid values, got {}", grid.len(), physical.len())));
        }
        let spectral = grid.forward(&physical);
        Ok(Self::assemble(grid.clone(), physical, spectral))
    }

    /// Samples `f(x1, x2)` at the collocation points.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let physical: Vec<f64> = (0..grid.len()).map(|idx| f(grid.coord(idx / n), grid.coord(idx % n))).collect();
        let spectral = grid.forward(&physical);
        Self::assemble(grid.clone(), physical, spectral)
    }

    /// Builds the field from Fourier coefficients. The coefficients are
    /// assumed Hermitian; any imaginary residue in physical space is dropped.
    pub fn from_spectral(grid: &GridSpec, spectral: Vec<Complex64>) -> Result<Self> {
        if spectral.len() != grid.len() {
            return Err(Error::Grid(format!("expected {} coefficients, got {}", grid.len(), spectral.len())));
        }
        let physical = grid.inverse(&spectral);
        Ok(Self::assemble(grid.clone(), physical, spectral))
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self::assemble(grid.clone(), vec![0.0; grid.len()], vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    fn assemble(grid: GridSpec, physical: Vec<f64>, spectral: Vec<Complex64>) -> Self {
        let max = spectral.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mean_free = spectral[0].norm() <= MEAN_FREE_TOL * max;
        SpectralField { grid, physical, spectral, mean_free }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn physical(&self) -> &[f64] {
        &self.physical
    }

    pub fn spectral(&self) -> &[Complex64] {
        &self.spectral
    }

    pub fn is_mean_free(&self) -> bool {
        self.mean_free
    }

    /// Spatial average, f̂(0).
    pub fn mean(&self) -> f64 {
        self.spectral[0].re
    }

    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        self.physical[i1 * self.grid.n() + i2]
    }

    pub fn coefficient(&self, k1: i64, k2: i64) -> Complex64 {
        self.grid.index_of(k1, k2).map(|idx| self.spectral[idx]).unwrap_or_default()
    }

    /// Subtracts the spatial mean and pins the zero mode to exactly zero.
    pub fn into_mean_free(mut self) -> Self {
        let mean = self.spectral[0].re;
        self.spectral[0] = Complex64::new(0.0, 0.0);
        for v in &mut self.physical {
            *v -= mean;
        }
        self.mean_free = true;
        self
    }

    /// Applies a Fourier multiplier `m(k1, k2)` and returns the new field.
    pub fn map_spectral(&self, m: impl Fn(i64, i64, Complex64) -> Complex64) -> Self {
        let spectral: Vec<Complex64> = self
            .spectral
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let (k1, k2) = self.grid.wavevector(idx);
                m(k1, k2, c)
            })
            .collect();
        let physical = self.grid.inverse(&spectral);
        Self::assemble(self.grid.clone(), physical, spectral)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::assemble(
            self.grid.clone(),
            self.physical.iter().map(|v| v * factor).collect(),
            self.spectral.iter().map(|c| c * factor).collect(),
        )
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &SpectralField, sign: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Grid(format!(
                "cannot combine fields on {}² and {}² grids",
                self.grid.n(),
                other.grid.n()
            )));
        }
        Ok(Self::assemble(
            self.grid.clone(),
            self.physical.iter().zip(&other.physical).map(|(a, b)| a + sign * b).collect(),
            self.spectral.iter().zip(&other.spectral).map(|(a, b)| a + b * sign).collect(),
        ))
    }

    /// ‖f‖₂² from the Fourier side.
    pub fn l2_sq_spectral(&self) -> f64 {
        let area = (2.0 * std::f64::consts::PI).powi(2);
        area * self.spectral.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// ‖f‖₂² by the rectangle rule in physical space.
    pub fn l2_sq_physical(&self) -> f64 {
        self.grid.cell_area() * self.physical.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.physical.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Translates the field by a whole number of grid cells.
    pub fn shifted(&self, s1: usize, s2: usize) -> Self {
        let n = self.grid.n();
        let physical: Vec<f64> = (0..self.grid.len())
            .map(|idx| {
                let (i1, i2) = (idx / n, idx % n);
                self.physical[((i1 + n - s1 % n) % n) * n + (i2 + n - s2 % n) % n]
            })
            .collect();
        let spectral = self.grid.forward(&physical);
        Self::assemble(self.grid.clone(), physical, spectral)
    }
}

/// Divergence-free velocity (u1, u2) reconstructed from a vorticity.
#[derive(Clone, Debug)]
pub struct VelocityField {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

impl VelocityField {
    /// max_k |k·û(k)| relative to max_k |k||û(k)|.
    pub fn divergence_rel(&self) -> f64 {
        let grid = self.u1.grid();
        let mut div: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for idx in 0..grid.len() {
            let (k1, k2) = grid.wavevector(idx);
            let (a, b) = (self.u1.spectral()[idx], self.u2.spectral()[idx]);
            div = div.max((a * k1 as f64 + b * k2 as f64).norm());
            let kk = ((k1 * k1 + k2 * k2) as f64).sqrt();
            scale = scale.max(kk * a.norm().max(b.norm()));
        }
        if scale == 0.0 {
            0.0
        } else {
            div / scale
        }
    }

    /// Kinetic energy ½‖u‖₂².
    pub fn energy(&self) -> f64 {
        0.5 * (self.u1.l2_sq_spectral() + self.u2.l2_sq_spectral())
    }

    /// Scalar curl ∂₁u₂ − ∂₂u₁.
    pub fn curl(&self) -> SpectralField {
        let grid = self.u1.grid();
        let spectral: Vec<Complex64> = (0..grid.len())
            .map(|idx| {
                let (k1, k2) = grid.wavevector(idx);
                let i = Complex64::new(0.0, 1.0);
                i * k1 as f64 * self.u2.spectral()[idx] - i * k2 as f64 * self.u1.spectral()[idx]
            })
            .collect();
        SpectralField::from_spectral(grid, spectral).expect("same grid")
    }
}

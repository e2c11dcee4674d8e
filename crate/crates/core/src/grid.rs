use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on [-π, π]² with `n` points per axis.
///
/// Collocation points sit at cell corners `x_j = -π + j·spacing`. Arrays are
/// row-major with the second coordinate varying fastest, so the value at
/// `(x1_i, x2_j)` lives at index `i * n + j`.
#[derive(Clone)]
pub struct GridSpec {
    n: usize,
    spacing: f64,
    dealias_cutoff: usize,
    plans: Arc<Plans>,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("resolution must be a power of two >= 8, got {n}")));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) };
        Ok(GridSpec { n, spacing: 2.0 * PI / n as f64, dealias_cutoff: n / 3, plans: Arc::new(plans) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Largest |k|_∞ kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.dealias_cutoff
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    /// Number of grid points, n².
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        -PI + i as f64 * self.spacing
    }

    /// Signed wavenumber stored at FFT index `i`; the Nyquist index maps to -n/2.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavevector (k1, k2) at flat spectral index `idx`.
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        (self.wavenumber(idx / self.n), self.wavenumber(idx % self.n))
    }

    /// Flat spectral index of wavevector `k`, if it is representable.
    pub fn index_of(&self, k1: i64, k2: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k1 < -half || k1 >= half || k2 < -half || k2 >= half {
            return None;
        }
        let n = self.n as i64;
        let wrap = |k: i64| if k < 0 { (k + n) as usize } else { k as usize };
        Some(wrap(k1) * self.n + wrap(k2))
    }

    /// Minimal periodic displacement, in grid steps, for index offset `i`.
    pub fn periodic_offset(&self, i: usize) -> usize {
        i.min(self.n - i)
    }

    /// Unnormalised forward 2D DFT in place.
    pub(crate) fn dft2(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.plans.forward);
    }

    /// Unnormalised inverse 2D DFT in place.
    pub(crate) fn idft2(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.plans.inverse);
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(buf.len(), self.len());
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose_square(buf, self.n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose_square(buf, self.n);
    }

    /// Fourier coefficients f̂(k) = (2π)⁻² ∫ f e^{-ik·x} of grid values.
    pub(crate) fn forward(&self, physical: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = physical.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.dft2(&mut buf);
        let scale = 1.0 / self.len() as f64;
        for (idx, c) in buf.iter_mut().enumerate() {
            *c *= scale * self.phase(idx);
        }
        buf
    }

    /// Grid values of Σ_k f̂(k) e^{ik·x}; the imaginary part is discarded.
    pub(crate) fn inverse(&self, spectral: &[Complex64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = spectral.iter().enumerate().map(|(idx, &c)| c * self.phase(idx)).collect();
        self.idft2(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// (-1)^{k1+k2}: the shift from the DFT origin at x = -π to x = 0.
    fn phase(&self, idx: usize) -> f64 {
        if ((idx / self.n) + (idx % self.n)).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("n", &self.n)
            .field("spacing", &self.spacing)
            .field("dealias_cutoff", &self.dealias_cutoff)
            .finish()
    }
}

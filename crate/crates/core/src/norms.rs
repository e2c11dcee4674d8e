//! Norms, disk-concentration functionals, the η envelope and the
//! rearrangement-invariant maximal function.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

/// ‖f‖_p by the rectangle rule; `p = f64::INFINITY` gives max |f|.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let area = f.grid().cell_area();
    let sum: f64 = if p == 1.0 {
        f.physical().iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        f.physical().iter().map(|v| v * v).sum()
    } else {
        f.physical().iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok((area * sum).powf(1.0 / p))
}

/// Homogeneous H⁻¹ norm ((2π)² Σ_{k≠0} |f̂(k)|²/|k|²)^{1/2} of a mean-free field.
pub fn h_minus1_norm(f: &SpectralField) -> Result<f64> {
    if !f.is_mean_free() {
        return Err(Error::Domain(format!("H^-1 norm needs a mean-free field (mean = {:.3e})", f.mean())));
    }
    Ok(h_minus1_sq_unchecked(f).sqrt())
}

pub(crate) fn h_minus1_sq_unchecked(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let area = (2.0 * PI).powi(2);
    area * f
        .spectral()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(idx, c)| {
            let (k1, k2) = grid.wavevector(idx);
            c.norm_sqr() / (k1 * k1 + k2 * k2) as f64
        })
        .sum::<f64>()
}

/// Neighbourhood used for a concentration sup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Neighbourhood {
    /// Euclidean disk |z − y| < r in the periodic metric.
    Disk,
    /// ℓ∞ square |z − y|_∞ < r.
    Square,
}

/// Precomputed DFT of |f| for repeated concentration queries.
///
/// Each query convolves |f| with the indicator of the neighbourhood on the
/// grid and takes the max over all grid centres; the result is exact for
/// the discrete measure Σ |f_i| h² δ_{x_i}.
pub struct ConcentrationKernel {
    grid: GridSpec,
    abs_hat: Vec<Complex64>,
    total: f64,
}

impl ConcentrationKernel {
    pub fn new(f: &SpectralField) -> Self {
        let grid = f.grid().clone();
        let mut abs_hat: Vec<Complex64> = f.physical().iter().map(|v| Complex64::new(v.abs(), 0.0)).collect();
        let total = grid.cell_area() * f.physical().iter().map(|v| v.abs()).sum::<f64>();
        grid.dft2(&mut abs_hat);
        ConcentrationKernel { grid, abs_hat, total }
    }

    /// ‖f‖₁ of the underlying field.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn sup_mass(&self, r: f64, shape: Neighbourhood) -> Result<f64> {
        if !(r > 0.0 && r <= PI) {
            return Err(Error::Domain(format!("concentration radius must lie in (0, π], got {r}")));
        }
        let grid = &self.grid;
        let n = grid.n();
        let h = grid.spacing();
        let mut buf: Vec<Complex64> = (0..grid.len())
            .map(|idx| {
                let d1 = grid.periodic_offset(idx / n) as f64 * h;
                let d2 = grid.periodic_offset(idx % n) as f64 * h;
                let inside = match shape {
                    Neighbourhood::Disk => d1 * d1 + d2 * d2 < r * r,
                    Neighbourhood::Square => d1.max(d2) < r,
                };
                Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            })
            .collect();
        grid.dft2(&mut buf);
        for (b, a) in buf.iter_mut().zip(&self.abs_hat) {
            *b *= a;
        }
        grid.idft2(&mut buf);
        let scale = grid.cell_area() / grid.len() as f64;
        let max = buf.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max) * scale;
        // The convolution is a sum of nonnegative terms; clip FFT round-off.
        Ok(max.clamp(0.0, self.total))
    }
}

/// sup_z ∫_{|z−y|<r} |f(y)| dy over grid centres z.
pub fn concentration(f: &SpectralField, r: f64) -> Result<f64> {
    ConcentrationKernel::new(f).sup_mass(r, Neighbourhood::Disk)
}

/// sup_z ∫_{|z−y|_∞<r} |f(y)| dy over grid centres z.
pub fn concentration_square(f: &SpectralField, half_width: f64) -> Result<f64> {
    ConcentrationKernel::new(f).sup_mass(half_width, Neighbourhood::Square)
}

/// ∫_{t1}^{t2} concentration(f(t), r) dt, trapezoidal in time over the
/// snapshots, with linear interpolation at t1 and t2.
pub fn concentration_time_avg(snapshots: &[(f64, SpectralField)], r: f64, t1: f64, t2: f64) -> Result<f64> {
    if snapshots.is_empty() {
        return Err(Error::Domain("no snapshots supplied".into()));
    }
    if !(t1 < t2) {
        return Err(Error::Domain(format!("need t1 < t2, got [{t1}, {t2}]")));
    }
    let mut samples: Vec<(f64, f64)> =
        snapshots.iter().map(|(t, f)| Ok((*t, concentration(f, r)?))).collect::<Result<_>>()?;
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    if t1 < lo || t2 > hi || samples.len() < 2 {
        return Err(Error::Domain(format!("interval [{t1}, {t2}] not covered by snapshots on [{lo}, {hi}]")));
    }
    Ok(integrate_piecewise_linear(&samples, t1, t2))
}

/// Exact integral over [a, b] of the piecewise-linear interpolant of `pts`.
pub(crate) fn integrate_piecewise_linear(pts: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        let lo = t0.max(a);
        let hi = t1.min(b);
        if hi <= lo || t1 == t0 {
            continue;
        }
        let at = |t: f64| v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    total
}

/// Tabulated r ↦ sup-disk-mass for a family of fields.
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Uniform L¹ bound K of the family.
    pub mass_bound: f64,
    /// Grid spacing of the sampled family; the sup over grid centres is
    /// biased low by O(spacing).
    pub spacing: f64,
}

impl ConcentrationProfile {
    /// Sup over the family of the disk concentration at each radius.
    pub fn from_family(family: &[SpectralField], radii: &[f64]) -> Result<Self> {
        if family.is_empty() || radii.is_empty() {
            return Err(Error::Domain("empty family or radius list".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("radii must be strictly increasing".into()));
        }
        let mut values = vec![0.0_f64; radii.len()];
        let mut mass_bound = 0.0_f64;
        for f in family {
            let kernel = ConcentrationKernel::new(f);
            mass_bound = mass_bound.max(kernel.total_mass());
            for (v, &r) in values.iter_mut().zip(radii) {
                *v = v.max(kernel.sup_mass(r, Neighbourhood::Disk)?);
            }
        }
        Self::new(radii.to_vec(), values, mass_bound, family[0].grid().spacing())
    }

    pub fn new(radii: Vec<f64>, mut values: Vec<f64>, mass_bound: f64, spacing: f64) -> Result<Self> {
        if radii.len() != values.len() || radii.is_empty() {
            return Err(Error::Domain("profile radii and values differ in length".into()));
        }
        if radii[0] <= 0.0 || radii[radii.len() - 1] > PI {
            return Err(Error::Domain("profile radii must lie in (0, π]".into()));
        }
        if !(mass_bound > 0.0) {
            return Err(Error::Domain("mass bound K must be positive".into()));
        }
        // Monotone envelope; removes FFT round-off wiggles between radii.
        for i in 1..values.len() {
            values[i] = values[i].max(values[i - 1]);
        }
        for v in &mut values {
            *v = v.min(mass_bound);
        }
        Ok(ConcentrationProfile { radii, values, mass_bound, spacing })
    }

    /// Log-spaced radii from the grid spacing up to π, inclusive.
    pub fn default_radii(grid: &GridSpec, count: usize) -> Vec<f64> {
        let lo = grid.spacing().ln();
        let hi = PI.ln();
        (0..count)
            .map(|i| if i + 1 == count { PI } else { (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp() })
            .collect()
    }
}

/// The normalised envelope η of a family, with its extension η̄ by 1 past π.
#[derive(Clone, Debug)]
pub struct Eta {
    radii: Vec<f64>,
    normalised: Vec<f64>,
    mass_bound: f64,
}

/// Builds η(r) = max{sup-mass(r)/K, r/π} from a tabulated profile.
pub fn build_eta(profile: &ConcentrationProfile) -> Eta {
    Eta {
        radii: profile.radii.clone(),
        normalised: profile.values.iter().map(|v| v / profile.mass_bound).collect(),
        mass_bound: profile.mass_bound,
    }
}

impl Eta {
    pub fn mass_bound(&self) -> f64 {
        self.mass_bound
    }

    /// η on [0, π]: piecewise-linear interpolation of the table (held flat
    /// outside the tabulated range) maxed with r/π.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, PI);
        let table = interp_flat(&self.radii, &self.normalised, r);
        table.max(r / PI).min(1.0)
    }

    /// η̄: η on [0, π] and 1 beyond.
    pub fn eval_bar(&self, r: f64) -> f64 {
        if r > PI {
            1.0
        } else {
            self.eval(r)
        }
    }
}

fn interp_flat(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// Rearrangement-invariant maximal function ℳ_s(f) = sup_{|E|=s} ∫_E |f|.
pub fn maximal_function(f: &SpectralField, s: f64) -> Result<f64> {
    MaximalTable::new(f).eval(s)
}

/// Decreasing rearrangement of |f| for repeated ℳ_s queries.
pub struct MaximalTable {
    sorted: Vec<f64>,
    cell_area: f64,
}

impl MaximalTable {
    pub fn new(f: &SpectralField) -> Self {
        let mut sorted: Vec<f64> = f.physical().iter().map(|v| v.abs()).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        MaximalTable { sorted, cell_area: f.grid().cell_area() }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let area = self.cell_area * self.sorted.len() as f64;
        if !(s > 0.0 && s <= area * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("maximal function needs 0 < s <= |𝕋²|, got {s}")));
        }
        let cells = (s / self.cell_area).min(self.sorted.len() as f64);
        let whole = cells.floor() as usize;
        let mut total: f64 = self.sorted[..whole].iter().sum();
        if whole < self.sorted.len() {
            total += (cells - whole as f64) * self.sorted[whole];
        }
        Ok(total * self.cell_area)
    }
}

/// concentration(μ, ρ)·√|log ρ| / ‖μ − μ̄‖_{H⁻¹} for a nonnegative density μ.
///
/// The H⁻¹ norm is taken after removing the spatial mean, the only part of
/// a nonnegative field the homogeneous norm can see.
pub fn disk_mass_log_ratio(mu: &SpectralField, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!("need 0 < ρ < 1/2, got {rho}")));
    }
    let h1 = h_minus1_sq_unchecked(mu).sqrt();
    if h1 == 0.0 {
        return Err(Error::Domain("μ has vanishing H^-1 norm".into()));
    }
    Ok(concentration(mu, rho)? * rho.ln().abs().sqrt() / h1)
}

/// A field written as f = μ + w with μ ≥ 0 (a mollified measure) and w ∈ L^p.
#[derive(Clone, Debug)]
pub struct MeasureDecomposition {
    mu: SpectralField,
    w: SpectralField,
    p: f64,
    total: SpectralField,
    mu_l1: f64,
    mu_h_minus1: f64,
    w_lp: f64,
}

impl MeasureDecomposition {
    pub fn new(mu: SpectralField, w: SpectralField, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::Domain(format!("L^p part needs p > 1, got {p}")));
        }
        let floor = -1e-12 * mu.max_abs();
        if mu.physical().iter().any(|&v| v < floor) {
            return Err(Error::Contract("measure part μ is not nonnegative".into()));
        }
        let total = mu.add(&w)?;
        Ok(MeasureDecomposition {
            mu_l1: lp_norm(&mu, 1.0)?,
            mu_h_minus1: h_minus1_sq_unchecked(&mu).sqrt(),
            w_lp: lp_norm(&w, p)?,
            mu,
            w,
            p,
            total,
        })
    }

    pub fn mu(&self) -> &SpectralField {
        &self.mu
    }

    pub fn w(&self) -> &SpectralField {
        &self.w
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The represented field μ + w.
    pub fn total(&self) -> &SpectralField {
        &self.total
    }

    /// ‖μ‖_{BM}, realised as the L¹ norm of the density.
    pub fn mu_mass(&self) -> f64 {
        self.mu_l1
    }

    pub fn mu_h_minus1(&self) -> f64 {
        self.mu_h_minus1
    }

    pub fn w_lp(&self) -> f64 {
        self.w_lp
    }
}

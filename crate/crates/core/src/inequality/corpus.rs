//! Seeded test corpora and the refinement suite over them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::{check_refined_nash, check_refined_projection, InequalityReport, ProjectionParams};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::norms::{build_eta, lp_norm, ConcentrationProfile, Eta};
use crate::spectral::gradient_l2;

pub const CORPUS_SEED: u64 = 0x5eed_b0b5;

const FAMILY_COUNT: usize = 20;
const DILATIONS: [f64; 4] = [1.0, 0.7, 0.5, 0.4];
const ETA_RADII: usize = 48;

#[derive(Clone, Copy, Debug, Serialize)]
struct Bump {
    c1: f64,
    c2: f64,
    weight: f64,
    sigma1: f64,
    sigma2: f64,
}

/// A mass-preserving dilation family of sums of periodised Gaussians,
/// made mean-free.
#[derive(Clone, Debug)]
pub struct BumpFamily {
    pub index: usize,
    pub dilations: Vec<f64>,
    pub members: Vec<SpectralField>,
    /// max ‖f‖₁ over members.
    pub mass_bound: f64,
}

impl BumpFamily {
    /// η of this family on its own grid.
    pub fn eta(&self) -> Result<Eta> {
        let grid = self.members[0].grid();
        let radii = ConcentrationProfile::default_radii(grid, ETA_RADII);
        let profile = ConcentrationProfile::from_family(&self.members, &radii)?;
        Ok(build_eta(&profile))
    }
}

fn periodic_gaussian(x1: f64, x2: f64, b: &Bump, scale: f64) -> f64 {
    let (s1, s2) = (b.sigma1 * scale, b.sigma2 * scale);
    let mut acc = 0.0;
    for m1 in -1..=1 {
        for m2 in -1..=1 {
            let d1 = x1 - b.c1 + 2.0 * PI * m1 as f64;
            let d2 = x2 - b.c2 + 2.0 * PI * m2 as f64;
            acc += (-0.5 * (d1 * d1 / (s1 * s1) + d2 * d2 / (s2 * s2))).exp();
        }
    }
    b.weight * acc / (2.0 * PI * s1 * s2)
}

fn family_bumps(index: usize) -> Vec<Bump> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + index as u64);
    let count = rng.gen_range(1..=3);
    let mass = rng.gen_range(2.0..6.0);
    (0..count)
        .map(|j| {
            let sigma = rng.gen_range(0.34..0.5);
            let aspect: f64 = rng.gen_range(0.8..1.25);
            let sign = if j == 0 || rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Bump {
                c1: rng.gen_range(-PI..PI),
                c2: rng.gen_range(-PI..PI),
                weight: sign * mass * rng.gen_range(0.5..1.5),
                sigma1: sigma * aspect.sqrt(),
                sigma2: sigma / aspect.sqrt(),
            }
        })
        .collect()
}

/// The built-in corpus of 20 dilated-bump families sampled on `grid`.
///
/// Widths never drop below 0.12, so every member is resolved from 256²
/// upward.
pub fn bump_corpus(grid: &GridSpec) -> Vec<BumpFamily> {
    (0..FAMILY_COUNT)
        .map(|index| {
            let bumps = family_bumps(index);
            let members: Vec<SpectralField> = DILATIONS
                .iter()
                .map(|&s| {
                    SpectralField::from_fn(grid, |x1, x2| bumps.iter().map(|b| periodic_gaussian(x1, x2, b, s)).sum())
                        .into_mean_free()
                })
                .collect();
            let mass_bound = members.iter().map(|f| lp_norm(f, 1.0).unwrap_or(0.0)).fold(0.0, f64::max);
            BumpFamily { index, dilations: DILATIONS.to_vec(), members, mass_bound }
        })
        .collect()
}

/// A random real trigonometric polynomial with modes |k|_∞ ≤ `max_mode`,
/// mean included, and Gaussian coefficients decaying like (1+|k|²)^{-1/2}.
pub fn random_band_limited(grid: &GridSpec, max_mode: i64, rng: &mut impl Rng) -> Result<SpectralField> {
    if max_mode < 0 || max_mode as usize > grid.dealias_cutoff() {
        return Err(Error::Domain(format!(
            "band limit {max_mode} exceeds the dealiased band {}",
            grid.dealias_cutoff()
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k1 in -max_mode..=max_mode {
        for k2 in -max_mode..=max_mode {
            // Fill one representative of each ±k pair, then mirror.
            if (k1, k2) < (-k1, -k2) {
                continue;
            }
            let amp = 1.0 / (1.0 + (k1 * k1 + k2 * k2) as f64).sqrt();
            let re = rng.sample::<f64, _>(StandardNormal) * amp;
            let im = if (k1, k2) == (0, 0) { 0.0 } else { rng.sample::<f64, _>(StandardNormal) * amp };
            let c = Complex64::new(re, im);
            let i = grid.index_of(k1, k2).expect("mode inside grid");
            let j = grid.index_of(-k1, -k2).expect("mode inside grid");
            coeffs[i] = c;
            coeffs[j] = c.conj();
        }
    }
    SpectralField::from_spectral(grid, coeffs)
}

/// Ten kernels supported in disks centred at the origin, with their radii:
/// indicators, smooth bumps, a cone and sign-changing profiles.
pub fn ball_supported_kernels(grid: &GridSpec, rng: &mut impl Rng) -> Vec<(SpectralField, f64)> {
    (0..10)
        .map(|i| {
            let radius = rng.gen_range(0.15..1.2);
            let tilt = rng.gen_range(-2.0..2.0);
            let freq = rng.gen_range(1.0..6.0);
            let g = SpectralField::from_fn(grid, |x1, x2| {
                let rho = (x1 * x1 + x2 * x2).sqrt() / radius;
                if rho >= 1.0 {
                    return 0.0;
                }
                match i % 5 {
                    0 => 1.0,
                    1 => (-1.0 / (1.0 - rho * rho)).exp(),
                    2 => 1.0 - rho,
                    3 => (freq * x1 / radius).cos() + tilt * x2 / radius,
                    _ => (1.0 - rho * rho) * (freq * rho * PI).sin(),
                }
            });
            (g, radius)
        })
        .collect()
}

/// Empirical constants of one family at one resolution.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyConstants {
    pub family: usize,
    pub resolution: usize,
    pub mass_bound: f64,
    /// max ratio of the refined projection check with the log preset.
    pub projection_constant: f64,
    pub projection_argmax: usize,
    /// max ratio of the refined Nash check against the family's η.
    pub nash_constant: f64,
    pub nash_argmax: usize,
}

/// Reports and per-family constants of the refinement suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub resolution: usize,
    pub families: Vec<FamilyConstants>,
    #[serde(skip)]
    pub reports: Vec<InequalityReport>,
}

impl SuiteSummary {
    pub fn max_projection_constant(&self) -> f64 {
        self.families.iter().map(|f| f.projection_constant).fold(0.0, f64::max)
    }

    pub fn max_nash_constant(&self) -> f64 {
        self.families.iter().map(|f| f.nash_constant).fold(0.0, f64::max)
    }
}

fn argmax(values: &[f64]) -> (usize, f64) {
    // Strict comparison keeps the lowest index on ties.
    values.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
}

/// Runs the refined projection (log preset) and refined Nash checks over
/// every member of every family on `grid`.
pub fn run_refined_suite(grid: &GridSpec, families: &[BumpFamily]) -> Result<SuiteSummary> {
    let per_family: Vec<(FamilyConstants, Vec<InequalityReport>)> = families
        .par_iter()
        .map(|fam| {
            let eta = fam.eta()?;
            let mut proj = Vec::new();
            let mut nash = Vec::new();
            for f in &fam.members {
                let grad = gradient_l2(f);
                let p = ProjectionParams::log_preset(grad)?;
                proj.push(check_refined_projection(f, p.alpha, p.epsilon, p.n_modes)?);
                nash.push(check_refined_nash(f, &eta)?);
            }
            let (pi, pv) = argmax(&proj.iter().map(|r| r.ratio).collect::<Vec<_>>());
            let (ni, nv) = argmax(&nash.iter().map(|r| r.ratio).collect::<Vec<_>>());
            let constants = FamilyConstants {
                family: fam.index,
                resolution: grid.n(),
                mass_bound: fam.mass_bound,
                projection_constant: pv,
                projection_argmax: pi,
                nash_constant: nv,
                nash_argmax: ni,
            };
            proj.extend(nash);
            Ok((constants, proj))
        })
        .collect::<Result<_>>()?;
    let mut families_out = Vec::with_capacity(per_family.len());
    let mut reports = Vec::new();
    for (c, r) in per_family {
        families_out.push(c);
        reports.extend(r);
    }
    Ok(SuiteSummary { resolution: grid.n(), families: families_out, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_mean_free() {
        let g = GridSpec::new(64).unwrap();
        let a = bump_corpus(&g);
        let b = bump_corpus(&g);
        assert_eq!(a.len(), 20);
        for (fa, fb) in a.iter().zip(&b) {
            assert_eq!(fa.members.len(), DILATIONS.len());
            for (ma, mb) in fa.members.iter().zip(&fb.members) {
                assert!(ma.is_mean_free());
                assert_eq!(ma.physical(), mb.physical());
            }
        }
    }

    #[test]
    fn band_limited_field_is_real_and_limited() {
        let g = GridSpec::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_band_limited(&g, 8, &mut rng).unwrap();
        assert!(f.coefficient(9, 0).norm() < 1e-14);
        assert!(f.coefficient(8, -8).norm() > 0.0);
        assert!(random_band_limited(&g, 40, &mut rng).is_err());
    }

    #[test]
    fn kernels_are_supported_in_their_disks() {
        let g = GridSpec::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (k, r) in ball_supported_kernels(&g, &mut rng) {
            let f = SpectralField::from_fn(&g, |x, y| (x - 2.0 * y).cos());
            assert!(super::super::check_convolution_bound(&f, &k, r).is_ok());
        }
    }
}

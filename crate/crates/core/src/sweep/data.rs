//! Initial vorticity generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::erf::erf;

use super::config::{DataSpec, MollificationRule};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::inequality::random_band_limited;
use crate::norms::{lp_norm, MeasureDecomposition};

/// A generated initial vorticity with the bookkeeping needed downstream.
#[derive(Clone, Debug)]
pub struct InitialData {
    /// Mean-free vorticity.
    pub omega: SpectralField,
    pub meta: DataMeta,
    /// Measure-plus-L^p split, when the family has one.
    pub decomposition: Option<MeasureDecomposition>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DataMeta {
    pub kind: String,
    /// Constant subtracted to make the field mean-free.
    pub mean_correction: f64,
    /// ‖ω₀‖₁ before mean subtraction.
    pub mass_before_mean: f64,
    pub mollification_width: Option<f64>,
    pub mollification_rule: Option<MollificationRule>,
}

/// Density of a uniform segment measure {x₂ = 0, |x₁| ≤ L} of total mass
/// `strength`, convolved with a Gaussian of width σ.
fn mollified_segment(x1: f64, x2: f64, strength: f64, half_length: f64, sigma: f64) -> f64 {
    let root2s = 2f64.sqrt() * sigma;
    let along = 0.5 * (erf((x1 + half_length) / root2s) - erf((x1 - half_length) / root2s));
    let across = (-x2 * x2 / (2.0 * sigma * sigma)).exp() / ((2.0 * PI).sqrt() * sigma);
    strength / (2.0 * half_length) * along * across
}

fn periodised(f: impl Fn(f64, f64) -> f64) -> impl Fn(f64, f64) -> f64 {
    move |x1, x2| {
        let mut acc = 0.0;
        for m1 in -1..=1 {
            for m2 in -1..=1 {
                acc += f(x1 + 2.0 * PI * m1 as f64, x2 + 2.0 * PI * m2 as f64);
            }
        }
        acc
    }
}

/// Nonnegative mollified sheet density, rescaled so its grid mass is exactly
/// `strength`.
fn sheet_density(grid: &GridSpec, strength: f64, half_length: f64, sigma: f64) -> Result<SpectralField> {
    if !(strength >= 0.0 && half_length > 0.0 && half_length < PI && sigma > 0.0) {
        return Err(Error::Config(format!(
            "invalid sheet (strength {strength}, half length {half_length}, width {sigma})"
        )));
    }
    let raw =
        SpectralField::from_fn(grid, periodised(|x1, x2| mollified_segment(x1, x2, strength, half_length, sigma)));
    let mass = lp_norm(&raw, 1.0)?;
    Ok(if mass > 0.0 { raw.scaled(strength / mass) } else { raw })
}

fn gaussian_blob(x1: f64, x2: f64, c1: f64, c2: f64, sigma: f64) -> f64 {
    let (d1, d2) = (x1 - c1, x2 - c2);
    (-(d1 * d1 + d2 * d2) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
}

fn finish(raw: SpectralField, kind: &str, rule: Option<MollificationRule>, width: Option<f64>) -> Result<DataMeta> {
    Ok(DataMeta {
        kind: kind.to_string(),
        mean_correction: raw.mean(),
        mass_before_mean: lp_norm(&raw, 1.0)?,
        mollification_width: width,
        mollification_rule: rule,
    })
}

/// Mean-free initial vorticity for `spec` at viscosity ν on `grid`.
pub fn generate_initial_data(
    grid: &GridSpec,
    spec: &DataSpec,
    rule: MollificationRule,
    nu: f64,
) -> Result<InitialData> {
    let width = rule.width(nu);
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Config(format!("mollification width {width} is not positive")));
    }
    let (raw, kind, mollified, decomposition) = match spec {
        DataSpec::Shear { k } => {
            if *k == 0 {
                return Err(Error::Config("shear wavenumber must be at least 1".into()));
            }
            let k = *k as f64;
            (SpectralField::from_fn(grid, |x1, _| (k * x1).cos()), "shear", false, None)
        }
        DataSpec::TaylorGreen => {
            (SpectralField::from_fn(grid, |x1, x2| x1.cos() + x2.cos()), "taylor_green", false, None)
        }
        DataSpec::RandomSmooth { seed, max_mode, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let f = random_band_limited(grid, *max_mode, &mut rng)?;
            (f.scaled(*amplitude), "random_smooth", false, None)
        }
        DataSpec::L1Blobs { seed, count, width: blob_width, total_mass } => {
            if *count == 0 || !(*blob_width > 0.0) {
                return Err(Error::Config("l1_blobs needs count >= 1 and width > 0".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let blobs: Vec<(f64, f64, f64)> = (0..*count)
                .map(|i| {
                    let c1 = rng.gen_range(-PI..PI);
                    let c2 = rng.gen_range(-PI..PI);
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    (c1, c2, sign)
                })
                .collect();
            let each = total_mass / *count as f64;
            let s = *blob_width;
            let f = SpectralField::from_fn(
                grid,
                periodised(|x1, x2| {
                    blobs.iter().map(|&(c1, c2, sign)| sign * each * gaussian_blob(x1, x2, c1, c2, s)).sum()
                }),
            );
            (f, "l1_blobs", false, None)
        }
        DataSpec::Sheet { strength, half_length } => {
            (sheet_density(grid, *strength, *half_length, width)?, "sheet", true, None)
        }
        DataSpec::MeasurePlusLp { seed, strength, half_length, lp_amplitude, lp_max_mode, p } => {
            let mu = sheet_density(grid, *strength, *half_length, width)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let w = random_band_limited(grid, *lp_max_mode, &mut rng)?.scaled(*lp_amplitude);
            // Put the whole mean correction into the L^p part.
            let w = w.into_mean_free().sub(&SpectralField::from_fn(grid, |_, _| mu.mean()))?;
            let dec = MeasureDecomposition::new(mu, w, *p)?;
            (dec.total().clone(), "measure_plus_lp", true, Some(dec))
        }
    };
    let meta = if mollified {
        finish(raw.clone(), kind, Some(rule), Some(width))?
    } else {
        finish(raw.clone(), kind, None, None)?
    };
    Ok(InitialData { omega: raw.into_mean_free(), meta, decomposition })
}

//! Rate fits against |log ν|^{-1/4} and the no-Dirac concentration table.

use serde::Serialize;

use super::{ConcentrationSample, SweepRecord};
use crate::error::{Error, Result};

/// Least-squares fits of ζ^ν_δ against x = |log ν|^{-1/4}.
#[derive(Clone, Debug, Serialize)]
pub struct RateFit {
    /// Affine fit y ≈ slope·x + intercept.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Fit through the origin y ≈ origin_slope·x, with uncentred R².
    pub origin_slope: f64,
    pub origin_r_squared: f64,
    pub nu_values: Vec<f64>,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
}

/// Fits the records whose δ equals `delta`; all must share it.
pub fn fit_log_rate(records: &[SweepRecord], delta: f64) -> Result<RateFit> {
    if records.len() < 3 {
        return Err(Error::Domain(format!("rate fit needs at least 3 records, got {}", records.len())));
    }
    if let Some(r) = records.iter().find(|r| (r.delta - delta).abs() > 1e-12 * delta.abs().max(1.0)) {
        return Err(Error::Domain(format!("record at ν = {} has δ = {}, expected {delta}", r.nu, r.delta)));
    }
    let mut rows: Vec<&SweepRecord> = records.iter().collect();
    rows.sort_by(|a, b| b.nu.total_cmp(&a.nu));
    let nu_values: Vec<f64> = rows.iter().map(|r| r.nu).collect();
    let x_values: Vec<f64> = rows.iter().map(|r| r.nu.ln().abs().powf(-0.25)).collect();
    let y_values: Vec<f64> = rows.iter().map(|r| r.zeta_delta).collect();
    if x_values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("ν = 1 gives an infinite abscissa".into()));
    }
    let m = x_values.len() as f64;
    let xbar = x_values.iter().sum::<f64>() / m;
    let ybar = y_values.iter().sum::<f64>() / m;
    let sxx: f64 = x_values.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = x_values.iter().zip(&y_values).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let syy: f64 = y_values.iter().map(|y| (y - ybar).powi(2)).sum();
    if !(sxx > 1e-24 * xbar * xbar) {
        return Err(Error::Domain("abscissae |log ν|^{-1/4} have no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let x2: f64 = x_values.iter().map(|x| x * x).sum();
    let xy: f64 = x_values.iter().zip(&y_values).map(|(x, y)| x * y).sum();
    let y2: f64 = y_values.iter().map(|y| y * y).sum();
    let origin_slope = xy / x2;
    let origin_r_squared = if y2 == 0.0 { 1.0 } else { xy * xy / (x2 * y2) };
    Ok(RateFit { slope, intercept, r_squared, origin_slope, origin_r_squared, nu_values, x_values, y_values })
}

/// sup over runs, times and centres of the disk mass, per radius.
#[derive(Clone, Debug, Serialize)]
pub struct NoDiracsReport {
    /// (r, triple sup), r decreasing.
    pub table: Vec<(f64, f64)>,
    pub smallest_r: f64,
    pub smallest_r_value: f64,
    /// smallest_r_value / max over r.
    pub relative_to_max: f64,
    pub threshold: f64,
    /// relative_to_max ≤ threshold.
    pub passes: bool,
}

pub fn verify_no_diracs(samples: &[ConcentrationSample], r_list: &[f64], threshold: f64) -> Result<NoDiracsReport> {
    if r_list.is_empty() {
        return Err(Error::Domain("empty radius list".into()));
    }
    let mut radii = r_list.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    let table: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let sup = samples.iter().filter(|s| (s.r - r).abs() <= 1e-12 * r).map(|s| s.value).fold(0.0, f64::max);
            (r, sup)
        })
        .collect();
    let max = table.iter().map(|p| p.1).fold(0.0, f64::max);
    let &(smallest_r, smallest_r_value) = table.last().expect("non-empty");
    let relative_to_max = if max > 0.0 { smallest_r_value / max } else { 0.0 };
    Ok(NoDiracsReport {
        table,
        smallest_r,
        smallest_r_value,
        relative_to_max,
        threshold,
        passes: relative_to_max <= threshold,
    })
}

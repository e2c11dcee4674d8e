//! Checkers for the refined Nash-type inequalities and builders for the
//! concave envelope Φ and its squared inverse Υ.
//!
//! Every checker returns an [`InequalityReport`] holding both sides with the
//! universal constant stripped, so corpus runs yield empirical constants.

mod corpus;
mod phi;

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::norms::{concentration, concentration_square, lp_norm, Eta, MeasureDecomposition};
use crate::spectral::{convolve, gradient_l2};

pub use corpus::{
    ball_supported_kernels, bump_corpus, random_band_limited, run_refined_suite, BumpFamily, FamilyConstants,
    SuiteSummary, CORPUS_SEED,
};
pub use phi::{build_phi_integral, build_phi_log, build_upsilon, PhiFunction, PhiKind, Upsilon};

/// Slack allowed on the convolution bound for grid effects.
pub const CONVOLUTION_SLACK: f64 = 5e-2;

/// Both sides of one inequality evaluated on one field.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs_without_constant: f64,
    pub ratio: f64,
    pub params: BTreeMap<String, f64>,
    pub resolution: usize,
}

impl InequalityReport {
    pub fn new(
        name: &str,
        lhs: f64,
        rhs_without_constant: f64,
        params: BTreeMap<String, f64>,
        resolution: usize,
    ) -> Result<Self> {
        let ratio = if lhs == 0.0 && rhs_without_constant == 0.0 { 0.0 } else { lhs / rhs_without_constant };
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(Error::Contract(format!(
                "{name}: ratio {lhs}/{rhs_without_constant} is not a finite nonnegative number"
            )));
        }
        Ok(InequalityReport { name: name.to_string(), lhs, rhs_without_constant, ratio, params, resolution })
    }

    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}

fn params<const M: usize>(pairs: [(&str, f64); M]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// ‖f⋆g‖₂ against √(‖f‖₁ · sup_{|B|=|B_*|}‖f‖_{L¹(B)})·‖g‖₂ for g supported
/// in the disk of radius `ball_radius` centred at the origin.
pub fn check_convolution_bound(f: &SpectralField, g: &SpectralField, ball_radius: f64) -> Result<InequalityReport> {
    if f.grid() != g.grid() {
        return Err(Error::Grid("f and g live on different grids".into()));
    }
    if !(ball_radius > 0.0 && ball_radius <= PI) {
        return Err(Error::Domain(format!("ball radius must lie in (0, π], got {ball_radius}")));
    }
    let grid = g.grid();
    let n = grid.n();
    let h = grid.spacing();
    let scale = g.max_abs();
    // Index n/2 holds the coordinate origin.
    let offset = |i: usize| grid.periodic_offset((i + n / 2) % n) as f64 * h;
    for (idx, v) in g.physical().iter().enumerate() {
        let (d1, d2) = (offset(idx / n), offset(idx % n));
        if d1 * d1 + d2 * d2 >= ball_radius * ball_radius && v.abs() > 1e-12 * scale {
            return Err(Error::Contract(format!(
                "g is nonzero outside the disk of radius {ball_radius} at the origin"
            )));
        }
    }
    let lhs = convolve(f, g)?.l2_sq_physical().sqrt();
    let rhs = (lp_norm(f, 1.0)? * concentration(f, ball_radius)?).sqrt() * g.l2_sq_physical().sqrt();
    InequalityReport::new("convolution_bound", lhs, rhs, params([("ball_radius", ball_radius)]), n)
}

/// Free parameters of the refined projection estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectionParams {
    pub alpha: f64,
    pub epsilon: f64,
    pub n_modes: u32,
}

impl ProjectionParams {
    /// ε* = 1/(‖∇f‖ (log‖∇f‖²)^{1/4}), N = ⌈ε*^{-1/2}⌉, α = 1/4.
    pub fn log_preset(grad_norm: f64) -> Result<Self> {
        if !(grad_norm > 1.0) {
            return Err(Error::Domain(format!("log preset needs ‖∇f‖ > 1, got {grad_norm}")));
        }
        let epsilon = 1.0 / (grad_norm * (2.0 * grad_norm.ln()).powf(0.25));
        Self::from_epsilon(epsilon)
    }

    /// ε* = √η(‖∇f‖^{-1/4})/‖∇f‖, N = ⌈ε*^{-1/2}⌉, α = 1/4.
    pub fn eta_preset(grad_norm: f64, eta: &Eta) -> Result<Self> {
        if !(grad_norm > 1.0) {
            return Err(Error::Domain(format!("η preset needs ‖∇f‖ > 1, got {grad_norm}")));
        }
        let epsilon = eta.eval(grad_norm.powf(-0.25)).sqrt() / grad_norm;
        Self::from_epsilon(epsilon)
    }

    fn from_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("preset produced ε = {epsilon} outside (0, 1)")));
        }
        Ok(ProjectionParams { alpha: 0.25, epsilon, n_modes: (1.0 / epsilon.sqrt()).ceil() as u32 })
    }
}

/// ‖f‖₂² against N²‖f‖₁(sup_z ∫_{|z−y|_∞<ε^α}|f| + ‖f‖₁/(Nε^α)) + ‖∇f‖₂²/N².
pub fn check_refined_projection(f: &SpectralField, alpha: f64, epsilon: f64, n_modes: u32) -> Result<InequalityReport> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(format!("need 0 < α < 1/2, got {alpha}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("need 0 < ε < 1, got {epsilon}")));
    }
    if n_modes == 0 {
        return Err(Error::Domain("need N > 0".into()));
    }
    require_mean_free(f)?;
    let n = n_modes as f64;
    let side = epsilon.powf(alpha);
    let l1 = lp_norm(f, 1.0)?;
    let grad_sq = gradient_l2(f).powi(2);
    let rhs = n * n * l1 * (concentration_square(f, side)? + l1 / (n * side)) + grad_sq / (n * n);
    InequalityReport::new(
        "refined_projection",
        f.l2_sq_physical(),
        rhs,
        params([("alpha", alpha), ("epsilon", epsilon), ("N", n)]),
        f.grid().n(),
    )
}

/// ‖f‖₂² against (K²+1)‖∇f‖₂√η(‖∇f‖₂^{-1/4}) with K and η from the family.
pub fn check_refined_nash(f: &SpectralField, eta: &Eta) -> Result<InequalityReport> {
    check_refined_nash_with(f, eta.mass_bound(), |r| eta.eval(r))
}

/// As [`check_refined_nash`] with an arbitrary envelope η and bound K.
pub fn check_refined_nash_with(
    f: &SpectralField,
    mass_bound: f64,
    eta: impl Fn(f64) -> f64,
) -> Result<InequalityReport> {
    require_mean_free(f)?;
    let grad = gradient_l2(f);
    if !(grad > 1.0) {
        return Err(Error::Domain(format!("refined Nash needs ‖∇f‖ > 1, got {grad}")));
    }
    let eta_val = eta(grad.powf(-0.25));
    if !(eta_val > 0.0 && eta_val <= 1.0) {
        return Err(Error::Domain(format!("η returned {eta_val} outside (0, 1]")));
    }
    let rhs = (mass_bound * mass_bound + 1.0) * grad * eta_val.sqrt();
    InequalityReport::new(
        "refined_nash",
        f.l2_sq_physical(),
        rhs,
        params([("K", mass_bound), ("grad_norm", grad), ("eta", eta_val)]),
        f.grid().n(),
    )
}

/// ‖f‖₂² against [‖f‖₁(‖μ‖_{H⁻¹}+‖w‖_{L^p}+‖f‖₁)+1]·‖∇f‖₂/(log‖∇f‖₂)^{1/4}
/// for f = μ + w.
pub fn check_measure_refined(dec: &MeasureDecomposition) -> Result<InequalityReport> {
    let f = dec.total();
    let grad = gradient_l2(f);
    if !(grad > E * E) {
        return Err(Error::Domain(format!("measure estimate needs ‖∇f‖ > e², got {grad}")));
    }
    let rhs = measure_refined_rhs(lp_norm(f, 1.0)?, dec.mu_h_minus1(), dec.w_lp(), grad);
    InequalityReport::new(
        "measure_refined",
        f.l2_sq_physical(),
        rhs,
        params([("p", dec.p()), ("mu_h_minus1", dec.mu_h_minus1()), ("w_lp", dec.w_lp()), ("grad_norm", grad)]),
        f.grid().n(),
    )
}

/// Right-hand side of the measure estimate from its scalar ingredients.
pub fn measure_refined_rhs(f_l1: f64, mu_h_minus1: f64, w_lp: f64, grad: f64) -> f64 {
    (f_l1 * (mu_h_minus1 + w_lp + f_l1) + 1.0) * grad / grad.ln().powf(0.25)
}

/// ‖f‖₂⁴/(‖f‖₁²‖∇f‖₂²) on the torus.
pub fn classical_nash_ratio(f: &SpectralField) -> Result<f64> {
    require_mean_free(f)?;
    let l2_sq = f.l2_sq_physical();
    if l2_sq == 0.0 {
        return Err(Error::Domain("Nash ratio of the zero field".into()));
    }
    let l1 = lp_norm(f, 1.0)?;
    Ok(l2_sq * l2_sq / (l1 * l1 * gradient_l2(f).powi(2)))
}

fn require_mean_free(f: &SpectralField) -> Result<()> {
    if f.is_mean_free() {
        Ok(())
    } else {
        Err(Error::Domain(format!("field must be mean-free (mean = {:.3e})", f.mean())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::norms::{build_eta, ConcentrationProfile};

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn zero_kernel_gives_zero_ratio() {
        let g = grid(32);
        let f = SpectralField::from_fn(&g, |x, y| (x + 2.0 * y).sin());
        let r = check_convolution_bound(&f, &SpectralField::zeros(&g), 0.5).unwrap();
        assert_eq!((r.lhs, r.rhs_without_constant, r.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_against_disk_indicator() {
        let g = grid(128);
        let c = 1.3;
        let f = SpectralField::from_fn(&g, |_, _| c);
        let radius = 0.6;
        let ind = SpectralField::from_fn(&g, |x, y| if x * x + y * y < radius * radius { 1.0 } else { 0.0 });
        let r = check_convolution_bound(&f, &ind, radius).unwrap();
        // f⋆1_B ≡ c|B|, so both sides equal 2πc|B| on the discrete measure.
        assert!(r.ratio <= 1.0 + 1e-12, "{}", r.ratio);
        assert!(r.ratio > 0.99, "{}", r.ratio);
    }

    #[test]
    fn support_violation_is_rejected() {
        let g = grid(32);
        let f = SpectralField::from_fn(&g, |x, _| x.cos());
        let wide = SpectralField::from_fn(&g, |_, _| 1.0);
        assert!(check_convolution_bound(&f, &wide, 0.5).is_err());
    }

    #[test]
    fn refined_projection_of_cosine() {
        let g = grid(128);
        let f = SpectralField::from_fn(&g, |x, _| x.cos());
        let r = check_refined_projection(&f, 0.25, 0.25, 2).unwrap();
        let side = 0.25_f64.powf(0.25);
        // Square of half-width s centred on a crest of cos: 2s·2 sin(s).
        let sq = 4.0 * side * side.sin();
        let l1 = 8.0 * PI;
        let rhs = 4.0 * l1 * (sq + l1 / (2.0 * side)) + 2.0 * PI * PI / 4.0;
        assert!((r.lhs - 2.0 * PI * PI).abs() < 1e-10);
        assert!((r.rhs_without_constant - rhs).abs() < 1e-2 * rhs);
        assert!(check_refined_projection(&f, 0.5, 0.25, 2).is_err());
        assert!(check_refined_projection(&f, 0.25, 1.0, 2).is_err());
        assert!(check_refined_projection(&f, 0.25, 0.25, 0).is_err());
    }

    #[test]
    fn refined_nash_of_cosine_family() {
        let g = grid(64);
        let f = SpectralField::from_fn(&g, |x, _| 3.0 * x.cos());
        let radii = ConcentrationProfile::default_radii(&g, 16);
        let profile = ConcentrationProfile::from_family(std::slice::from_ref(&f), &radii).unwrap();
        let eta = build_eta(&profile);
        let r = check_refined_nash(&f, &eta).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        let weak = SpectralField::from_fn(&g, |x, _| 0.1 * x.cos());
        assert!(check_refined_nash(&weak, &eta).is_err());
    }

    #[test]
    fn measure_rhs_is_monotone() {
        let base = measure_refined_rhs(2.0, 1.0, 1.0, 20.0);
        assert!(measure_refined_rhs(2.1, 1.0, 1.0, 20.0) > base);
        assert!(measure_refined_rhs(2.0, 1.1, 1.0, 20.0) > base);
        assert!(measure_refined_rhs(2.0, 1.0, 1.1, 20.0) > base);
    }

    #[test]
    fn classical_nash_of_cosine() {
        let g = grid(256);
        let f = SpectralField::from_fn(&g, |x, _| x.cos());
        // ∫|cos| on a grid is second-order accurate only.
        let r = classical_nash_ratio(&f).unwrap();
        assert!((r - 1.0 / 32.0).abs() < 1e-3 / 32.0, "{r}");
        assert!(classical_nash_ratio(&SpectralField::zeros(&g)).is_err());
    }

    #[test]
    fn presets_land_in_range() {
        let p = ProjectionParams::log_preset(10.0).unwrap();
        assert!(p.epsilon > 0.0 && p.epsilon < 1.0);
        assert_eq!(p.n_modes, (1.0 / p.epsilon.sqrt()).ceil() as u32);
        assert!(ProjectionParams::log_preset(0.5).is_err());
    }
}

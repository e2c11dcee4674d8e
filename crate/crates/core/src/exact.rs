//! Closed-form and one-dimensional references: shear modes on the torus and
//! radial heat flow on the plane for the concentrating annular example.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::quadrature::{integrate, integrate_breaks, GaussLegendre, Tolerance};

/// e^{-z} I₀(z) for z ≥ 0: power series below 20, asymptotic series above.
pub fn i0e(z: f64) -> f64 {
    let z = z.abs();
    if z < 20.0 {
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-z).exp()
    } else {
        let mut term: f64 = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * z);
            if next.abs() >= term.abs() || next.abs() < 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * z).sqrt()
    }
}

const GL_ORDER: usize = 10;
const TOL: Tolerance = Tolerance::new(1e-16, 1e-12);

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial function ω(|x|) on [0, r_max] with a Gauss–Legendre node set.
///
/// `weights` integrate plain functions of r: ∫₀^{r_max} g(r) dr ≈ Σ wᵢ g(rᵢ).
/// The profile is evaluated anywhere through its evaluator; `breakpoints`
/// bracket its support and mark its non-smooth points.
#[derive(Clone)]
pub struct RadialProfile {
    r_nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
    breakpoints: Vec<f64>,
    r_max: f64,
    eval: RadialFn,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("nodes", &self.r_nodes.len())
            .field("breakpoints", &self.breakpoints)
            .field("r_max", &self.r_max)
            .finish()
    }
}

impl RadialProfile {
    /// Tabulates `eval` on `panels` Gauss–Legendre panels per breakpoint
    /// interval. The function is taken to vanish outside the breakpoints.
    pub fn from_fn(eval: RadialFn, breakpoints: Vec<f64>, r_max: f64, panels: usize) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        if breakpoints[0] < 0.0 || r_max < breakpoints[breakpoints.len() - 1] {
            return Err(Error::Domain("breakpoints must lie in [0, r_max]".into()));
        }
        let gl = GaussLegendre::new(GL_ORDER);
        let mut r_nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breakpoints.windows(2) {
            let width = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let a = w[0] + p as f64 * width;
                for (x, wt) in gl.on(a, a + width) {
                    r_nodes.push(x);
                    weights.push(wt);
                }
            }
        }
        let values = r_nodes.iter().map(|&r| eval(r)).collect();
        Ok(RadialProfile { r_nodes, values, weights, breakpoints, r_max, eval })
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Smallest interval outside which the profile vanishes.
    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn eval(&self, r: f64) -> f64 {
        let (lo, hi) = self.support();
        if r < lo || r > hi {
            0.0
        } else {
            (self.eval)(r)
        }
    }

    /// Σ wᵢ rᵢ^p g(vᵢ) over the node set.
    fn node_sum(&self, p: i32, g: impl Fn(f64) -> f64) -> f64 {
        self.r_nodes.iter().zip(&self.values).zip(&self.weights).map(|((r, v), w)| w * r.powi(p) * g(*v)).sum()
    }

    /// ∫ s ω(s) ds.
    pub fn first_moment(&self) -> f64 {
        self.node_sum(1, |v| v)
    }

    /// ‖ω‖_{L¹(ℝ²)} = 2π∫ s|ω(s)| ds.
    pub fn l1_plane(&self) -> f64 {
        2.0 * PI * self.node_sum(1, f64::abs)
    }

    /// ‖ω‖²_{L²(ℝ²)} = 2π∫ s ω(s)² ds.
    pub fn l2_sq_plane(&self) -> f64 {
        2.0 * PI * self.node_sum(1, |v| v * v)
    }

    /// The concentrating rescaling ν⁻²ω(r/ν).
    pub fn scaled(&self, nu: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {nu}")));
        }
        let base = self.eval.clone();
        let (lo, hi) = self.support();
        let eval: RadialFn = Arc::new(move |r| {
            let s = r / nu;
            if s < lo || s > hi {
                0.0
            } else {
                base(s) / (nu * nu)
            }
        });
        let breakpoints = self.breakpoints.iter().map(|b| b * nu).collect();
        let panels = self.r_nodes.len() / (GL_ORDER * (self.breakpoints.len() - 1));
        RadialProfile::from_fn(eval, breakpoints, self.r_max * nu, panels.max(1))
    }

    /// Writes (r, value) rows at the nodes.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "value"])?;
        for (r, v) in self.r_nodes.iter().zip(&self.values) {
            w.serialize((r, v))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Geometry of the two-bump annular profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnularGeometry {
    pub r_inner: f64,
    pub r_mid: f64,
    pub r_outer: f64,
    /// c in the bump shape exp(−c/(1−u²)).
    pub smoothness: f64,
}

impl Default for AnnularGeometry {
    fn default() -> Self {
        AnnularGeometry { r_inner: 0.5, r_mid: 1.0, r_outer: 1.5, smoothness: 1.0 }
    }
}

/// φ = a₁·bump[r_inner, r_mid] − a₂·bump[r_mid, r_outer].
#[derive(Clone, Debug)]
pub struct AnnularProfile {
    pub profile: RadialProfile,
    pub a1: f64,
    pub a2: f64,
    pub geometry: AnnularGeometry,
}

fn bump(s: f64, lo: f64, hi: f64, c: f64) -> f64 {
    let u = (2.0 * s - lo - hi) / (hi - lo);
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-c / (1.0 - u * u)).exp()
    }
}

/// Builds φ with ∫ sφ ds = 0 and ∫ s|φ| ds = 1/(2π), i.e. a mean-zero
/// radial vorticity of unit L¹ mass.
pub fn make_annular_profile(geometry: AnnularGeometry) -> Result<AnnularProfile> {
    let AnnularGeometry { r_inner, r_mid, r_outer, smoothness } = geometry;
    if !(0.0 < r_inner && r_inner < r_mid && r_mid < r_outer && r_outer.is_finite()) {
        return Err(Error::Domain(format!("need 0 < r_inner < r_mid < r_outer, got {r_inner}, {r_mid}, {r_outer}")));
    }
    if !(smoothness > 0.0) {
        return Err(Error::Domain(format!("smoothness must be positive, got {smoothness}")));
    }
    let m1 = integrate(|s| s * bump(s, r_inner, r_mid, smoothness), r_inner, r_mid, TOL)?;
    let m2 = integrate(|s| s * bump(s, r_mid, r_outer, smoothness), r_mid, r_outer, TOL)?;
    let a1 = 1.0 / (4.0 * PI * m1);
    let a2 = 1.0 / (4.0 * PI * m2);
    let eval: RadialFn = Arc::new(move |s| {
        if s < r_mid {
            a1 * bump(s, r_inner, r_mid, smoothness)
        } else {
            -a2 * bump(s, r_mid, r_outer, smoothness)
        }
    });
    let profile = RadialProfile::from_fn(eval, vec![r_inner, r_mid, r_outer], 20.0 * r_outer, 64)?;
    Ok(AnnularProfile { profile, a1, a2, geometry })
}

/// Value at r of the viscosity-ν heat flow of `profile` after time t:
/// ∫ (s/(2νt)) e^{−(r−s)²/(4νt)} I₀e(rs/(2νt)) φ(s) ds.
pub fn heat_value(profile: &RadialProfile, nu: f64, t: f64, r: f64) -> Result<f64> {
    let four_nu_t = 4.0 * nu * t;
    let two_nu_t = 2.0 * nu * t;
    let ell = four_nu_t.sqrt();
    let (lo, hi) = profile.support();
    let mut pts: Vec<f64> = profile.breakpoints().to_vec();
    for p in [r - 8.0 * ell, r - ell, r, r + ell, r + 8.0 * ell] {
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    integrate_breaks(
        |s| {
            let d = r - s;
            s / two_nu_t * (-d * d / four_nu_t).exp() * i0e(r * s / two_nu_t) * profile.eval(s)
        },
        &pts,
        TOL,
    )
}

fn check_nu_t(nu: f64, t: f64) -> Result<()> {
    if !(nu > 0.0 && t > 0.0 && nu.is_finite() && t.is_finite()) {
        return Err(Error::Domain(format!("need ν > 0 and t > 0, got ν = {nu}, t = {t}")));
    }
    Ok(())
}

/// Breakpoints covering the support of the evolved profile.
fn evolved_breaks(profile: &RadialProfile, nu: f64, t: f64) -> Vec<f64> {
    let ell = (4.0 * nu * t).sqrt();
    let (lo, hi) = profile.support();
    let a = (lo - 10.0 * ell).max(0.0);
    let b = hi + 10.0 * ell;
    let mut pts = vec![a];
    for &p in profile.breakpoints() {
        if p > a && p < b {
            pts.push(p);
        }
    }
    pts.push(b);
    pts
}

/// The profile after heat flow with viscosity ν for time t.
pub fn radial_heat_evolve(profile: &RadialProfile, nu: f64, t: f64) -> Result<RadialProfile> {
    check_nu_t(nu, t)?;
    let ell = (4.0 * nu * t).sqrt();
    let breaks = evolved_breaks(profile, nu, t);
    let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
    let r_max = 20.0 * (profile.support().1 + 6.0 * (nu * t).sqrt());
    let source = profile.clone();
    let eval: RadialFn = Arc::new(move |r| heat_value(&source, nu, t, r).unwrap_or(f64::NAN));
    let panels = (((hi - lo) / (0.5 * ell)).ceil() as usize / (breaks.len() - 1)).clamp(16, 4096);
    let out = RadialProfile::from_fn(eval, breaks, r_max, panels)?;
    if out.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature(format!("heat kernel quadrature failed at t = {t}")));
    }
    Ok(out)
}

/// r ↦ u_θ(r) = (1/r)∫₀^r s ω(s) ds.
pub fn radial_velocity(profile: &RadialProfile) -> impl Fn(f64) -> f64 + '_ {
    move |r: f64| {
        let (lo, hi) = profile.support();
        if r <= lo {
            return 0.0;
        }
        let top = r.min(hi);
        let mut pts: Vec<f64> = profile.breakpoints().iter().copied().filter(|&b| b < top).collect();
        pts.push(top);
        integrate_breaks(|s| s * profile.eval(s), &pts, TOL).unwrap_or(f64::NAN) / r
    }
}

/// 2π∫₀^ρ s|ω(s)| ds: the mass of |ω| in the centred disk of radius ρ.
pub fn radial_disk_mass(profile: &RadialProfile, rho: f64) -> Result<f64> {
    let (lo, hi) = profile.support();
    if rho <= lo {
        return Ok(0.0);
    }
    let top = rho.min(hi);
    let mut pts: Vec<f64> = profile.breakpoints().iter().copied().filter(|&b| b < top).collect();
    pts.push(top);
    Ok(2.0 * PI * integrate_breaks(|s| s * profile.eval(s).abs(), &pts, TOL)?)
}

/// ‖Ω(τ)‖²_{L²(ℝ²)} for the unit-viscosity flow Ω of φ, computed by the
/// semigroup identity ‖Ω(τ)‖² = ⟨φ, Ω(2τ)⟩ = 2π∫ s φ(s) Ω(s, 2τ) ds.
pub fn unit_enstrophy(profile: &RadialProfile, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(profile.l2_sq_plane());
    }
    check_nu_t(1.0, tau)?;
    let inner = |s: f64| heat_value(profile, 1.0, 2.0 * tau, s).unwrap_or(f64::NAN);
    let v = integrate_breaks(|s| s * profile.eval(s) * inner(s), profile.breakpoints(), TOL)?;
    if !v.is_finite() {
        return Err(Error::Quadrature(format!("enstrophy quadrature failed at τ = {tau}")));
    }
    Ok(2.0 * PI * v)
}

/// Log-spaced breakpoints on [0, upper] for integrands smooth in log τ.
fn log_breaks(upper: f64, lowest: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut p = lowest;
    while p < upper {
        pts.push(p);
        p *= 4.0;
    }
    pts.push(upper);
    pts
}

/// ζ^ν(T) = ν∫₀ᵀ‖ω^ν(t)‖² dt for data ν⁻²φ(·/ν), by the rescaling identity
/// ζ^ν(T) = ∫₀^{T/ν}‖Ω(τ)‖² dτ.
pub fn anomalous_dissipation(profile: &RadialProfile, nu: f64, horizon: f64) -> Result<f64> {
    check_nu_t(nu, horizon)?;
    integrate_unit_enstrophy(profile, horizon / nu)
}

fn integrate_unit_enstrophy(profile: &RadialProfile, upper: f64) -> Result<f64> {
    let pts = log_breaks(upper, 1e-6);
    let tol = Tolerance::new(1e-15, 1e-10);
    let v = integrate_breaks(|tau| unit_enstrophy(profile, tau).unwrap_or(f64::NAN), &pts, tol)?;
    if !v.is_finite() {
        return Err(Error::Quadrature("time quadrature of the enstrophy failed".into()));
    }
    Ok(v)
}

/// C_∞ = ∫₀^∞‖Ω(τ)‖² dτ, the ν → 0 limit of ζ^ν(T).
pub fn anomalous_limit(profile: &RadialProfile) -> Result<f64> {
    // ‖Ω(τ)‖² decays like τ⁻³ for mean-zero data; past 10⁶ it is negligible.
    integrate_unit_enstrophy(profile, 1e6)
}

/// ζ^ν(T) by direct quadrature of ν∫₀ᵀ 2π∫ r ω^ν(r,t)² dr dt on the scaled
/// evolution, independently of the rescaling identity.
pub fn anomalous_dissipation_direct(profile: &RadialProfile, nu: f64, horizon: f64) -> Result<f64> {
    check_nu_t(nu, horizon)?;
    let scaled = profile.scaled(nu)?;
    let enstrophy = |t: f64| -> f64 {
        if t == 0.0 {
            return scaled.l2_sq_plane();
        }
        let breaks = evolved_breaks(&scaled, nu, t);
        let v = integrate_breaks(
            |r| {
                let w = heat_value(&scaled, nu, t, r).unwrap_or(f64::NAN);
                r * w * w
            },
            &breaks,
            TOL,
        );
        2.0 * PI * v.unwrap_or(f64::NAN)
    };
    let pts = log_breaks(horizon, 1e-6 * nu);
    let v = integrate_breaks(enstrophy, &pts, Tolerance::new(1e-15, 1e-9))?;
    if !v.is_finite() {
        return Err(Error::Quadrature("direct dissipation quadrature failed".into()));
    }
    Ok(nu * v)
}

/// The exact shear solution ω = e^{−νk²t}cos(kx₁) and its dissipation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShearReference {
    pub k: u32,
    pub nu: f64,
    pub horizon: f64,
    /// ζ^ν(T) = π²(1 − e^{−2νk²T})/k².
    pub zeta: f64,
}

pub fn shear_mode_reference(k: u32, nu: f64, horizon: f64) -> Result<ShearReference> {
    if k == 0 {
        return Err(Error::Domain("shear wavenumber must be at least 1".into()));
    }
    check_nu_t(nu, horizon)?;
    let kk = (k * k) as f64;
    Ok(ShearReference { k, nu, horizon, zeta: PI * PI * (-(-2.0 * nu * kk * horizon).exp_m1()) / kk })
}

impl ShearReference {
    pub fn omega(&self, grid: &GridSpec, t: f64) -> SpectralField {
        let k = self.k as f64;
        let decay = (-self.nu * k * k * t).exp();
        SpectralField::from_fn(grid, |x1, _| decay * (k * x1).cos())
    }

    /// ζ^ν(t) for any t.
    pub fn zeta_at(&self, t: f64) -> f64 {
        let kk = (self.k * self.k) as f64;
        PI * PI * (-(-2.0 * self.nu * kk * t).exp_m1()) / kk
    }
}

/// Writes (nu, zeta, method) rows.
pub fn write_zeta_table(path: &Path, rows: &[(f64, f64, &str)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["nu", "zeta", "method"])?;
    for (nu, zeta, method) in rows {
        w.serialize((nu, zeta, method))?;
    }
    w.flush()?;
    Ok(())
}

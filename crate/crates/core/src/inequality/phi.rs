//! Concave envelopes Φ and the superquadratic Υ = (Φ⁻¹)².

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_breaks, Tolerance};

const TABLE_MIN: f64 = 1e-6;
const TABLE_MAX: f64 = 1e12;
const POINTS_PER_DECADE: usize = 64;
const INVERSE_REL_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PhiKind {
    /// Φ(x) = ∫₀ˣ C√η̄(πy^{-1/4}) dy.
    Integral,
    /// Φ = (L+1)Φ₁ with Φ₁ = Cx/(log x)^{1/4} past e².
    Log,
}

/// Coefficients of the log-form construction.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogParts {
    /// Φ₁(x) = a x − b x² on [0, e²].
    pub a: f64,
    pub b: f64,
    /// L = Φ₂(e²)/Φ₁(e²).
    pub l: f64,
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A concave increasing function tabulated on a log grid over [1e-6, 1e12].
#[derive(Clone)]
pub struct PhiFunction {
    kind: PhiKind,
    constant: f64,
    poincare_constant: f64,
    table: Vec<(f64, f64)>,
    eval: Evaluator,
    log_parts: Option<LogParts>,
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiFunction")
            .field("kind", &self.kind)
            .field("constant", &self.constant)
            .field("poincare_constant", &self.poincare_constant)
            .field("table_len", &self.table.len())
            .field("log_parts", &self.log_parts)
            .finish()
    }
}

fn log_grid() -> Vec<f64> {
    let decades = (TABLE_MAX / TABLE_MIN).log10().round() as usize;
    let count = decades * POINTS_PER_DECADE;
    (0..=count).map(|i| TABLE_MIN * 10f64.powf(i as f64 / POINTS_PER_DECADE as f64)).collect()
}

/// Tabulates Φ(x) = ∫₀ˣ C√η̄(πy^{-1/4}) dy.
///
/// `eta_bar` must be nondecreasing with values in (0, 1]. Between table
/// nodes Φ is evaluated by quadrature from the nearest node below.
pub fn build_phi_integral<F>(eta_bar: F, c: f64) -> Result<PhiFunction>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if !(c > 0.0) {
        return Err(Error::Domain(format!("Φ constant must be positive, got {c}")));
    }
    let eta_bar = Arc::new(eta_bar);
    let integrand = {
        let eta_bar = Arc::clone(&eta_bar);
        move |y: f64| c * eta_bar(PI * y.powf(-0.25)).max(0.0).sqrt()
    };
    let tol = Tolerance::new(1e-300, 1e-13);
    let xs = log_grid();

    // On [0, x0] substitute y = x0·u⁸ to tame the y^{-1/8}-type endpoint.
    let x0 = xs[0];
    let head = integrate(
        |u| {
            if u == 0.0 {
                0.0
            } else {
                integrand(x0 * u.powi(8)) * 8.0 * x0 * u.powi(7)
            }
        },
        0.0,
        1.0,
        tol,
    )?;
    let mut table = Vec::with_capacity(xs.len());
    table.push((x0, head));
    let mut acc = head;
    for w in xs.windows(2) {
        // η̄ jumps to 1 at r = π, i.e. y = 1; split there for the kink.
        let (a, b) = (w[0], w[1]);
        let seg = if a < 1.0 && 1.0 < b {
            integrate_breaks(&integrand, &[a, 1.0, b], tol)?
        } else {
            integrate(&integrand, a, b, tol)?
        };
        acc += seg;
        table.push((b, acc));
    }

    let nodes = table.clone();
    let eval: Evaluator = Arc::new(move |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let (base_x, base_v) = if x < nodes[0].0 {
            (0.0, 0.0)
        } else {
            let i = nodes.partition_point(|p| p.0 <= x) - 1;
            nodes[i]
        };
        if x == base_x {
            return base_v;
        }
        let part = if base_x == 0.0 {
            integrate(
                |u| {
                    if u == 0.0 {
                        0.0
                    } else {
                        integrand(x * u.powi(8)) * 8.0 * x * u.powi(7)
                    }
                },
                0.0,
                1.0,
                tol,
            )
        } else if base_x < 1.0 && 1.0 < x {
            integrate_breaks(&integrand, &[base_x, 1.0, x], tol)
        } else {
            integrate(&integrand, base_x, x, tol)
        };
        base_v + part.unwrap_or(f64::NAN)
    });
    let phi =
        PhiFunction { kind: PhiKind::Integral, constant: c, poincare_constant: 1.0, table, eval, log_parts: None };
    phi.validate()?;
    Ok(phi)
}

/// Builds Φ = (L+1)Φ₁ from Φ₁(x) = Cx/(log x)^{1/4} on (e², ∞), extended to
/// [0, e²] by the quadratic a x − b x² matching value and slope at e².
pub fn build_phi_log(c: f64, c_p: f64) -> Result<PhiFunction> {
    if !(c > 0.0 && c_p > 0.0) {
        return Err(Error::Domain(format!("need C > 0 and C_P > 0, got {c}, {c_p}")));
    }
    let e2 = E * E;
    let value = c * e2 / 2f64.powf(0.25);
    let slope = c * (2f64.powf(-0.25) - 0.25 * 2f64.powf(-1.25));
    let b = (value - slope * e2) / (e2 * e2);
    let a = slope + 2.0 * b * e2;
    if !(b > 0.0 && a - 2.0 * b * e2 > 0.0) {
        return Err(Error::Contract(format!("quadratic extension is not concave increasing (a = {a}, b = {b})")));
    }
    let l = c_p * e2 * e2 / value;
    let parts = LogParts { a, b, l };
    let eval: Evaluator = Arc::new(move |x: f64| (l + 1.0) * phi1(c, parts, x));
    let table = log_grid().into_iter().map(|x| (x, eval(x))).collect();
    let phi =
        PhiFunction { kind: PhiKind::Log, constant: c, poincare_constant: c_p, table, eval, log_parts: Some(parts) };
    phi.validate()?;
    Ok(phi)
}

fn phi1(c: f64, parts: LogParts, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= E * E {
        parts.a * x - parts.b * x * x
    } else {
        c * x / x.ln().powf(0.25)
    }
}

impl PhiFunction {
    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn poincare_constant(&self) -> f64 {
        self.poincare_constant
    }

    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    pub fn log_parts(&self) -> Option<LogParts> {
        self.log_parts
    }

    /// Largest tabulated abscissa.
    pub fn x_max(&self) -> f64 {
        self.table[self.table.len() - 1].0
    }

    /// Φ(x) for x ≥ 0.
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Φ₁ of the log form.
    pub fn phi1(&self, x: f64) -> Option<f64> {
        self.log_parts.map(|p| phi1(self.constant, p, x))
    }

    /// Φ₂(x) = C_P x².
    pub fn phi2(&self, x: f64) -> f64 {
        self.poincare_constant * x * x
    }

    /// Left and right derivatives of Φ₁ at e² (log form only).
    pub fn junction_slopes(&self) -> Option<(f64, f64)> {
        self.log_parts.map(|p| {
            let e2 = E * E;
            let left = p.a - 2.0 * p.b * e2;
            let lx = e2.ln();
            let right = self.constant * (lx.powf(-0.25) - 0.25 * lx.powf(-1.25));
            (left, right)
        })
    }

    /// Table is strictly increasing and starts above Φ(0) = 0.
    pub fn is_increasing(&self) -> bool {
        self.table[0].1 > 0.0 && self.table.windows(2).all(|w| w[1].1 > w[0].1)
    }

    /// Secant slopes (from the origin) are nonincreasing up to round-off.
    pub fn is_concave(&self) -> bool {
        let mut prev = self.table[0].1 / self.table[0].0;
        for w in self.table.windows(2) {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if s > prev * (1.0 + 1e-9) {
                return false;
            }
            prev = s;
        }
        true
    }

    fn validate(&self) -> Result<()> {
        if self.table.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::Quadrature("Φ table has non-finite entries".into()));
        }
        if !self.is_increasing() {
            return Err(Error::Contract("Φ table is not strictly increasing".into()));
        }
        if !self.is_concave() {
            return Err(Error::Contract("Φ table is not concave".into()));
        }
        Ok(())
    }

    /// Φ⁻¹(y) by bisection, bracketed by the table.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let top = self.table[self.table.len() - 1].1;
        if !(y >= 0.0 && y <= top) {
            return Err(Error::Domain(format!("Φ⁻¹ query {y} outside the table range [0, {top}]")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let i = self.table.partition_point(|p| p.1 < y);
        let (mut lo, mut hi) = if i == 0 { (0.0, self.table[0].0) } else { (self.table[i - 1].0, self.table[i].0) };
        while hi - lo > INVERSE_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Υ = (Φ⁻¹)².
#[derive(Clone, Debug)]
pub struct Upsilon {
    phi: PhiFunction,
}

pub fn build_upsilon(phi: PhiFunction) -> Result<Upsilon> {
    if !phi.is_increasing() {
        return Err(Error::Contract("Υ needs a strictly increasing Φ".into()));
    }
    Ok(Upsilon { phi })
}

impl Upsilon {
    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.phi.inverse(x)?.powi(2))
    }

    /// Largest admissible argument.
    pub fn x_max(&self) -> f64 {
        self.phi.table[self.phi.table.len() - 1].1
    }

    /// Samples Υ at the Φ-table values, i.e. at points where Υ = x_i².
    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.phi.table.iter().map(|&(x, y)| (y, x * x)).collect()
    }

    /// Secant slopes of `samples` nondecreasing up to round-off.
    pub fn is_convex_on(samples: &[(f64, f64)]) -> bool {
        let slopes: Vec<f64> = samples.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        slopes.windows(2).all(|s| s[1] >= s[0] * (1.0 - 1e-9))
    }

    /// Υ(x)/x² nondecreasing on `samples` up to round-off.
    pub fn is_superquadratic_on(samples: &[(f64, f64)]) -> bool {
        samples.windows(2).all(|w| w[1].1 / (w[1].0 * w[1].0) >= w[0].1 / (w[0].0 * w[0].0) * (1.0 - 1e-9))
    }
}

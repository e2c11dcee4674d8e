//! Propagation of the maximal function ℳ_s along a forced trajectory.

use serde::Serialize;

use super::Forcing;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::norms::MaximalTable;

/// ℳ_s(ω(t)) against ℳ_s(ω₀) + ∫₀ᵗ ℳ_s(curl F(τ)) dτ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MaximalPropagationRow {
    pub t: f64,
    pub s: f64,
    pub lhs: f64,
    pub initial: f64,
    pub forcing_integral: f64,
    pub rhs: f64,
    /// (lhs − rhs)/rhs; nonpositive when the bound holds.
    pub relative_excess: f64,
}

/// Evaluates the bound at each snapshot and each s. The forcing integral
/// uses composite Simpson with `intervals` panels per snapshot time.
pub fn maximal_propagation(
    omega0: &SpectralField,
    snapshots: &[(f64, SpectralField)],
    forcing: &dyn Forcing,
    s_values: &[f64],
    intervals: usize,
) -> Result<Vec<MaximalPropagationRow>> {
    if intervals < 2 || !intervals.is_multiple_of(2) {
        return Err(Error::Domain(format!("Simpson needs an even panel count, got {intervals}")));
    }
    let grid = omega0.grid();
    let initial = MaximalTable::new(omega0);
    let mut rows = Vec::new();
    for (t, field) in snapshots {
        let t = *t;
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("snapshot time {t} is negative")));
        }
        let here = MaximalTable::new(field);
        let h = t / intervals as f64;
        let forcing_tables: Vec<MaximalTable> =
            (0..=intervals).map(|i| MaximalTable::new(&forcing.curl_field(grid, i as f64 * h))).collect();
        for &s in s_values {
            let mut acc = 0.0;
            for (i, tab) in forcing_tables.iter().enumerate() {
                let w = if i == 0 || i == intervals {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * tab.eval(s)?;
            }
            let forcing_integral = acc * h / 3.0;
            let lhs = here.eval(s)?;
            let init = initial.eval(s)?;
            let rhs = init + forcing_integral;
            rows.push(MaximalPropagationRow {
                t,
                s,
                lhs,
                initial: init,
                forcing_integral,
                rhs,
                relative_excess: (lhs - rhs) / rhs,
            });
        }
    }
    Ok(rows)
}

//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

/// Cell-centred finite-volume Crank–Nicolson solver for the radial heat
/// equation ∂ₜω = ν r⁻¹∂ᵣ(r ∂ᵣω) on [0, R] with zero flux at both ends.
pub struct RadialCrankNicolson {
    pub dr: f64,
    pub centres: Vec<f64>,
    pub values: Vec<f64>,
    pub nu: f64,
    pub t: f64,
}

impl RadialCrankNicolson {
    pub fn new(phi: impl Fn(f64) -> f64, nu: f64, r_max: f64, dr: f64) -> Self {
        let m = (r_max / dr).round() as usize;
        let centres: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * dr).collect();
        let values = centres.iter().map(|&r| phi(r)).collect();
        RadialCrankNicolson { dr, centres, values, nu, t: 0.0 }
    }

    /// Off-diagonal couplings (lower, upper) of row i of the operator.
    fn couplings(&self, i: usize) -> (f64, f64) {
        let m = self.centres.len();
        let r = self.centres[i];
        let scale = self.nu / (r * self.dr * self.dr);
        let lower = if i == 0 { 0.0 } else { scale * i as f64 * self.dr };
        let upper = if i + 1 == m { 0.0 } else { scale * (i + 1) as f64 * self.dr };
        (lower, upper)
    }

    pub fn step(&mut self, dt: f64) {
        let m = self.values.len();
        let h = 0.5 * dt;
        let mut rhs = vec![0.0; m];
        let mut lo = vec![0.0; m];
        let mut di = vec![0.0; m];
        let mut up = vec![0.0; m];
        for i in 0..m {
            let (l, u) = self.couplings(i);
            let mut v = (1.0 - h * (l + u)) * self.values[i];
            if i > 0 {
                v += h * l * self.values[i - 1];
            }
            if i + 1 < m {
                v += h * u * self.values[i + 1];
            }
            rhs[i] = v;
            lo[i] = -h * l;
            di[i] = 1.0 + h * (l + u);
            up[i] = -h * u;
        }
        // Thomas algorithm.
        for i in 1..m {
            let w = lo[i] / di[i - 1];
            di[i] -= w * up[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        self.values[m - 1] = rhs[m - 1] / di[m - 1];
        for i in (0..m - 1).rev() {
            self.values[i] = (rhs[i] - up[i] * self.values[i + 1]) / di[i];
        }
        self.t += dt;
    }

    /// Advances to `target` with steps no longer than `dt`.
    pub fn advance_to(&mut self, target: f64, dt: f64) {
        let remaining = target - self.t;
        if remaining <= 0.0 {
            return;
        }
        let steps = (remaining / dt).ceil() as usize;
        let h = remaining / steps as f64;
        for _ in 0..steps {
            self.step(h);
        }
        self.t = target;
    }
}

/// Reference values computed with scipy in double precision for the
/// default annular profile.
pub mod reference {
    pub const A1: f64 = 0.9558988574239978;
    pub const A2: f64 = 0.5735393144543985;
    pub const C_INF: f64 = 0.00764291229287295;
    pub const ZETA_T1: [(f64, f64); 5] = [
        (0.1, 0.007641400479822079),
        (0.04, 0.007642666358486356),
        (0.02, 0.007642850467363967),
        (0.01, 0.007642896793524647),
        (0.005, 0.00764290841264992),
    ];
    pub const PHI_LOG_L: f64 = 8.787118086002577;
}

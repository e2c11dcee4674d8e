//! Pseudo-spectral integrating-factor RK4 solver for
//! ∂ₜω + u·∇ω = νΔω + curl F on the torus, with dissipation and balance
//! diagnostics.

mod forcing;
mod propagation;

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::Serialize;

pub use forcing::{Forcing, NoForcing, RotatingBlob};
pub use propagation::{maximal_propagation, MaximalPropagationRow};

use crate::error::{Error, Result};
use crate::field::{SpectralField, VelocityField};
use crate::grid::GridSpec;
use crate::spectral::biot_savart;

const AREA: f64 = 4.0 * PI * PI;
const TIME_EPS: f64 = 1e-12;

/// Step-size control.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolverOptions {
    /// dt = safety · spacing / max|u|.
    pub cfl_safety: f64,
    /// Steps between CFL re-evaluations.
    pub cfl_interval: usize,
    /// Upper bound on dt, used when the flow is slow or at rest.
    pub dt_max: f64,
    /// Lower bound on dt.
    pub dt_floor: f64,
    /// Drop u·∇ω and solve the forced heat equation.
    pub advection: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { cfl_safety: 0.5, cfl_interval: 10, dt_max: 0.05, dt_floor: 1e-7, advection: true }
    }
}

impl SolverOptions {
    /// Defaults with dt floored at `horizon`/10⁷.
    pub fn for_horizon(horizon: f64) -> Self {
        SolverOptions { dt_floor: horizon * 1e-7, ..Self::default() }
    }
}

/// Running time integrals, all starting at t = 0.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Cumulative {
    /// ∫‖ω‖₂².
    pub enstrophy: f64,
    /// ∫‖∇ω‖₂².
    pub palinstrophy: f64,
    /// ∫⟨curl F, ω⟩.
    pub curl_pairing: f64,
    /// ∫⟨F, u⟩.
    pub work: f64,
    /// ∫‖F‖₂².
    pub forcing_sq: f64,
}

impl Cumulative {
    fn axpy(&mut self, a: f64, q: &Cumulative) {
        self.enstrophy += a * q.enstrophy;
        self.palinstrophy += a * q.palinstrophy;
        self.curl_pairing += a * q.curl_pairing;
        self.work += a * q.work;
        self.forcing_sq += a * q.forcing_sq;
    }

    fn lerp(a: &Cumulative, b: &Cumulative, s: f64) -> Cumulative {
        let mut out = *a;
        out.axpy(-s, a);
        out.axpy(s, b);
        out
    }
}

/// Diagnostics recorded after every step.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagnosticSample {
    pub t: f64,
    pub l2_omega_sq: f64,
    pub l1_omega: f64,
    pub energy: f64,
    /// Step that produced this sample; 0 for the initial sample.
    pub dt: f64,
    #[serde(skip)]
    pub integrals: Cumulative,
}

/// Per-mode multipliers shared by all stages.
struct Operators {
    k1: Vec<f64>,
    k2: Vec<f64>,
    ksq: Vec<f64>,
    mask: Vec<f64>,
}

impl Operators {
    fn new(grid: &GridSpec) -> Self {
        let cut = grid.dealias_cutoff() as i64;
        let len = grid.len();
        let (mut k1, mut k2, mut ksq, mut mask) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
        for idx in 0..len {
            let (a, b) = grid.wavevector(idx);
            k1[idx] = a as f64;
            k2[idx] = b as f64;
            ksq[idx] = (a * a + b * b) as f64;
            mask[idx] = if a.abs() <= cut && b.abs() <= cut { 1.0 } else { 0.0 };
        }
        Operators { k1, k2, ksq, mask }
    }
}

/// State of one viscous run.
pub struct SolverState {
    grid: GridSpec,
    omega_hat: Vec<Complex64>,
    t: f64,
    nu: f64,
    forcing: Arc<dyn Forcing>,
    options: SolverOptions,
    ops: Operators,
    history: Vec<DiagnosticSample>,
    integrals: Cumulative,
    dt: Option<f64>,
    steps_since_cfl: usize,
    last_max_speed: f64,
}

impl SolverState {
    /// Starts a run at t = 0 from `omega`, truncated to the dealiased band.
    pub fn new(omega: &SpectralField, nu: f64, forcing: Arc<dyn Forcing>, options: SolverOptions) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Domain(format!("viscosity must be positive, got {nu}")));
        }
        if !omega.is_mean_free() {
            return Err(Error::Domain(format!("initial vorticity must be mean-free (mean = {:.3e})", omega.mean())));
        }
        if !(options.cfl_safety > 0.0 && options.dt_max > 0.0 && options.dt_floor > 0.0) {
            return Err(Error::Config(format!("invalid solver options {options:?}")));
        }
        let grid = omega.grid().clone();
        let ops = Operators::new(&grid);
        let mut omega_hat: Vec<Complex64> = omega.spectral().iter().zip(&ops.mask).map(|(c, m)| c * m).collect();
        omega_hat[0] = Complex64::new(0.0, 0.0);
        let mut state = SolverState {
            grid,
            omega_hat,
            t: 0.0,
            nu,
            forcing,
            options,
            ops,
            history: Vec::new(),
            integrals: Cumulative::default(),
            dt: None,
            steps_since_cfl: 0,
            last_max_speed: 0.0,
        };
        state.last_max_speed = state.max_speed();
        state.record(0.0)?;
        Ok(state)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn forcing(&self) -> &Arc<dyn Forcing> {
        &self.forcing
    }

    pub fn history(&self) -> &[DiagnosticSample] {
        &self.history
    }

    pub fn integrals(&self) -> Cumulative {
        self.integrals
    }

    pub fn omega(&self) -> SpectralField {
        SpectralField::from_spectral(&self.grid, self.omega_hat.clone()).expect("state matches grid")
    }

    pub fn velocity(&self) -> Result<VelocityField> {
        biot_savart(&self.omega())
    }

    /// ½‖u‖₂² = ½(2π)² Σ |ω̂|²/|k|².
    pub fn energy(&self) -> f64 {
        0.5 * AREA * self.omega_hat.iter().zip(&self.ops.ksq).skip(1).map(|(c, k)| c.norm_sqr() / k).sum::<f64>()
    }

    pub fn enstrophy(&self) -> f64 {
        AREA * self.omega_hat.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    fn max_speed(&self) -> f64 {
        let (u1, u2) = self.velocity_physical(&self.omega_hat);
        u1.iter().zip(&u2).map(|(a, b)| (a * a + b * b).sqrt()).fold(0.0, f64::max)
    }

    fn velocity_physical(&self, w: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let ops = &self.ops;
        let mut u1 = vec![Complex64::new(0.0, 0.0); w.len()];
        let mut u2 = u1.clone();
        for idx in 1..w.len() {
            let s = w[idx] / ops.ksq[idx];
            u1[idx] = Complex64::new(0.0, ops.k2[idx]) * s;
            u2[idx] = Complex64::new(0.0, -ops.k1[idx]) * s;
        }
        (self.grid.inverse(&u1), self.grid.inverse(&u2))
    }

    /// Largest step allowed by the CFL condition at the current state.
    pub fn cfl_dt(&self) -> f64 {
        let speed = self.max_speed();
        self.cfl_from_speed(speed)
    }

    fn cfl_from_speed(&self, speed: f64) -> f64 {
        let raw = if self.options.advection && speed > 0.0 {
            self.options.cfl_safety * self.grid.spacing() / speed
        } else {
            f64::INFINITY
        };
        raw.min(self.options.dt_max).max(self.options.dt_floor)
    }

    /// −(u·∇ω)^ + (curl F)^ with the product dealiased, plus the max speed.
    fn rhs(&self, w: &[Complex64], forcing: Option<&[Complex64]>) -> (Vec<Complex64>, f64) {
        let ops = &self.ops;
        let len = w.len();
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        let mut speed = 0.0_f64;
        if self.options.advection {
            let (u1, u2) = self.velocity_physical(w);
            let mut d1 = vec![Complex64::new(0.0, 0.0); len];
            let mut d2 = d1.clone();
            for idx in 0..len {
                d1[idx] = Complex64::new(0.0, ops.k1[idx]) * w[idx];
                d2[idx] = Complex64::new(0.0, ops.k2[idx]) * w[idx];
            }
            let (g1, g2) = (self.grid.inverse(&d1), self.grid.inverse(&d2));
            let adv: Vec<f64> = (0..len)
                .map(|i| {
                    speed = speed.max((u1[i] * u1[i] + u2[i] * u2[i]).sqrt());
                    u1[i] * g1[i] + u2[i] * g2[i]
                })
                .collect();
            let adv_hat = self.grid.forward(&adv);
            for idx in 0..len {
                out[idx] = -adv_hat[idx] * ops.mask[idx];
            }
        }
        if let Some(f) = forcing {
            for (o, c) in out.iter_mut().zip(f) {
                *o += c;
            }
        }
        out[0] = Complex64::new(0.0, 0.0);
        (out, speed)
    }

    /// Integrands of the running integrals at one state.
    fn integrands(&self, w: &[Complex64], forcing: Option<&[Complex64]>) -> Cumulative {
        let ops = &self.ops;
        let mut q = Cumulative::default();
        for idx in 1..w.len() {
            let n2 = w[idx].norm_sqr();
            q.enstrophy += n2;
            q.palinstrophy += ops.ksq[idx] * n2;
            if let Some(f) = forcing {
                let pair = (f[idx] * w[idx].conj()).re;
                q.curl_pairing += pair;
                q.work += pair / ops.ksq[idx];
                q.forcing_sq += f[idx].norm_sqr() / ops.ksq[idx];
            }
        }
        let mut scaled = Cumulative::default();
        scaled.axpy(AREA, &q);
        scaled
    }

    /// Advances by `dt` after checking it against the CFL bound.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        let speed = self.max_speed();
        if self.options.advection && speed > 0.0 {
            let cfl = self.options.cfl_safety * self.grid.spacing() / speed;
            if dt > cfl * (1.0 + 1e-12) {
                return Err(Error::Contract(format!("dt = {dt} exceeds the CFL bound {cfl} at t = {}", self.t)));
            }
        }
        self.step_unchecked(dt)
    }

    fn step_unchecked(&mut self, dt: f64) -> Result<()> {
        let len = self.omega_hat.len();
        let t = self.t;
        let half: Vec<f64> = self.ops.ksq.iter().map(|k| (-self.nu * k * dt * 0.5).exp()).collect();
        let f0 = self.forcing.curl_coefficients(&self.grid, t);
        let fh = self.forcing.curl_coefficients(&self.grid, t + 0.5 * dt);
        let f1 = self.forcing.curl_coefficients(&self.grid, t + dt);
        let w0 = &self.omega_hat;

        let (a, speed) = self.rhs(w0, f0.as_deref());
        let wa: Vec<Complex64> = (0..len).map(|i| half[i] * (w0[i] + a[i] * (0.5 * dt))).collect();
        let (b, _) = self.rhs(&wa, fh.as_deref());
        let wb: Vec<Complex64> = (0..len).map(|i| half[i] * w0[i] + b[i] * (0.5 * dt)).collect();
        let (c, _) = self.rhs(&wb, fh.as_deref());
        let wc: Vec<Complex64> = (0..len).map(|i| half[i] * half[i] * w0[i] + half[i] * c[i] * dt).collect();
        let (d, _) = self.rhs(&wc, f1.as_deref());

        let mut increment = Cumulative::default();
        increment.axpy(1.0, &self.integrands(w0, f0.as_deref()));
        increment.axpy(2.0, &self.integrands(&wa, fh.as_deref()));
        increment.axpy(2.0, &self.integrands(&wb, fh.as_deref()));
        increment.axpy(1.0, &self.integrands(&wc, f1.as_deref()));

        let next: Vec<Complex64> = (0..len)
            .map(|i| {
                let e = half[i];
                let e2 = e * e;
                e2 * w0[i] + (e2 * a[i] + (b[i] + c[i]) * (2.0 * e) + d[i]) * (dt / 6.0)
            })
            .collect();
        if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                t: t + dt,
                reason: format!("non-finite vorticity after a step of {dt:.3e} (ν = {})", self.nu),
            });
        }
        self.omega_hat = next;
        self.omega_hat[0] = Complex64::new(0.0, 0.0);
        self.integrals.axpy(dt / 6.0, &increment);
        self.t = t + dt;
        self.last_max_speed = speed;
        self.record(dt)
    }

    fn record(&mut self, dt: f64) -> Result<()> {
        let phys = self.grid.inverse(&self.omega_hat);
        let l1 = self.grid.cell_area() * phys.iter().map(|v| v.abs()).sum::<f64>();
        let sample = DiagnosticSample {
            t: self.t,
            l2_omega_sq: self.enstrophy(),
            l1_omega: l1,
            energy: self.energy(),
            dt,
            integrals: self.integrals,
        };
        if !(sample.l2_omega_sq.is_finite() && sample.energy.is_finite()) {
            return Err(Error::NonFinite { t: self.t, reason: "non-finite diagnostics".into() });
        }
        self.history.push(sample);
        Ok(())
    }

    /// Steps with CFL-controlled dt until t = `target`, landing on it exactly.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        if target < self.t - TIME_EPS {
            return Err(Error::Domain(format!("cannot advance backwards from {} to {target}", self.t)));
        }
        while target - self.t > TIME_EPS * target.abs().max(1.0) {
            let dt = match self.dt {
                Some(dt) if self.steps_since_cfl < self.options.cfl_interval => dt,
                _ => {
                    self.steps_since_cfl = 0;
                    let speed = self.last_max_speed.max(self.max_speed());
                    let dt = self.cfl_from_speed(speed);
                    self.dt = Some(dt);
                    dt
                }
            };
            let remaining = target - self.t;
            // Avoid leaving a sliver step just before the target.
            let dt = if remaining <= dt * (1.0 + 1e-9) {
                remaining
            } else if remaining < 1.5 * dt {
                0.5 * remaining
            } else {
                dt
            };
            self.step_unchecked(dt)?;
            self.steps_since_cfl += 1;
        }
        self.t = target.max(self.t);
        if let Some(last) = self.history.last_mut() {
            last.t = self.t;
        }
        Ok(())
    }

    /// Running integrals at time `t`, interpolated linearly between steps.
    pub fn integrals_at(&self, t: f64) -> Result<Cumulative> {
        let h = &self.history;
        let (first, last) = (h[0].t, h[h.len() - 1].t);
        let slack = TIME_EPS * last.abs().max(1.0);
        if t < first - slack || t > last + slack {
            return Err(Error::Domain(format!("time {t} outside the sampled interval [{first}, {last}]")));
        }
        let i = h.partition_point(|s| s.t < t - slack);
        if i >= h.len() {
            return Ok(h[h.len() - 1].integrals);
        }
        if (h[i].t - t).abs() <= slack || i == 0 {
            return Ok(h[i].integrals);
        }
        let (a, b) = (&h[i - 1], &h[i]);
        Ok(Cumulative::lerp(&a.integrals, &b.integrals, (t - a.t) / (b.t - a.t)))
    }

    fn sample_at(&self, t: f64) -> Result<&DiagnosticSample> {
        let slack = TIME_EPS * t.abs().max(1.0);
        self.history
            .iter()
            .find(|s| (s.t - t).abs() <= slack)
            .ok_or_else(|| Error::Domain(format!("no diagnostic sample at t = {t}")))
    }

    /// Writes the per-step diagnostics as CSV (t, l2_omega_sq, l1_omega, energy, dt).
    pub fn write_diagnostics_csv(&self, path: &Path) -> Result<()> {
        write_history_csv(path, &self.history)
    }
}

/// Writes diagnostics rows (t, l2_omega_sq, l1_omega, energy, dt).
pub fn write_history_csv(path: &Path, history: &[DiagnosticSample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "l2_omega_sq", "l1_omega", "energy", "dt"])?;
    for s in history {
        w.serialize((s.t, s.l2_omega_sq, s.l1_omega, s.energy, s.dt))?;
    }
    w.flush()?;
    Ok(())
}

/// ν∫_{t0}^{t1}‖ω‖₂², from the RK4-integrated running enstrophy.
pub fn dissipation(state: &SolverState, t0: f64, t1: f64) -> Result<f64> {
    if !(t0 <= t1) {
        return Err(Error::Domain(format!("need t0 <= t1, got [{t0}, {t1}]")));
    }
    if state.history.len() < 2 && t1 > t0 {
        return Err(Error::Domain("insufficient diagnostic samples".into()));
    }
    let a = state.integrals_at(t0)?;
    let b = state.integrals_at(t1)?;
    Ok(state.nu * (b.enstrophy - a.enstrophy))
}

/// |½‖u(t)‖² − ½‖u₀‖² + ζ(t) − ∫₀ᵗ⟨F,u⟩|, with t a sampled time.
pub fn energy_balance_residual(state: &SolverState, t: f64) -> Result<f64> {
    let s0 = &state.history[0];
    let st = state.sample_at(t)?;
    let zeta = state.nu * st.integrals.enstrophy;
    Ok((st.energy - s0.energy + zeta - st.integrals.work).abs())
}

/// ‖ω(t)‖² − ‖ω(r)‖² + 2ν∫_r^t‖∇ω‖² − 2∫_r^t⟨curl F, ω⟩, which vanishes
/// for exact solutions; r and t must be sampled times.
pub fn enstrophy_inequality_residual(state: &SolverState, r: f64, t: f64) -> Result<f64> {
    let (sr, st) = enstrophy_pair(state, r, t)?;
    let d = |f: fn(&Cumulative) -> f64| f(&st.integrals) - f(&sr.integrals);
    Ok(st.l2_omega_sq - sr.l2_omega_sq + 2.0 * state.nu * d(|c| c.palinstrophy) - 2.0 * d(|c| c.curl_pairing))
}

/// ‖ω(t)‖² − ‖ω(r)‖² + ν∫_r^t‖∇ω‖² − (1/ν)∫_r^t‖F‖², which is ≤ 0 along
/// exact solutions.
pub fn enstrophy_inequality_young_form(state: &SolverState, r: f64, t: f64) -> Result<f64> {
    let (sr, st) = enstrophy_pair(state, r, t)?;
    let d = |f: fn(&Cumulative) -> f64| f(&st.integrals) - f(&sr.integrals);
    Ok(st.l2_omega_sq - sr.l2_omega_sq + state.nu * d(|c| c.palinstrophy) - d(|c| c.forcing_sq) / state.nu)
}

fn enstrophy_pair(state: &SolverState, r: f64, t: f64) -> Result<(&DiagnosticSample, &DiagnosticSample)> {
    if !(r < t) {
        return Err(Error::Domain(format!("need r < t, got r = {r}, t = {t}")));
    }
    Ok((state.sample_at(r)?, state.sample_at(t)?))
}

/// sup over runs of t·ν·‖ω^ν(t)‖₂².
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub t: f64,
    pub constant: f64,
    pub per_run: Vec<(f64, f64)>,
}

pub fn enstrophy_decay_check(states: &[&SolverState], t: f64) -> Result<DecayReport> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("decay check needs t > 0, got {t}")));
    }
    let per_run: Vec<(f64, f64)> =
        states.iter().map(|s| Ok((s.nu, t * s.nu * s.sample_at(t)?.l2_omega_sq))).collect::<Result<_>>()?;
    let constant = per_run.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(DecayReport { t, constant, per_run })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(omega: &SpectralField, nu: f64, t: f64, forcing: Arc<dyn Forcing>) -> SolverState {
        let mut s = SolverState::new(omega, nu, forcing, SolverOptions::for_horizon(t)).unwrap();
        s.advance_to(t).unwrap();
        s
    }

    #[test]
    fn taylor_green_decays_exactly() {
        let g = GridSpec::new(32).unwrap();
        let w0 = SpectralField::from_fn(&g, |x, y| x.cos() + y.cos());
        let s = run(&w0, 0.01, 1.0, Arc::new(NoForcing));
        let exact = w0.scaled((-0.01_f64).exp());
        let err = s.omega().sub(&exact).unwrap().l2_sq_spectral().sqrt();
        assert!(err < 1e-10 * exact.l2_sq_spectral().sqrt(), "{err}");
        assert_eq!(s.t(), 1.0);
    }

    #[test]
    fn shear_dissipation_closed_form() {
        let g = GridSpec::new(32).unwrap();
        let (k, nu, t) = (2.0, 0.05, 1.0);
        let w0 = SpectralField::from_fn(&g, |x, _| (k * x).cos());
        let s = run(&w0, nu, t, Arc::new(NoForcing));
        let exact = PI * PI * (1.0 - (-2.0 * nu * k * k * t).exp()) / (k * k);
        assert!((dissipation(&s, 0.0, t).unwrap() - exact).abs() < 1e-10);
        assert!(energy_balance_residual(&s, t).unwrap() < 1e-10);
        assert_eq!(energy_balance_residual(&s, 0.0).unwrap(), 0.0);
        let res = enstrophy_inequality_residual(&s, 0.0, t).unwrap();
        assert!(res.abs() < 1e-10 * s.history()[0].l2_omega_sq, "{res}");
        assert!(enstrophy_inequality_young_form(&s, 0.0, t).unwrap() < 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = GridSpec::new(16).unwrap();
        let w0 = SpectralField::from_fn(&g, |x, _| x.cos());
        assert!(SolverState::new(&w0, 0.0, Arc::new(NoForcing), SolverOptions::default()).is_err());
        let biased = SpectralField::from_fn(&g, |x, _| 1.0 + x.cos());
        assert!(SolverState::new(&biased, 0.1, Arc::new(NoForcing), SolverOptions::default()).is_err());
        let mut s = SolverState::new(&w0, 0.1, Arc::new(NoForcing), SolverOptions::default()).unwrap();
        assert!(s.step(10.0).is_err());
        assert!(s.step(0.01).is_ok());
        assert!(s.advance_to(0.0).is_err());
        assert!(enstrophy_inequality_residual(&s, 0.01, 0.0).is_err());
    }

    #[test]
    fn unforced_energy_and_l1_do_not_grow() {
        let g = GridSpec::new(64).unwrap();
        let w0 = SpectralField::from_fn(&g, |x, y| (x + 0.3).sin() * (2.0 * y).cos() + 0.5 * (3.0 * x - y).cos());
        let s = run(&w0, 0.02, 0.5, Arc::new(NoForcing));
        for w in s.history().windows(2) {
            assert!(w[1].energy <= w[0].energy * (1.0 + 1e-12));
            assert!(w[1].l1_omega <= w[0].l1_omega * (1.0 + 1e-6));
        }
    }

    #[test]
    fn forced_enstrophy_identity() {
        let g = GridSpec::new(64).unwrap();
        let w0 = SpectralField::from_fn(&g, |x, y| x.sin() * y.sin());
        let blob = RotatingBlob::default();
        let s = run(&w0, 0.02, 0.5, Arc::new(blob));
        let e0 = s.history()[0].l2_omega_sq;
        let res = enstrophy_inequality_residual(&s, 0.0, 0.5).unwrap();
        assert!(res.abs() < 1e-6 * e0, "{res}");
        assert!(enstrophy_inequality_young_form(&s, 0.0, 0.5).unwrap() <= 0.0);
        let bal = energy_balance_residual(&s, 0.5).unwrap();
        assert!(bal < 1e-6 * s.history()[0].energy, "{bal}");
    }
}

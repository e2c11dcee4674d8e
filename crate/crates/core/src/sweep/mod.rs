//! Viscosity sweeps: one solver run per ν, summary records, rate fits and
//! file emission.

mod config;
mod data;
mod fit;

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{DataSpec, ForcingSpec, MollificationRule, SweepConfig, SCHEMA_VERSION};
pub use data::{generate_initial_data, DataMeta, InitialData};
pub use fit::{fit_log_rate, verify_no_diracs, NoDiracsReport, RateFit};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::io::{write_json_lines, write_snapshot};
use crate::norms::{lp_norm, ConcentrationKernel, Neighbourhood};
use crate::solver::{
    dissipation, energy_balance_residual, write_history_csv, DiagnosticSample, Forcing, NoForcing, SolverOptions,
    SolverState,
};

/// Summary of one run; the CSV columns follow the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub nu: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub delta: f64,
    /// ν∫₀ᵀ‖ω‖₂².
    pub zeta_total: f64,
    /// ν∫_δᵀ‖ω‖₂².
    pub zeta_delta: f64,
    pub energy0: f64,
    #[serde(rename = "energyT")]
    pub energy_t: f64,
    pub balance_residual: f64,
    pub max_enstrophy: f64,
    pub wallclock_s: f64,
}

/// Disk concentration of |ω^ν(t)| at radius r.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConcentrationSample {
    pub nu: f64,
    pub t: f64,
    pub r: f64,
    pub value: f64,
}

/// Everything produced by one run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: SweepRecord,
    pub history: Vec<DiagnosticSample>,
    pub snapshots: Vec<(f64, SpectralField)>,
    pub concentration: Vec<ConcentrationSample>,
    pub meta: DataMeta,
    /// T·ν·‖ω^ν(T)‖₂².
    pub decay_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunFailure {
    pub nu: f64,
    pub error: String,
    pub contract: bool,
}

/// Runs sorted by decreasing ν, plus any failed runs.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub config: SweepConfig,
    pub runs: Vec<RunOutput>,
    pub failures: Vec<RunFailure>,
}

pub fn build_forcing(spec: &ForcingSpec) -> Arc<dyn Forcing> {
    match spec {
        ForcingSpec::None => Arc::new(NoForcing),
        ForcingSpec::RotatingBlob(b) => Arc::new(*b),
    }
}

/// ∫₀ᵀ‖curl F(t)‖_p dt by the trapezoid rule on 200 panels.
pub fn forcing_lp_time_norm(forcing: &dyn Forcing, grid: &GridSpec, p: f64, horizon: f64) -> Result<f64> {
    let panels = 200;
    let h = horizon / panels as f64;
    let mut acc = 0.0;
    for i in 0..=panels {
        let w = if i == 0 || i == panels { 0.5 } else { 1.0 };
        acc += w * lp_norm(&forcing.curl_field(grid, i as f64 * h), p)?;
    }
    Ok(acc * h)
}

fn event_times(config: &SweepConfig) -> Vec<f64> {
    let mut times: Vec<f64> = config.snapshot_times.clone();
    times.push(config.delta());
    times.push(config.horizon);
    times.retain(|&t| t > 0.0);
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    times
}

fn concentration_rows(field: &SpectralField, nu: f64, t: f64, radii: &[f64]) -> Result<Vec<ConcentrationSample>> {
    let kernel = ConcentrationKernel::new(field);
    radii
        .iter()
        .map(|&r| Ok(ConcentrationSample { nu, t, r, value: kernel.sup_mass(r, Neighbourhood::Disk)? }))
        .collect()
}

/// One solver run at viscosity ν.
pub fn run_single(config: &SweepConfig, nu: f64) -> Result<RunOutput> {
    let start = Instant::now();
    let grid = GridSpec::new(config.n)?;
    let data = generate_initial_data(&grid, &config.data, config.mollification, nu)?;
    let forcing = build_forcing(&config.forcing);
    let mut state = SolverState::new(&data.omega, nu, forcing, SolverOptions::for_horizon(config.horizon))?;
    let radii = &config.concentration_radii;
    let wants_snapshot = |t: f64| config.snapshot_times.iter().any(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0));
    let mut snapshots = Vec::new();
    let mut concentration = concentration_rows(&state.omega(), nu, 0.0, radii)?;
    if wants_snapshot(0.0) {
        snapshots.push((0.0, state.omega()));
    }
    for t in event_times(config) {
        state.advance_to(t)?;
        let omega = state.omega();
        concentration.extend(concentration_rows(&omega, nu, t, radii)?);
        if wants_snapshot(t) {
            snapshots.push((t, omega));
        }
    }
    let horizon = config.horizon;
    let delta = config.delta();
    let history = state.history().to_vec();
    let last = history[history.len() - 1];
    let record = SweepRecord {
        nu,
        horizon,
        delta,
        zeta_total: dissipation(&state, 0.0, horizon)?,
        zeta_delta: dissipation(&state, delta, horizon)?,
        energy0: history[0].energy,
        energy_t: last.energy,
        balance_residual: energy_balance_residual(&state, horizon)?,
        max_enstrophy: history.iter().map(|s| s.l2_omega_sq).fold(0.0, f64::max),
        wallclock_s: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutput {
        record,
        decay_value: horizon * nu * last.l2_omega_sq,
        history,
        snapshots,
        concentration,
        meta: data.meta,
    })
}

/// Runs every ν of the sweep, in parallel over `workers` threads.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let workers = config.workers.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<(f64, Result<RunOutput>)> =
        pool.install(|| config.nu_list.par_iter().map(|&nu| (nu, run_single(config, nu))).collect());
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (nu, res) in results {
        match res {
            Ok(run) => runs.push(run),
            Err(e) => failures.push(RunFailure { nu, contract: e.is_contract(), error: e.to_string() }),
        }
    }
    runs.sort_by(|a, b| b.record.nu.total_cmp(&a.record.nu));
    failures.sort_by(|a, b| b.nu.total_cmp(&a.nu));
    Ok(SweepOutcome { config: config.clone(), runs, failures })
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    config: &'a SweepConfig,
    data: Vec<(f64, &'a DataMeta)>,
    failures: &'a [RunFailure],
    enstrophy_decay_constant: f64,
    forcing_l1t_l2x: Option<f64>,
    no_diracs: Option<NoDiracsReport>,
    rate_fit: Option<RateFit>,
}

impl SweepOutcome {
    pub fn records(&self) -> Vec<SweepRecord> {
        self.runs.iter().map(|r| r.record.clone()).collect()
    }

    /// sup over runs of T·ν·‖ω^ν(T)‖₂².
    pub fn enstrophy_decay_constant(&self) -> f64 {
        self.runs.iter().map(|r| r.decay_value).fold(0.0, f64::max)
    }

    pub fn concentration(&self) -> Vec<ConcentrationSample> {
        self.runs.iter().flat_map(|r| r.concentration.iter().copied()).collect()
    }

    /// Writes sweep_summary.csv, concentration.csv, per-run diagnostics,
    /// snapshots and sweep_meta.json under `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_records_csv(&dir.join("sweep_summary.csv"), &self.records())?;
        let mut w = csv::Writer::from_path(dir.join("concentration.csv"))?;
        for c in self.concentration() {
            w.serialize(c)?;
        }
        w.flush()?;
        for run in &self.runs {
            let nu = run.record.nu;
            write_history_csv(&dir.join(format!("diagnostics_nu{nu:e}.csv")), &run.history)?;
            for (t, field) in &run.snapshots {
                write_snapshot(&dir.join(format!("snapshot_nu{nu:e}_t{t:.6}.bin")), field, *t, nu)?;
            }
        }
        let grid = GridSpec::new(self.config.n)?;
        let forcing_norm = match self.config.forcing {
            ForcingSpec::None => None,
            spec => Some(forcing_lp_time_norm(build_forcing(&spec).as_ref(), &grid, 2.0, self.config.horizon)?),
        };
        let records = self.records();
        let meta = SweepMeta {
            config: &self.config,
            data: self.runs.iter().map(|r| (r.record.nu, &r.meta)).collect(),
            failures: &self.failures,
            enstrophy_decay_constant: self.enstrophy_decay_constant(),
            forcing_l1t_l2x: forcing_norm,
            no_diracs: verify_no_diracs(&self.concentration(), &self.config.concentration_radii, 0.1).ok(),
            rate_fit: fit_log_rate(&records, self.config.delta()).ok(),
        };
        fs::write(dir.join("sweep_meta.json"), serde_json::to_string_pretty(&meta)?)?;
        write_json_lines(&dir.join("failures.jsonl"), &self.failures)?;
        Ok(())
    }
}

pub fn write_records_csv(path: &Path, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<SweepRecord>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::shear_mode_reference;

    fn shear_config() -> SweepConfig {
        SweepConfig {
            schema_version: SCHEMA_VERSION,
            n: 32,
            horizon: 1.0,
            delta: None,
            nu_list: vec![0.04, 0.02, 0.01],
            data: DataSpec::Shear { k: 1 },
            mollification: MollificationRule::default(),
            forcing: ForcingSpec::None,
            output_dir: None,
            snapshot_times: vec![0.5],
            concentration_radii: vec![0.5, 0.1],
            workers: Some(2),
        }
    }

    #[test]
    fn shear_sweep_matches_closed_form() {
        let out = run_sweep(&shear_config()).unwrap();
        assert!(out.failures.is_empty());
        let nus: Vec<f64> = out.records().iter().map(|r| r.nu).collect();
        assert_eq!(nus, vec![0.04, 0.02, 0.01]);
        for r in out.records() {
            let exact = shear_mode_reference(1, r.nu, 1.0).unwrap();
            assert!((r.zeta_total - exact.zeta).abs() < 1e-6);
            let tail = exact.zeta - exact.zeta_at(0.1);
            assert!((r.zeta_delta - tail).abs() < 1e-6);
            assert!(r.zeta_delta <= r.zeta_total);
        }
        assert_eq!(out.runs[0].snapshots.len(), 1);
    }

    #[test]
    fn outputs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_sweep(&shear_config()).unwrap();
        out.write_outputs(dir.path()).unwrap();
        let back = read_records_csv(&dir.path().join("sweep_summary.csv")).unwrap();
        assert_eq!(back, out.records());
        let header = fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
        assert!(header.starts_with(
            "nu,T,delta,zeta_total,zeta_delta,energy0,energyT,balance_residual,max_enstrophy,wallclock_s"
        ));
    }

    #[test]
    fn failed_runs_are_recorded() {
        let mut cfg = shear_config();
        cfg.data = DataSpec::Shear { k: 0 };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.failures.len(), 3);
        assert!(out.runs.is_empty());
    }
}

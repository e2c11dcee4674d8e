//! `adlab`: command-line driver for inequality suites, solver runs, viscosity
//! sweeps, the exact radial example and rate fits.
//!
//! Exit codes: 0 on success, 2 when a mathematical contract is violated,
//! 1 on I/O or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use adlab_core::exact::{
    anomalous_dissipation, anomalous_dissipation_direct, anomalous_limit, make_annular_profile, write_zeta_table,
    AnnularGeometry,
};
use adlab_core::inequality::{
    ball_supported_kernels, bump_corpus, check_convolution_bound, random_band_limited, run_refined_suite,
    InequalityReport, CONVOLUTION_SLACK,
};
use adlab_core::io::write_json_lines;
use adlab_core::sweep::{fit_log_rate, read_records_csv, run_single, run_sweep, SweepConfig, SweepOutcome};
use adlab_core::{Error, GridSpec, Result};

#[derive(Parser)]
#[command(name = "adlab", version, about = "Vanishing-viscosity dissipation laboratory on the 2-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the inequality suites over the built-in corpora.
    Verify {
        /// Grid points per axis.
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Number of random band-limited fields for the convolution suite.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// A single solver run at one viscosity.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Viscosity; defaults to the first entry of nu_list.
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// One run per viscosity in the config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact dissipation of the scaled radial example.
    Radial {
        /// TOML file with `geometry`, `nu_list`, `T` and `direct` keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rate fit of ζ_δ against |log ν|^{-1/4} on a sweep summary CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to the δ shared by the records.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadialConfig {
    #[serde(default)]
    geometry: AnnularGeometry,
    #[serde(default = "default_radial_nus")]
    nu_list: Vec<f64>,
    #[serde(rename = "T", default = "one")]
    horizon: f64,
    /// Viscosities at which to run the direct cross-check as well.
    #[serde(default)]
    direct: Vec<f64>,
}

impl Default for RadialConfig {
    fn default() -> Self {
        RadialConfig {
            geometry: AnnularGeometry::default(),
            nu_list: default_radial_nus(),
            horizon: 1.0,
            direct: Vec::new(),
        }
    }
}

fn default_radial_nus() -> Vec<f64> {
    vec![0.1, 0.04, 0.02, 0.01, 0.005]
}

fn one() -> f64 {
    1.0
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adlab: {e}");
            ExitCode::from(if e.is_contract() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Verify { n, samples, seed, out, workers } => {
            install_pool(workers)?;
            verify(n, samples, seed, &out)
        }
        Command::Solve { config, nu, out, seed } => solve(&config, nu, out, seed),
        Command::Sweep { config, out, workers, seed } => sweep(&config, out, workers, seed),
        Command::Radial { config, out } => radial(config.as_deref(), &out),
        Command::Fit { input, delta, out } => fit(&input, delta, out.as_deref()),
    }
}

fn install_pool(workers: Option<usize>) -> Result<()> {
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    }
    Ok(())
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<SweepConfig> {
    let mut config = SweepConfig::from_path(path)?;
    if let Some(s) = seed {
        config.data = config.data.reseeded(s);
    }
    Ok(config)
}

fn output_dir(out: Option<PathBuf>, config: &SweepConfig) -> Result<PathBuf> {
    out.or_else(|| config.output_dir.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out or set output_dir".into()))
}

fn verify(n: usize, samples: usize, seed: u64, out: &Path) -> Result<()> {
    let grid = GridSpec::new(n)?;
    fs::create_dir_all(out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernels = ball_supported_kernels(&grid, &mut rng);
    let mut reports: Vec<InequalityReport> = Vec::new();
    for _ in 0..samples {
        let f = random_band_limited(&grid, (n / 8).max(1) as i64, &mut rng)?;
        for (g, r) in &kernels {
            reports.push(check_convolution_bound(&f, g, *r)?);
        }
    }
    let conv_max = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let suite = run_refined_suite(&grid, &bump_corpus(&grid))?;
    reports.extend(suite.reports.iter().cloned());
    write_json_lines(&out.join("verify_reports.jsonl"), &reports)?;
    fs::write(out.join("family_constants.json"), serde_json::to_string_pretty(&suite)?)?;
    println!("convolution: {} pairs, max ratio {conv_max:.6}", samples * kernels.len());
    println!("refined projection: corpus constant {:.6}", suite.max_projection_constant());
    println!("refined Nash: corpus constant {:.6}", suite.max_nash_constant());
    if conv_max > 1.0 + CONVOLUTION_SLACK {
        return Err(Error::Contract(format!(
            "convolution bound exceeded: ratio {conv_max} > {}",
            1.0 + CONVOLUTION_SLACK
        )));
    }
    Ok(())
}

fn solve(path: &Path, nu: Option<f64>, out: Option<PathBuf>, seed: Option<u64>) -> Result<()> {
    let mut config = load_config(path, seed)?;
    config.validate()?;
    let nu = nu.unwrap_or(config.nu_list[0]);
    config.nu_list = vec![nu];
    config.validate()?;
    let dir = output_dir(out, &config)?;
    let run = run_single(&config, nu)?;
    let r = &run.record;
    println!(
        "ν = {nu:e}: ζ(T) = {:.6e}, ζ_δ = {:.6e}, energy {:.6e} → {:.6e}, balance residual {:.2e}",
        r.zeta_total, r.zeta_delta, r.energy0, r.energy_t, r.balance_residual
    );
    let outcome = SweepOutcome { config, runs: vec![run], failures: Vec::new() };
    outcome.write_outputs(&dir)
}

fn sweep(path: &Path, out: Option<PathBuf>, workers: Option<usize>, seed: Option<u64>) -> Result<()> {
    let mut config = load_config(path, seed)?;
    if workers.is_some() {
        config.workers = workers;
    }
    let dir = output_dir(out, &config)?;
    let outcome = run_sweep(&config)?;
    outcome.write_outputs(&dir)?;
    for r in outcome.records() {
        println!("ν = {:e}: ζ(T) = {:.6e}, ζ_δ = {:.6e}", r.nu, r.zeta_total, r.zeta_delta);
    }
    for f in &outcome.failures {
        eprintln!("ν = {:e} failed: {}", f.nu, f.error);
    }
    match outcome.failures.iter().find(|f| f.contract).or(outcome.failures.first()) {
        None => Ok(()),
        Some(f) if f.contract => Err(Error::Contract(format!("run at ν = {:e} failed: {}", f.nu, f.error))),
        Some(f) => Err(Error::Config(format!("run at ν = {:e} failed: {}", f.nu, f.error))),
    }
}

fn radial(path: Option<&Path>, out: &Path) -> Result<()> {
    let config: RadialConfig = match path {
        Some(p) => toml::from_str(&fs::read_to_string(p)?).map_err(|e| Error::Config(e.to_string()))?,
        None => RadialConfig::default(),
    };
    fs::create_dir_all(out)?;
    let annular = make_annular_profile(config.geometry)?;
    let profile = &annular.profile;
    annular.profile.write_csv(&out.join("profile.csv"))?;
    let limit = anomalous_limit(profile)?;
    let mut rows: Vec<(f64, f64, &str)> = Vec::new();
    for &nu in &config.nu_list {
        let z = anomalous_dissipation(profile, nu, config.horizon)?;
        println!("ν = {nu:e}: ζ = {z:.12e} (C∞ = {limit:.12e})");
        rows.push((nu, z, "rescaled"));
    }
    for &nu in &config.direct {
        let z = anomalous_dissipation_direct(profile, nu, config.horizon)?;
        println!("ν = {nu:e}: ζ = {z:.12e} (direct)");
        rows.push((nu, z, "direct"));
    }
    rows.push((0.0, limit, "limit"));
    write_zeta_table(&out.join("zeta.csv"), &rows)?;
    fs::write(
        out.join("radial_meta.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "geometry": config.geometry,
            "a1": annular.a1,
            "a2": annular.a2,
            "T": config.horizon,
            "limit": limit,
        }))?,
    )?;
    Ok(())
}

fn fit(input: &Path, delta: Option<f64>, out: Option<&Path>) -> Result<()> {
    let records = read_records_csv(input)?;
    let delta = match delta {
        Some(d) => d,
        None => records
            .first()
            .map(|r| r.delta)
            .ok_or_else(|| Error::Config(format!("{} holds no records", input.display())))?,
    };
    let fit = fit_log_rate(&records, delta)?;
    let text = serde_json::to_string_pretty(&fit)?;
    println!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("fit.json"), text)?;
    }
    Ok(())
}

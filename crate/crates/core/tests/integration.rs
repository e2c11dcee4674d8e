//! Cross-module checks against closed forms and precomputed reference values.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use adlab_core::exact::{
    anomalous_dissipation, make_annular_profile, radial_disk_mass, radial_heat_evolve, shear_mode_reference,
    AnnularGeometry,
};
use adlab_core::solver::{
    dissipation, energy_balance_residual, enstrophy_decay_check, NoForcing, SolverOptions, SolverState,
};
use adlab_core::spectral::dirichlet_tail_mass;
use adlab_core::sweep::{
    fit_log_rate, generate_initial_data, run_sweep, verify_no_diracs, write_records_csv, DataSpec, ForcingSpec,
    MollificationRule, SweepConfig, SweepRecord, SCHEMA_VERSION,
};
use adlab_core::GridSpec;

use common::{reference, RadialCrankNicolson};

fn solve(omega: &adlab_core::SpectralField, nu: f64, t: f64) -> SolverState {
    let mut s = SolverState::new(omega, nu, Arc::new(NoForcing), SolverOptions::for_horizon(t)).unwrap();
    s.advance_to(t).unwrap();
    s
}

#[test]
fn annular_profile_matches_reference() {
    let a = make_annular_profile(AnnularGeometry::default()).unwrap();
    assert!((a.a1 - reference::A1).abs() < 1e-10 * reference::A1);
    assert!((a.a2 - reference::A2).abs() < 1e-10 * reference::A2);
    assert!((a.profile.l1_plane() - 1.0).abs() < 1e-10);
    assert!(a.profile.first_moment().abs() < 1e-10);
}

#[test]
fn anomalous_values_match_reference_and_grow_as_nu_falls() {
    let a = make_annular_profile(AnnularGeometry::default()).unwrap();
    let mut prev = 0.0;
    for (nu, expected) in reference::ZETA_T1 {
        let z = anomalous_dissipation(&a.profile, nu, 1.0).unwrap();
        assert!((z - expected).abs() < 1e-8 * expected, "ν={nu}: {z} vs {expected}");
        assert!(z >= prev);
        prev = z;
    }
}

#[test]
fn anomalous_records_fit_flat_with_positive_intercept() {
    let a = make_annular_profile(AnnularGeometry::default()).unwrap();
    let records: Vec<SweepRecord> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&nu| {
            let z = anomalous_dissipation(&a.profile, nu, 1.0).unwrap();
            SweepRecord {
                nu,
                horizon: 1.0,
                delta: 0.1,
                zeta_total: z,
                zeta_delta: z,
                energy0: 0.0,
                energy_t: 0.0,
                balance_residual: 0.0,
                max_enstrophy: 0.0,
                wallclock_s: 0.0,
            }
        })
        .collect();
    let fit = fit_log_rate(&records, 0.1).unwrap();
    assert!(fit.slope.abs() < 1e-2 * fit.intercept);
    assert!(fit.intercept > 0.0);
}

#[test]
fn radial_heat_flow_is_l1_nonexpansive_and_matches_crank_nicolson() {
    let a = make_annular_profile(AnnularGeometry::default()).unwrap();
    let mut cn = RadialCrankNicolson::new(|r| a.profile.eval(r), 0.5, 12.0, 2e-3);
    for t in [0.05, 0.5] {
        let evolved = radial_heat_evolve(&a.profile, 0.5, t).unwrap();
        assert!(evolved.l1_plane() <= 1.0 + 1e-8);
        assert!(evolved.first_moment().abs() < 1e-8);
        cn.advance_to(t, 1e-4);
        let scale = cn.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (i, &r) in cn.centres.iter().enumerate().step_by(40).take(100) {
            assert!((evolved.eval(r) - cn.values[i]).abs() < 1e-4 * scale, "t={t}, r={r}");
        }
    }
}

#[test]
fn scaled_data_concentrates_at_the_origin() {
    let a = make_annular_profile(AnnularGeometry::default()).unwrap();
    let masses: Vec<f64> =
        [0.5, 0.1, 0.02].iter().map(|&nu| radial_disk_mass(&a.profile.scaled(nu).unwrap(), 0.1).unwrap()).collect();
    assert!(masses[0] < masses[1]);
    assert!((masses[2] - 1.0).abs() < 1e-8);
}

#[test]
fn tail_mass_of_the_constant_kernel() {
    assert!((dirichlet_tail_mass(0, PI / 2.0).unwrap() - PI / 2.0).abs() < 1e-12);
    assert!(dirichlet_tail_mass(16, 0.1).unwrap() <= PI * PI / 0.1);
}

#[test]
fn spectral_accuracy_under_refinement() {
    // A common fixed step below both CFL limits isolates the spatial error.
    let spec = DataSpec::RandomSmooth { seed: 11, max_mode: 4, amplitude: 0.25 };
    let rule = MollificationRule::default();
    let options = SolverOptions { dt_max: 5e-3, ..SolverOptions::for_horizon(1.0) };
    let run = |n: usize| {
        let grid = GridSpec::new(n).unwrap();
        let omega = generate_initial_data(&grid, &spec, rule, 1e-2).unwrap().omega;
        let mut s = SolverState::new(&omega, 1e-2, Arc::new(NoForcing), options).unwrap();
        s.advance_to(1.0).unwrap();
        let dts: Vec<f64> = s.history().iter().map(|h| h.dt).collect();
        (s.omega(), dts)
    };
    let ((coarse, dt_coarse), (fine, dt_fine)) = (run(128), run(256));
    assert_eq!(dt_coarse, dt_fine);
    let mut diff = 0.0;
    let mut norm = 0.0;
    for i in 0..128 {
        for j in 0..128 {
            let c = coarse.value(i, j);
            diff += (c - fine.value(2 * i, 2 * j)).powi(2);
            norm += c * c;
        }
    }
    assert!((diff / norm).sqrt() < 1e-6, "{}", (diff / norm).sqrt());
}

#[test]
fn shear_dissipation_is_additive_and_balanced() {
    let grid = GridSpec::new(64).unwrap();
    let reference = shear_mode_reference(2, 0.05, 1.0).unwrap();
    let s = solve(&reference.omega(&grid, 0.0), 0.05, 1.0);
    let delta = s.history()[s.history().len() / 3].t;
    let whole = dissipation(&s, 0.0, 1.0).unwrap();
    let parts = dissipation(&s, 0.0, delta).unwrap() + dissipation(&s, delta, 1.0).unwrap();
    assert!((whole - parts).abs() < 1e-12 * whole);
    assert!(energy_balance_residual(&s, 1.0).unwrap() < 1e-8);
    assert_eq!(energy_balance_residual(&s, 0.0).unwrap(), 0.0);
}

#[test]
fn shear_decay_constant_is_analytic() {
    let grid = GridSpec::new(32).unwrap();
    let nus = [0.1, 0.05];
    let states: Vec<SolverState> =
        nus.iter().map(|&nu| solve(&shear_mode_reference(1, nu, 1.0).unwrap().omega(&grid, 0.0), nu, 1.0)).collect();
    let refs: Vec<&SolverState> = states.iter().collect();
    let report = enstrophy_decay_check(&refs, 1.0).unwrap();
    let expected = nus.iter().map(|&nu| nu * (-2.0 * nu).exp() * PI * PI * 2.0).fold(0.0, f64::max);
    assert!((report.constant - expected).abs() < 1e-9 * expected);
}

fn small_config(data: DataSpec, nu_list: Vec<f64>) -> SweepConfig {
    SweepConfig {
        schema_version: SCHEMA_VERSION,
        n: 32,
        horizon: 1.0,
        delta: None,
        nu_list,
        data,
        mollification: MollificationRule::Fixed { width: 0.3 },
        forcing: ForcingSpec::None,
        output_dir: None,
        snapshot_times: vec![0.5],
        concentration_radii: vec![1.6, 0.8, 0.4, 0.2, 0.1, 0.05],
        workers: Some(1),
    }
}

#[test]
fn shear_dissipation_vanishes_linearly_in_nu() {
    let cfg = SweepConfig { n: 16, ..small_config(DataSpec::Shear { k: 1 }, vec![1e-3]) };
    let rec = &run_sweep(&cfg).unwrap().records()[0];
    let linear = 2.0 * PI * PI * rec.nu * rec.horizon;
    assert!((rec.zeta_total / linear - 1.0).abs() < 0.05);
    assert!(rec.zeta_delta <= rec.zeta_total);
}

#[test]
fn sweeps_are_deterministic_apart_from_wallclock() {
    let cfg = small_config(DataSpec::RandomSmooth { seed: 4, max_mode: 4, amplitude: 1.0 }, vec![0.02, 0.01]);
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let mut records = run_sweep(&cfg).unwrap().records();
        for r in &mut records {
            r.wallclock_s = 0.0;
        }
        let path = dir.path().join(name);
        write_records_csv(&path, &records).unwrap();
        texts.push(std::fs::read(path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn smooth_sweep_has_no_diracs() {
    let cfg = small_config(DataSpec::TaylorGreen, vec![0.02, 0.01]);
    let out = run_sweep(&cfg).unwrap();
    let report = verify_no_diracs(&out.concentration(), &cfg.concentration_radii, 0.1).unwrap();
    assert!(report.passes, "{report:?}");
    assert!(report.table.windows(2).all(|w| w[1].1 <= w[0].1));
}

//! Property tests for the invariants of the spectral, norm, inequality,
//! solver and sweep layers.

use std::f64::consts::PI;
use std::sync::Arc;

use adlab_core::inequality::{
    build_phi_integral, build_upsilon, check_refined_projection, classical_nash_ratio, random_band_limited,
};
use adlab_core::norms::{concentration, lp_norm, maximal_function, MaximalTable};
use adlab_core::solver::{NoForcing, SolverOptions, SolverState};
use adlab_core::spectral::biot_savart;
use adlab_core::sweep::{fit_log_rate, DataSpec, MollificationRule, SweepConfig, SweepRecord, SCHEMA_VERSION};
use adlab_core::{GridSpec, SpectralField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(n: usize, modes: i64, seed: u64) -> SpectralField {
    let grid = GridSpec::new(n).unwrap();
    random_band_limited(&grid, modes, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().into_mean_free()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn plancherel_holds(seed in any::<u64>(), modes in 1i64..10) {
        let f = field(32, modes, seed);
        let (a, b) = (f.l2_sq_spectral(), f.l2_sq_physical());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn velocity_is_divergence_free_with_curl_omega(seed in any::<u64>(), modes in 1i64..10) {
        let f = field(32, modes, seed);
        let u = biot_savart(&f).unwrap();
        prop_assert!(u.divergence_rel() < 1e-13);
        let back = u.curl().sub(&f).unwrap();
        prop_assert!(back.l2_sq_spectral() <= 1e-24 * f.l2_sq_spectral());
    }

    #[test]
    fn concentration_is_monotone_bounded_and_shift_invariant(
        seed in any::<u64>(),
        s1 in 0usize..32,
        s2 in 0usize..32,
    ) {
        let f = field(32, 5, seed);
        let l1 = lp_norm(&f, 1.0).unwrap();
        let mut prev = 0.0;
        for r in [0.1, 0.3, 0.9, 2.0, PI] {
            let c = concentration(&f, r).unwrap();
            prop_assert!(c >= prev - 1e-12 && c <= l1 * (1.0 + 1e-12));
            let shifted = concentration(&f.shifted(s1, s2), r).unwrap();
            prop_assert!((shifted - c).abs() <= 1e-12 * l1);
            prev = c;
        }
    }

    #[test]
    fn maximal_function_is_concave_and_capped(seed in any::<u64>(), a in 0.01f64..0.99, b in 0.01f64..0.99) {
        let f = field(32, 4, seed);
        let area = 4.0 * PI * PI;
        let table = MaximalTable::new(&f);
        let (s1, s2) = (a * area, b * area);
        let (m1, m2) = (table.eval(s1).unwrap(), table.eval(s2).unwrap());
        let mid = table.eval(0.5 * (s1 + s2)).unwrap();
        prop_assert!(mid >= 0.5 * (m1 + m2) - 1e-12);
        let (lo, hi) = if s1 < s2 { (m1, m2) } else { (m2, m1) };
        prop_assert!(lo <= hi + 1e-12);
        let cap = (s1 * f.max_abs()).min(lp_norm(&f, 1.0).unwrap());
        prop_assert!(m1 <= cap * (1.0 + 1e-12));
        prop_assert!((maximal_function(&f, s1).unwrap() - m1).abs() <= 1e-14 * m1.max(1.0));
    }

    #[test]
    fn refined_projection_ratio_is_scale_invariant(seed in any::<u64>(), lambda in 0.01f64..100.0) {
        let f = field(64, 6, seed);
        let a = check_refined_projection(&f, 0.25, 0.05, 4).unwrap().ratio;
        let b = check_refined_projection(&f.scaled(lambda), 0.25, 0.05, 4).unwrap().ratio;
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn classical_nash_ratio_is_scale_and_shift_invariant(
        seed in any::<u64>(),
        lambda in 0.01f64..100.0,
        s in 0usize..64,
    ) {
        let f = field(64, 6, seed);
        let a = classical_nash_ratio(&f).unwrap();
        let b = classical_nash_ratio(&f.scaled(lambda).shifted(s, 2 * s % 64)).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn unforced_energy_and_enstrophy_never_grow(seed in any::<u64>(), nu in 0.005f64..0.1) {
        let f = field(32, 4, seed);
        let mut s = SolverState::new(&f, nu, Arc::new(NoForcing), SolverOptions::for_horizon(0.3)).unwrap();
        s.advance_to(0.3).unwrap();
        for w in s.history().windows(2) {
            prop_assert!(w[1].energy <= w[0].energy * (1.0 + 1e-12));
            prop_assert!(w[1].l2_omega_sq <= w[0].l2_omega_sq * (1.0 + 1e-12));
        }
    }

    #[test]
    fn fit_recovers_affine_data(slope in 0.1f64..10.0, intercept in -1.0f64..1.0) {
        let records: Vec<SweepRecord> = [1e-2, 3e-3, 1e-3, 3e-4]
            .iter()
            .map(|&nu: &f64| {
                let y = slope * nu.ln().abs().powf(-0.25) + intercept;
                SweepRecord {
                    nu,
                    horizon: 1.0,
                    delta: 0.1,
                    zeta_total: y,
                    zeta_delta: y,
                    energy0: 1.0,
                    energy_t: 1.0,
                    balance_residual: 0.0,
                    max_enstrophy: 1.0,
                    wallclock_s: 0.0,
                }
            })
            .collect();
        let fit = fit_log_rate(&records, 0.1).unwrap();
        prop_assert!((fit.slope - slope).abs() <= 1e-8 * slope);
        prop_assert!((fit.intercept - intercept).abs() <= 1e-8);
    }

    #[test]
    fn sweep_config_round_trips(
        n_exp in 3u32..9,
        horizon in 0.1f64..5.0,
        nus in proptest::collection::btree_set(1u32..10_000, 1..5),
        seed in any::<u64>(),
        width in 0.01f64..0.5,
    ) {
        let nu_list: Vec<f64> = nus.iter().rev().map(|&k| k as f64 * 1e-5).collect();
        let cfg = SweepConfig {
            schema_version: SCHEMA_VERSION,
            n: 1 << n_exp,
            horizon,
            delta: None,
            nu_list,
            data: DataSpec::RandomSmooth { seed, max_mode: 4, amplitude: 1.0 },
            mollification: MollificationRule::Fixed { width },
            forcing: Default::default(),
            output_dir: None,
            snapshot_times: vec![horizon / 2.0],
            concentration_radii: vec![0.5],
            workers: Some(2),
        };
        cfg.validate().unwrap();
        let back = SweepConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn phi_is_increasing_concave_and_inverts(c in 0.1f64..10.0, exponent in 0.1f64..2.0) {
        let phi = build_phi_integral(move |r: f64| (r / PI).powf(exponent).min(1.0), c).unwrap();
        prop_assert!(phi.is_increasing());
        prop_assert!(phi.is_concave());
        let ups = build_upsilon(phi).unwrap();
        for x in [1e-3, 1.0, 7.5, 1e4] {
            let v = ups.eval(ups.phi().eval(x)).unwrap();
            prop_assert!((v - x * x).abs() <= 1e-8 * x * x);
        }
        let samples = ups.samples();
        prop_assert!(adlab_core::inequality::Upsilon::is_convex_on(&samples));
    }
}

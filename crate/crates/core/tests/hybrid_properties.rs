use std::f64::consts::PI;

use omrr_core::atom_interferometer::SumOptions;
use omrr_core::hybrid::{
    hybrid_sigma, hybrid_spectrum, linear_grid, log_grid, sweep_bandwidth, HybridConfig, Regime,
};
use omrr_core::noise_models::{NoisePsd, PsdKind};
use omrr_core::omrr::OmrrConfig;
use proptest::prelude::*;

fn grid_rad(lo_hz: f64, hi_hz: f64, n: usize) -> Vec<f64> {
    linear_grid(lo_hz, hi_hz, n)
        .into_iter()
        .map(|f| 2.0 * PI * f)
        .collect()
}

fn optimum_for(sigma_x: f64) -> f64 {
    let mut cfg = HybridConfig::default();
    cfg.omrr = cfg.omrr.with_sigma_x(sigma_x);
    sweep_bandwidth(&cfg, &grid_rad(50.0, 2000.0, 391))
        .unwrap()
        .optimum
        .omega0
}

#[test]
fn optimum_widens_as_readout_improves() {
    let w = [optimum_for(1e-14), optimum_for(1e-15), optimum_for(1e-16)];
    assert!(w[0] <= w[1] && w[1] <= w[2], "{w:?}");
    for pair in w.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn sweep_points_sorted_and_optimum_is_minimum() {
    let cfg = HybridConfig::default();
    let res = sweep_bandwidth(&cfg, &grid_rad(200.0, 2000.0, 100)).unwrap();
    assert!(res.points.windows(2).all(|p| p[0].omega0 < p[1].omega0));
    assert!(res.points.iter().all(|p| p.sigma_a >= res.optimum.sigma_a));
    for p in &res.points {
        let omrr = OmrrConfig {
            omega0: p.omega0,
            ..cfg.omrr
        };
        assert_eq!(p.required_sigma_x, omrr.required_sigma_x());
    }
}

#[test]
fn sweep_is_never_below_projection_noise() {
    let cfg = HybridConfig::default();
    let qpn = cfg.ai.qpn_accel_asd();
    let res = sweep_bandwidth(&cfg, &grid_rad(50.0, 3000.0, 120)).unwrap();
    assert!(res.points.iter().all(|p| p.sigma_a >= qpn));
}

#[test]
fn without_self_noise_wider_bandwidth_always_helps() {
    let mut cfg = HybridConfig::default();
    cfg.omrr = cfg.omrr.with_sigma_x(0.0);
    cfg.omrr.temperature = 1e-30;
    let mut prev = f64::INFINITY;
    for f in log_grid(20.0, 5000.0, 60) {
        let s = hybrid_sigma(&cfg.with_omrr(cfg.omrr.with_resonance_hz(f)))
            .unwrap()
            .sigma;
        assert!(s <= prev, "σ_a rose at {f} Hz");
        prev = s;
    }
}

#[test]
fn thermal_noise_alone_is_not_monotone() {
    // With a realistic temperature the thermal floor grows as √ω₀, so very
    // wide bandwidths eventually cost sensitivity even with perfect readout.
    let mut cfg = HybridConfig::default();
    cfg.omrr = cfg.omrr.with_sigma_x(0.0);
    let at = |f: f64| {
        hybrid_sigma(&cfg.with_omrr(cfg.omrr.with_resonance_hz(f)))
            .unwrap()
            .sigma
    };
    assert!(at(1e5) > at(5e3));
}

#[test]
fn spectrum_curves_separate_by_decades_where_readout_dominates() {
    let grid = [5.0, 50.0, 200.0];
    let curves: Vec<Vec<f64>> = [1e-14, 1e-15, 1e-16]
        .iter()
        .map(|&sx| {
            let mut cfg = HybridConfig::default();
            cfg.omrr = cfg.omrr.with_sigma_x(sx);
            hybrid_spectrum(&cfg, &grid)
                .unwrap()
                .rows
                .iter()
                .map(|r| r.asd)
                .collect()
        })
        .collect();
    for ((a, b), c) in curves[0].iter().zip(&curves[1]).zip(&curves[2]) {
        let r1 = a / b;
        assert!((r1 - 10.0).abs() < 0.1, "{r1}");
        // the 1e-16 curve sits close to the thermal floor
        let r2 = b / c;
        assert!(r2 > 5.0 && r2 < 10.0, "{r2}");
    }
    // where thermal noise dominates (σ_x tiny) the curves coincide
    let floor = |sx: f64| {
        let mut cfg = HybridConfig::default();
        cfg.omrr = cfg.omrr.with_sigma_x(sx);
        hybrid_spectrum(&cfg, &[100.0]).unwrap().rows[0].asd
    };
    assert!((floor(1e-19) / floor(1e-20) - 1.0).abs() < 1e-3);
}

#[test]
fn regime_flips_once_at_cycle_rate() {
    let cfg = HybridConfig::default();
    let fc = cfg.ai.cycle_frequency();
    let mut grid = log_grid(0.01, 2000.0, 200);
    grid.push(fc);
    grid.sort_by(f64::total_cmp);
    let spec = hybrid_spectrum(&cfg, &grid).unwrap();
    let flips: Vec<_> = spec
        .rows
        .windows(2)
        .filter(|w| w[0].regime != w[1].regime)
        .collect();
    assert_eq!(flips.len(), 1);
    assert_eq!(flips[0][1].freq, fc);
    assert_eq!(flips[0][1].regime, Regime::Omrr);
    assert!((fc - 0.667).abs() < 1e-3);
    assert!(spec
        .rows
        .iter()
        .filter(|r| r.regime == Regime::AtomInterferometer)
        .all(|r| r.asd == spec.hybrid_sigma));
}

#[test]
fn three_resonance_spectra() {
    for f0 in [100.0, 500.0, 1200.0] {
        let mut cfg = HybridConfig::default();
        cfg.omrr = cfg.omrr.with_resonance_hz(f0);
        let spec = hybrid_spectrum(&cfg, &[f0 * 0.999, f0 * 1.001]).unwrap();
        // above resonance the spectrum jumps to the ambient level
        assert_eq!(spec.rows[1].asd, spec.rows[1].ambient_asd);
        assert!(spec.rows[0].asd < spec.rows[1].asd);
    }
}

#[test]
fn zero_ambient_and_readout_leaves_thermal_floor() {
    let mut cfg = HybridConfig::default();
    cfg.ambient = NoisePsd::zero(PsdKind::Acceleration);
    cfg.omrr = cfg.omrr.with_sigma_x(0.0);
    let s = hybrid_sigma(&cfg).unwrap().sigma;
    assert!(s > 0.0 && s < cfg.omrr.thermal_accel_floor() * 10.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refining_the_sum_does_not_move_sigma(f0 in 100.0f64..2000.0, log_sx in -17.0f64..-13.0) {
        let mut cfg = HybridConfig::default();
        cfg.omrr = cfg.omrr.with_resonance_hz(f0).with_sigma_x(10f64.powf(log_sx));
        let base = hybrid_sigma(&cfg).unwrap();
        let refined = HybridConfig {
            sum: SumOptions { min_terms: base.terms * 8, ..cfg.sum },
            ..cfg.clone()
        };
        let more = hybrid_sigma(&refined).unwrap();
        prop_assert!((more.sigma - base.sigma).abs() <= 1e-3 * base.sigma);
    }

    #[test]
    fn sigma_is_at_least_projection_noise(f0 in 20.0f64..5000.0) {
        let mut cfg = HybridConfig::default();
        cfg.omrr = cfg.omrr.with_resonance_hz(f0);
        prop_assert!(hybrid_sigma(&cfg).unwrap().sigma >= cfg.ai.qpn_accel_asd());
    }
}

use omrr_core::fusion::{run_cycles, Correction, Detection, SimConfig};
use omrr_core::noise_models::{Band, NoisePsd, PsdKind};
use omrr_core::omrr::OmrrConfig;
use proptest::prelude::*;

fn white_ambient(level: f64) -> NoisePsd {
    NoisePsd::white(PsdKind::Acceleration, level, Band::unbounded()).unwrap()
}

fn small(seed: u64) -> SimConfig {
    let mut cfg = SimConfig {
        fs: 4096.0,
        n_cycles: 16,
        seed,
        ..SimConfig::default()
    };
    cfg.hybrid.omrr = OmrrConfig::default().with_resonance_hz(800.0);
    cfg
}

#[test]
fn allan_deviation_of_white_cycles_falls_as_root_tau() {
    let mut cfg = SimConfig {
        fs: 2048.0,
        n_cycles: 1024,
        seed: 5,
        correction: Correction::Off,
        detection: Detection::Noiseless,
        ..SimConfig::default()
    };
    cfg.hybrid.omrr = OmrrConfig::default().with_resonance_hz(400.0);
    cfg.hybrid.ambient = white_ambient(1e-14);
    let run = run_cycles(&cfg).unwrap();
    let first = run.adev[0];
    assert!(run.adev.len() >= 4);
    for p in run.adev.iter().take(4) {
        let expected = first.deviation * (first.tau / p.tau).sqrt();
        assert!((p.deviation / expected - 1.0).abs() < 0.15, "{p:?}");
    }
}

#[test]
fn perfect_sensor_cancels_ambient_noise() {
    let mut cfg = small(3);
    cfg.hybrid.omrr = cfg.hybrid.omrr.with_sigma_x(0.0);
    cfg.hybrid.omrr.temperature = 1e-30;
    cfg.estimator.cutoff = omrr_core::fusion::Cutoff::None;
    let on = run_cycles(&cfg).unwrap();
    let off = run_cycles(&SimConfig {
        correction: Correction::Off,
        ..cfg.clone()
    })
    .unwrap();
    assert!(off.residual_phase_variance() > 0.0);
    for c in &on.cycles {
        assert!(c.phi_residual.abs() < 1e-9, "{}", c.phi_residual);
    }
}

#[test]
fn seeds_are_independent_of_other_fields() {
    // Changing the readout noise must not change the ambient realization.
    let a = SimConfig {
        keep_series: true,
        ..small(9)
    };
    let mut b = a.clone();
    b.hybrid.omrr.sigma_x = 1e-15;
    let ra = run_cycles(&a).unwrap();
    let rb = run_cycles(&b).unwrap();
    let (sa, sb) = (ra.series.unwrap(), rb.series.unwrap());
    assert_eq!(sa.a_true, sb.a_true);
    assert_eq!(sa.z_true, sb.z_true);
    assert_ne!(sa.z_meas, sb.z_meas);
}

#[test]
fn corrected_beats_uncorrected_for_most_seeds() {
    let mut better = 0;
    let seeds = 20;
    for seed in 0..seeds {
        let cfg = small(seed);
        let on = run_cycles(&cfg).unwrap().measured_accel_std();
        let off = run_cycles(&SimConfig {
            correction: Correction::Off,
            ..cfg
        })
        .unwrap()
        .measured_accel_std();
        if on < off {
            better += 1;
        }
    }
    assert_eq!(better, seeds);
}

#[test]
fn undersampled_or_short_runs_are_rejected() {
    assert!(run_cycles(&SimConfig {
        n_cycles: 0,
        ..small(0)
    })
    .is_err());
    assert!(run_cycles(&SimConfig {
        fs: 700.0,
        ..small(0)
    })
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn residual_is_difference_and_runs_repeat(seed in any::<u64>(), sx in 0.0f64..1e-14) {
        let mut cfg = small(seed);
        cfg.hybrid.omrr.sigma_x = sx;
        let a = run_cycles(&cfg).unwrap();
        let b = run_cycles(&cfg).unwrap();
        prop_assert_eq!(&a, &b);
        for c in &a.cycles {
            prop_assert_eq!(c.phi_residual, c.phi_true - c.phi_est);
            prop_assert!((0.0..=1.0).contains(&c.population));
        }
    }
}

//! Shot-by-shot simulation of the hybrid measurement.
//!
//! Ambient vibration is synthesized over the whole run, drives the OMRR test
//! mass together with its thermal force noise, and is read out with white
//! displacement noise. The interferometer samples the mirror motion once per
//! cycle; its phase is corrected with the acceleration reconstructed from
//! the OMRR and then detected with projection noise.
//!
//! # Randomness
//!
//! Every run draws from ChaCha8 generators seeded with the run seed, one
//! stream per noise source (see [`Stream`]). Runs share no state, so
//! [`run_batch`] gives identical results serially and in parallel.

mod oscillator;
mod synth;

use std::f64::consts::FRAC_PI_2;

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use oscillator::{
    estimate_accel, oscillator_response, readout, Cutoff, EstimatorOptions,
    MIN_SAMPLES_PER_RESONANCE,
};
pub use synth::{stream_rng, synthesize_noise, Synthesized};

use crate::allan::{overlapping_adev, AllanPoint};
use crate::error::{Error, Result};
use crate::hybrid::HybridConfig;
use crate::noise_models::Spectrum;
use crate::series::UniformSeries;
use oscillator::{apply_filter, check_sampling, inversion_filter};
use synth::{forward, inverse_real, noise_spectrum, white_samples};

/// Noise sources and the ChaCha stream each one draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Ambient = 0,
    Thermal = 1,
    Readout = 2,
    Detection = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Correction {
    Off,
    #[default]
    On,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Detection {
    /// Binomial counting of the configured atom number.
    #[default]
    Binomial,
    /// Exact population, as for an infinite atom number.
    Noiseless,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub hybrid: HybridConfig,
    /// Sample rate of the simulated signals (Hz).
    pub fs: f64,
    pub n_cycles: usize,
    pub seed: u64,
    pub correction: Correction,
    pub detection: Detection,
    pub estimator: EstimatorOptions,
    /// Constant bias of the OMRR acceleration estimate (m/s²).
    pub omrr_bias: f64,
    /// Linear drift of the OMRR acceleration estimate (m/s³).
    pub omrr_drift: f64,
    /// Time constant, in cycles, of the loop that removes the OMRR bias using
    /// the interferometer output. `None` leaves the bias in place.
    pub debias_cycles: Option<f64>,
    /// Keep the sampled signals in the result.
    pub keep_series: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            hybrid: HybridConfig::default(),
            fs: 8192.0,
            n_cycles: 256,
            seed: 0,
            correction: Correction::On,
            detection: Detection::Binomial,
            estimator: EstimatorOptions::default(),
            omrr_bias: 0.0,
            omrr_drift: 0.0,
            debias_cycles: None,
            keep_series: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.hybrid.validate()?;
        let ai = &self.hybrid.ai;
        let min_fs = 40.0 / ai.pulse_separation;
        if !(self.fs >= min_fs) {
            return Err(Error::SampleRateTooLow {
                fs: self.fs,
                required: min_fs,
            });
        }
        check_sampling(self.fs, &self.hybrid.omrr)?;
        if self.n_cycles < 8 {
            return Err(Error::config(format!(
                "at least 8 cycles are needed, got {}",
                self.n_cycles
            )));
        }
        let per_cycle = self.fs * ai.cycle_time;
        if (per_cycle - per_cycle.round()).abs() > 1e-9 * per_cycle.max(1.0) {
            return Err(Error::config(format!(
                "fs·T_c = {per_cycle} must be an integer number of samples"
            )));
        }
        if let Some(tc) = self.debias_cycles {
            if !(tc >= 1.0) {
                return Err(Error::config(
                    "debias time constant must be at least one cycle",
                ));
            }
        }
        if !self.omrr_bias.is_finite() || !self.omrr_drift.is_finite() {
            return Err(Error::config("OMRR bias and drift must be finite"));
        }
        Ok(())
    }

    pub fn samples_per_cycle(&self) -> usize {
        (self.fs * self.hybrid.ai.cycle_time).round() as usize
    }

    pub fn record_len(&self) -> usize {
        self.samples_per_cycle() * self.n_cycles
    }

    /// Fraction of each cycle not covered by the pulse sequence.
    pub fn dead_time_fraction(&self) -> f64 {
        let ai = &self.hybrid.ai;
        1.0 - ai.duration() / ai.cycle_time
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleRecord {
    pub index: usize,
    /// Start of the pulse sequence (s).
    pub t0: f64,
    /// Interferometer phase from gravity and the true mirror motion (rad).
    pub phi_true: f64,
    /// Phase predicted from the OMRR (rad).
    pub phi_est: f64,
    /// `phi_true − phi_est` (rad).
    pub phi_residual: f64,
    /// Detected excited-state fraction.
    pub population: f64,
    /// Acceleration reported by the corrected hybrid sensor (m/s²).
    pub accel_measured: f64,
    /// Acceleration error left after correction, without detection noise
    /// (m/s²).
    pub accel_residual: f64,
    /// OMRR bias estimate applied in this cycle (m/s²).
    pub bias_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSeries {
    /// Ambient acceleration of the mirror (m/s²).
    pub a_true: UniformSeries,
    /// Test-mass displacement (m).
    pub z_true: UniformSeries,
    /// Measured displacement (m).
    pub z_meas: UniformSeries,
    /// OMRR acceleration estimate (m/s²).
    pub a_est: UniformSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub cycles: Vec<CycleRecord>,
    /// Overlapping Allan deviation of `accel_measured`.
    pub adev: Vec<AllanPoint>,
    pub series: Option<SimSeries>,
    /// Positive-frequency bins left empty because the ambient band was too
    /// narrow.
    pub empty_ambient_bins: usize,
}

fn std_dev(x: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = x.clone().count() as f64;
    let mean = x.clone().sum::<f64>() / n;
    (x.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

impl SimRun {
    /// Sample standard deviation of the reported accelerations.
    pub fn measured_accel_std(&self) -> f64 {
        std_dev(self.cycles.iter().map(|c| c.accel_measured))
    }

    /// Sample standard deviation of the correction residual in acceleration.
    pub fn residual_accel_std(&self) -> f64 {
        std_dev(self.cycles.iter().map(|c| c.accel_residual))
    }

    /// Sample variance of the residual phase.
    pub fn residual_phase_variance(&self) -> f64 {
        std_dev(self.cycles.iter().map(|c| c.phi_residual)).powi(2)
    }
}

/// Simulates `cfg.n_cycles` interferometer cycles.
pub fn run_cycles(cfg: &SimConfig) -> Result<SimRun> {
    cfg.validate()?;
    let hy = &cfg.hybrid;
    let ai = &hy.ai;
    let omrr = &hy.omrr;
    let fs = cfg.fs;
    let n = cfg.record_len();
    let stream = |s: Stream| synth::stream_rng(cfg.seed, s as u64);

    // Ambient acceleration, then the OMRR forcing including thermal noise.
    let (mut spec, empty_ambient_bins) =
        noise_spectrum(&hy.ambient, fs, n, &mut stream(Stream::Ambient));
    let a_true = UniformSeries::new(0.0, fs, inverse_real(spec.clone()));
    let thermal = white_samples(
        omrr.thermal_accel_floor(),
        fs,
        n,
        &mut stream(Stream::Thermal),
    );
    for (s, t) in spec.iter_mut().zip(forward(&thermal)) {
        *s += t;
    }
    drop(thermal);
    apply_filter(&mut spec, fs, |f| {
        omrr.disp_to_accel_tf(2.0 * std::f64::consts::PI * f)
    });
    let z_true = cfg
        .keep_series
        .then(|| UniformSeries::new(0.0, fs, inverse_real(spec.clone())));
    if omrr.sigma_x > 0.0 {
        let noise = white_samples(omrr.sigma_x, fs, n, &mut stream(Stream::Readout));
        for (s, r) in spec.iter_mut().zip(forward(&noise)) {
            *s += r;
        }
    }
    let z_meas = cfg
        .keep_series
        .then(|| UniformSeries::new(0.0, fs, inverse_real(spec.clone())));

    let a_est = match cfg.correction {
        Correction::On => {
            let ambient: &dyn Spectrum = &hy.ambient;
            apply_filter(
                &mut spec,
                fs,
                inversion_filter(omrr, Some(ambient), &cfg.estimator),
            );
            let mut values = inverse_real(spec);
            if cfg.omrr_bias != 0.0 || cfg.omrr_drift != 0.0 {
                for (i, v) in values.iter_mut().enumerate() {
                    *v += cfg.omrr_bias + cfg.omrr_drift * i as f64 / fs;
                }
            }
            UniformSeries::new(0.0, fs, values)
        }
        Correction::Off => {
            drop(spec);
            UniformSeries::new(0.0, fs, vec![0.0; n])
        }
    };

    let v_true = a_true.cumulative_integral();
    let v_est = a_est.cumulative_integral();

    let scale = ai.scale_factor();
    let phi_gravity = ai.g0 * scale;
    let mut detect_rng = stream(Stream::Detection);
    let binomial = match cfg.detection {
        Detection::Binomial => Some(ai.atom_number),
        Detection::Noiseless => None,
    };
    let debias_gain = cfg.debias_cycles.map(|tc| 1.0 / tc);
    let mut bias_estimate = 0.0;

    let mut cycles = Vec::with_capacity(cfg.n_cycles);
    for index in 0..cfg.n_cycles {
        let t0 = index as f64 * ai.cycle_time;
        let phi_true = phi_gravity + ai.phase_from_mirror_motion(&v_true, t0)?;
        let phi_est = phi_gravity
            + match cfg.correction {
                Correction::On => ai.phase_from_mirror_motion(&v_est, t0)? - bias_estimate * scale,
                Correction::Off => 0.0,
            };
        let phi_residual = phi_true - phi_est;

        // The laser phase offset π/2 − Φ_est puts the estimate at mid-fringe,
        // leaving π/2 + Φ_residual at detection.
        let p = ai.population(FRAC_PI_2 + phi_residual).clamp(0.0, 1.0);
        let population = match binomial {
            Some(atoms) => {
                let dist = Binomial::new(atoms, p).map_err(|e| Error::Domain(e.to_string()))?;
                dist.sample(&mut detect_rng) as f64 / atoms as f64
            }
            None => p,
        };
        // Branch of the fringe nearest the estimate.
        let s = (1.0 - 2.0 * (population - ai.offset) / ai.contrast).clamp(-1.0, 1.0);
        let residual_measured = s.asin();
        let accel_measured = ai.g0 + residual_measured / scale;

        let rec = CycleRecord {
            index,
            t0,
            phi_true,
            phi_est,
            phi_residual,
            population,
            accel_measured,
            accel_residual: phi_residual / scale,
            bias_estimate,
        };
        if ![
            rec.phi_true,
            rec.phi_est,
            rec.population,
            rec.accel_measured,
        ]
        .iter()
        .all(|v| v.is_finite())
        {
            return Err(Error::NonFinite { cycle: index });
        }
        cycles.push(rec);

        if let Some(gain) = debias_gain {
            bias_estimate -= gain * residual_measured / scale;
        }
    }

    let adev = overlapping_adev(
        &cycles.iter().map(|c| c.accel_measured).collect::<Vec<_>>(),
        ai.cycle_time,
        4,
    );
    let series = match (cfg.keep_series, z_true, z_meas) {
        (true, Some(z_true), Some(z_meas)) => Some(SimSeries {
            a_true,
            z_true,
            z_meas,
            a_est,
        }),
        _ => None,
    };
    Ok(SimRun {
        cycles,
        adev,
        series,
        empty_ambient_bins,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Runs independent simulations; results are returned in input order and do
/// not depend on `execution`.
pub fn run_batch(configs: &[SimConfig], execution: Execution) -> Vec<Result<SimRun>> {
    match execution {
        Execution::Serial => configs.iter().map(run_cycles).collect(),
        Execution::Parallel => configs.par_iter().map(run_cycles).collect(),
    }
}

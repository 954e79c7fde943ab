use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::synth::{forward, inverse_real, stream_rng, white_samples};
use crate::error::{Error, Result};
use crate::noise_models::Spectrum;
use crate::omrr::OmrrConfig;
use crate::series::UniformSeries;

/// Smallest ratio of sample rate to OMRR resonance accepted by the
/// frequency-domain filters.
pub const MIN_SAMPLES_PER_RESONANCE: f64 = 4.0;

pub(crate) fn check_sampling(fs: f64, omrr: &OmrrConfig) -> Result<()> {
    let required = MIN_SAMPLES_PER_RESONANCE * omrr.resonance_hz();
    if fs < required {
        return Err(Error::SampleRateTooLow { fs, required });
    }
    Ok(())
}

/// Multiplies a full-length DFT by `filter(f)` for f ≥ 0 and by its
/// conjugate on the mirrored negative-frequency bins.
pub(crate) fn apply_filter<F>(spec: &mut [Complex64], fs: f64, filter: F)
where
    F: Fn(f64) -> Complex64,
{
    let n = spec.len();
    let df = fs / n as f64;
    for k in 0..=n / 2 {
        let h = filter(k as f64 * df);
        spec[k] *= h;
        if k != 0 && n - k != k {
            spec[n - k] *= h.conj();
        }
    }
}

/// Where the acceleration estimate is cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Cutoff {
    /// At the OMRR resonance, matching the hybrid noise budget.
    #[default]
    Resonance,
    /// No cutoff.
    None,
    /// At a fixed frequency (Hz).
    Hz(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    pub cutoff: Cutoff,
    /// Largest allowed excess (dB, in power) of amplified readout noise over
    /// the ambient model; the inversion gain is reduced wherever it would be
    /// exceeded. `None` disables the cap.
    pub gain_cap_db: Option<f64>,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            cutoff: Cutoff::Resonance,
            gain_cap_db: Some(40.0),
        }
    }
}

impl EstimatorOptions {
    pub fn unregularized() -> Self {
        Self {
            cutoff: Cutoff::None,
            gain_cap_db: None,
        }
    }

    fn cutoff_hz(&self, omrr: &OmrrConfig) -> f64 {
        match self.cutoff {
            Cutoff::Resonance => omrr.resonance_hz(),
            Cutoff::None => f64::INFINITY,
            Cutoff::Hz(f) => f,
        }
    }
}

/// Inverse of the displacement response with cutoff and gain cap applied.
pub(crate) fn inversion_filter<'a>(
    omrr: &'a OmrrConfig,
    ambient: Option<&'a dyn Spectrum>,
    opts: &EstimatorOptions,
) -> impl Fn(f64) -> Complex64 + 'a {
    let cutoff = opts.cutoff_hz(omrr);
    let excess = opts.gain_cap_db.map(|db| 10f64.powf(db / 20.0));
    move |f| {
        if f > cutoff {
            return Complex64::new(0.0, 0.0);
        }
        let inv = 1.0 / omrr.disp_to_accel_tf(2.0 * PI * f);
        match (excess, ambient) {
            (Some(x), Some(amb)) if omrr.sigma_x > 0.0 => {
                let limit = x * amb.density_nearest(f).value.sqrt() / omrr.sigma_x;
                let gain = inv.norm();
                if gain > limit {
                    inv * (limit / gain)
                } else {
                    inv
                }
            }
            _ => inv,
        }
    }
}

/// Test-mass displacement driven by the acceleration record `accel`,
/// computed by exact multiplication with the oscillator response in the
/// frequency domain. The record is treated as periodic, so the output is the
/// steady-state response.
pub fn oscillator_response(accel: &UniformSeries, omrr: &OmrrConfig) -> Result<UniformSeries> {
    omrr.validate()?;
    check_sampling(accel.fs, omrr)?;
    let mut spec = forward(&accel.values);
    apply_filter(&mut spec, accel.fs, |f| omrr.disp_to_accel_tf(2.0 * PI * f));
    Ok(UniformSeries::new(
        accel.t_start,
        accel.fs,
        inverse_real(spec),
    ))
}

/// Adds white displacement readout noise of amplitude density `sigma_x`.
pub fn readout(z: &UniformSeries, sigma_x: f64, seed: u64) -> Result<UniformSeries> {
    if !(sigma_x >= 0.0) {
        return Err(Error::config("displacement noise must be non-negative"));
    }
    if sigma_x == 0.0 {
        return Ok(z.clone());
    }
    let noise = white_samples(sigma_x, z.fs, z.len(), &mut stream_rng(seed, 0));
    let values = z.values.iter().zip(noise).map(|(a, b)| a + b).collect();
    Ok(UniformSeries::new(z.t_start, z.fs, values))
}

/// Acceleration reconstructed from measured displacement by inverting the
/// oscillator response. `ambient` is only consulted for the gain cap.
pub fn estimate_accel(
    z_meas: &UniformSeries,
    omrr: &OmrrConfig,
    ambient: Option<&dyn Spectrum>,
    opts: &EstimatorOptions,
) -> Result<UniformSeries> {
    omrr.validate()?;
    check_sampling(z_meas.fs, omrr)?;
    let mut spec = forward(&z_meas.values);
    apply_filter(&mut spec, z_meas.fs, inversion_filter(omrr, ambient, opts));
    Ok(UniformSeries::new(
        z_meas.t_start,
        z_meas.fs,
        inverse_real(spec),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::synth::synthesize_noise;
    use crate::noise_models::{Band, NoisePsd, PsdKind};
    use crate::spectral::welch;

    fn sine(fs: f64, n: usize, f: f64, amp: f64) -> UniformSeries {
        UniformSeries::new(
            0.0,
            fs,
            (0..n)
                .map(|i| amp * (2.0 * PI * f * i as f64 / fs).sin())
                .collect(),
        )
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn dc_gain() {
        let omrr = OmrrConfig::default();
        let a = UniformSeries::new(0.0, 8192.0, vec![0.3; 8192]);
        let z = oscillator_response(&a, &omrr).unwrap();
        let w0 = omrr.omega0;
        for v in &z.values {
            assert!((v + 0.3 / (w0 * w0)).abs() < 1e-12 * 0.3 / (w0 * w0) + 1e-25);
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let omrr = OmrrConfig::default();
        let a = UniformSeries::new(0.0, 8192.0, vec![0.0; 1000]);
        assert!(oscillator_response(&a, &omrr)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
        let opts = EstimatorOptions::default();
        assert!(estimate_accel(&a, &omrr, None, &opts)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn resonant_gain_with_reduced_q() {
        let omrr = OmrrConfig {
            q: 50.0,
            ..OmrrConfig::default().with_resonance_hz(200.0)
        };
        let fs = 4096.0;
        let n = 8192;
        // settling time 5Q/ω₀ is far below the record length; the response
        // here is already the steady state.
        assert!(5.0 * omrr.q / omrr.omega0 < n as f64 / fs);
        let z = oscillator_response(&sine(fs, n, 200.0, 1.0), &omrr).unwrap();
        let amp = rms(&z.values) * 2f64.sqrt();
        let expected = omrr.q / (omrr.omega0 * omrr.omega0);
        assert!((amp / expected - 1.0).abs() < 0.01, "{amp} {expected}");
    }

    #[test]
    fn sinusoid_gain_matches_transfer_function_below_resonance() {
        let omrr = OmrrConfig::default();
        let fs = 8192.0;
        let n = 8192;
        for f in [1.0, 50.0, 400.0, 900.0, 1015.0] {
            let z = oscillator_response(&sine(fs, n, f, 1.0), &omrr).unwrap();
            let amp = rms(&z.values) * 2f64.sqrt();
            let expected = omrr.disp_to_accel_tf(2.0 * PI * f).norm();
            assert!((amp / expected - 1.0).abs() < 0.01, "{f}");
        }
    }

    #[test]
    fn undersampled_resonance_is_rejected() {
        let omrr = OmrrConfig::default();
        let a = UniformSeries::new(0.0, 2000.0, vec![0.0; 100]);
        assert!(matches!(
            oscillator_response(&a, &omrr),
            Err(Error::SampleRateTooLow { .. })
        ));
    }

    #[test]
    fn noiseless_round_trip() {
        let omrr = OmrrConfig::default();
        let fs = 8192.0;
        let n = 1 << 17;
        let psd = NoisePsd::white(PsdKind::Acceleration, 1e-12, Band::unbounded()).unwrap();
        let a = synthesize_noise(&psd, fs, n, 4).unwrap().series;
        let z = oscillator_response(&a, &omrr).unwrap();
        let full = estimate_accel(&z, &omrr, None, &EstimatorOptions::unregularized()).unwrap();
        let err: Vec<f64> = a
            .values
            .iter()
            .zip(&full.values)
            .map(|(x, y)| x - y)
            .collect();
        assert!(rms(&err) < 1e-6 * rms(&a.values));

        // with the default cutoff, compare after band-limiting to [f_c, 0.8 f₀]
        let est = estimate_accel(&z, &omrr, Some(&psd), &EstimatorOptions::default()).unwrap();
        let band = |s: &UniformSeries| {
            let mut spec = forward(&s.values);
            let hi = 0.8 * omrr.resonance_hz();
            apply_filter(&mut spec, fs, |f| {
                Complex64::new(
                    if (1.0 / 1.5..=hi).contains(&f) {
                        1.0
                    } else {
                        0.0
                    },
                    0.0,
                )
            });
            inverse_real(spec)
        };
        let (ab, eb) = (band(&a), band(&est));
        let err: Vec<f64> = ab.iter().zip(&eb).map(|(x, y)| x - y).collect();
        assert!(rms(&err) < 0.01 * rms(&ab));
    }

    #[test]
    fn readout_noise_maps_to_readout_limited_asd() {
        let omrr = OmrrConfig::default();
        let fs = 8192.0;
        let n = 1 << 20;
        let z = UniformSeries::new(0.0, fs, vec![0.0; n]);
        assert_eq!(readout(&z, 0.0, 1).unwrap(), z);
        let zm = readout(&z, omrr.sigma_x, 1).unwrap();
        assert_eq!(zm, readout(&z, omrr.sigma_x, 1).unwrap());
        let est = estimate_accel(&zm, &omrr, None, &EstimatorOptions::unregularized()).unwrap();
        let p = welch(&est.values, fs, 1 << 14).unwrap();
        for f in [2.0, 20.0, 200.0, 600.0, 2000.0] {
            let (level, _) = p.band_mean(f * 0.9, f * 1.1).unwrap();
            let model = omrr.readout_limited_accel_asd(2.0 * PI * f).powi(2);
            let db = 10.0 * (level / model).log10();
            assert!(db.abs() < 3.0, "{f} Hz: {db} dB");
        }
    }

    #[test]
    fn gain_cap_limits_noise_amplification() {
        let omrr = OmrrConfig::default();
        let quiet = NoisePsd::white(PsdKind::Acceleration, 1e-22, Band::unbounded()).unwrap();
        let filt = inversion_filter(&omrr, Some(&quiet), &EstimatorOptions::default());
        let f = 10.0;
        let amplified = omrr.sigma_x * filt(f).norm();
        assert!((amplified / (100.0 * 1e-11) - 1.0).abs() < 1e-9);
        assert_eq!(filt(2000.0).norm(), 0.0);
    }
}

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::noise_models::{PsdKind, Spectrum};
use crate::series::UniformSeries;

/// RNG stream for one noise source of a seeded run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A synthesized record and the number of positive-frequency bins that fell
/// outside the density's band and were left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesized {
    pub series: UniformSeries,
    pub empty_bins: usize,
}

/// One-sided spectrum of Gaussian noise with density `psd`, as the `n`-point
/// DFT of the time series it represents. DC is zero. Bins outside the band
/// of `psd` carry no power; their count is returned.
pub(crate) fn noise_spectrum<S: Spectrum + ?Sized>(
    psd: &S,
    fs: f64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Complex64>, usize) {
    let df = fs / n as f64;
    let band = psd.band();
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let mut empty = 0;
    let half = n / 2;
    for k in 1..=half {
        let f = k as f64 * df;
        let nyquist = 2 * k == n;
        let level = if band.contains(f) {
            psd.density_in_band(f)
        } else {
            empty += 1;
            0.0
        };
        let g1: f64 = StandardNormal.sample(rng);
        let g2: f64 = StandardNormal.sample(rng);
        if nyquist {
            spec[k] = Complex64::new((level * fs * n as f64 / 2.0).sqrt() * g1, 0.0);
        } else {
            let amp = (level * fs * n as f64 / 4.0).sqrt();
            spec[k] = Complex64::new(amp * g1, amp * g2);
            spec[n - k] = spec[k].conj();
        }
    }
    (spec, empty)
}

/// Real part of the normalized inverse DFT.
pub(crate) fn inverse_real(mut spec: Vec<Complex64>) -> Vec<f64> {
    let n = spec.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    let scale = 1.0 / n as f64;
    spec.into_iter().map(|c| c.re * scale).collect()
}

pub(crate) fn forward(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// Gaussian, stationary acceleration noise with one-sided density `psd`,
/// `n` samples at rate `fs`, generated in the frequency domain with random
/// complex amplitudes. The record is periodic. Deterministic per seed.
pub fn synthesize_noise<S: Spectrum + ?Sized>(
    psd: &S,
    fs: f64,
    n: usize,
    seed: u64,
) -> Result<Synthesized> {
    if psd.kind() != PsdKind::Acceleration {
        return Err(Error::WrongPsdKind {
            expected: PsdKind::Acceleration.name(),
            found: psd.kind().name(),
        });
    }
    if !(fs > 0.0) || n < 2 {
        return Err(Error::config(
            "synthesis needs fs > 0 and at least 2 samples",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (spec, empty_bins) = noise_spectrum(psd, fs, n, &mut rng);
    Ok(Synthesized {
        series: UniformSeries::new(0.0, fs, inverse_real(spec)),
        empty_bins,
    })
}

/// White Gaussian samples with one-sided amplitude density `asd`: each
/// sample has standard deviation `asd·√(fs/2)`.
pub(crate) fn white_samples(asd: f64, fs: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let std = asd * (fs / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            std * g
        })
        .collect()
}

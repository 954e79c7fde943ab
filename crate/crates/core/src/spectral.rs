//! Welch power spectral density estimation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// One-sided PSD estimate on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    /// Bin spacing (Hz); bin `k` sits at `k·df`.
    pub df: f64,
    /// Density per bin (unit²/Hz), DC through Nyquist.
    pub psd: Vec<f64>,
    /// Number of averaged segments.
    pub segments: usize,
}

impl Periodogram {
    pub fn freq(&self, k: usize) -> f64 {
        k as f64 * self.df
    }

    /// Mean density of the bins whose centre lies in `[lo, hi)`.
    pub fn band_mean(&self, lo: f64, hi: f64) -> Option<(f64, usize)> {
        let k0 = (lo / self.df).ceil().max(1.0) as usize;
        let k1 = ((hi / self.df).ceil() as usize).min(self.psd.len());
        if k1 <= k0 {
            return None;
        }
        let sum: f64 = self.psd[k0..k1].iter().sum();
        Some((sum / (k1 - k0) as f64, k1 - k0))
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Welch estimate with a periodic Hann window, 50 % overlap and per-segment
/// mean removal.
pub fn welch(x: &[f64], fs: f64, segment_len: usize) -> Result<Periodogram> {
    if segment_len < 8 {
        return Err(Error::config("Welch segment must have at least 8 samples"));
    }
    if x.len() < segment_len {
        return Err(Error::config(format!(
            "record of {} samples is shorter than one segment ({segment_len})",
            x.len()
        )));
    }
    let window = hann(segment_len);
    let w2: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(segment_len);
    let hop = segment_len / 2;
    let n_bins = segment_len / 2 + 1;
    let mut acc = vec![0.0; n_bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_len];
    let mut segments = 0;
    let mut start = 0;
    while start + segment_len <= x.len() {
        let seg = &x[start..start + segment_len];
        let mean = seg.iter().sum::<f64>() / segment_len as f64;
        for ((b, &v), &w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex64::new((v - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (fs * w2 * segments as f64);
    let last = n_bins - 1;
    let psd = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let one_sided = if k == 0 || (k == last && segment_len.is_multiple_of(2)) {
                1.0
            } else {
                2.0
            };
            a * scale * one_sided
        })
        .collect();
    Ok(Periodogram {
        df: fs / segment_len as f64,
        psd,
        segments,
    })
}

/// Fractional-octave band edges from `lo` to `hi`, `per_octave` bands per
/// octave.
pub fn fractional_octave_edges(lo: f64, hi: f64, per_octave: usize) -> Vec<f64> {
    let ratio = 2f64.powf(1.0 / per_octave as f64);
    let mut edges = vec![lo];
    while *edges.last().unwrap() < hi {
        let next = (edges.last().unwrap() * ratio).min(hi);
        edges.push(next);
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn white_noise_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fs = 1000.0;
        let sigma: f64 = 0.3;
        let x: Vec<f64> = (0..200_000)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                sigma * g
            })
            .collect();
        let p = welch(&x, fs, 1024).unwrap();
        let (mean, _) = p.band_mean(10.0, 400.0).unwrap();
        let expected = 2.0 * sigma * sigma / fs;
        assert!((mean / expected - 1.0).abs() < 0.03, "{mean} vs {expected}");
    }

    #[test]
    fn sinusoid_power_is_preserved() {
        let fs = 256.0;
        let n = 1 << 16;
        let amp = 2.0;
        let x: Vec<f64> = (0..n)
            .map(|i| amp * (2.0 * PI * 20.0 * i as f64 / fs).sin())
            .collect();
        let p = welch(&x, fs, 4096).unwrap();
        let power: f64 = p.psd.iter().sum::<f64>() * p.df;
        assert!((power - amp * amp / 2.0).abs() / (amp * amp / 2.0) < 0.01);
    }

    #[test]
    fn rejects_short_record() {
        assert!(welch(&[0.0; 10], 1.0, 16).is_err());
    }

    #[test]
    fn octave_edges_cover_range() {
        let e = fractional_octave_edges(1.0, 8.0, 3);
        assert_eq!(e.len(), 10);
        assert!((e[3] - 2.0).abs() < 1e-12);
        assert_eq!(*e.last().unwrap(), 8.0);
    }
}

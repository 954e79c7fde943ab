//! Hybrid sensor noise budget and OMRR bandwidth optimization.
//!
//! Inside the OMRR bandwidth (ω ≤ ω₀) the vibration seen by the atom
//! interferometer is corrected down to the OMRR self-noise. Above resonance
//! the OMRR no longer tracks the mirror and the full ambient noise applies.
//! The resulting acceleration density is pushed through the interferometer
//! sensitivity sum to get the hybrid sensitivity for a given resonance.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::atom_interferometer::{InterferometerConfig, SensitivityEstimate, SumOptions};
use crate::error::{Error, Result};
use crate::noise_models::{Band, DensitySample, NoisePsd, PiecewiseLogPsd, PsdKind, Spectrum};
use crate::omrr::OmrrConfig;
use crate::optimize::golden_section_min;

/// Ambient models are flat-extended this far above the Peterson table so
/// that every harmonic reached by the sensitivity sum is in band.
pub const AMBIENT_EXTENSION_HZ: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct HybridConfig {
    pub ai: InterferometerConfig,
    pub omrr: OmrrConfig,
    pub ambient: NoisePsd,
    pub sum: SumOptions,
    /// Averaging time (s) at which σ_a is reported.
    pub tau: f64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            ai: InterferometerConfig::default(),
            omrr: OmrrConfig::default(),
            ambient: NoisePsd::peterson_flat_extended(
                PiecewiseLogPsd::high_noise_model(),
                AMBIENT_EXTENSION_HZ,
            ),
            sum: SumOptions::default(),
            tau: 1.0,
        }
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        self.ai.validate()?;
        self.omrr.validate()?;
        if self.ambient.kind() != PsdKind::Acceleration {
            return Err(Error::WrongPsdKind {
                expected: PsdKind::Acceleration.name(),
                found: self.ambient.kind().name(),
            });
        }
        let band = self.ambient.band();
        let (fc, f0) = (self.ai.cycle_frequency(), self.omrr.resonance_hz());
        if !(band.min <= fc && band.max >= f0) {
            return Err(Error::config(format!(
                "ambient band [{}, {}] Hz does not cover [{fc}, {f0}] Hz",
                band.min, band.max
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::config("averaging time must be positive"));
        }
        Ok(())
    }

    pub fn with_omrr(&self, omrr: OmrrConfig) -> Self {
        Self {
            omrr,
            ..self.clone()
        }
    }

    /// The piecewise residual density as a [`Spectrum`].
    pub fn residual_spectrum(&self) -> HybridNoise<'_> {
        HybridNoise { cfg: self }
    }

    /// Sum options with enough harmonics to pass the resonance before the
    /// first convergence check.
    fn sum_options(&self) -> SumOptions {
        let n_resonance = (self.omrr.resonance_hz() * self.ai.cycle_time).ceil() as usize;
        SumOptions {
            min_terms: self.sum.min_terms.max(4 * n_resonance + 64),
            ..self.sum
        }
    }
}

/// Residual acceleration density after OMRR correction.
#[derive(Debug, Clone, Copy)]
pub struct HybridNoise<'a> {
    cfg: &'a HybridConfig,
}

impl Spectrum for HybridNoise<'_> {
    fn kind(&self) -> PsdKind {
        PsdKind::Acceleration
    }

    fn band(&self) -> Band {
        Band::unbounded()
    }

    fn density_in_band(&self, freq: f64) -> f64 {
        self.density_nearest(freq).value
    }

    fn density_nearest(&self, freq: f64) -> DensitySample {
        let omega = 2.0 * PI * freq;
        if omega <= self.cfg.omrr.omega0 {
            DensitySample {
                value: self
                    .cfg
                    .omrr
                    .self_noise_accel_psd(omega.max(0.0))
                    .expect("non-negative frequency"),
                substituted: false,
            }
        } else {
            self.cfg.ambient.density_nearest(freq)
        }
    }
}

/// Residual acceleration density (m/s²)²/Hz at angular frequency `omega`:
/// OMRR self-noise up to ω₀, ambient noise above. The model is deliberately
/// discontinuous at ω₀.
pub fn hybrid_noise_psd(omega: f64, cfg: &HybridConfig) -> Result<DensitySample> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "hybrid density needs ω > 0, got {omega}"
        )));
    }
    Ok(cfg.residual_spectrum().density_nearest(omega / (2.0 * PI)))
}

/// Evaluates the sum at τ = T_c and rescales by 1/√τ. This allows the
/// per-√Hz normalization τ = 1 s even when the cycle is longer than a
/// second.
fn sigma_at_tau<S: Spectrum>(
    cfg: &HybridConfig,
    density: &S,
    opts: &SumOptions,
) -> Result<SensitivityEstimate> {
    let tc = cfg.ai.cycle_time;
    let mut est = cfg.ai.accel_sensitivity(density, tc, opts)?;
    est.sigma *= (tc / cfg.tau).sqrt();
    Ok(est)
}

/// Hybrid acceleration sensitivity at `cfg.tau`; with the default τ = 1 s
/// this is the amplitude density in m/s²/√Hz.
pub fn hybrid_sigma(cfg: &HybridConfig) -> Result<SensitivityEstimate> {
    cfg.validate()?;
    sigma_at_tau(cfg, &cfg.residual_spectrum(), &cfg.sum_options())
}

/// Sensitivity of the interferometer alone, exposed to the full ambient
/// noise.
pub fn uncorrected_sigma(cfg: &HybridConfig) -> Result<SensitivityEstimate> {
    cfg.validate()?;
    sigma_at_tau(cfg, &cfg.ambient, &cfg.sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// OMRR resonance (rad/s).
    pub omega0: f64,
    /// Hybrid sensitivity (m/s²/√Hz).
    pub sigma_a: f64,
    /// Displacement sensitivity needed to see the thermal floor (m/√Hz).
    pub required_sigma_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Grid evaluations, sorted by resonance.
    pub points: Vec<SweepPoint>,
    /// Best point after golden-section refinement.
    pub optimum: SweepPoint,
}

impl SweepResult {
    pub fn optimum_hz(&self) -> f64 {
        self.optimum.omega0 / (2.0 * PI)
    }
}

/// Minimum number of grid points accepted by [`sweep_bandwidth`].
pub const MIN_SWEEP_POINTS: usize = 16;

/// Relative width in ω₀ to which the grid optimum is refined.
pub const SWEEP_REFINE_TOL: f64 = 1e-3;

/// Evaluates the hybrid sensitivity across OMRR resonances, keeping every
/// other parameter of `template` fixed, and locates the best resonance.
///
/// The grid is evaluated in parallel; the assembled result does not depend
/// on the worker count. The grid minimum (ties to the lower ω₀) must be an
/// interior point, and is then refined by golden-section search between its
/// neighbours.
pub fn sweep_bandwidth(template: &HybridConfig, omega0_grid: &[f64]) -> Result<SweepResult> {
    if omega0_grid.len() < MIN_SWEEP_POINTS {
        return Err(Error::NotBracketed(format!(
            "{} grid points given, at least {MIN_SWEEP_POINTS} needed",
            omega0_grid.len()
        )));
    }
    if omega0_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("resonance grid must be strictly increasing"));
    }

    let eval = |omega0: f64| -> Result<SweepPoint> {
        let omrr = OmrrConfig {
            omega0,
            ..template.omrr
        };
        let sigma_a = hybrid_sigma(&template.with_omrr(omrr))?.sigma;
        Ok(SweepPoint {
            omega0,
            sigma_a,
            required_sigma_x: omrr.required_sigma_x(),
        })
    };

    let points = omega0_grid
        .par_iter()
        .map(|&w| eval(w))
        .collect::<Result<Vec<_>>>()?;

    let (idx, grid_best) = points
        .iter()
        .enumerate()
        .fold(None::<(usize, &SweepPoint)>, |acc, (i, p)| match acc {
            Some((_, b)) if b.sigma_a <= p.sigma_a => acc,
            _ => Some((i, p)),
        })
        .expect("grid is non-empty");
    if idx == 0 || idx == points.len() - 1 {
        return Err(Error::NotBracketed(format!(
            "grid minimum at the {} end of the grid (ω₀ = {:.4e} rad/s)",
            if idx == 0 { "lower" } else { "upper" },
            grid_best.omega0
        )));
    }

    let refined = golden_section_min(
        |w| eval(w).map(|p| p.sigma_a),
        points[idx - 1].omega0,
        points[idx + 1].omega0,
        SWEEP_REFINE_TOL,
    )?;
    let optimum = if refined.value < grid_best.sigma_a
        || (refined.value == grid_best.sigma_a && refined.x < grid_best.omega0)
    {
        eval(refined.x)?
    } else {
        *grid_best
    };

    Ok(SweepResult { points, optimum })
}

/// Which sensor sets the hybrid output at a given frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Below the cycle rate, referenced to the atom interferometer.
    AtomInterferometer,
    /// At and above the cycle rate, from the OMRR.
    Omrr,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::AtomInterferometer => "AI",
            Regime::Omrr => "OMRR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub freq: f64,
    /// Hybrid acceleration ASD (m/s²/√Hz).
    pub asd: f64,
    pub regime: Regime,
    /// Ambient model ASD at this frequency.
    pub ambient_asd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridSpectrum {
    pub rows: Vec<SpectrumRow>,
    /// Flat level drawn below the cycle rate.
    pub hybrid_sigma: f64,
    /// Reference: interferometer alone under the ambient noise.
    pub uncorrected_sigma: f64,
    /// Reference: projection-noise floor.
    pub qpn_asd: f64,
}

/// Amplitude spectrum of the hybrid sensor on `f_grid` (Hz), together with
/// the reference levels used to judge it.
pub fn hybrid_spectrum(cfg: &HybridConfig, f_grid: &[f64]) -> Result<HybridSpectrum> {
    if f_grid.is_empty() {
        return Err(Error::config("frequency grid is empty"));
    }
    if f_grid[0] <= 0.0 || f_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config(
            "frequency grid must be positive and strictly increasing",
        ));
    }
    let sigma = hybrid_sigma(cfg)?.sigma;
    let uncorrected = uncorrected_sigma(cfg)?.sigma;
    let fc = cfg.ai.cycle_frequency();
    let residual = cfg.residual_spectrum();

    let rows = f_grid
        .iter()
        .map(|&f| {
            let (asd, regime) = if f < fc {
                (sigma, Regime::AtomInterferometer)
            } else {
                (residual.density_nearest(f).value.sqrt(), Regime::Omrr)
            };
            SpectrumRow {
                freq: f,
                asd,
                regime,
                ambient_asd: cfg.ambient.density_nearest(f).value.sqrt(),
            }
        })
        .collect();

    Ok(HybridSpectrum {
        rows,
        hybrid_sigma: sigma,
        uncorrected_sigma: uncorrected,
        qpn_asd: cfg.ai.qpn_accel_asd(),
    })
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

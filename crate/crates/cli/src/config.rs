//! Run configuration file schema.
//!
//! Every section and key is optional; missing values take the defaults
//! below. Unknown keys are rejected so typos do not go unnoticed.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use omrr_core::atom_interferometer::{counter_propagating_k_eff, InterferometerConfig, SumOptions};
use omrr_core::fusion::{Correction, Cutoff, Detection, EstimatorOptions, SimConfig};
use omrr_core::hybrid::{log_grid, HybridConfig, AMBIENT_EXTENSION_HZ, MIN_SWEEP_POINTS};
use omrr_core::noise_models::{Band, NoisePsd, PiecewiseLogPsd, PsdKind};
use omrr_core::omrr::{LossModel, OmrrConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub interferometer: InterferometerSection,
    pub omrr: OmrrSection,
    pub ambient: AmbientSection,
    pub sum: SumSection,
    pub noise: GridSection,
    pub optimize: OptimizeSection,
    pub spectra: SpectraSection,
    pub simulate: SimulateSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerSection {
    /// s
    pub pulse_separation: f64,
    /// s
    pub cycle_time: f64,
    /// s, 0 for instantaneous pulses
    pub pulse_duration: f64,
    pub atom_number: u64,
    pub contrast: f64,
    pub offset: f64,
    /// m, Raman laser wavelength; sets k_eff = 4π/λ
    pub wavelength: f64,
    /// m/s²
    pub g0: f64,
}

impl Default for InterferometerSection {
    fn default() -> Self {
        let ai = InterferometerConfig::default();
        Self {
            pulse_separation: ai.pulse_separation,
            cycle_time: ai.cycle_time,
            pulse_duration: ai.pulse_duration,
            atom_number: ai.atom_number,
            contrast: ai.contrast,
            offset: ai.offset,
            wavelength: omrr_core::atom_interferometer::RB87_D2_WAVELENGTH,
            g0: ai.g0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmrrSection {
    /// Hz
    pub resonance_hz: f64,
    pub q: f64,
    /// kg
    pub mass: f64,
    /// K
    pub temperature: f64,
    /// m/√Hz
    pub sigma_x: f64,
    pub loss_model: LossModel,
}

impl Default for OmrrSection {
    fn default() -> Self {
        let o = OmrrConfig::default();
        Self {
            resonance_hz: o.resonance_hz(),
            q: o.q,
            mass: o.mass,
            temperature: o.temperature,
            sigma_x: o.sigma_x,
            loss_model: o.loss_model,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmbientModel {
    PetersonHigh,
    White,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmbientSection {
    pub model: AmbientModel,
    /// Peterson-format table; the built-in high-noise model when absent.
    pub table: Option<PathBuf>,
    /// Hz, flat extension of the table above its short-period end
    pub extend_to_hz: f64,
    /// (m/s²)²/Hz, for the white model
    pub white_level: f64,
}

impl Default for AmbientSection {
    fn default() -> Self {
        Self {
            model: AmbientModel::PetersonHigh,
            table: None,
            extend_to_hz: AMBIENT_EXTENSION_HZ,
            white_level: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SumSection {
    pub min_terms: usize,
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl Default for SumSection {
    fn default() -> Self {
        let s = SumOptions::default();
        Self {
            min_terms: s.min_terms,
            max_terms: s.max_terms,
            rel_tol: s.rel_tol,
        }
    }
}

/// Log-spaced frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            f_min: 0.01,
            f_max: 5000.0,
            points: 400,
        }
    }
}

impl GridSection {
    pub fn grid(&self, what: &str) -> Result<Vec<f64>> {
        if self.points == 0 {
            bail!("[{what}] frequency grid is empty (points = 0)");
        }
        if !(self.f_min > 0.0 && self.f_max >= self.f_min) {
            bail!("[{what}] needs 0 < f_min <= f_max");
        }
        Ok(log_grid(self.f_min, self.f_max, self.points))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    /// m/√Hz, one sweep per entry
    pub sigma_x: Vec<f64>,
    /// Hz, linear resonance grid
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self {
            sigma_x: vec![1e-14, 1e-15, 1e-16],
            f_min: 50.0,
            f_max: 2000.0,
            points: 391,
        }
    }
}

impl OptimizeSection {
    pub fn omega_grid(&self) -> Result<Vec<f64>> {
        if !(self.f_min > 0.0 && self.f_max > self.f_min) {
            bail!("[optimize] needs 0 < f_min < f_max");
        }
        if self.sigma_x.is_empty() {
            bail!("[optimize] sigma_x list is empty");
        }
        if self.points < MIN_SWEEP_POINTS {
            bail!("[optimize] needs at least {MIN_SWEEP_POINTS} grid points");
        }
        Ok(
            omrr_core::hybrid::linear_grid(self.f_min, self.f_max, self.points)
                .into_iter()
                .map(|f| 2.0 * PI * f)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraSection {
    /// Hz, log-spaced output grid
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
    /// Hz; one curve per resonance and displacement noise pair. Empty means
    /// the [omrr] value.
    pub resonances_hz: Vec<f64>,
    /// m/√Hz; empty means the [omrr] value.
    pub sigma_x: Vec<f64>,
}

impl Default for SpectraSection {
    fn default() -> Self {
        let grid = GridSection::default();
        Self {
            f_min: grid.f_min,
            f_max: grid.f_max,
            points: grid.points,
            resonances_hz: Vec::new(),
            sigma_x: Vec::new(),
        }
    }
}

impl SpectraSection {
    pub fn grid(&self) -> Result<Vec<f64>> {
        GridSection {
            f_min: self.f_min,
            f_max: self.f_max,
            points: self.points,
        }
        .grid("spectra")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    /// Hz
    pub fs: f64,
    pub n_cycles: usize,
    pub seed: u64,
    pub correction: Correction,
    pub detection: Detection,
    /// Hz; estimator cutoff, the OMRR resonance when absent
    pub cutoff_hz: Option<f64>,
    /// limit the inversion gain where readout noise would dominate
    pub gain_cap: bool,
    /// dB, allowed excess of amplified readout noise over the ambient model
    pub gain_cap_db: f64,
    /// m/s²
    pub omrr_bias: f64,
    /// m/s³
    pub omrr_drift: f64,
    /// cycles; omit to disable the bias removal loop
    pub debias_cycles: Option<f64>,
    /// write series.bin with the sampled signals
    pub dump_series: bool,
}

impl Default for SimulateSection {
    fn default() -> Self {
        let s = SimConfig::default();
        Self {
            fs: s.fs,
            n_cycles: s.n_cycles,
            seed: s.seed,
            correction: s.correction,
            detection: s.detection,
            cutoff_hz: None,
            gain_cap: s.estimator.gain_cap_db.is_some(),
            gain_cap_db: s.estimator.gain_cap_db.unwrap_or(40.0),
            omrr_bias: 0.0,
            omrr_drift: 0.0,
            debias_cycles: None,
            dump_series: false,
        }
    }
}

/// Environment variable naming a Peterson-format table that replaces the
/// built-in one.
pub const TABLE_ENV: &str = "OMRR_PETERSON_TABLE";

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn interferometer(&self) -> InterferometerConfig {
        let s = &self.interferometer;
        InterferometerConfig {
            pulse_separation: s.pulse_separation,
            cycle_time: s.cycle_time,
            pulse_duration: s.pulse_duration,
            atom_number: s.atom_number,
            contrast: s.contrast,
            offset: s.offset,
            k_eff: counter_propagating_k_eff(s.wavelength),
            g0: s.g0,
        }
    }

    pub fn omrr(&self) -> OmrrConfig {
        let s = &self.omrr;
        OmrrConfig {
            omega0: 2.0 * PI * s.resonance_hz,
            q: s.q,
            mass: s.mass,
            temperature: s.temperature,
            sigma_x: s.sigma_x,
            loss_model: s.loss_model,
        }
    }

    pub fn peterson_table(&self) -> Result<PiecewiseLogPsd> {
        match &self.ambient.table {
            // The core error already names the path and the io cause.
            Some(path) => PiecewiseLogPsd::load(path).map_err(|e| anyhow!("noise table: {e}")),
            None => Ok(PiecewiseLogPsd::high_noise_model()),
        }
    }

    pub fn ambient(&self) -> Result<NoisePsd> {
        match self.ambient.model {
            AmbientModel::PetersonHigh => Ok(NoisePsd::peterson_flat_extended(
                self.peterson_table()?,
                self.ambient.extend_to_hz,
            )),
            AmbientModel::White => Ok(NoisePsd::white(
                PsdKind::Acceleration,
                self.ambient.white_level,
                Band::unbounded(),
            )?),
        }
    }

    pub fn hybrid(&self) -> Result<HybridConfig> {
        let cfg = HybridConfig {
            ai: self.interferometer(),
            omrr: self.omrr(),
            ambient: self.ambient()?,
            sum: SumOptions {
                min_terms: self.sum.min_terms,
                max_terms: self.sum.max_terms,
                rel_tol: self.sum.rel_tol,
                ..SumOptions::default()
            },
            tau: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn simulation(&self) -> Result<SimConfig> {
        let s = &self.simulate;
        if s.n_cycles == 0 {
            bail!("[simulate] n_cycles must be positive");
        }
        let cfg = SimConfig {
            hybrid: self.hybrid()?,
            fs: s.fs,
            n_cycles: s.n_cycles,
            seed: s.seed,
            correction: s.correction,
            detection: s.detection,
            estimator: EstimatorOptions {
                cutoff: s.cutoff_hz.map_or(Cutoff::Resonance, Cutoff::Hz),
                gain_cap_db: s.gain_cap.then_some(s.gain_cap_db),
            },
            omrr_bias: s.omrr_bias,
            omrr_drift: s.omrr_drift,
            debias_cycles: s.debias_cycles,
            keep_series: s.dump_series,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = Config::parse("").unwrap();
        assert_eq!(c, Config::default());
        let h = c.hybrid().unwrap();
        assert_eq!(h.ai, InterferometerConfig::default());
        assert!((h.omrr.omega0 - OmrrConfig::default().omega0).abs() < 1e-9);
    }

    #[test]
    fn unknown_key_is_reported_with_line() {
        let err = Config::parse("[omrr]\nq = 1e5\nmas = 0.002\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("mas"), "{msg}");
    }

    #[test]
    fn type_errors_are_reported_with_line() {
        let err = Config::parse("[simulate]\n\nn_cycles = \"many\"\n").unwrap_err();
        assert!(format!("{err:#}").contains("line 3"));
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = Config::default();
        c.simulate.seed = 42;
        c.simulate.debias_cycles = Some(8.0);
        c.spectra.resonances_hz = vec![100.0, 500.0];
        let back = Config::parse(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn zero_cycles_is_rejected() {
        let c = Config::parse("[simulate]\nn_cycles = 0\n").unwrap();
        assert!(c.simulation().is_err());
    }
}

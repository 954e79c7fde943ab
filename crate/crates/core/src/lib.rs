//! Modelling toolkit for hybrid accelerometers that combine a light-pulse
//! atom interferometer with an optomechanical retro-reflector (OMRR).
//!
//! The OMRR measures the vibration of the retro-reflecting mirror so that
//! it can be removed from the interferometer phase. The crate provides the
//! noise models of both sensors, the sensitivity sum that maps an
//! acceleration density into interferometer sensitivity, the OMRR bandwidth
//! optimizer and a shot-by-shot time-domain simulator.

// Checks written as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allan;
pub mod atom_interferometer;
pub mod error;
pub mod fusion;
pub mod hybrid;
pub mod noise_models;
pub mod omrr;
pub mod optimize;
pub mod series;
pub mod spectral;

pub use atom_interferometer::{DcTerm, InterferometerConfig, SensitivityEstimate, SumOptions};
pub use error::{Error, Result};
pub use fusion::{run_batch, run_cycles, Correction, Detection, SimConfig, SimRun};
pub use hybrid::{
    hybrid_noise_psd, hybrid_sigma, hybrid_spectrum, sweep_bandwidth, HybridConfig, HybridSpectrum,
    Regime, SweepPoint, SweepResult,
};
pub use noise_models::{Band, NoisePsd, PiecewiseLogPsd, PsdKind, Spectrum};
pub use omrr::{LossModel, OmrrConfig};
pub use series::UniformSeries;

//! Ambient seismic noise (Peterson model) and one-sided spectral densities.
//!
//! Every density in this crate is one-sided: integrating it over `[0, ∞)` Hz
//! gives the variance of the process. Amplitude spectral densities are the
//! square root of the corresponding density.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// One row of a piecewise log-linear model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdSegment {
    /// Period (s) at which this segment starts.
    pub period_start: f64,
    /// Level term, dB re 1 unit²/Hz.
    pub a_db: f64,
    /// Slope, dB per decade of period.
    pub b_db: f64,
}

impl PsdSegment {
    fn db_at(&self, period: f64) -> f64 {
        self.a_db + self.b_db * period.log10()
    }
}

/// PSD in dB given as `A + B·log10(P)` on consecutive period segments.
///
/// This is the shape of the Peterson (1993) low and high noise models. The
/// table is validated on construction: periods strictly increase and the
/// covered range is closed by an explicit upper period. Queries outside that
/// range fail instead of extrapolating.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLogPsd {
    segments: Vec<PsdSegment>,
    period_end: f64,
}

const NHNM_TABLE: &str = include_str!("../data/nhnm.txt");

impl PiecewiseLogPsd {
    pub fn new(segments: Vec<PsdSegment>, period_end: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, s) in segments.iter().enumerate() {
            let values = [s.period_start, s.a_db, s.b_db];
            if values.iter().any(|v| !v.is_finite()) || s.period_start <= 0.0 {
                return Err(Error::MalformedRow {
                    line: i + 1,
                    reason: "period must be positive and coefficients finite".into(),
                });
            }
            if s.period_start <= prev {
                return Err(Error::UnsortedPeriods {
                    line: i + 1,
                    period: s.period_start,
                });
            }
            prev = s.period_start;
        }
        if !period_end.is_finite() || period_end <= prev {
            return Err(Error::UnsortedPeriods {
                line: segments.len() + 1,
                period: period_end,
            });
        }
        Ok(Self {
            segments,
            period_end,
        })
    }

    /// Parses the plain-text table format documented in `data/nhnm.txt`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut segments: Vec<PsdSegment> = Vec::new();
        let mut end: Option<(usize, f64)> = None;
        let mut prev = f64::NEG_INFINITY;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if end.is_some() {
                return Err(Error::MalformedRow {
                    line,
                    reason: "row after the terminating period row".into(),
                });
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            let nums = fields
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::MalformedRow {
                            line,
                            reason: format!("cannot parse {f:?} as a number"),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            let period = nums[0];
            if period <= 0.0 {
                return Err(Error::MalformedRow {
                    line,
                    reason: "period must be positive".into(),
                });
            }
            match nums.len() {
                1 | 3 => {}
                n => {
                    return Err(Error::MalformedRow {
                        line,
                        reason: format!("expected 3 columns (or 1 on the last row), found {n}"),
                    })
                }
            }
            if period <= prev {
                return Err(Error::UnsortedPeriods { line, period });
            }
            prev = period;
            if nums.len() == 1 {
                end = Some((line, period));
            } else {
                segments.push(PsdSegment {
                    period_start: period,
                    a_db: nums[1],
                    b_db: nums[2],
                });
            }
        }

        if segments.is_empty() {
            return Err(Error::EmptyTable);
        }
        let (_, period_end) = end.ok_or(Error::MissingTableEnd)?;
        Self::new(segments, period_end)
    }

    /// Reads and parses a table file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The New High Noise Model shipped with the crate.
    pub fn high_noise_model() -> Self {
        Self::parse(NHNM_TABLE).expect("bundled NHNM table is valid")
    }

    pub fn segments(&self) -> &[PsdSegment] {
        &self.segments
    }

    /// Covered period range `(min, max)` in seconds.
    pub fn period_range(&self) -> (f64, f64) {
        (self.segments[0].period_start, self.period_end)
    }

    /// Covered frequency band `(min, max)` in Hz.
    pub fn frequency_band(&self) -> Band {
        let (pmin, pmax) = self.period_range();
        Band::new(1.0 / pmax, 1.0 / pmin)
    }

    /// Level in dB at `period`. A period exactly on a breakpoint belongs to
    /// the segment that starts there (the longer-period side).
    pub fn db_at_period(&self, period: f64) -> Result<f64> {
        let (min, max) = self.period_range();
        if !(period >= min && period <= max) {
            return Err(Error::PeriodOutOfRange { period, min, max });
        }
        let idx = self
            .segments
            .partition_point(|s| s.period_start <= period)
            .saturating_sub(1);
        Ok(self.segments[idx].db_at(period))
    }

    /// Serializes back to the table format. Parsing the output reproduces
    /// the same rows.
    pub fn to_table_string(&self) -> String {
        let mut out = String::from("# period_s A_dB B_dB\n");
        for s in &self.segments {
            let _ = writeln!(out, "{} {} {}", s.period_start, s.a_db, s.b_db);
        }
        let _ = writeln!(out, "{}", self.period_end);
        out
    }
}

/// One-sided acceleration PSD, (m/s²)²/Hz, of `model` at frequency `freq`.
pub fn peterson_accel_psd(model: &PiecewiseLogPsd, freq: f64) -> Result<f64> {
    if !(freq > 0.0) {
        let band = model.frequency_band();
        return Err(Error::FrequencyOutOfBand {
            freq,
            min: band.min,
            max: band.max,
        });
    }
    match model.db_at_period(1.0 / freq) {
        Ok(db) => Ok(10f64.powf(db / 10.0)),
        Err(_) => {
            let band = model.frequency_band();
            Err(Error::FrequencyOutOfBand {
                freq,
                min: band.min,
                max: band.max,
            })
        }
    }
}

/// Amplitude spectral density from a power spectral density value.
pub fn asd_of(psd_value: f64) -> Result<f64> {
    if psd_value < 0.0 || psd_value.is_nan() {
        return Err(Error::NegativeDensity(psd_value));
    }
    Ok(psd_value.sqrt())
}

/// Closed frequency interval in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub min: f64,
    pub max: f64,
}

impl Band {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub const fn unbounded() -> Self {
        Self {
            min: 0.0,
            max: f64::INFINITY,
        }
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.min && f <= self.max
    }

    pub fn clamp(&self, f: f64) -> f64 {
        f.clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsdKind {
    Acceleration,
    Displacement,
    Phase,
}

impl PsdKind {
    pub fn name(self) -> &'static str {
        match self {
            PsdKind::Acceleration => "acceleration",
            PsdKind::Displacement => "displacement",
            PsdKind::Phase => "phase",
        }
    }
}

impl fmt::Display for PsdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A density value and whether it was taken from the nearest band edge
/// because the requested frequency lies outside the valid band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub value: f64,
    pub substituted: bool,
}

/// Anything that can be evaluated as a one-sided spectral density.
pub trait Spectrum: Send + Sync {
    fn kind(&self) -> PsdKind;

    fn band(&self) -> Band;

    /// Value at `freq`, which the caller guarantees is inside `band()`.
    fn density_in_band(&self, freq: f64) -> f64;

    fn density(&self, freq: f64) -> Result<f64> {
        let band = self.band();
        if !band.contains(freq) {
            return Err(Error::FrequencyOutOfBand {
                freq,
                min: band.min,
                max: band.max,
            });
        }
        Ok(self.density_in_band(freq))
    }

    /// Out-of-band frequencies take the value at the nearest band edge.
    fn density_nearest(&self, freq: f64) -> DensitySample {
        let band = self.band();
        let substituted = !band.contains(freq);
        DensitySample {
            value: self.density_in_band(band.clamp(freq)),
            substituted,
        }
    }
}

#[derive(Clone)]
enum Source {
    White(f64),
    Peterson(Arc<PiecewiseLogPsd>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// An evaluable one-sided PSD with a fixed kind and valid band.
#[derive(Clone)]
pub struct NoisePsd {
    kind: PsdKind,
    band: Band,
    source: Source,
}

impl fmt::Debug for NoisePsd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let source = match &self.source {
            Source::White(level) => format!("White({level:e})"),
            Source::Peterson(_) => "Peterson".to_string(),
            Source::Custom(_) => "Custom".to_string(),
        };
        f.debug_struct("NoisePsd")
            .field("kind", &self.kind)
            .field("band", &self.band)
            .field("source", &source)
            .finish()
    }
}

impl NoisePsd {
    /// Flat density `level` (unit²/Hz) over `band`.
    pub fn white(kind: PsdKind, level: f64, band: Band) -> Result<Self> {
        if !(level >= 0.0) || !level.is_finite() {
            return Err(Error::NegativeDensity(level));
        }
        Ok(Self {
            kind,
            band,
            source: Source::White(level),
        })
    }

    pub fn zero(kind: PsdKind) -> Self {
        Self {
            kind,
            band: Band::unbounded(),
            source: Source::White(0.0),
        }
    }

    /// Acceleration density following a Peterson-style table over exactly the
    /// band the table covers.
    pub fn peterson(model: PiecewiseLogPsd) -> Self {
        let band = model.frequency_band();
        Self {
            kind: PsdKind::Acceleration,
            band,
            source: Source::Peterson(Arc::new(model)),
        }
    }

    /// Like [`NoisePsd::peterson`] but with the band widened up to `f_max`.
    /// Frequencies above the table's short-period end hold the value at that
    /// end (flat extension); nothing is extrapolated along the last slope.
    pub fn peterson_flat_extended(model: PiecewiseLogPsd, f_max: f64) -> Self {
        let table_band = model.frequency_band();
        Self {
            kind: PsdKind::Acceleration,
            band: Band::new(table_band.min, f_max.max(table_band.max)),
            source: Source::Peterson(Arc::new(model)),
        }
    }

    /// Arbitrary density; `f` must return non-negative values on `band`.
    pub fn from_fn<F>(kind: PsdKind, band: Band, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind,
            band,
            source: Source::Custom(Arc::new(f)),
        }
    }

    /// True when the density is identically zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.source, Source::White(v) if v == 0.0)
    }
}

impl Spectrum for NoisePsd {
    fn kind(&self) -> PsdKind {
        self.kind
    }

    fn band(&self) -> Band {
        self.band
    }

    fn density_in_band(&self, freq: f64) -> f64 {
        match &self.source {
            Source::White(level) => *level,
            Source::Peterson(model) => {
                let table = model.frequency_band();
                peterson_accel_psd(model, table.clamp(freq))
                    .expect("clamped frequency lies inside the table")
            }
            Source::Custom(f) => f(freq),
        }
    }
}

impl<S: Spectrum + ?Sized> Spectrum for &S {
    fn kind(&self) -> PsdKind {
        (**self).kind()
    }
    fn band(&self) -> Band {
        (**self).band()
    }
    fn density_in_band(&self, freq: f64) -> f64 {
        (**self).density_in_band(freq)
    }
}

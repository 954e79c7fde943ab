//! Three-pulse Mach-Zehnder atom interferometer response.
//!
//! Time is measured from the leading edge of the first beam-splitter pulse.
//! With beam-splitter duration `τ` (the mirror pulse lasts `2τ`) and free
//! evolution `T` between pulses, the sequence spans `2T + 4τ`. For `τ = 0`
//! the sensitivity function is −1 on `(0, T)` and +1 on `(T, 2T)`; for finite
//! pulses the edges become sinusoidal Rabi ramps.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise_models::{PsdKind, Spectrum};
use crate::series::UniformSeries;

/// Wavelength of the Rb-87 D2 line used for the Raman beams (m).
pub const RB87_D2_WAVELENGTH: f64 = 780.24e-9;

/// Standard gravity (m/s²).
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Effective wave number of counter-propagating two-photon transitions.
pub fn counter_propagating_k_eff(wavelength: f64) -> f64 {
    4.0 * PI / wavelength
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    /// Free evolution between pulses, T (s).
    pub pulse_separation: f64,
    /// Repetition period of the measurement, T_c (s).
    pub cycle_time: f64,
    /// Beam-splitter pulse duration (s); zero selects instantaneous pulses.
    pub pulse_duration: f64,
    pub atom_number: u64,
    pub contrast: f64,
    pub offset: f64,
    /// Effective wave number (rad/m).
    pub k_eff: f64,
    /// Nominal gravitational acceleration (m/s²).
    pub g0: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self {
            pulse_separation: 0.05,
            cycle_time: 1.5,
            pulse_duration: 0.0,
            atom_number: 10_000_000,
            contrast: 1.0,
            offset: 0.0,
            k_eff: counter_propagating_k_eff(RB87_D2_WAVELENGTH),
            g0: STANDARD_GRAVITY,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Constant(f64),
    /// `sin(Ω (t − origin))`
    Ramp {
        origin: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    start: f64,
    end: f64,
    shape: Shape,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        let t = self.pulse_separation;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::config("pulse separation must be positive"));
        }
        if !(self.pulse_duration >= 0.0) {
            return Err(Error::config("pulse duration must be non-negative"));
        }
        if !(self.cycle_time >= self.duration()) {
            return Err(Error::config(format!(
                "cycle time {} s is shorter than the pulse sequence ({} s)",
                self.cycle_time,
                self.duration()
            )));
        }
        if self.atom_number < 1 {
            return Err(Error::config("atom number must be at least 1"));
        }
        if !(self.contrast > 0.0 && self.contrast <= 1.0) {
            return Err(Error::config("contrast must lie in (0, 1]"));
        }
        if !(self.k_eff > 0.0) {
            return Err(Error::config("k_eff must be positive"));
        }
        Ok(())
    }

    /// Total length of the pulse sequence (s).
    pub fn duration(&self) -> f64 {
        2.0 * self.pulse_separation + 4.0 * self.pulse_duration
    }

    pub fn cycle_frequency(&self) -> f64 {
        1.0 / self.cycle_time
    }

    /// Acceleration scale factor `k_eff·T²` (rad per m/s²).
    pub fn scale_factor(&self) -> f64 {
        self.k_eff * self.pulse_separation * self.pulse_separation
    }

    fn rabi(&self) -> f64 {
        FRAC_PI_2 / self.pulse_duration
    }

    fn pieces(&self) -> Vec<Piece> {
        let t = self.pulse_separation;
        let tau = self.pulse_duration;
        if tau == 0.0 {
            return vec![
                Piece {
                    start: 0.0,
                    end: t,
                    shape: Shape::Constant(-1.0),
                },
                Piece {
                    start: t,
                    end: 2.0 * t,
                    shape: Shape::Constant(1.0),
                },
            ];
        }
        let center = t + 2.0 * tau;
        vec![
            Piece {
                start: 0.0,
                end: tau,
                shape: Shape::Ramp { origin: 2.0 * tau },
            },
            Piece {
                start: tau,
                end: t + tau,
                shape: Shape::Constant(-1.0),
            },
            Piece {
                start: t + tau,
                end: t + 3.0 * tau,
                shape: Shape::Ramp { origin: center },
            },
            Piece {
                start: t + 3.0 * tau,
                end: 2.0 * t + 3.0 * tau,
                shape: Shape::Constant(1.0),
            },
            Piece {
                start: 2.0 * t + 3.0 * tau,
                end: 2.0 * t + 4.0 * tau,
                shape: Shape::Ramp {
                    origin: 2.0 * t + 2.0 * tau,
                },
            },
        ]
    }

    fn piece_value(&self, piece: &Piece, t: f64) -> f64 {
        match piece.shape {
            Shape::Constant(c) => c,
            Shape::Ramp { origin } => (self.rabi() * (t - origin)).sin(),
        }
    }

    /// Excited-state population for interferometer phase `dphi`.
    pub fn population(&self, dphi: f64) -> f64 {
        0.5 * self.contrast * (1.0 + dphi.cos()) + self.offset
    }

    /// Sensitivity function g(t): twice the population response to a small
    /// laser phase step applied at `t`.
    pub fn sensitivity_g(&self, t: f64) -> f64 {
        let pieces = self.pieces();
        if self.pulse_duration == 0.0 {
            let tt = self.pulse_separation;
            return if t > 0.0 && t < tt {
                -1.0
            } else if t > tt && t < 2.0 * tt {
                1.0
            } else {
                0.0
            };
        }
        pieces
            .iter()
            .find(|p| t >= p.start && t <= p.end)
            .map_or(0.0, |p| self.piece_value(p, t))
    }

    /// `∫ g(t) e^{−iωt} dt`, constant stretches integrated exactly and Rabi
    /// ramps by Gauss–Legendre quadrature of `sensitivity_g`.
    pub fn sensitivity_fourier(&self, omega: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in self.pieces() {
            match p.shape {
                Shape::Constant(_) => {
                    let c = self.sensitivity_g(0.5 * (p.start + p.end));
                    acc += if omega == 0.0 {
                        Complex64::new(c * (p.end - p.start), 0.0)
                    } else {
                        let ea = Complex64::from_polar(1.0, -omega * p.start);
                        let eb = Complex64::from_polar(1.0, -omega * p.end);
                        (ea - eb) * c / Complex64::new(0.0, omega)
                    };
                }
                Shape::Ramp { .. } => {
                    let span = p.end - p.start;
                    let m = ((omega.abs() * span / 0.5).ceil() as usize).max(4);
                    let h = span / m as f64;
                    for j in 0..m {
                        let a = p.start + j as f64 * h;
                        acc += gauss_legendre(a, a + h, |t| {
                            Complex64::from_polar(self.piece_value(&p, t), -omega * t)
                        });
                    }
                }
            }
        }
        acc
    }

    /// |H_φ(ω)|² from the numerical Fourier transform of g(t).
    pub fn transfer_fn_sq_numeric(&self, omega: f64) -> f64 {
        (self.sensitivity_fourier(omega) * omega).norm_sqr()
    }

    /// |H_φ(ω)|², the response of the interferometer phase to laser phase
    /// noise at angular frequency `omega`.
    pub fn transfer_fn_sq(&self, omega: f64) -> f64 {
        if self.pulse_duration == 0.0 {
            let s = (0.5 * omega * self.pulse_separation).sin();
            16.0 * s.powi(4)
        } else {
            self.transfer_fn_sq_numeric(omega)
        }
    }

    /// `|H_φ(ω)|² / (ω T)⁴`, the weight an acceleration density receives in
    /// the sensitivity sum. Finite at ω = 0.
    pub fn acceleration_weight(&self, omega: f64) -> f64 {
        let t = self.pulse_separation;
        if self.pulse_duration == 0.0 {
            let x = 0.5 * omega * t;
            let sinc = if x.abs() < 1e-4 {
                1.0 - x * x / 6.0
            } else {
                x.sin() / x
            };
            sinc.powi(4)
        } else {
            let w = if omega.abs() < 1e-6 / t {
                1e-6 / t
            } else {
                omega
            };
            self.transfer_fn_sq_numeric(w) / (w * t).powi(4)
        }
    }

    /// Quantum projection noise in phase, `1/(C₀√N)` rad per shot.
    pub fn qpn_phase(&self) -> f64 {
        1.0 / (self.contrast * (self.atom_number as f64).sqrt())
    }

    /// Single-shot projection-noise limit in acceleration (m/s²).
    pub fn qpn_accel_per_shot(&self) -> f64 {
        self.qpn_phase() / self.scale_factor()
    }

    /// Projection-noise floor as an amplitude spectral density (m/s²/√Hz),
    /// i.e. the single-shot value times `√T_c`.
    pub fn qpn_accel_asd(&self) -> f64 {
        self.qpn_accel_per_shot() * self.cycle_time.sqrt()
    }

    /// Phase produced by mirror motion during one interferometer sequence
    /// starting at `t0`: `k_eff ∫ g(t − t0) v(t) dt`.
    ///
    /// The velocity record is linearly interpolated and integrated with the
    /// trapezoid rule; the pulse edges are inserted as extra nodes so the
    /// jumps of g(t) never fall inside an integration step. The result is
    /// exact for piecewise linear velocity and instantaneous pulses.
    pub fn phase_from_mirror_motion(&self, velocity: &UniformSeries, t0: f64) -> Result<f64> {
        let required = 20.0 / self.pulse_separation;
        if velocity.fs < required {
            return Err(Error::SampleRateTooLow {
                fs: velocity.fs,
                required,
            });
        }
        let t_end = t0 + self.duration();
        let slack = 1e-6 / velocity.fs;
        if velocity.len() < 2 || t0 < velocity.t_start - slack || t_end > velocity.t_end() + slack {
            return Err(Error::RecordTooShort {
                start: velocity.t_start,
                end: velocity.t_end(),
                need_start: t0,
                need_end: t_end,
            });
        }

        let fs = velocity.fs;
        let mut total = 0.0;
        for p in self.pieces() {
            let (a, b) = (t0 + p.start, t0 + p.end);
            if b <= a {
                continue;
            }
            let mut prev_t = a;
            let mut prev_f = self.piece_value(&p, p.start) * velocity.interpolate(a);
            // interior samples strictly inside (a, b)
            let first = (((a - velocity.t_start) * fs).floor() as i64 + 1).max(0) as usize;
            let mut i = first;
            loop {
                let ti = velocity.time(i);
                if i >= velocity.len() || ti >= b - 1e-9 / fs {
                    break;
                }
                if ti > prev_t + 1e-9 / fs {
                    let f = self.piece_value(&p, ti - t0) * velocity.values[i];
                    total += 0.5 * (ti - prev_t) * (prev_f + f);
                    prev_t = ti;
                    prev_f = f;
                }
                i += 1;
            }
            let f_end = self.piece_value(&p, p.end) * velocity.interpolate(b);
            total += 0.5 * (b - prev_t) * (prev_f + f_end);
        }
        Ok(self.k_eff * total)
    }

    /// Acceleration sensitivity `σ_a(τ)` for an ambient acceleration density,
    /// summed over the harmonics of the cycle rate:
    ///
    /// `σ_a²(τ) = 1/(τ T⁴) · Σ_n |H_φ(ω_n)|²/ω_n⁴ · S_a(ω_n)`, `ω_n = 2πn/T_c`.
    ///
    /// Harmonics outside the density's band take the nearest in-band value;
    /// their count is reported in the result.
    pub fn accel_sensitivity<S: Spectrum + ?Sized>(
        &self,
        density: &S,
        tau: f64,
        opts: &SumOptions,
    ) -> Result<SensitivityEstimate> {
        self.validate()?;
        if density.kind() != PsdKind::Acceleration {
            return Err(Error::WrongPsdKind {
                expected: PsdKind::Acceleration.name(),
                found: density.kind().name(),
            });
        }
        if !(tau >= self.cycle_time) {
            return Err(Error::config(format!(
                "averaging time {tau} s is shorter than the cycle time {} s",
                self.cycle_time
            )));
        }
        let fc = self.cycle_frequency();
        let mut substituted = 0usize;
        let mut term = |n: usize| {
            let f = n as f64 * fc;
            let s = density.density_nearest(f);
            if s.substituted {
                substituted += 1;
            }
            self.acceleration_weight(2.0 * PI * f) * s.value
        };

        let mut sum = match opts.dc_term {
            DcTerm::Excluded => 0.0,
            DcTerm::HalfWeight => 0.5 * term(0),
        };
        let mut n_done = 0usize;
        let mut target = opts.min_terms.max(16);
        let mut previous: Option<f64> = None;
        let mut last_change = f64::INFINITY;
        loop {
            for n in n_done + 1..=target {
                sum += term(n);
            }
            n_done = target;
            if let Some(prev) = previous {
                last_change = if sum == 0.0 {
                    0.0
                } else {
                    (sum - prev).abs() / sum
                };
                if last_change < opts.rel_tol {
                    break;
                }
            }
            previous = Some(sum);
            if target * 2 > opts.max_terms {
                return Err(Error::NotConverged {
                    terms: n_done,
                    change: last_change,
                });
            }
            target *= 2;
        }
        Ok(SensitivityEstimate {
            sigma: (sum / tau).sqrt(),
            terms: n_done,
            substituted,
        })
    }
}

/// How the n = 0 harmonic enters the sensitivity sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DcTerm {
    /// Left out; the absolute DC level belongs to the interferometer itself.
    #[default]
    Excluded,
    /// Included with weight ½, which turns the harmonic sum into the exact
    /// trapezoidal (Poisson) sum for the per-shot variance.
    HalfWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumOptions {
    /// Harmonics summed before the first convergence check.
    pub min_terms: usize,
    /// Hard ceiling on the number of harmonics.
    pub max_terms: usize,
    /// Stop once doubling the harmonic count changes the sum by less than this.
    pub rel_tol: f64,
    pub dc_term: DcTerm,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self {
            min_terms: 1024,
            max_terms: 1 << 24,
            rel_tol: 1e-3,
            dc_term: DcTerm::Excluded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityEstimate {
    /// One-sigma acceleration sensitivity at the requested averaging time.
    pub sigma: f64,
    /// Harmonics included.
    pub terms: usize,
    /// Harmonics evaluated at the nearest band edge of the density.
    pub substituted: usize,
}

fn gauss_legendre<F: Fn(f64) -> Complex64>(a: f64, b: f64, f: F) -> Complex64 {
    const NODES: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const WEIGHTS: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
        acc += (f(mid - half * x) + f(mid + half * x)) * *w;
    }
    acc * half
}

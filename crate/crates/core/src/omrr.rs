//! Optomechanical retro-reflector modelled as a damped harmonic oscillator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Frequency dependence of the mechanical loss angle φ(ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LossModel {
    /// φ = 1/Q at all frequencies.
    #[default]
    Structural,
    /// φ = ω/(ω₀Q), i.e. viscous damping.
    Velocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmrrConfig {
    /// Resonance ω₀ (rad/s).
    pub omega0: f64,
    pub q: f64,
    /// Test mass (kg).
    pub mass: f64,
    /// Test-mass temperature (K).
    pub temperature: f64,
    /// Displacement readout noise ASD (m/√Hz).
    pub sigma_x: f64,
    pub loss_model: LossModel,
}

impl Default for OmrrConfig {
    fn default() -> Self {
        Self {
            omega0: 2.0 * PI * 1015.0,
            q: 5e5,
            mass: 2e-3,
            temperature: 293.0,
            sigma_x: 1e-16,
            loss_model: LossModel::Structural,
        }
    }
}

impl OmrrConfig {
    pub fn with_resonance_hz(mut self, f0: f64) -> Self {
        self.omega0 = 2.0 * PI * f0;
        self
    }

    pub fn with_sigma_x(mut self, sigma_x: f64) -> Self {
        self.sigma_x = sigma_x;
        self
    }

    pub fn resonance_hz(&self) -> f64 {
        self.omega0 / (2.0 * PI)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) || !self.omega0.is_finite() {
            return Err(Error::config("resonance must be positive"));
        }
        if !(self.q > 0.5) {
            return Err(Error::config("quality factor must exceed 0.5"));
        }
        if !(self.mass > 0.0) {
            return Err(Error::config("test mass must be positive"));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::config("temperature must be positive"));
        }
        if !(self.sigma_x >= 0.0) {
            return Err(Error::config("displacement noise must be non-negative"));
        }
        Ok(())
    }

    fn spring_constant(&self) -> f64 {
        self.mass * self.omega0 * self.omega0
    }

    fn loss_angle(&self, omega: f64) -> f64 {
        match self.loss_model {
            LossModel::Structural => 1.0 / self.q,
            LossModel::Velocity => omega / (self.omega0 * self.q),
        }
    }

    /// Displacement response to acceleration, z(ω)/a(ω) (s²).
    pub fn disp_to_accel_tf(&self, omega: f64) -> Complex64 {
        let w0 = self.omega0;
        -1.0 / Complex64::new(w0 * w0 - omega * omega, w0 / self.q * omega)
    }

    /// `|a(ω)/z(ω)|²`, written out to avoid the reciprocal near resonance.
    fn inverse_tf_sq(&self, omega: f64) -> f64 {
        let w0 = self.omega0;
        let re = w0 * w0 - omega * omega;
        let im = w0 * omega / self.q;
        re * re + im * im
    }

    /// Thermal acceleration noise floor √(4 k_B T ω₀ / (m Q)) (m/s²/√Hz).
    pub fn thermal_accel_floor(&self) -> f64 {
        (4.0 * BOLTZMANN * self.temperature * self.omega0 / (self.mass * self.q)).sqrt()
    }

    /// Thermal acceleration PSD used for the self-noise budget: the white
    /// first-order floor, independent of frequency.
    pub fn thermal_accel_psd(&self) -> f64 {
        self.thermal_accel_floor().powi(2)
    }

    /// Thermal displacement PSD of the test mass (m²/Hz) for the configured
    /// loss model.
    pub fn thermal_displacement_psd(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!(
                "thermal displacement density diverges at ω = {omega}"
            )));
        }
        let k = self.spring_constant();
        let phi = self.loss_angle(omega);
        let detune = k - self.mass * omega * omega;
        let num = 4.0 * BOLTZMANN * self.temperature * k * phi;
        Ok(num / (omega * (detune * detune + k * k * phi * phi)))
    }

    /// Acceleration noise equivalent to the displacement readout noise.
    pub fn readout_limited_accel_asd(&self, omega: f64) -> f64 {
        self.sigma_x * self.inverse_tf_sq(omega).sqrt()
    }

    /// Total OMRR self-noise: thermal floor and readout noise added in
    /// quadrature.
    pub fn self_noise_accel_psd(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("negative frequency {omega}")));
        }
        Ok(self.thermal_accel_psd() + self.readout_limited_accel_asd(omega).powi(2))
    }

    /// Displacement sensitivity needed to resolve the thermal floor at low
    /// frequency, δa_th/ω₀² (m/√Hz).
    pub fn required_sigma_x(&self) -> f64 {
        self.thermal_accel_floor() / (self.omega0 * self.omega0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> OmrrConfig {
        OmrrConfig::default()
    }

    #[test]
    fn transfer_function_limits() {
        let c = cfg();
        let w0 = c.omega0;
        assert_relative_eq!(
            c.disp_to_accel_tf(0.0).norm(),
            1.0 / (w0 * w0),
            max_relative = 1e-15
        );
        assert!((c.disp_to_accel_tf(0.0).norm() - 2.459e-8).abs() < 1e-11);
        assert_relative_eq!(
            c.disp_to_accel_tf(w0).norm(),
            c.q / (w0 * w0),
            max_relative = 1e-12
        );
        // |·| at 10 ω₀ = 1/√(99² + 100/Q²) / ω₀²
        assert_relative_eq!(
            c.disp_to_accel_tf(10.0 * w0).norm(),
            1.0 / (99.0 * w0 * w0),
            max_relative = 1e-9
        );
    }

    #[test]
    fn peak_response_sits_at_resonance_for_high_q() {
        let c = cfg();
        let w0 = c.omega0;
        let peak = w0 * (1.0 - 1.0 / (2.0 * c.q * c.q)).sqrt();
        assert!((peak - w0).abs() / w0 < 1e-9);
        let low_q = OmrrConfig { q: 2.0, ..cfg() };
        let peak = w0 * (1.0 - 1.0 / (2.0 * 4.0f64)).sqrt();
        let at = low_q.disp_to_accel_tf(peak).norm();
        assert!(at > low_q.disp_to_accel_tf(peak * 1.001).norm());
        assert!(at > low_q.disp_to_accel_tf(peak * 0.999).norm());
    }

    #[test]
    fn thermal_floor_examples() {
        let c = cfg();
        let floor = c.thermal_accel_floor();
        assert!((floor - 3.21e-10).abs() < 0.02e-10, "{floor}");
        let c4 = OmrrConfig { q: 4.0 * c.q, ..c };
        assert_relative_eq!(c4.thermal_accel_floor(), floor / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn required_displacement_sensitivity() {
        let c = cfg().with_resonance_hz(1200.0);
        let req = c.required_sigma_x();
        assert!((req - 6.4e-18).abs() / 6.4e-18 < 0.10, "{req}");
        let c2 = OmrrConfig {
            omega0: 2.0 * c.omega0,
            ..c
        };
        assert_relative_eq!(
            c2.required_sigma_x(),
            req / 2f64.powf(1.5),
            max_relative = 1e-12
        );
        let c3 = OmrrConfig {
            mass: 10.0 * c.mass,
            q: 10.0 * c.q,
            ..c
        };
        assert_relative_eq!(c3.required_sigma_x(), req / 10.0, max_relative = 1e-12);
    }

    #[test]
    fn displacement_psd_at_resonance() {
        for loss in [LossModel::Structural, LossModel::Velocity] {
            let c = OmrrConfig {
                loss_model: loss,
                ..cfg()
            };
            let w0 = c.omega0;
            let expected = 4.0 * BOLTZMANN * c.temperature * c.q / (c.mass * w0.powi(3));
            assert_relative_eq!(
                c.thermal_displacement_psd(w0).unwrap(),
                expected,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn structural_displacement_falls_as_omega_minus_five() {
        let c = cfg();
        let w = 1000.0 * c.omega0;
        let ratio =
            c.thermal_displacement_psd(w).unwrap() / c.thermal_displacement_psd(2.0 * w).unwrap();
        assert_relative_eq!(ratio, 32.0, max_relative = 1e-4);
        assert!(c.thermal_displacement_psd(0.0).is_err());
    }

    #[test]
    fn velocity_damping_identity_with_floor() {
        // z_th² · |a/z|² = δa_th² exactly for viscous damping.
        let c = OmrrConfig {
            loss_model: LossModel::Velocity,
            ..cfg()
        };
        let floor2 = c.thermal_accel_psd();
        for i in 0..100 {
            let w = c.omega0 * 10f64.powf(-3.0 + 5.0 * i as f64 / 99.0);
            let psd = c.thermal_displacement_psd(w).unwrap() * c.inverse_tf_sq(w);
            assert_relative_eq!(psd, floor2, max_relative = 1e-9);
        }
        let w = c.omega0 / 100.0;
        let psd = c.thermal_displacement_psd(w).unwrap() * c.inverse_tf_sq(w);
        assert!((psd / floor2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn structural_damping_rises_below_resonance() {
        // With a constant loss angle the acceleration-referred thermal noise
        // grows as ω₀/ω below resonance.
        let c = cfg();
        let w = c.omega0 / 100.0;
        let psd = c.thermal_displacement_psd(w).unwrap() * c.inverse_tf_sq(w);
        assert_relative_eq!(psd / c.thermal_accel_psd(), 100.0, max_relative = 1e-3);
    }

    #[test]
    fn readout_examples() {
        let c = cfg();
        let w0 = c.omega0;
        assert!((c.readout_limited_accel_asd(0.0) - 4.07e-9).abs() < 0.01e-9);
        assert_relative_eq!(
            c.readout_limited_accel_asd(w0),
            c.sigma_x * w0 * w0 / c.q,
            max_relative = 1e-12
        );
        assert_eq!(c.with_sigma_x(0.0).readout_limited_accel_asd(123.0), 0.0);
    }

    #[test]
    fn self_noise_budget() {
        let c = cfg();
        let quiet = c.with_sigma_x(0.0);
        assert_eq!(
            quiet.self_noise_accel_psd(100.0).unwrap(),
            quiet.thermal_accel_psd()
        );
        // readout dominates the thermal floor by about an order of magnitude at DC
        let ratio = c.readout_limited_accel_asd(0.0) / c.thermal_accel_floor();
        assert!(ratio > 10.0 && ratio < 15.0, "{ratio}");
        // ω² growth far above resonance
        let w = 100.0 * c.omega0;
        let r = c.readout_limited_accel_asd(2.0 * w) / c.readout_limited_accel_asd(w);
        assert_relative_eq!(r, 4.0, max_relative = 1e-3);
        assert!(c.self_noise_accel_psd(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn self_noise_positive_and_dominates_parts(w in 1e-3f64..1e6, sx in 0.0f64..1e-12) {
            let c = cfg().with_sigma_x(sx);
            let total = c.self_noise_accel_psd(w).unwrap();
            prop_assert!(total > 0.0);
            prop_assert!(total >= c.thermal_accel_psd());
            prop_assert!(total >= c.readout_limited_accel_asd(w).powi(2));
        }
    }
}

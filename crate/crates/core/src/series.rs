use crate::error::{Error, Result};

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSeries {
    /// Time of the first sample (s).
    pub t_start: f64,
    /// Sample rate (Hz).
    pub fs: f64,
    pub values: Vec<f64>,
}

impl UniformSeries {
    pub fn new(t_start: f64, fs: f64, values: Vec<f64>) -> Self {
        Self {
            t_start,
            fs,
            values,
        }
    }

    /// Builds a series from explicit timestamps, rejecting jitter larger than
    /// 1e-9 of the nominal step.
    pub fn from_timestamps(times: &[f64], values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::config(
                "timestamps and values must have equal length of at least 2",
            ));
        }
        let n = times.len();
        let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
        if !(dt > 0.0) {
            return Err(Error::NonUniformSampling { index: 1 });
        }
        for (i, &t) in times.iter().enumerate() {
            let expected = times[0] + i as f64 * dt;
            if (t - expected).abs() > 1e-9 * dt.max(t.abs() * 1e-6) {
                return Err(Error::NonUniformSampling { index: i });
            }
        }
        Ok(Self::new(times[0], 1.0 / dt, values))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.fs
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + (self.len().saturating_sub(1)) as f64 / self.fs
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 / self.fs
    }

    /// Linear interpolation; `t` must lie inside the record.
    pub fn interpolate(&self, t: f64) -> f64 {
        let x = (t - self.t_start) * self.fs;
        let i = (x.floor() as usize).min(self.len() - 2);
        let frac = x - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Running trapezoidal integral, starting from zero.
    pub fn cumulative_integral(&self) -> UniformSeries {
        let half_dt = 0.5 / self.fs;
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        let mut prev = None;
        for &v in &self.values {
            if let Some(p) = prev {
                acc += half_dt * (p + v);
            }
            out.push(acc);
            prev = Some(v);
        }
        UniformSeries::new(self.t_start, self.fs, out)
    }

    /// Central-difference derivative (one-sided at the ends).
    pub fn derivative(&self) -> UniformSeries {
        let n = self.len();
        let v = &self.values;
        let out = (0..n)
            .map(|i| match i {
                0 => (v[1] - v[0]) * self.fs,
                i if i == n - 1 => (v[n - 1] - v[n - 2]) * self.fs,
                i => 0.5 * (v[i + 1] - v[i - 1]) * self.fs,
            })
            .collect();
        UniformSeries::new(self.t_start, self.fs, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps_must_be_uniform() {
        let t = [0.0, 0.1, 0.2, 0.35];
        assert!(matches!(
            UniformSeries::from_timestamps(&t, vec![0.0; 4]),
            Err(Error::NonUniformSampling { .. })
        ));
        let t = [1.0, 1.5, 2.0, 2.5];
        let s = UniformSeries::from_timestamps(&t, vec![0.0; 4]).unwrap();
        assert_eq!(s.fs, 2.0);
        assert_eq!(s.t_end(), 2.5);
    }

    #[test]
    fn integral_of_ramp_is_exact() {
        let fs = 100.0;
        let s = UniformSeries::new(0.0, fs, (0..101).map(|i| 3.0 * i as f64 / fs).collect());
        let v = s.cumulative_integral();
        assert!((v.values[100] - 1.5).abs() < 1e-12);
        let d = v.derivative();
        assert!((d.values[50] - 1.5).abs() < 1e-9);
    }
}

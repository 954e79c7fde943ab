//! Overlapping Allan deviation of evenly spaced measurements.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllanPoint {
    /// Averaging time (s).
    pub tau: f64,
    pub deviation: f64,
    /// Number of overlapping difference terms behind the estimate.
    pub terms: usize,
}

/// Overlapping Allan deviation of the measurement series `y` taken every
/// `interval` seconds, at octave-spaced averaging factors 1, 2, 4, … while
/// at least `min_terms` difference terms remain.
///
/// For white measurement noise of standard deviation σ the result is
/// σ/√m at averaging factor m.
pub fn overlapping_adev(y: &[f64], interval: f64, min_terms: usize) -> Vec<AllanPoint> {
    let n = y.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &v in y {
        prefix.push(prefix.last().unwrap() + v);
    }
    let mut out = Vec::new();
    let mut m = 1;
    while 2 * m <= n {
        let terms = n + 1 - 2 * m;
        if terms < min_terms.max(1) {
            break;
        }
        let mut sum = 0.0;
        for i in 0..terms {
            let first = prefix[i + m] - prefix[i];
            let second = prefix[i + 2 * m] - prefix[i + m];
            let d = (second - first) / m as f64;
            sum += d * d;
        }
        out.push(AllanPoint {
            tau: m as f64 * interval,
            deviation: (sum / (2.0 * terms as f64)).sqrt(),
            terms,
        });
        m *= 2;
    }
    out
}

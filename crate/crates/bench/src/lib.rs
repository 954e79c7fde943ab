//! Shared fixtures for the benchmarks in `benches/`.

use std::f64::consts::PI;

use omrr_core::SimConfig;

/// Resonance grid used by the sweep benchmark, in rad/s.
pub fn sweep_grid(points: usize) -> Vec<f64> {
    omrr_core::hybrid::linear_grid(50.0, 2000.0, points)
        .into_iter()
        .map(|f| 2.0 * PI * f)
        .collect()
}

/// The default simulation shortened to `n_cycles` cycles.
pub fn short_simulation(n_cycles: usize) -> SimConfig {
    SimConfig {
        n_cycles,
        ..SimConfig::default()
    }
}

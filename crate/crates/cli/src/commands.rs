use std::f64::consts::PI;

use anyhow::{Context, Result};
use omrr_core::fusion::run_cycles;
use omrr_core::hybrid::{hybrid_sigma, hybrid_spectrum, sweep_bandwidth, HybridConfig};
use omrr_core::noise_models::Spectrum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::output::{series_dump, OutputDir};

#[derive(Serialize)]
struct PetersonRow {
    #[serde(rename = "freq [Hz]")]
    freq: f64,
    #[serde(rename = "psd [(m/s^2)^2/Hz]")]
    psd: f64,
    #[serde(rename = "asd [m/s^2/rtHz]")]
    asd: f64,
    /// 1 where the table was held flat beyond its range
    #[serde(rename = "extended [bool]")]
    extended: u8,
}

#[derive(Serialize)]
struct ThermalRow {
    #[serde(rename = "freq [Hz]")]
    freq: f64,
    #[serde(rename = "thermal_accel_asd [m/s^2/rtHz]")]
    accel: f64,
    #[serde(rename = "thermal_disp_asd [m/rtHz]")]
    disp: f64,
}

#[derive(Serialize)]
struct ReadoutRow {
    #[serde(rename = "freq [Hz]")]
    freq: f64,
    #[serde(rename = "readout_accel_asd [m/s^2/rtHz]")]
    readout: f64,
    #[serde(rename = "self_noise_asd [m/s^2/rtHz]")]
    self_noise: f64,
}

pub fn noise(cfg: &Config, out: &mut OutputDir) -> Result<Value> {
    let grid = cfg.noise.grid("noise")?;
    let hybrid = cfg.hybrid()?;
    let omrr = hybrid.omrr;
    let ambient = &hybrid.ambient;
    let table_band = cfg.peterson_table()?.frequency_band();

    let peterson: Vec<PetersonRow> = grid
        .iter()
        .map(|&f| {
            let psd = ambient.density_nearest(f).value;
            PetersonRow {
                freq: f,
                psd,
                asd: psd.sqrt(),
                extended: u8::from(!table_band.contains(f)),
            }
        })
        .collect();
    let thermal = grid
        .iter()
        .map(|&f| {
            Ok(ThermalRow {
                freq: f,
                accel: omrr.thermal_accel_floor(),
                disp: omrr.thermal_displacement_psd(2.0 * PI * f)?.sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let readout = grid
        .iter()
        .map(|&f| {
            let w = 2.0 * PI * f;
            Ok(ReadoutRow {
                freq: f,
                readout: omrr.readout_limited_accel_asd(w),
                self_noise: omrr.self_noise_accel_psd(w)?.sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    out.write_csv("peterson.csv", &peterson)?;
    out.write_csv("omrr_thermal.csv", &thermal)?;
    out.write_csv("omrr_readout.csv", &readout)?;
    Ok(json!({
        "resonance_hz": omrr.resonance_hz(),
        "thermal_floor_m_s2_rthz": omrr.thermal_accel_floor(),
        "required_sigma_x_m_rthz": omrr.required_sigma_x(),
        "readout_asd_dc_m_s2_rthz": omrr.readout_limited_accel_asd(0.0),
        "readout_asd_resonance_m_s2_rthz": omrr.readout_limited_accel_asd(omrr.omega0),
    }))
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(rename = "omega0 [rad/s]")]
    omega0: f64,
    #[serde(rename = "f0 [Hz]")]
    f0: f64,
    #[serde(rename = "sigma_a [m/s^2/rtHz]")]
    sigma_a: f64,
    #[serde(rename = "required_sigma_x [m/rtHz]")]
    required_sigma_x: f64,
}

fn tag(x: f64) -> String {
    format!("{x:e}")
}

pub fn optimize(cfg: &Config, out: &mut OutputDir) -> Result<Value> {
    let grid = cfg.optimize.omega_grid()?;
    let template = cfg.hybrid()?;
    let mut optima = Vec::new();
    for &sigma_x in &cfg.optimize.sigma_x {
        let hy = template.with_omrr(template.omrr.with_sigma_x(sigma_x));
        let res = sweep_bandwidth(&hy, &grid)
            .with_context(|| format!("bandwidth sweep for sigma_x = {sigma_x:e} m/rtHz"))?;
        let rows: Vec<SweepRow> = res
            .points
            .iter()
            .map(|p| SweepRow {
                omega0: p.omega0,
                f0: p.omega0 / (2.0 * PI),
                sigma_a: p.sigma_a,
                required_sigma_x: p.required_sigma_x,
            })
            .collect();
        out.write_csv(&format!("sweep_sx_{}.csv", tag(sigma_x)), &rows)?;
        optima.push(json!({
            "sigma_x_m_rthz": sigma_x,
            "omega0_rad_s": res.optimum.omega0,
            "f0_hz": res.optimum_hz(),
            "sigma_a_m_s2_rthz": res.optimum.sigma_a,
            "required_sigma_x_m_rthz": res.optimum.required_sigma_x,
        }));
    }
    Ok(json!({ "optima": optima }))
}

#[derive(Serialize)]
struct SpectrumRow {
    #[serde(rename = "freq [Hz]")]
    freq: f64,
    #[serde(rename = "asd [m/s^2/rtHz]")]
    asd: f64,
    #[serde(rename = "regime")]
    regime: &'static str,
}

#[derive(Serialize)]
struct ReferenceRow {
    #[serde(rename = "freq [Hz]")]
    freq: f64,
    #[serde(rename = "peterson_asd [m/s^2/rtHz]")]
    peterson: f64,
    #[serde(rename = "uncorrected_ai [m/s^2/rtHz]")]
    uncorrected: f64,
    #[serde(rename = "qpn [m/s^2/rtHz]")]
    qpn: f64,
}

fn curve_configs(cfg: &Config, base: &HybridConfig) -> Vec<HybridConfig> {
    let resonances = if cfg.spectra.resonances_hz.is_empty() {
        vec![base.omrr.resonance_hz()]
    } else {
        cfg.spectra.resonances_hz.clone()
    };
    let sigmas = if cfg.spectra.sigma_x.is_empty() {
        vec![base.omrr.sigma_x]
    } else {
        cfg.spectra.sigma_x.clone()
    };
    resonances
        .iter()
        .flat_map(|&f0| {
            sigmas
                .iter()
                .map(move |&sx| base.with_omrr(base.omrr.with_resonance_hz(f0).with_sigma_x(sx)))
        })
        .collect()
}

pub fn spectra(cfg: &Config, out: &mut OutputDir) -> Result<Value> {
    let grid = cfg.spectra.grid()?;
    let base = cfg.hybrid()?;
    let mut curves = Vec::new();
    let mut reference = None;
    for hy in curve_configs(cfg, &base) {
        hy.validate()?;
        let spec = hybrid_spectrum(&hy, &grid)?;
        let rows: Vec<SpectrumRow> = spec
            .rows
            .iter()
            .map(|r| SpectrumRow {
                freq: r.freq,
                asd: r.asd,
                regime: r.regime.label(),
            })
            .collect();
        let name = format!(
            "spectrum_f0_{}Hz_sx_{}.csv",
            hy.omrr.resonance_hz().round(),
            tag(hy.omrr.sigma_x)
        );
        out.write_csv(&name, &rows)?;
        curves.push(json!({
            "file": name,
            "resonance_hz": hy.omrr.resonance_hz(),
            "sigma_x_m_rthz": hy.omrr.sigma_x,
            "hybrid_sigma_m_s2_rthz": spec.hybrid_sigma,
        }));
        reference.get_or_insert(spec);
    }
    let reference = reference.context("no spectrum curves configured")?;
    let refs: Vec<ReferenceRow> = reference
        .rows
        .iter()
        .map(|r| ReferenceRow {
            freq: r.freq,
            peterson: r.ambient_asd,
            uncorrected: reference.uncorrected_sigma,
            qpn: reference.qpn_asd,
        })
        .collect();
    out.write_csv("references.csv", &refs)?;
    Ok(json!({
        "cycle_frequency_hz": base.ai.cycle_frequency(),
        "uncorrected_sigma_m_s2_rthz": reference.uncorrected_sigma,
        "qpn_asd_m_s2_rthz": reference.qpn_asd,
        "curves": curves,
    }))
}

#[derive(Serialize)]
struct CycleRow {
    #[serde(rename = "cycle")]
    index: usize,
    #[serde(rename = "t0 [s]")]
    t0: f64,
    #[serde(rename = "phi_true [rad]")]
    phi_true: f64,
    #[serde(rename = "phi_est [rad]")]
    phi_est: f64,
    #[serde(rename = "phi_residual [rad]")]
    phi_residual: f64,
    #[serde(rename = "population [fraction]")]
    population: f64,
    #[serde(rename = "accel_measured [m/s^2]")]
    accel_measured: f64,
    #[serde(rename = "accel_residual [m/s^2]")]
    accel_residual: f64,
    #[serde(rename = "bias_estimate [m/s^2]")]
    bias_estimate: f64,
}

#[derive(Serialize)]
struct AdevRow {
    #[serde(rename = "tau [s]")]
    tau: f64,
    #[serde(rename = "adev [m/s^2]")]
    deviation: f64,
    #[serde(rename = "terms")]
    terms: usize,
}

pub fn simulate(cfg: &Config, out: &mut OutputDir) -> Result<Value> {
    let sim = cfg.simulation()?;
    let run = run_cycles(&sim)?;
    let cycles: Vec<CycleRow> = run
        .cycles
        .iter()
        .map(|c| CycleRow {
            index: c.index,
            t0: c.t0,
            phi_true: c.phi_true,
            phi_est: c.phi_est,
            phi_residual: c.phi_residual,
            population: c.population,
            accel_measured: c.accel_measured,
            accel_residual: c.accel_residual,
            bias_estimate: c.bias_estimate,
        })
        .collect();
    let adev: Vec<AdevRow> = run
        .adev
        .iter()
        .map(|p| AdevRow {
            tau: p.tau,
            deviation: p.deviation,
            terms: p.terms,
        })
        .collect();
    out.write_csv("cycles.csv", &cycles)?;
    out.write_csv("adev.csv", &adev)?;
    if let Some(series) = &run.series {
        let bytes = series_dump(
            &[
                ("a_true", &series.a_true.values),
                ("z_true", &series.z_true.values),
                ("z_meas", &series.z_meas.values),
                ("a_est", &series.a_est.values),
            ],
            sim.fs,
        );
        out.write_bytes("series.bin", &bytes)?;
    }
    let ai = &sim.hybrid.ai;
    let predicted = hybrid_sigma(&sim.hybrid)?.sigma / ai.cycle_time.sqrt();
    Ok(json!({
        "seed": sim.seed,
        "cycles": sim.n_cycles,
        "residual_accel_std_m_s2": run.residual_accel_std(),
        "measured_accel_std_m_s2": run.measured_accel_std(),
        "predicted_residual_std_m_s2": predicted,
        "qpn_per_shot_m_s2": ai.qpn_accel_per_shot(),
        "empty_ambient_bins": run.empty_ambient_bins,
    }))
}

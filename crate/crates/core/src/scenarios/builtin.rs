//! Compiled-in scenarios for the measured configurations.

use super::chain::ComponentSpec;
use super::config::{LoSelection, RunMode, ScenarioConfig, ThetaSpec};
use crate::homodyne::BeatReading;
use crate::optics::{AbiParams, OpoParams};
use crate::timeseries::{AcquisitionParams, Tone, DEFAULT_ELECTRONIC_FLOOR};

/// Phase-lock error used by every builtin.
pub const DELTA_THETA_DEG: f64 = 6.0;

/// Pump grid of the power sweeps.
pub const PUMP_SWEEP_MW: [f64; 9] = [90.0, 180.0, 270.0, 360.0, 450.0, 540.0, 630.0, 720.0, 810.0];

const NAMES: [&str; 5] = ["fig4a", "fig4b", "fig5a", "fig5b", "fig5c"];

/// Builtin names in lexicographic order.
pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn get(name: &str) -> Option<ScenarioConfig> {
    Some(match name {
        "fig4a" => direct("fig4a", "Squeezing spectrum straight from the OPO at 450 mW pump", vec![450.0]),
        "fig4b" => direct("fig4b", "Squeezing and antisqueezing of the OPO output versus pump power", PUMP_SWEEP_MW.to_vec()),
        "fig5a" => beat(),
        "fig5b" => shifted("fig5b", "Frequency-shifted squeezing read with the shifted LO at 450 mW pump", vec![450.0]),
        "fig5c" => shifted("fig5c", "Frequency-shifted squeezing and antisqueezing versus pump power", PUMP_SWEEP_MW.to_vec()),
        _ => return None,
    })
}

/// Every builtin, in name order.
pub fn all() -> Vec<ScenarioConfig> {
    NAMES.iter().filter_map(|n| get(n)).collect()
}

fn base(name: &str, description: &str, pump_mw: Vec<f64>, chain: Vec<ComponentSpec>) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: description.into(),
        mode: RunMode::Analytic,
        lo: LoSelection::Lo1,
        theta: ThetaSpec::quadratures(),
        delta_theta: DELTA_THETA_DEG.to_radians(),
        pump_mw,
        analysis_mhz: vec![1.55],
        beat_reading: BeatReading::Physical,
        electronic_floor: DEFAULT_ELECTRONIC_FLOOR,
        tones: Vec::new(),
        acquisition: AcquisitionParams::default(),
        chain,
    }
}

fn loss(label: &str, efficiency: f64) -> ComponentSpec {
    ComponentSpec::Loss {
        label: label.into(),
        efficiency,
    }
}

fn direct(name: &str, description: &str, pump_mw: Vec<f64>) -> ScenarioConfig {
    base(
        name,
        description,
        pump_mw,
        vec![
            ComponentSpec::Opo(OpoParams::default()),
            loss("propagation and mode matching", 0.854),
            ComponentSpec::Homodyne { efficiency: 0.888 },
        ],
    )
}

/// OPO, transport, ABI and coupling to the detector. The OPO escape
/// efficiency is folded into the transport factor.
fn shifted_chain(hd_efficiency: f64) -> Vec<ComponentSpec> {
    vec![
        ComponentSpec::Opo(OpoParams {
            escape_efficiency: 1.0,
            ..OpoParams::default()
        }),
        loss("OPO escape and transport to the ABI", 0.713),
        ComponentSpec::Abi(AbiParams {
            zeta: 0.91,
            ..AbiParams::default()
        }),
        loss("ABI output to detector", 0.841),
        ComponentSpec::Homodyne {
            efficiency: hd_efficiency,
        },
    ]
}

fn shifted(name: &str, description: &str, pump_mw: Vec<f64>) -> ScenarioConfig {
    ScenarioConfig {
        lo: LoSelection::Lo2,
        ..base(name, description, pump_mw, shifted_chain(0.888))
    }
}

fn beat() -> ScenarioConfig {
    ScenarioConfig {
        analysis_mhz: vec![78.45, 81.55],
        beat_reading: BeatReading::AsPrinted,
        tones: vec![Tone {
            freq_mhz: 80.0,
            power: 0.01,
        }],
        acquisition: AcquisitionParams {
            sample_rate_mhz: 250.0,
            samples_per_round: 250_000,
            band_center_mhz: 81.55,
            ..AcquisitionParams::default()
        },
        ..base(
            "fig5a",
            "Shifted squeezing read with the unshifted LO: noise at the beat frequencies",
            vec![450.0],
            shifted_chain(0.806),
        )
    }
}

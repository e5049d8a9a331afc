//! Scenario configuration files.
//!
//! Configs are TOML documents. A minimal file:
//!
//! ```toml
//! name = "my-setup"
//! pump_mw = [270.0, 450.0]
//! analysis_mhz = [1.55]
//! theta = [0.0, 1.5707963267948966]
//! delta_theta = 0.10471975511965977
//!
//! [[chain]]
//! kind = "opo"
//! escape_efficiency = 0.934
//!
//! [[chain]]
//! kind = "loss"
//! label = "coupling"
//! efficiency = 0.854
//!
//! [[chain]]
//! kind = "homodyne"
//! efficiency = 0.888
//! ```

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chain::{Chain, ComponentSpec};
use crate::error::{Error, Result};
use crate::gaussian::{FrequencyGrid, ModeLabel};
use crate::homodyne::BeatReading;
use crate::timeseries::{AcquisitionParams, Tone, DEFAULT_ELECTRONIC_FLOOR};

/// Which local oscillator drives the detector.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoSelection {
    /// At the OPO carrier frequency.
    #[default]
    Lo1,
    /// At the carrier shifted by every frequency shifter in the chain.
    Lo2,
}

/// How a scenario is evaluated.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    Analytic,
    #[value(name = "montecarlo")]
    #[serde(rename = "montecarlo")]
    MonteCarlo,
    Both,
}

impl RunMode {
    pub fn analytic(self) -> bool {
        matches!(self, RunMode::Analytic | RunMode::Both)
    }

    pub fn monte_carlo(self) -> bool {
        matches!(self, RunMode::MonteCarlo | RunMode::Both)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaKeyword {
    Sweep,
}

/// LO phases to evaluate: an explicit list in radians, or `"sweep"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Values(Vec<f64>),
    Keyword(ThetaKeyword),
}

/// Step of the `"sweep"` phase grid.
pub const THETA_SWEEP_STEP_DEG: f64 = 5.0;

impl ThetaSpec {
    /// Squeezed and antisqueezed quadratures.
    pub fn quadratures() -> Self {
        ThetaSpec::Values(vec![0.0, 0.5 * PI])
    }

    /// Phases in radians; `"sweep"` covers `[0, pi]` in 5 degree steps.
    pub fn values(&self) -> Vec<f64> {
        match self {
            ThetaSpec::Values(v) => v.clone(),
            ThetaSpec::Keyword(ThetaKeyword::Sweep) => {
                let n = (180.0 / THETA_SWEEP_STEP_DEG).round() as usize;
                (0..=n)
                    .map(|i| (i as f64 * THETA_SWEEP_STEP_DEG).to_radians())
                    .collect()
            }
        }
    }
}

impl Default for ThetaSpec {
    fn default() -> Self {
        Self::quadratures()
    }
}

fn default_floor() -> f64 {
    DEFAULT_ELECTRONIC_FLOOR
}

/// A complete experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default)]
    pub lo: LoSelection,
    #[serde(default)]
    pub theta: ThetaSpec,
    /// Residual phase-lock error added to every LO phase, in radians.
    #[serde(default)]
    pub delta_theta: f64,
    pub pump_mw: Vec<f64>,
    pub analysis_mhz: Vec<f64>,
    #[serde(default)]
    pub beat_reading: BeatReading,
    /// Electronic noise PSD in SNL units, used by Monte-Carlo runs.
    #[serde(default = "default_floor")]
    pub electronic_floor: f64,
    #[serde(default)]
    pub tones: Vec<Tone>,
    #[serde(default)]
    pub acquisition: AcquisitionParams,
    pub chain: Vec<ComponentSpec>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn chain(&self) -> Result<Chain> {
        Chain::new(&self.chain)
    }

    /// LO frequency for this chain.
    pub fn lo_label(&self, chain: &Chain) -> ModeLabel {
        match self.lo {
            LoSelection::Lo1 => ModeLabel::CARRIER,
            LoSelection::Lo2 => chain.output_center(),
        }
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.theta.values()
    }

    /// Analysis frequencies in whole Hz.
    pub fn analysis_hz(&self) -> Result<Vec<i64>> {
        self.analysis_mhz
            .iter()
            .map(|&f| {
                if !(f >= 0.0) {
                    return Err(Error::Config(format!("analysis frequency {f} MHz is negative")));
                }
                Ok(FrequencyGrid::new(1).label(f)?.detuning_hz())
            })
            .collect()
    }

    /// Checks everything except the acquisition, which only matters for
    /// Monte-Carlo runs.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Config("scenario name is empty".into()));
        }
        let chain = self.chain()?;
        if self.pump_mw.is_empty() {
            return Err(Error::Config("no pump powers given".into()));
        }
        for &p in &self.pump_mw {
            chain.opo().clone().with_pump(p).validate()?;
        }
        if self.analysis_mhz.is_empty() {
            return Err(Error::Config("no analysis frequencies given".into()));
        }
        self.analysis_hz()?;
        let thetas = self.thetas();
        if thetas.is_empty() || thetas.iter().chain([&self.delta_theta]).any(|t| !t.is_finite()) {
            return Err(Error::Config("LO phases must be finite and non-empty".into()));
        }
        if !(self.electronic_floor >= 0.0) {
            return Err(Error::Config(format!(
                "electronic floor must be non-negative, got {}",
                self.electronic_floor
            )));
        }
        Ok(())
    }
}

//! Optical chains built from declarative components, and the analytic noise
//! model they imply at any analysis frequency.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::gaussian::{GaussianState, ModeLabel};
use crate::homodyne::{hd_noise_power, BeatReading, HdConfig, NoisePowerResult};
use crate::optics::{opo_sideband_state, AbiParams, EfficiencyChain, FrequencyShifter, OpoParams};

/// One element of the optical chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentSpec {
    /// Squeezed-vacuum source. Its pump power is set per run point.
    Opo(OpoParams),
    Loss {
        label: String,
        efficiency: f64,
    },
    /// Single AOM; the diffracted order is kept.
    Aom {
        t: f64,
        r: f64,
        shift_mhz: f64,
    },
    Abi(AbiParams),
    /// Detection efficiency of the balanced homodyne detector.
    Homodyne {
        efficiency: f64,
    },
}

enum Stage {
    Loss(f64),
    Shift(FrequencyShifter),
}

/// A validated chain: OPO first, optional homodyne efficiency last.
pub struct Chain {
    opo: OpoParams,
    stages: Vec<Stage>,
    hd_efficiency: f64,
    budget: EfficiencyChain,
    shift_hz: i64,
}

impl Chain {
    pub fn new(components: &[ComponentSpec]) -> Result<Self> {
        let (first, rest) = components
            .split_first()
            .ok_or_else(|| Error::Config("chain is empty".into()))?;
        let ComponentSpec::Opo(opo) = first else {
            return Err(Error::Config("chain must start with an OPO source".into()));
        };
        opo.clone().with_pump(0.0).validate()?;
        let mut budget = EfficiencyChain::default();
        budget.push("OPO escape", opo.escape_efficiency)?;
        let mut stages = Vec::new();
        let mut hd_efficiency = None;
        let mut shift_hz = 0i64;
        for (i, c) in rest.iter().enumerate() {
            if hd_efficiency.is_some() {
                return Err(Error::Config("homodyne detector must be the last element".into()));
            }
            match c {
                ComponentSpec::Opo(_) => {
                    return Err(Error::Config(format!(
                        "element {} is a second OPO source",
                        i + 2
                    )))
                }
                ComponentSpec::Loss { label, efficiency } => {
                    check_unit_interval("efficiency", *efficiency)?;
                    budget.push(label.clone(), *efficiency)?;
                    stages.push(Stage::Loss(*efficiency));
                }
                ComponentSpec::Aom { t, r, shift_mhz } => {
                    let hz = crate::gaussian::FrequencyGrid::new(1).label(*shift_mhz)?.detuning_hz();
                    let s = FrequencyShifter::from_aom(*t, *r, hz)?;
                    budget.push("AOM diffraction", s.transfer())?;
                    shift_hz += hz;
                    stages.push(Stage::Shift(s));
                }
                ComponentSpec::Abi(a) => {
                    let s = FrequencyShifter::from_abi(a)?;
                    budget.push("ABI", s.transfer())?;
                    shift_hz += s.shift_hz();
                    stages.push(Stage::Shift(s));
                }
                ComponentSpec::Homodyne { efficiency } => {
                    check_unit_interval("detection efficiency", *efficiency)?;
                    budget.push("homodyne detection", *efficiency)?;
                    hd_efficiency = Some(*efficiency);
                }
            }
        }
        Ok(Self {
            opo: opo.clone(),
            stages,
            hd_efficiency: hd_efficiency.unwrap_or(1.0),
            budget,
            shift_hz,
        })
    }

    pub fn opo(&self) -> &OpoParams {
        &self.opo
    }

    /// Net frequency shift applied to light leaving the OPO.
    pub fn shift_hz(&self) -> i64 {
        self.shift_hz
    }

    /// Where the OPO carrier ends up after the chain.
    pub fn output_center(&self) -> ModeLabel {
        ModeLabel::CARRIER.shifted_hz(self.shift_hz)
    }

    pub fn hd_efficiency(&self) -> f64 {
        self.hd_efficiency
    }

    pub fn budget(&self) -> &EfficiencyChain {
        &self.budget
    }

    /// Overall efficiency including the detector.
    pub fn total_efficiency(&self) -> f64 {
        self.budget.entries().iter().map(|(_, v)| v).product()
    }

    /// Propagates a state through every stage except detection.
    pub fn propagate(&self, state: &GaussianState) -> Result<GaussianState> {
        let mut s = state.clone();
        for stage in &self.stages {
            s = match stage {
                Stage::Loss(eta) => s.apply_uniform_loss(*eta)?,
                Stage::Shift(shifter) => shifter.apply(&s)?,
            };
        }
        Ok(s)
    }

    /// The OPO pair at `detuning_hz` after the chain, for pump `pump_mw`.
    pub fn output_pair(&self, pump_mw: f64, detuning_hz: i64) -> Result<GaussianState> {
        let source = opo_sideband_state(
            &self.opo.clone().with_pump(pump_mw),
            ModeLabel::from_hz(detuning_hz.abs()),
        )?;
        self.propagate(&source)
    }

    /// State presented to a detector with LO `lo` at analysis frequency
    /// `analysis_hz`.
    ///
    /// When the LO sits on the shifted carrier both sidebands belong to one
    /// correlated OPO pair. Otherwise only the pair feeding the sideband
    /// closest to the carrier is populated; the partner sideband is left out
    /// of the state and the detector treats it according to its
    /// [`BeatReading`].
    pub fn detected_state(&self, pump_mw: f64, lo: ModeLabel, analysis_hz: i64) -> Result<GaussianState> {
        let upper = lo.shifted_hz(analysis_hz).detuning_hz() - self.shift_hz;
        let lower = lo.shifted_hz(-analysis_hz).detuning_hz() - self.shift_hz;
        let detuning = if upper.abs() <= lower.abs() { upper } else { lower };
        self.output_pair(pump_mw, detuning)
    }

    pub fn noise_power(&self, pump_mw: f64, hd: &HdConfig) -> Result<NoisePowerResult> {
        let state = self.detected_state(pump_mw, hd.lo, hd.analysis_hz)?;
        let hd = HdConfig {
            efficiency: self.hd_efficiency,
            ..hd.clone()
        };
        hd_noise_power(&state, &hd)
    }

    /// Analytic normalized noise power on every bin `k * spacing_hz`,
    /// `k = 0..num_bins`, for each phase in `thetas`.
    pub fn noise_spectrum(
        &self,
        pump_mw: f64,
        lo: ModeLabel,
        thetas: &[f64],
        delta_theta: f64,
        reading: BeatReading,
        spacing_hz: f64,
        num_bins: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let rows: Vec<Vec<f64>> = (0..num_bins)
            .into_par_iter()
            .map(|k| {
                let nu = (k as f64 * spacing_hz).round() as i64;
                let state = self.detected_state(pump_mw, lo, nu)?;
                thetas
                    .iter()
                    .map(|th| {
                        let hd = HdConfig::new(lo, nu)
                            .theta(*th)
                            .delta_theta(delta_theta)
                            .efficiency(self.hd_efficiency)
                            .beat_reading(reading);
                        Ok(hd_noise_power(&state, &hd)?.value)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Ok((0..thetas.len())
            .map(|i| rows.iter().map(|r| r[i]).collect())
            .collect())
    }
}

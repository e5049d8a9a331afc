//! Frequency-domain balanced homodyne detection.
//!
//! The photocurrent at analysis frequency `nu` probes the sideband pair
//! `lo +- nu`. Writing `X(+-) = (X_up +- X_low)/sqrt 2` (same for `P`) and
//! rotating every mode by the LO phase, the normalized noise power is
//! `S(theta) = [Var X(+)_theta + Var P(-)_theta] / 2`, which is 1 for vacuum.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::gaussian::{GaussianState, ModeLabel};

/// How a sideband that is absent from the state enters the noise power.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeatReading {
    /// The absent partner is vacuum and contributes shot noise.
    #[default]
    Physical,
    /// The absent partner contributes nothing, so a lone thermal sideband of
    /// variance `v` reads `v / 2`. This is the half-mixture bookkeeping
    /// commonly used for the LO-detuned beat measurement.
    AsPrinted,
}

/// Homodyne detector settings.
#[derive(Clone, Debug, PartialEq)]
pub struct HdConfig {
    pub lo: ModeLabel,
    pub theta: f64,
    /// Phase-lock offset added to `theta`.
    pub delta_theta: f64,
    pub analysis_hz: i64,
    pub efficiency: f64,
    pub beat_reading: BeatReading,
}

impl HdConfig {
    pub fn new(lo: ModeLabel, analysis_hz: i64) -> Self {
        Self {
            lo,
            theta: 0.0,
            delta_theta: 0.0,
            analysis_hz,
            efficiency: 1.0,
            beat_reading: BeatReading::Physical,
        }
    }

    pub fn theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn delta_theta(mut self, delta_theta: f64) -> Self {
        self.delta_theta = delta_theta;
        self
    }

    pub fn efficiency(mut self, efficiency: f64) -> Self {
        self.efficiency = efficiency;
        self
    }

    pub fn beat_reading(mut self, reading: BeatReading) -> Self {
        self.beat_reading = reading;
        self
    }

    pub fn upper(&self) -> ModeLabel {
        self.lo.shifted_hz(self.analysis_hz)
    }

    pub fn lower(&self) -> ModeLabel {
        self.lo.shifted_hz(-self.analysis_hz)
    }
}

/// Normalized homodyne noise power with a breakdown of where it comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisePowerResult {
    pub value: f64,
    pub value_db: f64,
    /// `cos^2` of the effective phase.
    pub squeezed_weight: f64,
    /// `sin^2` of the effective phase.
    pub antisqueezed_weight: f64,
    /// Part of `value` contributed by vacuum from detection loss and absent
    /// sidebands.
    pub vacuum_admixture: f64,
}

/// Noise power of `state` seen by the detector `cfg`.
pub fn hd_noise_power(state: &GaussianState, cfg: &HdConfig) -> Result<NoisePowerResult> {
    check_unit_interval("detection efficiency", cfg.efficiency)?;
    if cfg.analysis_hz < 0 {
        return Err(Error::OutOfRange {
            name: "analysis frequency",
            value: cfg.analysis_hz as f64,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let phase = cfg.theta + cfg.delta_theta;
    let (s, c) = phase.sin_cos();

    let sidebands: Vec<ModeLabel> = if cfg.analysis_hz == 0 {
        vec![cfg.lo]
    } else {
        vec![cfg.upper(), cfg.lower()]
    };
    let present: Vec<ModeLabel> = sidebands
        .iter()
        .copied()
        .filter(|m| state.contains(*m))
        .collect();
    let missing = sidebands.len() - present.len();

    // Covariance over the sidebands after detection loss; absent modes are
    // vacuum, or dropped under the printed half-mixture reading.
    let fill = if missing == sidebands.len() || cfg.beat_reading == BeatReading::Physical {
        1.0
    } else {
        0.0
    };
    let dim = 2 * sidebands.len();
    let mut cov = DMatrix::<f64>::identity(dim, dim) * fill;
    if !present.is_empty() {
        let reduced = state
            .partial_trace(&present)?
            .apply_uniform_loss(cfg.efficiency)?;
        let slot = |m: ModeLabel| sidebands.iter().position(|x| *x == m).unwrap();
        for (i, mi) in present.iter().enumerate() {
            for (j, mj) in present.iter().enumerate() {
                for q in 0..2 {
                    for p in 0..2 {
                        cov[(2 * slot(*mi) + q, 2 * slot(*mj) + p)] =
                            reduced.cov()[(2 * i + q, 2 * j + p)];
                    }
                }
            }
        }
    }

    // rotated quadrature variances of each sideband and their covariances
    let quad = |i: usize, j: usize, (a, b): (f64, f64), (c2, d): (f64, f64)| {
        a * c2 * cov[(2 * i, 2 * j)]
            + a * d * cov[(2 * i, 2 * j + 1)]
            + b * c2 * cov[(2 * i + 1, 2 * j)]
            + b * d * cov[(2 * i + 1, 2 * j + 1)]
    };
    let x_dir = (c, s);
    let p_dir = (-s, c);
    let value = if sidebands.len() == 1 {
        quad(0, 0, x_dir, x_dir)
    } else {
        let var_x_plus =
            0.5 * (quad(0, 0, x_dir, x_dir) + quad(1, 1, x_dir, x_dir)) + quad(0, 1, x_dir, x_dir);
        let var_p_minus =
            0.5 * (quad(0, 0, p_dir, p_dir) + quad(1, 1, p_dir, p_dir)) - quad(0, 1, p_dir, p_dir);
        0.5 * (var_x_plus + var_p_minus)
    };

    let share = 1.0 / sidebands.len() as f64;
    let vacuum_admixture = share * present.len() as f64 * (1.0 - cfg.efficiency)
        + share * missing as f64 * fill;

    Ok(NoisePowerResult {
        value,
        value_db: db(value)?,
        squeezed_weight: c * c,
        antisqueezed_weight: s * s,
        vacuum_admixture,
    })
}

/// Branch of the squeezing ellipse.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Squeezed,
    Antisqueezed,
}

/// Variance of a squeezed vacuum with parameter `r` after efficiency `eta`:
/// `eta e^{-+2r} + 1 - eta`.
pub fn variance_from_r(r: f64, eta: f64, branch: Branch) -> Result<f64> {
    check_r(r)?;
    check_unit_interval("efficiency", eta)?;
    let sign = match branch {
        Branch::Squeezed => -1.0,
        Branch::Antisqueezed => 1.0,
    };
    Ok(eta * (sign * 2.0 * r).exp() + 1.0 - eta)
}

/// Effective squeezing parameter from a measured antisqueezing level.
pub fn r_from_antisqueezing(anti_db: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange {
            name: "efficiency",
            value: eta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let linear = undb(anti_db);
    if anti_db < 0.0 || linear <= 1.0 - eta {
        return Err(Error::Infeasible {
            linear,
            floor: 1.0 - eta,
        });
    }
    Ok(0.5 * ((linear - (1.0 - eta)) / eta).ln())
}

/// Noise of a lone squeezed-vacuum sideband beaten against a detuned LO.
///
/// The populated sideband is thermal with variance `eta cosh 2r + 1 - eta`
/// (note `sinh^2 r + cosh^2 r = cosh 2r`); the detector averages it with its
/// partner. Under [`BeatReading::Physical`] the partner is vacuum and adds
/// `1/2`, so `r = 0` gives exactly 1. Under [`BeatReading::AsPrinted`] only
/// `(eta/2)(sinh^2 r + cosh^2 r) + (1 - eta)/2` remains.
pub fn asymmetric_beat_noise_with(r: f64, eta: f64, reading: BeatReading) -> Result<f64> {
    check_r(r)?;
    check_unit_interval("efficiency", eta)?;
    let (sh, ch) = (r.sinh(), r.cosh());
    let half_mixture = 0.5 * eta * (sh * sh + ch * ch) + 0.5 * (1.0 - eta);
    Ok(match reading {
        BeatReading::Physical => half_mixture + 0.5,
        BeatReading::AsPrinted => half_mixture,
    })
}

/// [`asymmetric_beat_noise_with`] under the physical reading.
pub fn asymmetric_beat_noise(r: f64, eta: f64) -> Result<f64> {
    asymmetric_beat_noise_with(r, eta, BeatReading::Physical)
}

fn check_r(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "squeezing parameter",
            value: r,
            lo: 0.0,
            hi: f64::INFINITY,
        })
    }
}

/// Power ratio in dB.
pub fn db(value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(10.0 * value.log10())
    } else {
        Err(Error::NonPositive(value))
    }
}

pub fn undb(value_db: f64) -> f64 {
    10f64.powf(value_db / 10.0)
}

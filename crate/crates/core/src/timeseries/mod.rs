//! Monte-Carlo photocurrent synthesis and spectral estimation.
//!
//! Traces are generated in the frequency domain: every positive-frequency bin
//! gets an independent complex Gaussian amplitude scaled to the target
//! one-sided PSD, the spectrum is completed with Hermitian symmetry and
//! transformed to the time domain. Spectra are plain (rectangular-window)
//! periodograms averaged over rounds, in linear units per MHz, so that the sum
//! of `psd * bin_spacing` equals the mean square of a trace.

mod spectrum;
mod synth;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use spectrum::{
    acquire, band_power, calibrate, estimate_spectrum, snl_normalize, write_csv, Band, BandPower,
    Normalization, SpectrumAccumulator, SpectrumEstimate,
};
pub use synth::{synthesize_round, Synthesizer};

/// Digitizer settings and the analysis band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionParams {
    pub sample_rate_mhz: f64,
    pub samples_per_round: usize,
    pub rounds: usize,
    pub band_center_mhz: f64,
    pub band_width_mhz: f64,
    pub rng_seed: u64,
}

impl Default for AcquisitionParams {
    fn default() -> Self {
        Self {
            sample_rate_mhz: 50.0,
            samples_per_round: 50_000,
            rounds: 500,
            band_center_mhz: 1.55,
            band_width_mhz: 0.1,
            rng_seed: 0x5EED,
        }
    }
}

impl AcquisitionParams {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::NoRounds);
        }
        if self.samples_per_round < 2 || !(self.sample_rate_mhz > 0.0) {
            return Err(Error::Config(format!(
                "need at least 2 samples and a positive sample rate (got {} at {} MS/s)",
                self.samples_per_round, self.sample_rate_mhz
            )));
        }
        self.band().check_nyquist(self.nyquist_mhz())
    }

    pub fn nyquist_mhz(&self) -> f64 {
        0.5 * self.sample_rate_mhz
    }

    pub fn bin_spacing_mhz(&self) -> f64 {
        self.sample_rate_mhz / self.samples_per_round as f64
    }

    /// Number of one-sided bins, DC through Nyquist.
    pub fn num_bins(&self) -> usize {
        self.samples_per_round / 2 + 1
    }

    pub fn bin_frequency_mhz(&self, k: usize) -> f64 {
        k as f64 * self.bin_spacing_mhz()
    }

    pub fn band(&self) -> Band {
        Band::new(self.band_center_mhz, self.band_width_mhz)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..self.clone()
        }
    }
}

/// Deterministic sinusoidal pickup added to the photocurrent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tone {
    pub freq_mhz: f64,
    /// Mean-square power of the tone, in the same units as the integrated PSD.
    pub power: f64,
}

/// Target spectrum of the photocurrent in SNL units.
#[derive(Clone)]
pub enum PsdShape {
    Flat(f64),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Values on the acquisition's bin grid, DC first.
    Tabulated(Arc<Vec<f64>>),
}

impl fmt::Debug for PsdShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsdShape::Flat(v) => write!(f, "Flat({v})"),
            PsdShape::Function(_) => write!(f, "Function(..)"),
            PsdShape::Tabulated(v) => write!(f, "Tabulated({} bins)", v.len()),
        }
    }
}

/// What the detector records: the optical noise PSD, a flat electronic floor
/// and interference tones.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    pub psd: PsdShape,
    pub electronic_floor: f64,
    pub tones: Vec<Tone>,
}

/// Electronic floor 10 dB below shot noise.
pub const DEFAULT_ELECTRONIC_FLOOR: f64 = 0.1;

impl NoiseModel {
    pub fn flat(level: f64) -> Self {
        Self {
            psd: PsdShape::Flat(level),
            electronic_floor: 0.0,
            tones: Vec::new(),
        }
    }

    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            psd: PsdShape::Function(Arc::new(f)),
            electronic_floor: 0.0,
            tones: Vec::new(),
        }
    }

    pub fn tabulated(values: Vec<f64>) -> Self {
        Self {
            psd: PsdShape::Tabulated(Arc::new(values)),
            electronic_floor: 0.0,
            tones: Vec::new(),
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.electronic_floor = floor;
        self
    }

    pub fn with_tone(mut self, freq_mhz: f64, power: f64) -> Self {
        self.tones.push(Tone { freq_mhz, power });
        self
    }

    /// Optical PSD (without the floor) at bin `k` of `acq`.
    pub fn optical_psd(&self, acq: &AcquisitionParams, k: usize) -> f64 {
        match &self.psd {
            PsdShape::Flat(v) => *v,
            PsdShape::Function(f) => f(acq.bin_frequency_mhz(k)),
            PsdShape::Tabulated(v) => v[k],
        }
    }

    pub fn validate(&self, acq: &AcquisitionParams) -> Result<()> {
        if !(self.electronic_floor >= 0.0) {
            return Err(Error::Config(format!(
                "electronic floor must be non-negative, got {}",
                self.electronic_floor
            )));
        }
        if let PsdShape::Tabulated(v) = &self.psd {
            if v.len() != acq.num_bins() {
                return Err(Error::TraceLength {
                    expected: acq.num_bins(),
                    got: v.len(),
                });
            }
        }
        for t in &self.tones {
            if !(t.freq_mhz >= 0.0 && t.freq_mhz <= acq.nyquist_mhz()) || !(t.power >= 0.0) {
                return Err(Error::Config(format!(
                    "tone at {} MHz with power {} is not representable",
                    t.freq_mhz, t.power
                )));
            }
        }
        Ok(())
    }
}

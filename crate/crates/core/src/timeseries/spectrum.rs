use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{AcquisitionParams, NoiseModel, Synthesizer};
use crate::error::{Error, Result};

/// Rounds summed sequentially inside one parallel task. Fixed so that the
/// reduction order never depends on the thread count.
const ROUNDS_PER_CHUNK: usize = 20;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    SnlNormalized,
    Corrected,
}

/// Frequency interval `[center - width/2, center + width/2]` in MHz.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Band {
    pub center_mhz: f64,
    pub width_mhz: f64,
}

impl Band {
    pub fn new(center_mhz: f64, width_mhz: f64) -> Self {
        Self {
            center_mhz,
            width_mhz,
        }
    }

    pub fn lo(&self) -> f64 {
        self.center_mhz - 0.5 * self.width_mhz
    }

    pub fn hi(&self) -> f64 {
        self.center_mhz + 0.5 * self.width_mhz
    }

    pub(crate) fn check_nyquist(&self, nyquist_mhz: f64) -> Result<()> {
        if self.lo() < 0.0 || self.hi() >= nyquist_mhz || !(self.width_mhz >= 0.0) {
            return Err(Error::Nyquist {
                lo_mhz: self.lo(),
                hi_mhz: self.hi(),
                nyquist_mhz,
            });
        }
        Ok(())
    }

    pub(crate) fn contains(&self, f: f64, spacing: f64) -> bool {
        let eps = 1e-6 * spacing;
        f >= self.lo() - eps && f <= self.hi() + eps
    }
}

/// Averaged one-sided power spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub freqs_mhz: Vec<f64>,
    pub psd: Vec<f64>,
    /// Standard error of each bin's mean over rounds.
    pub stderr: Vec<f64>,
    pub normalization: Normalization,
    /// Bins whose corrected value fell to or below zero and was clipped to 0.
    pub clipped: Vec<bool>,
    pub rounds: usize,
}

impl SpectrumEstimate {
    pub fn bin_spacing_mhz(&self) -> f64 {
        if self.freqs_mhz.len() > 1 {
            self.freqs_mhz[1] - self.freqs_mhz[0]
        } else {
            0.0
        }
    }

    /// Integral of the PSD over frequency (equals the mean square of a trace).
    pub fn integrated_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.bin_spacing_mhz()
    }

    fn same_grid(&self, other: &SpectrumEstimate) -> bool {
        self.freqs_mhz == other.freqs_mhz
    }
}

/// Running sums of periodograms, mergeable in a fixed order.
#[derive(Clone, Debug)]
pub struct SpectrumAccumulator {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    rounds: usize,
}

impl SpectrumAccumulator {
    pub fn new(num_bins: usize) -> Self {
        Self {
            sum: vec![0.0; num_bins],
            sum_sq: vec![0.0; num_bins],
            rounds: 0,
        }
    }

    pub fn add(&mut self, periodogram: &[f64]) {
        for ((s, q), p) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(periodogram) {
            *s += p;
            *q += p * p;
        }
        self.rounds += 1;
    }

    pub fn merge(&mut self, other: &SpectrumAccumulator) {
        for (s, o) in self.sum.iter_mut().zip(&other.sum) {
            *s += o;
        }
        for (s, o) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *s += o;
        }
        self.rounds += other.rounds;
    }

    pub fn finish(&self, acq: &AcquisitionParams) -> Result<SpectrumEstimate> {
        if self.rounds == 0 {
            return Err(Error::NoRounds);
        }
        let n = self.rounds as f64;
        let psd: Vec<f64> = self.sum.iter().map(|s| s / n).collect();
        let stderr = self
            .sum_sq
            .iter()
            .zip(&psd)
            .map(|(q, m)| {
                if self.rounds < 2 {
                    f64::NAN
                } else {
                    ((q - n * m * m).max(0.0) / (n - 1.0) / n).sqrt()
                }
            })
            .collect();
        Ok(SpectrumEstimate {
            freqs_mhz: (0..psd.len()).map(|k| acq.bin_frequency_mhz(k)).collect(),
            clipped: vec![false; psd.len()],
            psd,
            stderr,
            normalization: Normalization::Raw,
            rounds: self.rounds,
        })
    }
}

/// One-sided periodogram of a single trace.
struct Periodogram {
    forward: Arc<dyn Fft<f64>>,
    sample_rate_mhz: f64,
}

impl Periodogram {
    fn new(acq: &AcquisitionParams) -> Self {
        Self {
            forward: FftPlanner::new().plan_fft_forward(acq.samples_per_round),
            sample_rate_mhz: acq.sample_rate_mhz,
        }
    }

    fn compute(&self, trace: &[f64]) -> Vec<f64> {
        let n = trace.len();
        let mut buf: Vec<Complex64> = trace.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(&mut buf, &mut scratch);
        let norm = 1.0 / (n as f64 * self.sample_rate_mhz);
        let last = n / 2;
        (0..=last)
            .map(|k| {
                let p = buf[k].norm_sqr() * norm;
                if k == 0 || (n % 2 == 0 && k == last) {
                    p
                } else {
                    2.0 * p
                }
            })
            .collect()
    }
}

/// Mean periodogram over recorded traces, with round-to-round standard error.
pub fn estimate_spectrum(traces: &[Vec<f64>], acq: &AcquisitionParams) -> Result<SpectrumEstimate> {
    if traces.is_empty() {
        return Err(Error::NoRounds);
    }
    for t in traces {
        if t.len() != acq.samples_per_round {
            return Err(Error::TraceLength {
                expected: acq.samples_per_round,
                got: t.len(),
            });
        }
    }
    let pg = Periodogram::new(acq);
    let mut acc = SpectrumAccumulator::new(acq.num_bins());
    for t in traces {
        acc.add(&pg.compute(t));
    }
    acc.finish(acq)
}

/// Synthesizes `acq.rounds` traces of `model` and averages their
/// periodograms. Rounds run in parallel; the result is bit-identical for any
/// thread count.
pub fn acquire(model: &NoiseModel, acq: &AcquisitionParams) -> Result<SpectrumEstimate> {
    let synth = Synthesizer::new(model, acq)?;
    let pg = Periodogram::new(acq);
    let chunks: Vec<SpectrumAccumulator> = (0..acq.rounds.div_ceil(ROUNDS_PER_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = SpectrumAccumulator::new(acq.num_bins());
            let end = ((c + 1) * ROUNDS_PER_CHUNK).min(acq.rounds);
            for round in c * ROUNDS_PER_CHUNK..end {
                acc.add(&pg.compute(&synth.round(round as u64)));
            }
            acc
        })
        .collect();
    let mut total = SpectrumAccumulator::new(acq.num_bins());
    for c in &chunks {
        total.merge(c);
    }
    total.finish(acq)
}

/// Band-averaged power with its standard error.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BandPower {
    pub value: f64,
    pub stderr: f64,
    pub bins: usize,
}

/// Mean PSD over bins whose centres lie inside the band.
pub fn band_power(spec: &SpectrumEstimate, center_mhz: f64, width_mhz: f64) -> Result<BandPower> {
    let band = Band::new(center_mhz, width_mhz);
    let spacing = spec.bin_spacing_mhz();
    let mut sum = 0.0;
    let mut var = 0.0;
    let mut bins = 0usize;
    for ((f, p), e) in spec.freqs_mhz.iter().zip(&spec.psd).zip(&spec.stderr) {
        if band.contains(*f, spacing) {
            sum += p;
            var += e * e;
            bins += 1;
        }
    }
    if bins == 0 {
        return Err(Error::EmptyBand {
            center_mhz,
            width_mhz,
        });
    }
    Ok(BandPower {
        value: sum / bins as f64,
        stderr: var.sqrt() / bins as f64,
        bins,
    })
}

/// Divides by the shot-noise spectrum without electronic-noise correction.
pub fn snl_normalize(signal: &SpectrumEstimate, snl: &SpectrumEstimate) -> Result<SpectrumEstimate> {
    if !signal.same_grid(snl) {
        return Err(Error::GridMismatch);
    }
    let mut out = signal.clone();
    for k in 0..out.psd.len() {
        let (s, n) = (signal.psd[k], snl.psd[k]);
        if !(n > 0.0) {
            return Err(Error::Uncalibratable {
                freq_mhz: signal.freqs_mhz[k],
            });
        }
        out.psd[k] = s / n;
        out.stderr[k] = ((signal.stderr[k] / n).powi(2) + (s * snl.stderr[k] / (n * n)).powi(2)).sqrt();
    }
    out.normalization = Normalization::SnlNormalized;
    Ok(out)
}

/// Electronic-noise-corrected, SNL-normalized spectrum
/// `(signal - electronic) / (snl - electronic)`.
///
/// Shot noise must exceed the electronic floor in every bin of `check`, or in
/// every bin when `check` is `None`. Bins outside `check` that cannot be
/// calibrated, and bins whose corrected value is not positive, are set to 0
/// and flagged in `clipped`.
pub fn calibrate(
    signal: &SpectrumEstimate,
    snl: &SpectrumEstimate,
    electronic: &SpectrumEstimate,
    check: Option<Band>,
) -> Result<SpectrumEstimate> {
    if !signal.same_grid(snl) || !signal.same_grid(electronic) {
        return Err(Error::GridMismatch);
    }
    let spacing = signal.bin_spacing_mhz();
    let mut out = signal.clone();
    for k in 0..signal.psd.len() {
        let f = signal.freqs_mhz[k];
        let num = signal.psd[k] - electronic.psd[k];
        let den = snl.psd[k] - electronic.psd[k];
        let checked = check.map_or(true, |b| b.contains(f, spacing));
        if !(den > 0.0) {
            if checked {
                return Err(Error::Uncalibratable { freq_mhz: f });
            }
            out.psd[k] = 0.0;
            out.stderr[k] = f64::NAN;
            out.clipped[k] = true;
            continue;
        }
        let c = num / den;
        let (es, en, ee) = (signal.stderr[k], snl.stderr[k], electronic.stderr[k]);
        out.stderr[k] = ((es / den).powi(2)
            + (en * num / (den * den)).powi(2)
            + (ee * (num - den) / (den * den)).powi(2))
        .sqrt();
        if c > 0.0 {
            out.psd[k] = c;
        } else {
            out.psd[k] = 0.0;
            out.clipped[k] = true;
        }
    }
    out.normalization = Normalization::Corrected;
    Ok(out)
}

/// Writes `freq_mhz,psd_linear,psd_db,stderr`, one row per bin.
pub fn write_csv<W: Write>(spec: &SpectrumEstimate, mut w: W) -> Result<()> {
    writeln!(w, "freq_mhz,psd_linear,psd_db,stderr")?;
    for k in 0..spec.psd.len() {
        let p = spec.psd[k];
        let p_db = if p > 0.0 { 10.0 * p.log10() } else { f64::NEG_INFINITY };
        writeln!(w, "{},{},{},{}", spec.freqs_mhz[k], p, p_db, spec.stderr[k])?;
    }
    Ok(())
}

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use super::{AcquisitionParams, NoiseModel};
use crate::error::{Error, Result};

/// Prepared generator for one noise model and acquisition setting.
///
/// Round `i` draws from ChaCha8 keyed by `rng_seed` on stream `i`, so any
/// round can be regenerated on its own and rounds may run in any order.
pub struct Synthesizer {
    acq: AcquisitionParams,
    /// Standard deviation of each real/imaginary bin component.
    bin_sigma: Vec<f64>,
    tones: Vec<(f64, f64)>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Synthesizer {
    pub fn new(model: &NoiseModel, acq: &AcquisitionParams) -> Result<Self> {
        acq.validate()?;
        model.validate(acq)?;
        let n = acq.samples_per_round;
        let fs = acq.sample_rate_mhz;
        let last = n / 2;
        let mut bin_sigma = Vec::with_capacity(acq.num_bins());
        for k in 0..acq.num_bins() {
            let target = model.optical_psd(acq, k) + model.electronic_floor;
            if !(target >= 0.0) {
                return Err(Error::Config(format!(
                    "target PSD must be non-negative, got {target} at {} MHz",
                    acq.bin_frequency_mhz(k)
                )));
            }
            // E|X_k|^2 = target * n * fs / 2 on interior bins, twice that on
            // the purely real DC and Nyquist bins.
            let real_bin = k == 0 || (n % 2 == 0 && k == last);
            let sigma = if real_bin {
                (target * n as f64 * fs).sqrt()
            } else {
                (target * n as f64 * fs / 4.0).sqrt()
            };
            bin_sigma.push(sigma);
        }
        let tones = model
            .tones
            .iter()
            .map(|t| (t.freq_mhz, (2.0 * t.power).sqrt()))
            .collect();
        let inverse = FftPlanner::new().plan_fft_inverse(n);
        Ok(Self {
            acq: acq.clone(),
            bin_sigma,
            tones,
            inverse,
        })
    }

    pub fn acquisition(&self) -> &AcquisitionParams {
        &self.acq
    }

    /// Sample trace for `round_index`.
    pub fn round(&self, round_index: u64) -> Vec<f64> {
        let n = self.acq.samples_per_round;
        let mut rng = ChaCha8Rng::seed_from_u64(self.acq.rng_seed);
        rng.set_stream(round_index);

        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        let last = n / 2;
        for (k, sigma) in self.bin_sigma.iter().enumerate() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let real_bin = k == 0 || (n % 2 == 0 && k == last);
            if real_bin {
                spec[k] = Complex64::new(sigma * re, 0.0);
            } else {
                let im: f64 = StandardNormal.sample(&mut rng);
                spec[k] = Complex64::new(sigma * re, sigma * im);
                spec[n - k] = spec[k].conj();
            }
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        self.inverse.process_with_scratch(&mut spec, &mut scratch);

        let scale = 1.0 / n as f64;
        let dt = 1.0 / self.acq.sample_rate_mhz;
        spec.iter()
            .enumerate()
            .map(|(i, z)| {
                let t = i as f64 * dt;
                let pickup: f64 = self
                    .tones
                    .iter()
                    .map(|(f, amp)| amp * (2.0 * PI * f * t).cos())
                    .sum();
                z.re * scale + pickup
            })
            .collect()
    }
}

/// One round of synthesized photocurrent; identical for identical
/// `(model, acq, round_index)`.
pub fn synthesize_round(
    model: &NoiseModel,
    acq: &AcquisitionParams,
    round_index: u64,
) -> Result<Vec<f64>> {
    Ok(Synthesizer::new(model, acq)?.round(round_index))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AcquisitionParams {
        AcquisitionParams {
            sample_rate_mhz: 50.0,
            samples_per_round: 4096,
            rounds: 1,
            band_center_mhz: 1.55,
            band_width_mhz: 0.1,
            rng_seed: 11,
        }
    }

    #[test]
    fn deterministic_per_seed_and_round() {
        let m = NoiseModel::flat(1.0).with_floor(0.1);
        let a = synthesize_round(&m, &small(), 3).unwrap();
        let b = synthesize_round(&m, &small(), 3).unwrap();
        assert_eq!(a, b);
        let c = synthesize_round(&m, &small(), 4).unwrap();
        assert_ne!(a, c);
        let d = synthesize_round(&m, &small().with_seed(12), 3).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn white_noise_variance() {
        // one-sided PSD 1 per MHz over 25 MHz: variance 25
        let acq = small();
        let synth = Synthesizer::new(&NoiseModel::flat(1.0), &acq).unwrap();
        let rounds = 64;
        let n = acq.samples_per_round;
        let mean_sq: f64 = (0..rounds)
            .map(|r| synth.round(r).iter().map(|x| x * x).sum::<f64>() / n as f64)
            .sum::<f64>()
            / rounds as f64;
        // mean square of n*rounds Gaussian samples: relative sd sqrt(2/(n rounds))
        let sd = 25.0 * (2.0 / (n * rounds as usize) as f64).sqrt();
        assert!((mean_sq - 25.0).abs() < 3.0 * sd, "{mean_sq}");
    }

    #[test]
    fn zero_model_gives_zero_trace() {
        let t = synthesize_round(&NoiseModel::flat(0.0), &small(), 0).unwrap();
        assert!(t.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn rejects_nyquist_violation() {
        let acq = AcquisitionParams {
            band_center_mhz: 24.99,
            ..small()
        };
        assert!(matches!(
            synthesize_round(&NoiseModel::flat(1.0), &acq, 0),
            Err(Error::Nyquist { .. })
        ));
    }

    #[test]
    fn rejects_negative_psd() {
        assert!(synthesize_round(&NoiseModel::flat(-1.0), &small(), 0).is_err());
    }
}

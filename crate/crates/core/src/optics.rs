//! Optical elements of the chain: the below-threshold OPO source, single AOMs,
//! the two-AOM bi-frequency interferometer and efficiency budgets.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::gaussian::{FrequencyGrid, GaussianState, ModeLabel, SymplecticOp};

/// Below-threshold OPO parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpoParams {
    pub pump_mw: f64,
    pub threshold_mw: f64,
    pub bandwidth_mhz: f64,
    pub escape_efficiency: f64,
}

impl Default for OpoParams {
    fn default() -> Self {
        Self {
            pump_mw: 0.0,
            threshold_mw: 980.0,
            bandwidth_mhz: 15.6,
            escape_efficiency: 0.934,
        }
    }
}

impl OpoParams {
    pub fn with_pump(mut self, pump_mw: f64) -> Self {
        self.pump_mw = pump_mw;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pump_mw >= 0.0) {
            return Err(Error::OutOfRange {
                name: "pump power",
                value: self.pump_mw,
                lo: 0.0,
                hi: self.threshold_mw,
            });
        }
        if self.pump_mw >= self.threshold_mw {
            return Err(Error::AboveThreshold {
                pump_mw: self.pump_mw,
                threshold_mw: self.threshold_mw,
            });
        }
        if !(self.bandwidth_mhz > 0.0) {
            return Err(Error::OutOfRange {
                name: "OPO bandwidth",
                value: self.bandwidth_mhz,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        check_unit_interval("escape efficiency", self.escape_efficiency)
    }
}

/// Squeezed and antisqueezed sideband-combination variances (SNL units) at
/// analysis frequency `nu_mhz` after overall efficiency `eta`.
pub fn opo_variances(p: &OpoParams, nu_mhz: f64, eta: f64) -> Result<(f64, f64)> {
    p.validate()?;
    check_unit_interval("efficiency", eta)?;
    if !(nu_mhz >= 0.0) {
        return Err(Error::OutOfRange {
            name: "analysis frequency",
            value: nu_mhz,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let x = (p.pump_mw / p.threshold_mw).sqrt();
    let detune = 4.0 * (nu_mhz / p.bandwidth_mhz).powi(2);
    let squeezed = 1.0 - eta * 4.0 * x / ((1.0 + x).powi(2) + detune);
    let anti = 1.0 + eta * 4.0 * x / ((1.0 - x).powi(2) + detune);
    Ok((squeezed, anti))
}

/// Two-mode state of the sideband pair `(w - nu, w + nu)` emitted by the OPO,
/// including its escape efficiency. At `nu = 0` this is the single degenerate
/// mode at the carrier.
pub fn opo_sideband_state(p: &OpoParams, nu: ModeLabel) -> Result<GaussianState> {
    let nu_hz = nu.detuning_hz().abs();
    let (s, a) = opo_variances(p, nu_hz as f64 * 1e-6, p.escape_efficiency)?;
    if nu_hz == 0 {
        let cov = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![s, a]));
        return GaussianState::new(vec![ModeLabel::CARRIER], cov);
    }
    let mean = 0.5 * (s + a);
    let corr = 0.5 * (s - a);
    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(4, 4, &[
        mean, 0.0,   corr, 0.0,
        0.0,  mean,  0.0,  -corr,
        corr, 0.0,   mean, 0.0,
        0.0,  -corr, 0.0,  mean,
    ]);
    GaussianState::new(
        vec![ModeLabel::from_hz(-nu_hz), ModeLabel::from_hz(nu_hz)],
        cov,
    )
}

fn normalization(t: Complex64, r: Complex64) -> Result<()> {
    let norm = t.norm_sqr() + r.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Mode unitary of one AOM over `[low, high = low + shift]`, rows indexing
/// outputs. The transmitted part of each input keeps its frequency; the
/// diffracted part moves to the other mode.
pub fn aom_unitary(t: Complex64, r: Complex64) -> Result<DMatrix<Complex64>> {
    normalization(t, r)?;
    Ok(DMatrix::from_row_slice(2, 2, &[t, r, -r.conj(), t.conj()]))
}

/// Single AOM as a symplectic operation over `[low, low + shift_hz]`.
pub fn aom_transform(
    t: Complex64,
    r: Complex64,
    low: ModeLabel,
    shift_hz: i64,
) -> Result<SymplecticOp> {
    let high = low.shifted_hz(shift_hz);
    SymplecticOp::from_passive_unitary(&aom_unitary(t, r)?, vec![low, high], vec![low, high])
}

/// Parameters of the AOM-based bi-frequency interferometer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbiParams {
    pub shift_mhz: f64,
    /// Per-arm optical efficiency.
    pub zeta: f64,
    pub visibility: f64,
    /// Inter-arm phase.
    pub phase_rad: f64,
    pub t: f64,
    pub r: f64,
}

impl Default for AbiParams {
    fn default() -> Self {
        Self {
            shift_mhz: 80.0,
            zeta: 1.0,
            visibility: 1.0,
            phase_rad: 0.0,
            t: std::f64::consts::FRAC_1_SQRT_2,
            r: std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

impl AbiParams {
    pub fn validate(&self) -> Result<()> {
        check_unit_interval("zeta", self.zeta)?;
        check_unit_interval("visibility", self.visibility)?;
        normalization(Complex64::new(self.t, 0.0), Complex64::new(self.r, 0.0))
    }

    pub fn shift_hz(&self) -> Result<i64> {
        Ok(FrequencyGrid::new(1).label(self.shift_mhz)?.detuning_hz())
    }

    pub fn efficiency(&self) -> Result<f64> {
        abi_efficiency(self.zeta, self.visibility)
    }
}

/// Systematic efficiency of the interferometer, `zeta (1 + V) / 2`.
pub fn abi_efficiency(zeta: f64, visibility: f64) -> Result<f64> {
    check_unit_interval("zeta", zeta)?;
    check_unit_interval("visibility", visibility)?;
    Ok(0.5 * zeta * (1.0 + visibility))
}

/// Mode unitary of the interferometer: AOM, phase on the upper arm, AOM.
pub fn abi_unitary(a: &AbiParams) -> Result<DMatrix<Complex64>> {
    a.validate()?;
    let aom = aom_unitary(Complex64::new(a.t, 0.0), Complex64::new(a.r, 0.0))?;
    let arm = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, a.phase_rad),
    ]));
    Ok(&aom * arm * &aom)
}

/// Lossless interferometer over `[low, low + shift]` together with the
/// systematic efficiency of the loss channel that follows it.
#[derive(Clone, Debug, PartialEq)]
pub struct AbiTransform {
    pub op: SymplecticOp,
    pub efficiency: f64,
}

pub fn abi_transform(a: &AbiParams, low: ModeLabel) -> Result<AbiTransform> {
    let shift = a.shift_hz()?;
    let high = low.shifted_hz(shift);
    let op = SymplecticOp::from_passive_unitary(&abi_unitary(a)?, vec![low, high], vec![low, high])?;
    Ok(AbiTransform {
        op,
        efficiency: a.efficiency()?,
    })
}

impl AbiTransform {
    /// Runs one mode through the device: the signal enters the lower port,
    /// vacuum the upper; both outputs pass the loss channel.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        let low = self.op.input_modes()[0];
        let high = self.op.input_modes()[1];
        let out = state
            .with_vacuum(&[high])?
            .apply_symplectic(&self.op)?
            .apply_loss(low, self.efficiency)?;
        out.apply_loss(high, self.efficiency)
    }
}

/// Which port of a two-mode frequency shifter carries the signal in and out.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyShifter {
    unitary: DMatrix<Complex64>,
    shift_hz: i64,
    efficiency: f64,
}

impl FrequencyShifter {
    /// Two-mode device with unitary `u` over `[f, f + shift_hz]` (upward
    /// shift) whose lower input is the signal and upper output is kept.
    pub fn new(unitary: DMatrix<Complex64>, shift_hz: i64, efficiency: f64) -> Result<Self> {
        check_unit_interval("efficiency", efficiency)?;
        if shift_hz == 0 {
            return Err(Error::Config("frequency shift must be non-zero".into()));
        }
        Ok(Self {
            unitary,
            shift_hz,
            efficiency,
        })
    }

    pub fn from_abi(a: &AbiParams) -> Result<Self> {
        Self::new(abi_unitary(a)?, a.shift_hz()?, a.efficiency()?)
    }

    /// Single AOM keeping the diffracted order. A negative shift selects the
    /// down-shifted order.
    pub fn from_aom(t: f64, r: f64, shift_hz: i64) -> Result<Self> {
        let u = aom_unitary(Complex64::new(t, 0.0), Complex64::new(r, 0.0))?;
        Self::new(u, shift_hz, 1.0)
    }

    pub fn shift_hz(&self) -> i64 {
        self.shift_hz
    }

    /// Fraction of the signal power routed to the kept output port.
    pub fn transfer(&self) -> f64 {
        (self.port_amplitude().norm_sqr() * self.efficiency).min(1.0)
    }

    fn port_amplitude(&self) -> Complex64 {
        if self.shift_hz >= 0 {
            self.unitary[(1, 0)]
        } else {
            self.unitary[(0, 1)]
        }
    }

    /// Shifts every mode of `state` by the device, tracing out the discarded
    /// port. Each signal mode meets its own vacuum partner, so modes are
    /// processed in the direction of the shift to keep labels unique.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        let mut order: Vec<ModeLabel> = state.modes().to_vec();
        order.sort();
        if self.shift_hz >= 0 {
            order.reverse();
        }
        let mut current = state.clone();
        for signal in order {
            let target = signal.shifted_hz(self.shift_hz);
            let (ports, kept) = if self.shift_hz >= 0 {
                ([signal, target], target)
            } else {
                ([target, signal], target)
            };
            let op = SymplecticOp::from_passive_unitary(
                &self.unitary,
                ports.to_vec(),
                ports.to_vec(),
            )?;
            current = current
                .with_vacuum(&[target])?
                .apply_symplectic(&op)?
                .apply_loss(kept, self.efficiency)?
                .trace_out(signal)?;
        }
        // restore the caller's mode ordering, shifted
        let shifted: Vec<ModeLabel> = state
            .modes()
            .iter()
            .map(|m| m.shifted_hz(self.shift_hz))
            .collect();
        current.partial_trace(&shifted)
    }
}

/// Named efficiency factors whose product is the overall efficiency.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyChain {
    entries: Vec<(String, f64)>,
}

impl EfficiencyChain {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        for (_, v) in &entries {
            check_unit_interval("efficiency", *v)?;
        }
        Ok(Self { entries })
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (format!("factor {}", i + 1), *v))
                .collect(),
        )
    }

    pub fn push(&mut self, label: impl Into<String>, value: f64) -> Result<()> {
        check_unit_interval("efficiency", value)?;
        self.entries.push((label.into(), value));
        Ok(())
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }
}

/// Product of all factors in the chain.
pub fn chain_efficiency(chain: &EfficiencyChain) -> Result<f64> {
    if chain.entries.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(chain.entries.iter().map(|(_, v)| v).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homodyne::db;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn opo(pump: f64) -> OpoParams {
        OpoParams::default().with_pump(pump)
    }

    #[test]
    fn opo_limits() {
        assert_eq!(opo_variances(&opo(0.0), 1.55, 0.7).unwrap(), (1.0, 1.0));
        assert_eq!(opo_variances(&opo(500.0), 1.55, 0.0).unwrap(), (1.0, 1.0));
        assert!(matches!(
            opo_variances(&opo(980.0), 1.55, 0.7),
            Err(Error::AboveThreshold { .. })
        ));
        assert!(opo_variances(&opo(100.0), -1.0, 0.7).is_err());
        assert!(opo_variances(&opo(100.0), 1.0, 1.5).is_err());
    }

    #[test]
    fn opo_fig4_operating_point() {
        // x = sqrt(450/980), 4 (nu/nu0)^2 with nu/nu0 = 1.55/15.6
        let x = (450.0f64 / 980.0).sqrt();
        let d = 4.0 * (1.55f64 / 15.6).powi(2);
        let sq = 1.0 - 0.708 * 4.0 * x / ((1.0 + x).powi(2) + d);
        let anti = 1.0 + 0.708 * 4.0 * x / ((1.0 - x).powi(2) + d);
        let (s, a) = opo_variances(&opo(450.0), 1.55, 0.708).unwrap();
        assert_abs_diff_eq!(s, sq, epsilon = 1e-15);
        assert_abs_diff_eq!(a, anti, epsilon = 1e-15);
        assert_abs_diff_eq!(s, 0.3275, epsilon = 5e-4);
        assert_abs_diff_eq!(a, 14.38, epsilon = 5e-3);
        assert_abs_diff_eq!(db(s).unwrap(), -4.85, epsilon = 0.01);
        assert_abs_diff_eq!(db(a).unwrap(), 11.58, epsilon = 0.01);
        assert!((db(a).unwrap() - 11.64).abs() < 0.15);
    }

    #[test]
    fn opo_state_is_physical_and_vacuum_without_pump() {
        let nu = ModeLabel::from_hz(1_550_000);
        let vac = opo_sideband_state(&opo(0.0), nu).unwrap();
        assert_abs_diff_eq!(vac.cov(), &DMatrix::identity(4, 4), epsilon = 1e-15);
        for p in [90.0, 450.0, 900.0] {
            let s = opo_sideband_state(&opo(p), nu).unwrap();
            assert!(s.min_symplectic_eigenvalue() >= 1.0 - 1e-9);
        }
        let deg = opo_sideband_state(&opo(300.0), ModeLabel::CARRIER).unwrap();
        assert_eq!(deg.modes(), &[ModeLabel::CARRIER]);
    }

    #[test]
    fn aom_transmission_only_is_identity() {
        let op = aom_transform(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            ModeLabel::CARRIER,
            80_000_000,
        )
        .unwrap();
        assert_abs_diff_eq!(op.matrix(), &DMatrix::identity(4, 4), epsilon = 0.0);
        assert_eq!(op.output_modes(), op.input_modes());
    }

    #[test]
    fn aom_rejects_unnormalized() {
        assert!(matches!(
            aom_unitary(Complex64::new(0.8, 0.0), Complex64::new(0.8, 0.0)),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn aom_on_vacuum_gives_vacuum() {
        let h = FRAC_1_SQRT_2;
        let op = aom_transform(
            Complex64::new(h, 0.0),
            Complex64::new(0.0, h),
            ModeLabel::CARRIER,
            80_000_000,
        )
        .unwrap();
        let vac = GaussianState::vacuum(op.input_modes()).unwrap();
        let out = vac.apply_symplectic(&op).unwrap();
        assert_abs_diff_eq!(out.cov(), vac.cov(), epsilon = 1e-15);
    }

    #[test]
    fn abi_efficiency_examples() {
        assert_eq!(abi_efficiency(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(abi_efficiency(0.8, 0.0).unwrap(), 0.4);
        assert_abs_diff_eq!(abi_efficiency(0.91, 1.0).unwrap(), 0.91, epsilon = 1e-15);
        assert!(abi_efficiency(1.1, 1.0).is_err());
        assert!(abi_efficiency(0.9, -0.1).is_err());
    }

    fn squeezed_carrier(r: f64) -> GaussianState {
        GaussianState::vacuum(&[ModeLabel::CARRIER])
            .unwrap()
            .apply_symplectic(&SymplecticOp::squeezer(ModeLabel::CARRIER, r).unwrap())
            .unwrap()
    }

    #[test]
    fn abi_transfers_at_zero_phase() {
        let a = AbiParams::default();
        let abi = abi_transform(&a, ModeLabel::CARRIER).unwrap();
        let up = ModeLabel::from_hz(80_000_000);
        let out = abi.apply(&squeezed_carrier(1.0)).unwrap();
        let e = out.partial_trace(&[up]).unwrap();
        let f = out.partial_trace(&[ModeLabel::CARRIER]).unwrap();
        assert_abs_diff_eq!(e.cov(), squeezed_carrier(1.0).cov(), epsilon = 1e-12);
        assert_abs_diff_eq!(f.cov(), &DMatrix::identity(2, 2), epsilon = 1e-12);
    }

    #[test]
    fn abi_swaps_routing_at_pi() {
        let a = AbiParams {
            phase_rad: std::f64::consts::PI,
            ..AbiParams::default()
        };
        let abi = abi_transform(&a, ModeLabel::CARRIER).unwrap();
        let up = ModeLabel::from_hz(80_000_000);
        let out = abi.apply(&squeezed_carrier(0.6)).unwrap();
        assert_abs_diff_eq!(
            out.partial_trace(&[ModeLabel::CARRIER]).unwrap().cov(),
            squeezed_carrier(0.6).cov(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            out.partial_trace(&[up]).unwrap().cov(),
            &DMatrix::identity(2, 2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn abi_loss_channel() {
        let a = AbiParams {
            zeta: 0.91,
            ..AbiParams::default()
        };
        let shifter = FrequencyShifter::from_abi(&a).unwrap();
        let input = squeezed_carrier(0.8);
        let out = shifter.apply(&input).unwrap();
        assert_eq!(out.modes(), &[ModeLabel::from_hz(80_000_000)]);
        let expected = 0.91 * input.cov()[(0, 0)] + 0.09;
        assert_abs_diff_eq!(out.cov()[(0, 0)], expected, epsilon = 1e-12);
    }

    #[test]
    fn shifter_handles_label_overlap() {
        // pair at +-40 MHz: the lower mode lands on the upper one after an 80 MHz shift
        let p = opo(400.0).clone();
        let state = opo_sideband_state(&p, ModeLabel::from_hz(40_000_000)).unwrap();
        let shifter = FrequencyShifter::from_abi(&AbiParams::default()).unwrap();
        let out = shifter.apply(&state).unwrap();
        assert_eq!(
            out.modes(),
            &[ModeLabel::from_hz(40_000_000), ModeLabel::from_hz(120_000_000)]
        );
        assert_abs_diff_eq!(out.cov(), state.cov(), epsilon = 1e-12);
    }

    #[test]
    fn single_aom_shifter_efficiency() {
        let s = FrequencyShifter::from_aom(0.6, 0.8, -80_000_000).unwrap();
        assert_abs_diff_eq!(s.transfer(), 0.64, epsilon = 1e-12);
        let out = s.apply(&squeezed_carrier(0.5)).unwrap();
        assert_eq!(out.modes(), &[ModeLabel::from_hz(-80_000_000)]);
        let v = squeezed_carrier(0.5).cov()[(0, 0)];
        assert_abs_diff_eq!(out.cov()[(0, 0)], 0.64 * v + 0.36, epsilon = 1e-12);
    }

    #[test]
    fn paper_efficiency_budgets() {
        let product = |f: &[f64]| chain_efficiency(&EfficiencyChain::from_values(f).unwrap()).unwrap();
        assert_abs_diff_eq!(product(&[0.934, 0.854, 0.888]), 0.708, epsilon = 1e-3);
        assert_abs_diff_eq!(product(&[0.713, 0.91, 0.841, 0.806]), 0.439, epsilon = 1e-3);
        // the quoted 48.3% is not the product of its own listed factors
        assert_abs_diff_eq!(product(&[0.713, 0.91, 0.841, 0.888]), 0.48455143464, epsilon = 1e-12);
        assert_eq!(
            chain_efficiency(&EfficiencyChain::default()),
            Err(Error::EmptyChain)
        );
        assert!(EfficiencyChain::from_values(&[0.5, 1.2]).is_err());
    }
}

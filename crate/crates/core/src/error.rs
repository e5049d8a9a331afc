use thiserror::Error;

use crate::gaussian::ModeLabel;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode list is empty")]
    EmptyModes,

    #[error("duplicate mode label {0}")]
    DuplicateMode(ModeLabel),

    #[error("mode {0} not present in state")]
    MissingMode(ModeLabel),

    #[error("frequency {mhz} MHz is not on the {step_hz} Hz label grid")]
    OffGrid { mhz: f64, step_hz: u64 },

    #[error("matrix dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not symplectic (max deviation {0:e})")]
    NotSymplectic(f64),

    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("state violates the uncertainty principle (min symplectic eigenvalue {0})")]
    Unphysical(f64),

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("coefficients are not normalized: |t|^2 + |r|^2 = {0}")]
    NotNormalized(f64),

    #[error("pump power {pump_mw} mW is not below threshold {threshold_mw} mW")]
    AboveThreshold { pump_mw: f64, threshold_mw: f64 },

    #[error("efficiency chain is empty")]
    EmptyChain,

    #[error("cannot take dB of non-positive value {0}")]
    NonPositive(f64),

    #[error("measured noise {linear} is below the vacuum admixture floor {floor}")]
    Infeasible { linear: f64, floor: f64 },

    #[error("band [{lo_mhz}, {hi_mhz}] MHz violates Nyquist limit {nyquist_mhz} MHz")]
    Nyquist {
        lo_mhz: f64,
        hi_mhz: f64,
        nyquist_mhz: f64,
    },

    #[error("band centred at {center_mhz} MHz with width {width_mhz} MHz contains no bins")]
    EmptyBand { center_mhz: f64, width_mhz: f64 },

    #[error("trace length mismatch: expected {expected}, got {got}")]
    TraceLength { expected: usize, got: usize },

    #[error("no rounds to average")]
    NoRounds,

    #[error("spectrum grids differ")]
    GridMismatch,

    #[error("shot-noise level not above electronic floor at {freq_mhz} MHz")]
    Uncalibratable { freq_mhz: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

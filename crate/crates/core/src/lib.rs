//! Simulation of squeezed vacuum generated by a below-threshold OPO,
//! frequency-shifted by an AOM-based bi-frequency interferometer and read out
//! by frequency-domain homodyne detection.
//!
//! The crate is organized bottom-up:
//!
//! - [`gaussian`]: zero-mean Gaussian states over labelled frequency modes.
//! - [`optics`]: OPO source, AOM and interferometer transforms, efficiency budgets.
//! - [`homodyne`]: sideband-pair noise power and squeezing-parameter algebra.
//! - [`timeseries`]: Monte-Carlo photocurrent synthesis and spectral estimation.
//! - [`scenarios`]: declarative experiment configurations, reference values and sweeps.
//! - [`cli`]: the command-line front end used by the `squeezesim` binary.

pub mod cli;
pub mod error;
pub mod gaussian;
pub mod homodyne;
pub mod optics;
pub mod scenarios;
pub mod timeseries;

pub use error::{Error, Result};

//! Declarative experiment configurations, the compiled-in builtins, measured
//! reference values and the runner that ties them together.

pub mod builtin;
mod chain;
mod config;
mod reference;
mod run;

pub use chain::{Chain, ComponentSpec};
pub use config::{LoSelection, RunMode, ScenarioConfig, ThetaKeyword, ThetaSpec, THETA_SWEEP_STEP_DEG};
pub use reference::{
    ReferenceEntry, ReferenceTable, ANTISQUEEZED_TOL_DB, BEAT_TOL_DB, SQUEEZED_TOL_DB,
};
pub use run::{
    emit_reference, format_points, list_scenarios, run_scenario, run_scenario_with, summary_csv,
    sweep, with_rounds, Check, PointResult, ScenarioResult, ScenarioSpectrum, SweepRequest,
    SweepRow, SweepTable, MC_AGREEMENT_DB, SWEEP_PARAMETERS,
};

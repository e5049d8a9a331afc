//! Command-line front end.
//!
//! Exit codes: 0 when every reference check passes, 1 when at least one
//! fails, 2 for configuration and I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::scenarios::{
    builtin, emit_reference, format_points, list_scenarios, run_scenario, summary_csv, sweep,
    with_rounds, RunMode, ScenarioConfig, ScenarioResult, SweepRequest,
};
use crate::timeseries::write_csv;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_REFERENCE_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "squeezesim", version, about = "Frequency-shifted squeezed light simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    /// Override the scenario's evaluation mode.
    #[arg(long, value_enum)]
    pub mode: Option<RunMode>,
    /// Seed for Monte-Carlo acquisitions.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte-Carlo rounds.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Directory for output files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a builtin scenario, `all` builtins, or a TOML config file.
    Run {
        target: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Sweep one parameter of a scenario.
    Sweep {
        target: String,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        values: Vec<f64>,
        /// Pump power of the operating point (mW).
        #[arg(long)]
        pump: Option<f64>,
        /// Analysis frequency of the operating point (MHz).
        #[arg(long)]
        nu: Option<f64>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// List builtin scenarios.
    List,
    /// Print the reference table as CSV.
    Reference {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a builtin scenario as a TOML config file.
    Export { scenario: String },
}

/// Parses `args` and runs the command, writing reports to `stdout`.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG_ERROR
        }
    }
}

/// Resolves a builtin name or a config path.
pub fn load_target(target: &str) -> Result<ScenarioConfig> {
    if let Some(cfg) = builtin::get(target) {
        return Ok(cfg);
    }
    if Path::new(target).is_file() {
        return ScenarioConfig::load(target);
    }
    Err(Error::UnknownScenario(target.into()))
}

fn apply_flags(mut cfg: ScenarioConfig, flags: &RunFlags) -> ScenarioConfig {
    if let Some(m) = flags.mode {
        cfg.mode = m;
    }
    if let Some(s) = flags.seed {
        cfg.acquisition.rng_seed = s;
    }
    if let Some(r) = flags.rounds {
        cfg.acquisition = with_rounds(&cfg.acquisition, r);
    }
    cfg
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::List => {
            for (name, desc) in list_scenarios() {
                writeln!(stdout, "{name:<8} {desc}")?;
            }
            Ok(EXIT_PASS)
        }
        Command::Reference { out } => {
            let csv = emit_reference()?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    fs::write(dir.join("reference.csv"), csv)?;
                }
                None => stdout.write_all(csv.as_bytes())?,
            }
            Ok(EXIT_PASS)
        }
        Command::Export { scenario } => {
            let cfg = builtin::get(&scenario).ok_or(Error::UnknownScenario(scenario))?;
            stdout.write_all(cfg.to_toml()?.as_bytes())?;
            Ok(EXIT_PASS)
        }
        Command::Run { target, flags } => {
            let configs = if target == "all" {
                builtin::all()
            } else {
                vec![load_target(&target)?]
            };
            let mut results = Vec::new();
            for cfg in configs {
                let r = run_scenario(&apply_flags(cfg, &flags))?;
                writeln!(stdout, "# {} (overall efficiency {:.4})", r.scenario, r.total_efficiency)?;
                stdout.write_all(format_points(&r).as_bytes())?;
                if let Some(dir) = &flags.out {
                    write_result(&r, dir, flags.format)?;
                }
                results.push(r);
            }
            stdout.write_all(summary_csv(&results)?.as_bytes())?;
            let pass = results.iter().all(ScenarioResult::passed);
            Ok(if pass { EXIT_PASS } else { EXIT_REFERENCE_FAILURE })
        }
        Command::Sweep {
            target,
            param,
            values,
            pump,
            nu,
            flags,
        } => {
            let cfg = apply_flags(load_target(&target)?, &flags);
            let table = sweep(
                &cfg,
                &SweepRequest {
                    parameter: param.clone(),
                    values,
                    pump_mw: pump,
                    analysis_mhz: nu,
                },
            )?;
            let text = match flags.format {
                Format::Csv => table.to_csv()?,
                Format::Json => to_json(&table)?,
            };
            match &flags.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    let ext = extension(flags.format);
                    fs::write(dir.join(format!("{}_sweep_{param}.{ext}", cfg.name)), &text)?;
                }
                None => stdout.write_all(text.as_bytes())?,
            }
            Ok(EXIT_PASS)
        }
    }
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))
}

/// Writes the summary, the per-point table and one spectrum CSV per
/// Monte-Carlo acquisition into `dir`.
pub fn write_result(r: &ScenarioResult, dir: &Path, format: Format) -> Result<()> {
    fs::create_dir_all(dir)?;
    let ext = extension(format);
    let (summary, points) = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for p in &r.points {
                w.serialize(p)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            (r.summary_csv()?, String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?)
        }
        Format::Json => (to_json(&r.checks)?, to_json(r)?),
    };
    fs::write(dir.join(format!("{}_summary.{ext}", r.scenario)), summary)?;
    fs::write(dir.join(format!("{}_points.{ext}", r.scenario)), points)?;
    for s in &r.spectra {
        let name = format!(
            "{}_spectrum_p{}_theta{}.csv",
            r.scenario,
            s.pump_mw,
            s.theta_rad.to_degrees().round()
        );
        let f = fs::File::create(dir.join(name))?;
        write_csv(&s.spectrum, std::io::BufWriter::new(f))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let code = main_with_args(std::iter::once("squeezesim").chain(args.iter().copied()), &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn list_and_reference() {
        let (code, out) = run(&["list"]);
        assert_eq!(code, 0);
        assert!(out.contains("fig5a"));
        let (code, out) = run(&["reference"]);
        assert_eq!(code, 0);
        assert_eq!(out, emit_reference().unwrap());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["run", "fig4a"]).0, EXIT_PASS);
        assert_eq!(run(&["run", "no-such-scenario"]).0, EXIT_CONFIG_ERROR);
        assert_eq!(run(&["bogus"]).0, EXIT_CONFIG_ERROR);
        assert_eq!(run(&["sweep", "fig4a", "--param", "nope", "--values", "1"]).0, EXIT_CONFIG_ERROR);

        let dir = tempfile::tempdir().unwrap();
        let (_, toml) = run(&["export", "fig4a"]);
        let failing = toml.replace("efficiency = 0.888", "efficiency = 0.5");
        let path = dir.path().join("fig4a.toml");
        fs::write(&path, failing).unwrap();
        assert_eq!(run(&["run", path.to_str().unwrap()]).0, EXIT_REFERENCE_FAILURE);
    }

    #[test]
    fn writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (code, _) = run(&["run", "fig4a", "--out", d, "--format", "json"]);
        assert_eq!(code, 0);
        let summary = fs::read_to_string(dir.path().join("fig4a_summary.json")).unwrap();
        assert!(summary.contains("\"reference_db\""));
        let (code, _) = run(&["sweep", "fig4b", "--param", "pump_mw", "--values", "90,270", "--out", d]);
        assert_eq!(code, 0);
        let sweep = fs::read_to_string(dir.path().join("fig4b_sweep_pump_mw.csv")).unwrap();
        assert_eq!(sweep.lines().count(), 3);
    }
}

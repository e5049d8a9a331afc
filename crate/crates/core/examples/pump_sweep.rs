// Sweep pump power and detection efficiency on the shifted setup, starting
// from a config edited as TOML.

use squeezesim::scenarios::{builtin, sweep, ScenarioConfig, SweepRequest};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let text = builtin::get("fig5c").ok_or("missing builtin")?.to_toml()?;
    let cfg = ScenarioConfig::from_toml(&text.replace("name = \"fig5c\"", "name = \"fig5c-edited\""))?;

    let pumps = SweepRequest {
        parameter: "pump_mw".into(),
        values: (1..=9).map(|i| 90.0 * i as f64).collect(),
        pump_mw: None,
        analysis_mhz: None,
    };
    print!("{}", sweep(&cfg, &pumps)?.to_csv()?);

    let detector = SweepRequest {
        parameter: "hd_efficiency".into(),
        values: vec![0.6, 0.7, 0.8, 0.9, 1.0],
        pump_mw: Some(270.0),
        analysis_mhz: None,
    };
    print!("{}", sweep(&cfg, &detector)?.to_csv()?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

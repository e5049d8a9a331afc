// Run every builtin scenario analytically and print the comparison with
// the measured values.

use squeezesim::scenarios::{builtin, format_points, run_scenario, summary_csv};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut results = Vec::new();
    for cfg in builtin::all() {
        let r = run_scenario(&cfg)?;
        println!("# {}: {} (efficiency {:.4})", r.scenario, cfg.description, r.total_efficiency);
        print!("{}", format_points(&r));
        results.push(r);
    }
    print!("{}", summary_csv(&results)?);
    if results.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err("a reference check failed".into())
    }
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

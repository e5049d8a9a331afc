// Squeezed and antisqueezed noise of the OPO output versus analysis
// frequency, for the detected efficiency of the direct setup.

use squeezesim::homodyne::db;
use squeezesim::optics::{opo_variances, EfficiencyChain, OpoParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let eta = EfficiencyChain::from_values(&[0.934, 0.854, 0.888])?;
    let eta = squeezesim::optics::chain_efficiency(&eta)?;
    let opo = OpoParams::default().with_pump(450.0);
    println!("overall efficiency {eta:.4}");
    println!("nu_mhz,squeezed_db,antisqueezed_db");
    for nu in [0.0, 1.55, 5.0, 10.0, 15.6, 30.0, 60.0] {
        let (sq, anti) = opo_variances(&opo, nu, eta)?;
        println!("{nu},{:.3},{:.3}", db(sq)?, db(anti)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

// Homodyne noise versus LO phase for a lossy sideband pair, the squeezing
// parameter inferred from antisqueezing, and the noise of a lone sideband.

use squeezesim::gaussian::ModeLabel;
use squeezesim::homodyne::{
    asymmetric_beat_noise, asymmetric_beat_noise_with, db, hd_noise_power, r_from_antisqueezing,
    BeatReading, HdConfig,
};
use squeezesim::optics::{opo_sideband_state, OpoParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let pair = opo_sideband_state(&OpoParams::default().with_pump(450.0), ModeLabel::from_hz(1_550_000))?
        .apply_uniform_loss(0.854)?;
    println!("theta_deg,noise_db");
    for deg in (0..=180).step_by(15) {
        let cfg = HdConfig::new(ModeLabel::CARRIER, 1_550_000)
            .theta((deg as f64).to_radians())
            .delta_theta(6f64.to_radians())
            .efficiency(0.888);
        println!("{deg},{:.3}", hd_noise_power(&pair, &cfg)?.value_db);
    }

    let r = r_from_antisqueezing(10.02, 0.483)?;
    println!("r inferred from 10.02 dB antisqueezing at 48.3%: {r:.4}");
    let eta = 0.439;
    println!(
        "lone sideband at {eta}: physical {:.3} dB, printed formula {:.3} dB",
        db(asymmetric_beat_noise(r, eta)?)?,
        db(asymmetric_beat_noise_with(r, eta, BeatReading::AsPrinted)?)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

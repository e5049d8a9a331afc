// Synthesize photocurrent records for a Lorentzian squeezing spectrum, a
// shot-noise reference and an electronic floor, then calibrate and read the
// noise in a 100 kHz band.

use squeezesim::homodyne::db;
use squeezesim::optics::{opo_variances, OpoParams};
use squeezesim::timeseries::{acquire, band_power, calibrate, AcquisitionParams, NoiseModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let acq = AcquisitionParams {
        samples_per_round: 10_000,
        rounds: 500,
        ..AcquisitionParams::default()
    };
    let floor = 0.1;
    let opo = OpoParams::default().with_pump(450.0);
    let model = NoiseModel::from_fn(move |f| opo_variances(&opo, f, 0.708).map(|v| v.0).unwrap_or(1.0))
        .with_floor(floor);
    let signal = acquire(&model, &acq.with_seed(1))?;
    let snl = acquire(&NoiseModel::flat(1.0).with_floor(floor), &acq.with_seed(2))?;
    let electronic = acquire(&NoiseModel::flat(0.0).with_floor(floor), &acq.with_seed(3))?;
    let corrected = calibrate(&signal, &snl, &electronic, Some(acq.band()))?;

    let expected = opo_variances(&OpoParams::default().with_pump(450.0), 1.55, 0.708)?.0;
    let bp = band_power(&corrected, 1.55, 0.1)?;
    println!(
        "band at 1.55 MHz: {:.3} dB (+- {:.3} linear, {} bins), analytic {:.3} dB",
        db(bp.value)?,
        bp.stderr,
        bp.bins,
        db(expected)?
    );
    let mut csv = Vec::new();
    squeezesim::timeseries::write_csv(&corrected, &mut csv)?;
    println!("{}", String::from_utf8(csv)?.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

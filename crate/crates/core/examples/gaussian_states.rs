// Build a two-mode squeezed vacuum, push it through a beam splitter and a
// loss channel, and inspect symplectic eigenvalues and purity.

use squeezesim::gaussian::{GaussianState, ModeLabel, SymplecticOp};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = ModeLabel::from_hz(-1_550_000);
    let b = ModeLabel::from_hz(1_550_000);
    let vac = GaussianState::vacuum(&[a, b])?;
    let tms = vac.apply_symplectic(&SymplecticOp::two_mode_squeezer(a, b, 0.8)?)?;
    println!("two-mode squeezed: purity {:.6}, nu_min {:.6}", tms.purity(), tms.min_symplectic_eigenvalue());

    let mixed = tms.apply_symplectic(&SymplecticOp::beam_splitter(a, b, std::f64::consts::FRAC_PI_4)?)?;
    for m in [a, b] {
        println!(
            "after 50:50 on {m}: Var X = {:.4}, Var P = {:.4}",
            mixed.quadrature_variance(m, 0.0)?,
            mixed.quadrature_variance(m, std::f64::consts::FRAC_PI_2)?
        );
    }

    let lossy = mixed.apply_uniform_loss(0.7)?;
    println!(
        "after 70% transmission: purity {:.4}, symplectic eigenvalues {:?}",
        lossy.purity(),
        lossy.symplectic_eigenvalues()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

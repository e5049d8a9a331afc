// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squeezesim::gaussian::{
    passive_symplectic, symplectic_defect, GaussianState, ModeLabel, UNCERTAINTY_SLACK,
};
use squeezesim::homodyne::{
    asymmetric_beat_noise_with, db, r_from_antisqueezing, variance_from_r, BeatReading, Branch,
};
use squeezesim::optics::{
    abi_unitary, chain_efficiency, opo_variances, AbiParams, EfficiencyChain, OpoParams,
};
use squeezesim::scenarios::{
    builtin, run_scenario, Chain, ComponentSpec, RunMode, ScenarioConfig, ScenarioResult,
    MC_AGREEMENT_DB,
};

struct Gate {
    failed: usize,
}

impl Gate {
    fn report(&mut self, id: u32, title: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {id} {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn analytic(name: &str) -> ScenarioResult {
    run_scenario(&builtin::get(name).unwrap()).unwrap()
}

fn monte_carlo(name: &str) -> ScenarioResult {
    let mut cfg = builtin::get(name).unwrap();
    cfg.mode = RunMode::Both;
    run_scenario(&cfg).unwrap()
}

fn criterion_1(g: &mut Gate) {
    let r = analytic("fig4a");
    let sq = r.point(450.0, 0.0, 1.55).unwrap().analytic_db;
    let anti = r.point(450.0, FRAC_PI_2, 1.55).unwrap().analytic_db;
    g.report(
        1,
        "fig4a reproduction",
        within(r.total_efficiency, 0.708, 0.001) && within(anti, 11.64, 0.2) && within(sq, -3.02, 0.35),
        format!(
            "eta {:.4}, antisqueezing {anti:.3} dB (11.64 +- 0.2), squeezing {sq:.3} dB (-3.02 +- 0.35)",
            r.total_efficiency
        ),
    );
}

fn criterion_2(g: &mut Gate) {
    let r = analytic("fig4b");
    let sq = r.point(270.0, 0.0, 1.55).unwrap().analytic_db;
    g.report(2, "fig4b optimum", (-3.8..=-3.2).contains(&sq), format!("squeezing at 270 mW {sq:.3} dB in [-3.8, -3.2]"));
}

fn criterion_3(g: &mut Gate) {
    // Shifted chain with the detector efficiency chosen so the overall
    // efficiency is exactly 0.483.
    let mut cfg: ScenarioConfig = builtin::get("fig5c").unwrap();
    let rest: f64 = cfg
        .chain
        .iter()
        .filter(|c| !matches!(c, ComponentSpec::Homodyne { .. }))
        .map(|c| match c {
            ComponentSpec::Opo(o) => o.escape_efficiency,
            ComponentSpec::Loss { efficiency, .. } => *efficiency,
            ComponentSpec::Abi(a) => a.efficiency().unwrap(),
            _ => 1.0,
        })
        .product();
    for c in cfg.chain.iter_mut() {
        if let ComponentSpec::Homodyne { efficiency } = c {
            *efficiency = 0.483 / rest;
        }
    }
    let r = run_scenario(&cfg).unwrap();
    let sq450 = r.point(450.0, 0.0, 1.55).unwrap().analytic_db;
    let anti450 = r.point(450.0, FRAC_PI_2, 1.55).unwrap().analytic_db;
    let sq270 = r.point(270.0, 0.0, 1.55).unwrap().analytic_db;
    g.report(
        3,
        "fig5b/fig5c reproduction at eta 0.483",
        within(r.total_efficiency, 0.483, 1e-12)
            && within(sq450, -1.66, 0.35)
            && within(anti450, 10.02, 0.2)
            && within(sq270, -1.98, 0.35),
        format!(
            "450 mW squeezing {sq450:.3} dB (-1.66 +- 0.35), antisqueezing {anti450:.3} dB (10.02 +- 0.2); \
             270 mW squeezing {sq270:.3} dB (-1.98 +- 0.35)"
        ),
    );
}

fn criterion_4(g: &mut Gate) {
    let r = r_from_antisqueezing(10.02, 0.483).unwrap();
    g.report(4, "squeezing parameter inversion", within(r, 1.49, 0.01), format!("r = {r:.4} (1.49 +- 0.01)"));
}

fn criterion_5(g: &mut Gate, fig5a: &ScenarioResult) {
    let printed = db(asymmetric_beat_noise_with(1.49, 0.439, BeatReading::AsPrinted).unwrap()).unwrap();
    // The theory point is the single-sideband variance at r = 1.49, eta = 0.439,
    // split evenly over the two sidebands.
    let lone = variance_from_r(1.49, 0.439, Branch::Antisqueezed).unwrap()
        + variance_from_r(1.49, 0.439, Branch::Squeezed).unwrap();
    let theory = db(0.25 * lone).unwrap();
    let mc = |theta: f64, nu: f64| fig5a.point(450.0, theta, nu).unwrap().montecarlo_db.unwrap();
    let (lo0, hi0) = (mc(0.0, 78.45), mc(0.0, 81.55));
    let (lo90, hi90) = (mc(FRAC_PI_2, 78.45), mc(FRAC_PI_2, 81.55));
    g.report(
        5,
        "beat-note prediction",
        within(printed, theory, 1e-9)
            && within(printed, 4.34, 0.5)
            && within(lo0, hi0, 0.1)
            && within(lo0, lo90, 0.05)
            && within(hi0, hi90, 0.05),
        format!(
            "formula {printed:.3} dB (sideband average {theory:.3} dB, measured 4.34 +- 0.5); \
             Monte-Carlo 78.45/81.55 MHz {lo0:.3}/{hi0:.3} dB at theta 0, {lo90:.3}/{hi90:.3} dB at pi/2"
        ),
    );
}

fn criterion_6(g: &mut Gate) {
    let budgets = [
        (0.708, vec![0.934, 0.854, 0.888]),
        (0.483, vec![0.713, 0.91, 0.841, 0.888]),
        (0.439, vec![0.713, 0.91, 0.841, 0.806]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (target, factors) in budgets {
        let eta = chain_efficiency(&EfficiencyChain::from_values(&factors).unwrap()).unwrap();
        let pass = within(eta, target, 0.001);
        ok &= pass;
        parts.push(format!("{eta:.5} vs {target} {}", if pass { "ok" } else { "off" }));
    }
    g.report(6, "efficiency budgets (+- 0.001)", ok, parts.join(", "));
}

fn criterion_7(g: &mut Gate, results: &[ScenarioResult]) {
    let mut worst = (0.0f64, String::new());
    let mut ok = true;
    for r in results {
        for p in &r.points {
            let gap = (p.montecarlo_db.unwrap() - p.analytic_db).abs();
            ok &= gap <= MC_AGREEMENT_DB;
            if gap > worst.0 {
                worst = (gap, format!("{} P={} theta={:.3} nu={}", r.scenario, p.pump_mw, p.theta_rad, p.analysis_mhz));
            }
        }
    }
    let points: usize = results.iter().map(|r| r.points.len()).sum();
    g.report(
        7,
        "Monte-Carlo vs analytic",
        ok,
        format!("{points} points over {} scenarios, worst gap {:.4} dB at {} (limit {MC_AGREEMENT_DB})", results.len(), worst.0, worst.1),
    );
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .qr()
        .q()
}

fn random_symplectic(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let squeeze = DMatrix::from_diagonal(&DVector::from_iterator(
        6,
        (0..3).flat_map(|_| {
            let r: f64 = rng.random_range(0.0..1.0);
            [(-r).exp(), r.exp()]
        }).collect::<Vec<_>>(),
    ));
    passive_symplectic(&random_unitary(rng, 3)) * squeeze * passive_symplectic(&random_unitary(rng, 3))
}

fn random_chain(rng: &mut ChaCha8Rng) -> Vec<ComponentSpec> {
    let mut chain = vec![ComponentSpec::Opo(OpoParams {
        escape_efficiency: rng.random_range(0.0..=1.0),
        ..OpoParams::default()
    })];
    for _ in 0..rng.random_range(0..5) {
        chain.push(match rng.random_range(0..3) {
            0 => ComponentSpec::Loss {
                label: "loss".into(),
                efficiency: rng.random_range(0.0..=1.0),
            },
            1 => ComponentSpec::Abi(AbiParams {
                phase_rad: rng.random_range(0.0..2.0 * PI),
                zeta: rng.random_range(0.0..=1.0),
                visibility: rng.random_range(0.0..=1.0),
                shift_mhz: rng.random_range(1..120) as f64,
                ..AbiParams::default()
            }),
            _ => {
                let a: f64 = rng.random_range(0.0..FRAC_PI_2);
                let mhz = rng.random_range(1..120) as f64;
                ComponentSpec::Aom {
                    t: a.cos(),
                    r: a.sin(),
                    shift_mhz: if rng.random_bool(0.5) { mhz } else { -mhz },
                }
            }
        });
    }
    chain.push(ComponentSpec::Homodyne {
        efficiency: rng.random_range(0.0..=1.0),
    });
    chain
}

fn criterion_8(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();

    let mut min_nu = f64::INFINITY;
    for _ in 0..1000 {
        let chain = Chain::new(&random_chain(&mut rng)).unwrap();
        let pump = rng.random_range(0.0..970.0);
        let nu = rng.random_range(0..5_000) * 10_000;
        min_nu = min_nu.min(chain.output_pair(pump, nu).unwrap().min_symplectic_eigenvalue());
    }
    if min_nu < 1.0 - UNCERTAINTY_SLACK {
        failures.push(format!("chain min symplectic eigenvalue {min_nu}"));
    }

    let worst_defect = (0..1000).map(|_| symplectic_defect(&random_symplectic(&mut rng))).fold(0.0, f64::max);
    if worst_defect > 1e-12 {
        failures.push(format!("symplectic defect {worst_defect:e}"));
    }

    let worst_purity = (0..100)
        .map(|i| {
            let p = OpoParams::default().with_pump(979.0 * i as f64 / 100.0);
            let (s, a) = opo_variances(&p, 0.0, 1.0).unwrap();
            (s * a - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if worst_purity > 1e-9 {
        failures.push(format!("OPO purity product off by {worst_purity:e}"));
    }

    let one = Complex64::new(1.0, 0.0);
    let worst_abi = (0..100)
        .map(|_| {
            let phase = rng.random_range(0.0..2.0 * PI);
            let u = abi_unitary(&AbiParams {
                phase_rad: phase,
                ..AbiParams::default()
            })
            .unwrap();
            let e = Complex64::from_polar(1.0, phase);
            let want = [[one - e, one + e], [-one - e, e - one]];
            (0..4).map(|k| (u[(k / 2, k % 2)] - 0.5 * want[k / 2][k % 2]).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    if worst_abi > 1e-12 {
        failures.push(format!("ABI product deviates by {worst_abi:e}"));
    }

    let modes = [-2_000_000, 0, 5_000_000].map(ModeLabel::from_hz).to_vec();
    let worst_loss = (0..100)
        .map(|_| {
            let s = random_symplectic(&mut rng);
            let cov = &s * s.transpose();
            let state = GaussianState::new(modes.clone(), 0.5 * (&cov + cov.transpose())).unwrap();
            let (a, b): (f64, f64) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
            let twice = state.apply_loss(modes[1], a).unwrap().apply_loss(modes[1], b).unwrap();
            let once = state.apply_loss(modes[1], a * b).unwrap();
            (twice.cov() - once.cov()).abs().max()
        })
        .fold(0.0, f64::max);
    if worst_loss > 1e-12 {
        failures.push(format!("loss composition off by {worst_loss:e}"));
    }

    let worst_r = (0..=300)
        .map(|i| {
            let r = 3.0 * i as f64 / 300.0;
            let eta = rng.random_range(0.05..=1.0);
            let anti = db(variance_from_r(r, eta, Branch::Antisqueezed).unwrap()).unwrap();
            (r_from_antisqueezing(anti, eta).unwrap() - r).abs()
        })
        .fold(0.0, f64::max);
    if worst_r > 1e-9 {
        failures.push(format!("r round trip off by {worst_r:e}"));
    }

    g.report(
        8,
        "property suites",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "min chain eigenvalue {min_nu:.12}, defect {worst_defect:.1e}, purity {worst_purity:.1e}, \
                 ABI {worst_abi:.1e}, loss {worst_loss:.1e}, r {worst_r:.1e}"
            )
        } else {
            failures.join("; ")
        },
    );
}

fn main() -> ExitCode {
    let mut g = Gate { failed: 0 };
    criterion_1(&mut g);
    criterion_2(&mut g);
    criterion_3(&mut g);
    criterion_4(&mut g);
    let mc: Vec<ScenarioResult> = builtin::names().iter().map(|n| monte_carlo(n)).collect();
    let fig5a = mc.iter().find(|r| r.scenario == "fig5a").unwrap();
    criterion_5(&mut g, fig5a);
    criterion_6(&mut g);
    criterion_7(&mut g, &mc);
    criterion_8(&mut g);
    println!("{} of 8 criteria passed", 8 - g.failed);
    if g.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

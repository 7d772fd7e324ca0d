//! Standard and alternative intervals side by side in the scenario with
//! larger error variances, where the alternative inner bound is sharper.

use wc4dvar::harness::{analyse, run_twin, ExperimentConfig, Instance};
use wc4dvar::operators::Formulation;

fn main() -> wc4dvar::Result<()> {
    let cfg = ExperimentConfig::default().alt_scenario();
    println!(
        "sigma_b = {}, sigma_o = {}, network {}",
        cfg.covariance.sigma_b, cfg.covariance.sigma_o, cfg.network
    );
    let twin = run_twin(&cfg)?;
    let a = analyse(&Instance::from_config(&cfg, &twin)?, cfg.eigensolver, true)?;
    if let Some(inputs) = &a.alternative_inputs {
        println!("{inputs:?}");
    }
    for f in [Formulation::A3, Formulation::A2] {
        let spec = a.spectrum(f);
        let (neg, pos) = (spec.negative(), spec.positive());
        println!(
            "{f} {:<11} [{:.3e}, {:.3e}] u [{:.3e}, {:.3e}]",
            "eigenvalues",
            neg[0],
            neg[neg.len() - 1],
            pos[0],
            pos[pos.len() - 1]
        );
        for b in [Some(a.bounds(f)), a.alternative_bounds(f)].into_iter().flatten() {
            let n = b.negative.expect("saddle point bounds have a negative part");
            println!(
                "{f} {:<11} [{:.3e}, {:.3e}] u [{:.3e}, {:.3e}]",
                format!("{:?}", b.kind),
                n.lo,
                n.hi,
                b.positive.lo,
                b.positive.hi
            );
        }
    }
    Ok(())
}

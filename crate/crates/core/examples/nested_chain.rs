//! Add observations one at a time on a small problem and check how every
//! spectrum and bound moves.

use wc4dvar::bounds::monotonicity_report;
use wc4dvar::harness::artifacts::chain_steps;
use wc4dvar::harness::{run_twin, single_observation_chain, ExperimentConfig};
use wc4dvar::operators::ObservationNetwork;

fn main() -> wc4dvar::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.model.n = 8;
    cfg.model.steps = 3;
    cfg.model.spinup_steps = 500;
    let twin = run_twin(&cfg)?;
    let (n, steps) = (cfg.model.n, cfg.model.steps);
    let start = ObservationNetwork::from_pairs(n, steps, [(steps, 0)])?;
    let chain = single_observation_chain(&start, &ObservationNetwork::full(n, steps))?;
    let measured = chain_steps(&cfg, &twin, &chain, cfg.eigensolver)?;
    for step in measured.iter().step_by(8) {
        println!(
            "p = {:>2}: A3 [{:.4}, {:.4}], A1 min {:.4}",
            step.network.p(),
            step.a3.min(),
            step.a3.max(),
            step.a1.min()
        );
    }
    let report = monotonicity_report(&measured)?;
    for v in &report.verdicts {
        println!("{:<24} {:?} ({} checked, {} skipped)", format!("{:?}", v.claim), v.status, v.checked, v.skipped);
    }
    Ok(())
}

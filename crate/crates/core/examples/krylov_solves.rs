//! MINRES on the saddle point systems and CG on `A1`, with residual
//! histories written as CSV.

use wc4dvar::harness::artifacts::write_residuals;
use wc4dvar::harness::{run_twin, ExperimentConfig, Instance};
use wc4dvar::operators::Formulation;

fn main() -> wc4dvar::Result<()> {
    let cfg = ExperimentConfig::default();
    let twin = run_twin(&cfg)?;
    let out = std::env::temp_dir().join("wc4dvar-krylov");
    for id in ["c", "f"] {
        let inst = Instance::named(&cfg, &twin, id)?;
        for f in Formulation::ALL {
            let (_, log) = inst.solve(f, &cfg.solver)?;
            let path = write_residuals(&out, f, id, &log)?;
            println!(
                "{id} {f} {:>6}: {:>3} iterations, relres {:.2e}, converged {:<5} -> {}",
                log.solver,
                log.iterations,
                log.final_residual(),
                log.converged,
                path.display()
            );
        }
    }
    Ok(())
}

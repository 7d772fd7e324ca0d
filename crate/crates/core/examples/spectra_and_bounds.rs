//! Extreme eigen/singular values of the blocks, the closed-form intervals,
//! and the dense spectra they must contain.

use wc4dvar::bounds::individual_bounds_a3;
use wc4dvar::harness::{analyse, run_twin, ExperimentConfig, Instance};
use wc4dvar::operators::Formulation;

fn main() -> wc4dvar::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "c".into());
    let cfg = ExperimentConfig::default();
    let twin = run_twin(&cfg)?;
    let inst = Instance::named(&cfg, &twin, &id)?;
    let a = analyse(&inst, cfg.eigensolver, false)?;
    let s = &a.summary;
    println!("network {id}: s = {}, p = {}", a.s, a.p);
    println!("  psi   [{:.4e}, {:.4e}]", s.psi_min, s.psi_max);
    println!("  rho   [{:.4e}, {:.4e}]", s.rho_min, s.rho_max);
    println!("  nu    [{:.4e}, {:.4e}]", s.nu_min, s.nu_max);
    println!("  theta [{:.4e}, {:.4e}]", s.theta_min, s.theta_max);
    println!("  sigma [{:.4e}, {:.4e}]", s.sigma_min, s.sigma_max);

    for f in Formulation::ALL {
        let b = a.bounds(f);
        let spec = a.spectrum(f);
        let neg = spec.negative();
        let pos = spec.positive();
        if let Some(i) = b.negative {
            println!(
                "{f} I- [{:.4e}, {:.4e}]  eigenvalues [{:.4e}, {:.4e}]",
                i.lo,
                i.hi,
                neg[0],
                neg[neg.len() - 1]
            );
        }
        println!(
            "{f} I+ [{:.4e}, {:.4e}]  eigenvalues [{:.4e}, {:.4e}]  contained: {:?}",
            b.positive.lo,
            b.positive.hi,
            pos[0],
            pos[pos.len() - 1],
            b.is_contained()
        );
    }

    let bands = individual_bounds_a3(s, &inst.ops.d().eigenvalues(), &inst.ops.r().eigenvalues());
    let outside = bands.violations(a.spectrum(Formulation::A3))?;
    println!("A3 individual bands: {} of {} eigenvalues outside", outside.len(), bands.bands.len());
    Ok(())
}

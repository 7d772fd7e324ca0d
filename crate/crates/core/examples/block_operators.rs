//! Matrix-free `A3`, `A2` and `A1` on one network: apply them, compare with
//! the dense assembly, and recover the increment from a direct solve.

use wc4dvar::harness::{run_twin, ExperimentConfig, Instance};
use wc4dvar::krylov::LinearOperator;
use wc4dvar::operators::{assemble_dense, make_system, recover_increment, Formulation};

fn main() -> wc4dvar::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.model.steps = 5;
    cfg.model.spinup_steps = 500;
    let twin = run_twin(&cfg)?;
    let inst = Instance::named(&cfg, &twin, "c")?;
    let ops = &inst.ops;
    println!("n = {}, N = {}, s = {}, p = {}", ops.n(), ops.steps(), ops.s(), ops.p());

    for f in Formulation::ALL {
        let system = make_system(ops, f, &inst.b, &inst.d)?;
        let dense = assemble_dense(ops, f)?;
        let x: Vec<f64> = (0..system.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = vec![0.0; system.dim()];
        system.apply(&x, &mut y);
        let mut z = vec![0.0; system.dim()];
        dense.apply(&x, &mut z);
        let gap = y.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

        let sol = dense
            .clone()
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(system.rhs()))
            .expect("nonsingular");
        let inc = recover_increment(&system, sol.as_slice())?;
        println!(
            "{f}: dim {:>4}, matvec vs dense {gap:.1e}, |dx| = {:.6}, optimality residual {:.1e}",
            system.dim(),
            inc.dx.iter().map(|v| v * v).sum::<f64>().sqrt(),
            inc.optimality_residual / inc.optimality_scale,
        );
    }
    Ok(())
}

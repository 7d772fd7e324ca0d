//! Integrate Lorenz 96, then check the tangent linear model against finite
//! differences and its adjoint against the inner-product identity.

use wc4dvar::lorenz96::{adjoint_mismatch, integrate, spin_up, taylor_errors, ModelConfig};
use wc4dvar::rng;

fn main() -> wc4dvar::Result<()> {
    let cfg = ModelConfig::default();
    let x0: Vec<f64> = (0..cfg.n).map(|i| cfg.forcing + if i == 0 { 0.01 } else { 0.0 }).collect();
    let x0 = spin_up(&x0, &cfg, 1000)?;
    let traj = integrate(&x0, &cfg, None)?;
    println!("n = {}, steps = {}, |x_N| = {:.3}", cfg.n, cfg.steps, norm(traj.state(cfg.steps)));

    let dx = rng::standard_normals(&mut rng::seeded(3), cfg.n);
    let eps = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    println!("{:>8}  {:>12}", "eps", "rel. error");
    for (e, err) in eps.iter().zip(taylor_errors(&x0, &dx, &cfg, &eps)?) {
        println!("{e:>8.0e}  {err:>12.3e}");
    }

    println!("adjoint mismatch over 20 pairs per step: {:.2e}", adjoint_mismatch(&traj, 20, 5));
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

//! SOAR background covariance, the block diagonal `D` and `R`, and sampling
//! from them.

use wc4dvar::covariance::{build_d, build_r, soar_matrix, BlockDiagCovariance, CovarianceSpec};
use wc4dvar::harness::build_network;
use wc4dvar::rng;

fn main() -> wc4dvar::Result<()> {
    let spec = CovarianceSpec::for_grid(40);
    println!("{spec:?}");
    let b = soar_matrix(40, &spec)?;
    println!("B[0, 0..4] = {:.3e} {:.3e} {:.3e} {:.3e}", b[(0, 0)], b[(0, 1)], b[(0, 2)], b[(0, 3)]);

    let d = build_d(&b, &b, 15)?;
    let (psi_min, psi_max) = d.extremes();
    println!("D: dim {}, psi in [{psi_min:.4e}, {psi_max:.4e}]", d.dim());

    let net = build_network("c", 40, 15)?;
    let r = build_r(&net, spec.sigma_o)?;
    println!("R: dim {}, diagonal {}, rho = {:?}", r.dim(), r.is_diagonal(), r.extremes());

    let b_cov = BlockDiagCovariance::from_blocks(vec![b.clone()])?;
    let mut g = rng::seeded(42);
    let draws: Vec<Vec<f64>> = (0..2000).map(|_| b_cov.sample(&mut g)).collect();
    let var0 = draws.iter().map(|x| x[0] * x[0]).sum::<f64>() / draws.len() as f64;
    println!("sample variance of component 0: {var0:.4e} (exact {:.4e})", b[(0, 0)]);
    Ok(())
}

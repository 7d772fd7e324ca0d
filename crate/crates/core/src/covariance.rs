//! Background, model-error and observation-error covariances.
//!
//! `B` and `Q_i` are SOAR correlation matrices on the periodic unit domain
//! scaled by `sigma_b^2`; `R_i = sigma_o^2 I`. The four-dimensional
//! matrices `D = blockdiag(B, Q_1, .., Q_N)` and `R = blockdiag(R_0, .., R_N)`
//! are kept as lists of SPD blocks with cached Cholesky factors.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::operators::ObservationNetwork;
use crate::rng::{self, Rng};
use crate::spectral;

/// Error statistics of the twin experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    /// Background (and model-error) standard deviation.
    pub sigma_b: f64,
    /// SOAR correlation length on the unit periodic domain.
    pub length_scale: f64,
    /// Observation error standard deviation.
    pub sigma_o: f64,
    /// Grid spacing, `1 / n`.
    pub dx: f64,
}

impl CovarianceSpec {
    /// Defaults of the Lorenz 96 experiments for an `n`-variable ring.
    pub fn for_grid(n: usize) -> Self {
        Self {
            sigma_b: 5e-2,
            length_scale: 1.5e-2,
            sigma_o: 1e-1,
            dx: 1.0 / n as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_b", self.sigma_b),
            ("length_scale", self.length_scale),
            ("sigma_o", self.sigma_o),
            ("dx", self.dx),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// SOAR correlation `(1 + d / L) exp(-d / L)`.
pub fn soar_correlation(distance: f64, length_scale: f64) -> f64 {
    let r = distance / length_scale;
    (1.0 + r) * (-r).exp()
}

/// Arc distance between grid points `i` and `j` on a ring of `n` points.
pub fn periodic_distance(i: usize, j: usize, n: usize, dx: f64) -> f64 {
    let k = i.abs_diff(j);
    k.min(n - k) as f64 * dx
}

/// `B = sigma_b^2 C_b` with `C_b` the circulant SOAR correlation matrix.
pub fn soar_matrix(n: usize, spec: &CovarianceSpec) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::Config(format!("SOAR matrix needs n >= 2, got {n}")));
    }
    spec.validate()?;
    let var = spec.sigma_b * spec.sigma_b;
    let b = DMatrix::from_fn(n, n, |i, j| {
        var * soar_correlation(periodic_distance(i, j, n, spec.dx), spec.length_scale)
    });
    SpdBlock::new(b.clone(), "SOAR background covariance")?;
    Ok(b)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// One symmetric positive definite block and its Cholesky factor.
#[derive(Debug, Clone)]
pub struct SpdBlock {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    diagonal: bool,
}

impl SpdBlock {
    pub fn new(matrix: DMatrix<f64>, context: &str) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Config(format!("{context}: block is not square")));
        }
        let scale = max_abs(&matrix);
        let asym = max_abs(&(&matrix - matrix.transpose()));
        if asym > 1e-14 * scale {
            return Err(Error::NotSymmetric {
                asymmetry: asym,
                allowed: 1e-14 * scale,
            });
        }
        let n = matrix.nrows();
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || matrix[(i, j)] == 0.0));
        match Cholesky::new(matrix.clone()) {
            Some(chol) => Ok(Self {
                matrix,
                chol,
                diagonal,
            }),
            None => {
                let smallest = spectral::sym_eig(&matrix)
                    .map(|s| s.min())
                    .unwrap_or(f64::NAN);
                Err(Error::NotSpd {
                    context: context.to_string(),
                    smallest_eigenvalue: smallest,
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Lower Cholesky factor `G` with `G G^T = block`.
    pub fn factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.diagonal {
            let mut d: Vec<f64> = self.matrix.diagonal().iter().copied().collect();
            d.sort_by(f64::total_cmp);
            d
        } else {
            spectral::sym_eig(&self.matrix)
                .expect("SPD block is symmetric")
                .values()
                .to_vec()
        }
    }
}

/// A block diagonal SPD matrix (`D` or `R`).
#[derive(Debug, Clone)]
pub struct BlockDiagCovariance {
    blocks: Vec<SpdBlock>,
    offsets: Vec<usize>,
    dim: usize,
}

impl BlockDiagCovariance {
    /// Checks symmetry and positive definiteness of every block.
    pub fn from_blocks(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(i, b)| SpdBlock::new(b, &format!("covariance block {i}")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_spd(blocks))
    }

    fn from_spd(blocks: Vec<SpdBlock>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0;
        for b in &blocks {
            offsets.push(acc);
            acc += b.dim();
        }
        offsets.push(acc);
        Self {
            blocks,
            offsets,
            dim: acc,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[SpdBlock] {
        &self.blocks
    }

    pub fn is_diagonal(&self) -> bool {
        self.blocks.iter().all(SpdBlock::is_diagonal)
    }

    fn for_each_block(&self, v: &[f64], mut f: impl FnMut(&SpdBlock, DVector<f64>) -> DVector<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (k, block) in self.blocks.iter().enumerate() {
            let (lo, hi) = (self.offsets[k], self.offsets[k + 1]);
            let y = f(block, DVector::from_column_slice(&v[lo..hi]));
            out[lo..hi].copy_from_slice(y.as_slice());
        }
        out
    }

    /// `C v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("covariance apply", self.dim, v.len())?;
        Ok(self.for_each_block(v, |b, x| &b.matrix * x))
    }

    /// `C^{-1} v` through the cached Cholesky factors.
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("covariance solve", self.dim, v.len())?;
        Ok(self.for_each_block(v, |b, x| b.chol.solve(&x)))
    }

    /// `G v` with `G` the block lower Cholesky factor.
    pub fn factor_apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("covariance factor apply", self.dim, v.len())?;
        Ok(self.for_each_block(v, |b, x| b.chol.l() * x))
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (k, block) in self.blocks.iter().enumerate() {
            let lo = self.offsets[k];
            let d = block.dim();
            m.view_mut((lo, lo), (d, d)).copy_from(&block.matrix);
        }
        m
    }

    /// Dense inverse, symmetrised.
    pub fn dense_inverse(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (k, block) in self.blocks.iter().enumerate() {
            let lo = self.offsets[k];
            let d = block.dim();
            let inv = block.chol.inverse();
            let sym = (&inv + inv.transpose()) * 0.5;
            m.view_mut((lo, lo), (d, d)).copy_from(&sym);
        }
        m
    }

    /// `C^{-1} M` for a dense `M` with `dim` rows.
    pub fn solve_matrix(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        check_len("covariance solve_matrix", self.dim, rhs.nrows())?;
        let mut out = rhs.clone();
        for (k, block) in self.blocks.iter().enumerate() {
            let lo = self.offsets[k];
            let d = block.dim();
            let panel = rhs.rows(lo, d).into_owned();
            out.rows_mut(lo, d).copy_from(&block.chol.solve(&panel));
        }
        Ok(out)
    }

    /// Sorted union of the block spectra.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.blocks.iter().flat_map(SpdBlock::eigenvalues).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// `(lambda_min, lambda_max)`.
    pub fn extremes(&self) -> (f64, f64) {
        let eig = self.eigenvalues();
        (eig[0], eig[eig.len() - 1])
    }

    /// `G z` with `z` standard normal drawn from `rng`.
    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        let z = rng::standard_normals(rng, self.dim);
        self.factor_apply(&z).expect("length matches")
    }
}

/// `D = blockdiag(B, Q, .., Q)` with `steps` copies of `Q`.
pub fn build_d(b: &DMatrix<f64>, q: &DMatrix<f64>, steps: usize) -> Result<BlockDiagCovariance> {
    if b.shape() != q.shape() {
        return Err(Error::Dimension {
            context: "build_d: B and Q shapes",
            expected: b.nrows(),
            got: q.nrows(),
        });
    }
    let b_block = SpdBlock::new(b.clone(), "background covariance B")?;
    let q_block = SpdBlock::new(q.clone(), "model error covariance Q")?;
    let mut blocks = Vec::with_capacity(steps + 1);
    blocks.push(b_block);
    blocks.extend(std::iter::repeat_n(q_block, steps));
    Ok(BlockDiagCovariance::from_spd(blocks))
}

/// `R = blockdiag(R_i)` with `R_i = sigma_o^2 I_{p_i}`; time steps without
/// observations contribute no block.
pub fn build_r(network: &ObservationNetwork, sigma_o: f64) -> Result<BlockDiagCovariance> {
    if !(sigma_o.is_finite() && sigma_o > 0.0) {
        return Err(Error::Config(format!("sigma_o must be strictly positive, got {sigma_o}")));
    }
    if network.p() == 0 {
        return Err(Error::EmptyObservations);
    }
    let var = sigma_o * sigma_o;
    let blocks = (0..=network.steps())
        .map(|t| network.p_at(t))
        .filter(|&p| p > 0)
        .map(|p| SpdBlock::new(DMatrix::from_diagonal_element(p, p, var), "observation covariance"))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDiagCovariance::from_spd(blocks))
}

/// One draw from `N(0, cov)` using a generator seeded with `seed`.
pub fn sample_gaussian(cov: &BlockDiagCovariance, seed: u64) -> Vec<f64> {
    cov.sample(&mut rng::seeded(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soar_is_unit_diagonal_and_circulant() {
        let spec = CovarianceSpec {
            sigma_b: 1.0,
            ..CovarianceSpec::for_grid(40)
        };
        let c = soar_matrix(40, &spec).unwrap();
        for i in 0..40 {
            assert_eq!(c[(i, i)], 1.0);
            for j in 0..40 {
                assert_eq!(c[(i, j)], c[(j, i)]);
                assert_eq!(c[(i, j)], c[((i + 1) % 40, (j + 1) % 40)]);
            }
        }
    }

    #[test]
    fn identity_blocks_give_identity_d() {
        let eye = DMatrix::<f64>::identity(3, 3);
        let d = build_d(&eye, &eye, 2).unwrap();
        assert_eq!(d.dim(), 9);
        assert_eq!(d.dense(), DMatrix::identity(9, 9));
        let d0 = build_d(&eye, &eye, 0).unwrap();
        assert_eq!(d0.dense(), eye);
    }

    #[test]
    fn build_d_rejects_mismatched_blocks() {
        let b = DMatrix::<f64>::identity(3, 3);
        let q = DMatrix::<f64>::identity(4, 4);
        assert!(matches!(build_d(&b, &q, 2), Err(Error::Dimension { .. })));
    }

    #[test]
    fn not_spd_reports_smallest_eigenvalue() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match BlockDiagCovariance::from_blocks(vec![m]) {
            Err(Error::NotSpd {
                smallest_eigenvalue, ..
            }) => assert!((smallest_eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("expected NotSpd, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_block_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.4, 2.0]);
        assert!(matches!(
            BlockDiagCovariance::from_blocks(vec![m]),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn scaled_identity_r() {
        let net = ObservationNetwork::full(4, 2);
        let r = build_r(&net, 1e-1).unwrap();
        assert_eq!(r.dim(), 12);
        let dense = r.dense();
        for i in 0..12 {
            assert!((dense[(i, i)] - 1e-2).abs() < 1e-17);
        }
        let (lo, hi) = r.extremes();
        assert_eq!(lo, hi);
        assert_eq!(lo, 0.1 * 0.1);
        assert!(r.is_diagonal());
    }

    #[test]
    fn empty_network_has_no_r() {
        let net = ObservationNetwork::empty(4, 2);
        assert!(matches!(build_r(&net, 0.1), Err(Error::EmptyObservations)));
    }

    #[test]
    fn identity_sample_is_raw_draw() {
        let eye = BlockDiagCovariance::from_blocks(vec![DMatrix::identity(5, 5)]).unwrap();
        let draw = sample_gaussian(&eye, 11);
        let raw = rng::standard_normals(&mut rng::seeded(11), 5);
        assert_eq!(draw, raw);
    }

    #[test]
    fn solve_inverts_apply() {
        let spec = CovarianceSpec::for_grid(10);
        let b = soar_matrix(10, &spec).unwrap();
        let d = build_d(&b, &b, 2).unwrap();
        let v: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).cos()).collect();
        let back = d.solve(&d.apply(&v).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

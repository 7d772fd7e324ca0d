//! Dense symmetric eigenvalues, inertia, and the extreme eigen/singular
//! values (`psi`, `nu`, `rho`, `theta`, `sigma`, `tau`) that feed the bounds.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::BlockOperators;

/// Relative tolerance on `max |A - A^T|`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative zero threshold used for inertia counts.
pub const ZERO_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm is below this times `||A||_F`.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 60;
const QL_MAX_ITERS: usize = 60;

/// Dense eigensolver used for spectra.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenSolver {
    /// Cyclic Jacobi rotations.
    #[default]
    Jacobi,
    /// Householder reduction to tridiagonal form, then implicit QL.
    /// Eigenvalues only; far cheaper at dimension ~2000.
    Tridiagonal,
}

impl std::str::FromStr for EigenSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jacobi" => Ok(Self::Jacobi),
            "tridiagonal" | "ql" => Ok(Self::Tridiagonal),
            _ => Err(Error::Config(format!("unknown eigensolver {s:?}"))),
        }
    }
}

fn frobenius(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Reject matrices with `max |A - A^T| > 1e-12 ||A||_F`.
pub fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Config(format!(
            "eigensolver needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let mut asym = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    let allowed = SYMMETRY_TOL * frobenius(a);
    if asym > allowed {
        return Err(Error::NotSymmetric { asymmetry: asym, allowed });
    }
    Ok(())
}

/// Sorted eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

/// Signed eigenvalue counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Spectrum {
    /// Sorts `values` ascending.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// Spectral norm, `max |lambda|`.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    fn zero_threshold(&self) -> f64 {
        ZERO_TOL * self.norm()
    }

    /// Eigenvalues below `-1e-10 ||A||`, ascending.
    pub fn negative(&self) -> &[f64] {
        let t = self.zero_threshold();
        let end = self.values.partition_point(|&v| v < -t);
        &self.values[..end]
    }

    /// Eigenvalues above `1e-10 ||A||`, ascending.
    pub fn positive(&self) -> &[f64] {
        let t = self.zero_threshold();
        let start = self.values.partition_point(|&v| v <= t);
        &self.values[start..]
    }

    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.values.iter().filter(|&&v| v >= lo && v <= hi).count()
    }

    pub fn inertia(&self) -> Inertia {
        let negative = self.negative().len();
        let positive = self.positive().len();
        Inertia {
            positive,
            negative,
            zero: self.len() - positive - negative,
        }
    }
}

pub fn inertia(spectrum: &Spectrum) -> Inertia {
    spectrum.inertia()
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Eigenvalues by cyclic Jacobi.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<Spectrum> {
    sym_eig_with(a, EigenSolver::Jacobi)
}

pub fn sym_eig_with(a: &DMatrix<f64>, solver: EigenSolver) -> Result<Spectrum> {
    check_symmetric(a)?;
    let values = match solver {
        EigenSolver::Jacobi => jacobi(a, false)?.0,
        EigenSolver::Tridiagonal => {
            let (d, e) = tridiagonalize(a);
            tridiagonal_ql(d, e)?
        }
    };
    Ok(Spectrum::from_values(values))
}

/// Eigenvalues and eigenvectors by cyclic Jacobi.
pub fn sym_eig_vectors(a: &DMatrix<f64>) -> Result<EigenDecomposition> {
    check_symmetric(a)?;
    let (values, vectors) = jacobi(a, true)?;
    let vectors = vectors.expect("requested");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vectors[(r, k)] = vectors[r * n + i];
        }
    }
    Ok(EigenDecomposition {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Returns the unsorted eigenvalues and, if asked, the eigenvector matrix
/// in row-major order (column `k` holds the vector of eigenvalue `k`).
fn jacobi(a_in: &DMatrix<f64>, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = a_in.nrows();
    // Row-major copy; the matrix is symmetric so rows and columns coincide.
    let mut a: Vec<f64> = (0..n * n).map(|k| a_in[(k / n, k % n)]).collect();
    let mut v = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    });
    let scale = frobenius(a_in);
    if n < 2 || scale == 0.0 {
        return Ok(((0..n).map(|i| a[i * n + i]).collect(), v));
    }
    let target = JACOBI_TOL * scale;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() <= target {
            return Ok(((0..n).map(|i| a[i * n + i]).collect(), v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Columns p and q (rows k), then mirror into rows p and q.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    a[p * n + k] = a[k * n + p];
                    a[q * n + k] = a[k * n + q];
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Err(Error::EigenNonConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns the diagonal and the `n - 1` off-diagonal entries.
fn tridiagonalize(a_in: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = a_in.nrows();
    // Lower triangle, row-major; row i has entries 0..=i.
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..=i).map(|j| a_in[(i, j)]).collect()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a[k][k];
        let m = k + 1;
        let norm = (m..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[m][k];
        let alpha = if x0 > 0.0 { -norm } else { norm };
        e[k] = alpha;
        // v = x - alpha e1, beta = 2 / v^T v.
        for i in m..n {
            v[i] = a[i][k];
        }
        v[m] -= alpha;
        let vtv = (m..n).map(|i| v[i] * v[i]).sum::<f64>();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // p = beta A22 v using the lower triangle only.
        for x in &mut w[m..n] {
            *x = 0.0;
        }
        for i in m..n {
            let row = &a[i];
            let vi = v[i];
            let mut acc = row[i] * vi;
            for j in m..i {
                acc += row[j] * v[j];
                w[j] += row[j] * vi;
            }
            w[i] += acc;
        }
        for x in &mut w[m..n] {
            *x *= beta;
        }
        // w = p - (beta/2)(p^T v) v
        let ptv = (m..n).map(|i| w[i] * v[i]).sum::<f64>();
        let half = 0.5 * beta * ptv;
        for i in m..n {
            w[i] -= half * v[i];
        }
        for i in m..n {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a[i];
            for j in m..=i {
                row[j] -= vi * w[j] + wi * v[j];
            }
        }
    }
    if n > 0 {
        d[n - 1] = a[n - 1][n - 1];
    }
    (d, e)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e`, by implicit QL with Wilkinson shifts.
fn tridiagonal_ql(mut d: Vec<f64>, e_in: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = e_in;
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITERS {
                return Err(Error::EigenNonConvergence { sweeps: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Which Gram matrix `extreme_singular_values` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularMode {
    /// Singular values of `L` (`sigma`).
    L,
    /// Singular values of `(L^T H^T)` (`theta`).
    LH,
}

/// Gram matrix `L^T L` or `L^T L + H^T H`.
pub fn gram(ops: &BlockOperators, mode: SingularMode) -> DMatrix<f64> {
    let l = ops.dense_l();
    let mut g = l.transpose() * &l;
    if mode == SingularMode::LH {
        for k in ops.network().state_indices() {
            g[(k, k)] += 1.0;
        }
    }
    (&g + g.transpose()) * 0.5
}

fn sqrt_gram(value: f64, scale: f64) -> Result<f64> {
    if value < -1e-12 * scale {
        return Err(Error::NegativeGram { value });
    }
    Ok(value.max(0.0).sqrt())
}

/// `(min, max)` singular values of `L` or `(L^T H^T)`.
pub fn extreme_singular_values(
    ops: &BlockOperators,
    mode: SingularMode,
    solver: EigenSolver,
) -> Result<(f64, f64)> {
    let spec = sym_eig_with(&gram(ops, mode), solver)?;
    let scale = spec.norm();
    Ok((sqrt_gram(spec.min(), scale)?, sqrt_gram(spec.max(), scale)?))
}

/// Extreme eigenvalues and singular values of the blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub psi_min: f64,
    pub psi_max: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
}

impl SpectralSummary {
    /// Build from `(min, max)` pairs, composing `tau` from `psi` and `rho`.
    pub fn new(psi: (f64, f64), nu: (f64, f64), rho: (f64, f64), theta: (f64, f64), sigma: (f64, f64)) -> Self {
        Self {
            psi_min: psi.0,
            psi_max: psi.1,
            nu_min: nu.0,
            nu_max: nu.1,
            rho_min: rho.0,
            rho_max: rho.1,
            theta_min: theta.0,
            theta_max: theta.1,
            sigma_min: sigma.0,
            sigma_max: sigma.1,
            tau_min: psi.0.min(rho.0),
            tau_max: psi.1.max(rho.1),
        }
    }
}

/// Sorted eigenvalues of `H^T R^{-1} H` (length `s`).
///
/// When `R` has one block per observed time level the nonzero eigenvalues
/// are those of the `R_i^{-1}` (the rows of `H_i` are orthonormal), padded
/// with `s - p` zeros; otherwise the dense matrix is diagonalised.
pub fn htrinvh_eigenvalues(ops: &BlockOperators, solver: EigenSolver) -> Result<Vec<f64>> {
    let net = ops.network();
    let sizes: Vec<usize> = (0..=net.steps()).map(|t| net.p_at(t)).filter(|&p| p > 0).collect();
    let blocks = ops.r().blocks();
    let aligned = blocks.len() == sizes.len() && blocks.iter().zip(&sizes).all(|(b, &p)| b.dim() == p);
    let mut values = if aligned {
        let mut v: Vec<f64> = blocks
            .iter()
            .flat_map(|b| b.eigenvalues().into_iter().map(|x| 1.0 / x))
            .collect();
        v.resize(ops.s(), 0.0);
        v
    } else {
        sym_eig_with(&ops.dense_htrinvh(), solver)?.values().to_vec()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// All twelve extremes for one operator set.
pub fn summarize(ops: &BlockOperators, solver: EigenSolver) -> Result<SpectralSummary> {
    let psi = ops.d().extremes();
    let rho = if ops.p() > 0 {
        ops.r().extremes()
    } else {
        (f64::INFINITY, f64::NEG_INFINITY)
    };
    let nu = htrinvh_eigenvalues(ops, solver)?;
    let theta = extreme_singular_values(ops, SingularMode::LH, solver)?;
    let sigma = extreme_singular_values(ops, SingularMode::L, solver)?;
    // L is unit block lower triangular, so (L^T H^T) has full row rank and
    // the plain minimum is the smallest non-zero singular value.
    if !(theta.0 > 0.0 && sigma.0 > 0.0) {
        return Err(Error::NegativeGram { value: theta.0.min(sigma.0) });
    }
    Ok(SpectralSummary::new(
        psi,
        (nu[0], nu[nu.len() - 1]),
        rho,
        theta,
        sigma,
    ))
}

/// Extra spectral quantities needed by the alternative bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeInputs {
    pub a1_min: f64,
    pub a1_max: f64,
    /// `lambda_max(L^T D^{-1} L)`.
    pub ltdinvl_max: f64,
    /// `max |lambda(A1^{-1/2} L^T D^{-1} L A1^{-1/2})|`.
    pub xi: f64,
}

/// How `xi` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XiMethod {
    /// Symmetric square root of `A1` from its eigendecomposition.
    #[default]
    SymmetricSqrt,
    /// `C^{-1} K C^{-T}` with `A1 = C C^T`, a similar matrix.
    Cholesky,
}

/// `xi` for SPD `a1` and symmetric `k`.
pub fn xi(a1: &DMatrix<f64>, k: &DMatrix<f64>, method: XiMethod, solver: EigenSolver) -> Result<f64> {
    let m = match method {
        XiMethod::SymmetricSqrt => {
            let eig = sym_eig_vectors(a1)?;
            if eig.values[0] <= 0.0 {
                return Err(Error::NotSpd {
                    context: "A1".into(),
                    smallest_eigenvalue: eig.values[0],
                });
            }
            let inv_sqrt: Vec<f64> = eig.values.iter().map(|v| 1.0 / v.sqrt()).collect();
            let mut scaled = eig.vectors.clone();
            for (j, f) in inv_sqrt.iter().enumerate() {
                scaled.column_mut(j).scale_mut(*f);
            }
            let root = &scaled * eig.vectors.transpose();
            &root * k * &root
        }
        XiMethod::Cholesky => {
            let chol = nalgebra::Cholesky::new(a1.clone()).ok_or_else(|| Error::NotSpd {
                context: "A1".into(),
                smallest_eigenvalue: sym_eig_with(a1, solver).map(|s| s.min()).unwrap_or(f64::NAN),
            })?;
            let c = chol.l();
            let x = c.solve_lower_triangular(k).expect("nonsingular factor");
            c.solve_lower_triangular(&x.transpose()).expect("nonsingular factor")
        }
    };
    let m = (&m + m.transpose()) * 0.5;
    Ok(sym_eig_with(&m, solver)?.norm())
}

/// Spectral inputs of the alternative bounds, from dense `A1` and `L^T D^{-1} L`.
pub fn alternative_inputs(ops: &BlockOperators, method: XiMethod, solver: EigenSolver) -> Result<AlternativeInputs> {
    let k = ops.dense_ltdinvl();
    let mut a1 = k.clone();
    if ops.p() > 0 {
        a1 += ops.dense_htrinvh();
    }
    let a1_spec = sym_eig_with(&a1, solver)?;
    let k_spec = sym_eig_with(&k, solver)?;
    Ok(AlternativeInputs {
        a1_min: a1_spec.min(),
        a1_max: a1_spec.max(),
        ltdinvl_max: k_spec.max(),
        xi: xi(&a1, &k, method, solver)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = crate::rng::seeded(seed);
        let z = crate::rng::standard_normals(&mut rng, n * n);
        let m = DMatrix::from_vec(n, n, z);
        (&m + m.transpose()) * 0.5
    }

    #[test]
    fn two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        for solver in [EigenSolver::Jacobi, EigenSolver::Tridiagonal] {
            let s = sym_eig_with(&a, solver).unwrap();
            assert!((s.values()[0] - 1.0).abs() < 1e-14);
            assert!((s.values()[1] - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_input_is_sorted_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0, 0.0]));
        for solver in [EigenSolver::Jacobi, EigenSolver::Tridiagonal] {
            assert_eq!(sym_eig_with(&a, solver).unwrap().values(), &[-1.0, 0.0, 2.0, 3.0]);
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eig(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn eigenpairs_have_small_residuals() {
        let a = random_symmetric(50, 3);
        let eig = sym_eig_vectors(&a).unwrap();
        let norm = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (k, &lam) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(k);
            let r = &a * v - v * lam;
            assert!(r.norm() <= 1e-8 * norm);
        }
    }

    #[test]
    fn solvers_agree() {
        let a = random_symmetric(60, 11);
        let j = sym_eig_with(&a, EigenSolver::Jacobi).unwrap();
        let t = sym_eig_with(&a, EigenSolver::Tridiagonal).unwrap();
        for (x, y) in j.values().iter().zip(t.values()) {
            assert!((x - y).abs() < 1e-11 * j.norm());
        }
    }

    #[test]
    fn inertia_counts() {
        let s = Spectrum::from_values(vec![-2.0, 1e-13, 0.5, 3.0]);
        assert_eq!(
            s.inertia(),
            Inertia {
                positive: 2,
                negative: 1,
                zero: 1
            }
        );
    }

    #[test]
    fn summary_composes_tau() {
        let s = SpectralSummary::new((0.5, 2.0), (0.0, 1.0), (0.1, 1.0), (1.0, 2.0), (0.9, 1.5));
        assert_eq!(s.tau_min, 0.1);
        assert_eq!(s.tau_max, 2.0);
    }
}

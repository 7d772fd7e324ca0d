//! MINRES and CG with zero initial guess and full residual histories.

use std::io::Write;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// A square linear operator `y = A x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (yi, a) in y.iter_mut().zip(self.column(j).iter()) {
                    *yi += a * xj;
                }
            }
        }
    }
}

/// Wraps a closure as an operator.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Target relative residual `||r_j|| / ||r_0||`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iters: 400,
        }
    }
}

/// Residual history of one solve. The initial guess is always zero, so
/// `r_0` is the right-hand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveLog {
    pub solver: String,
    pub iterations: usize,
    /// `relative_residuals[j] = ||r_j|| / ||r_0||`; entry 0 is 1.
    pub relative_residuals: Vec<f64>,
    pub converged: bool,
    /// `||b - A x|| / ||b||` recomputed once at the end.
    pub final_explicit_residual: f64,
    pub wall_time: f64,
}

impl SolveLog {
    pub fn final_residual(&self) -> f64 {
        *self.relative_residuals.last().expect("log has an initial entry")
    }

    /// `iteration,relative_residual` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "relative_residual"])?;
        for (j, r) in self.relative_residuals.iter().enumerate() {
            w.write_record([j.to_string(), format!("{r:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn explicit_residual(op: &dyn LinearOperator, b: &[f64], x: &[f64], bnorm: f64) -> f64 {
    let mut ax = vec![0.0; b.len()];
    op.apply(x, &mut ax);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    norm(&r) / bnorm
}

fn trivial(solver: &str, n: usize, start: Instant) -> (Vec<f64>, SolveLog) {
    (
        vec![0.0; n],
        SolveLog {
            solver: solver.into(),
            iterations: 0,
            relative_residuals: vec![0.0],
            converged: true,
            final_explicit_residual: 0.0,
            wall_time: start.elapsed().as_secs_f64(),
        },
    )
}

/// MINRES for symmetric (possibly indefinite) operators.
///
/// Residual norms come from the recurrence; stagnation up to `max_iters`
/// is reported, not treated as an error. A zero right-hand side returns
/// the zero vector with a single zero log entry.
pub fn minres(op: &dyn LinearOperator, b: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, SolveLog)> {
    let start = Instant::now();
    let n = op.dim();
    check_len("minres rhs", n, b.len())?;
    let beta1 = norm(b);
    if beta1 == 0.0 {
        return Ok(trivial("minres", n, start));
    }
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y = b.to_vec();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut beta = beta1;
    let mut oldb = 0.0;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut history = vec![1.0];
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        op.apply(&v, &mut y);
        if iterations >= 2 {
            let f = beta / oldb;
            for (yi, ri) in y.iter_mut().zip(&r1) {
                *yi -= f * ri;
            }
        }
        let alfa = dot(&v, &y);
        let f = alfa / beta;
        for (yi, ri) in y.iter_mut().zip(&r2) {
            *yi -= f * ri;
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        oldb = beta;
        beta = norm(&y);

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }

        let relres = phibar / beta1;
        if !relres.is_finite() || !alfa.is_finite() || !beta.is_finite() {
            return Err(Error::Breakdown {
                iteration: iterations,
                reason: "non-finite Lanczos coefficient".into(),
            });
        }
        history.push(relres);
        if relres <= cfg.tol || beta == 0.0 {
            break;
        }
    }

    let converged = history.last().is_some_and(|&r| r <= cfg.tol);
    Ok((
        x.clone(),
        SolveLog {
            solver: "minres".into(),
            iterations,
            relative_residuals: history,
            converged,
            final_explicit_residual: explicit_residual(op, b, &x, beta1),
            wall_time: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Conjugate gradients for SPD operators. A non-positive `p^T A p` means
/// the operator is not SPD and is reported as an error.
pub fn cg(op: &dyn LinearOperator, b: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, SolveLog)> {
    let start = Instant::now();
    let n = op.dim();
    check_len("cg rhs", n, b.len())?;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(trivial("cg", n, start));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = b.to_vec();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut history = vec![1.0];
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        op.apply(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !curvature.is_finite() {
            return Err(Error::Breakdown {
                iteration: iterations,
                reason: "non-finite curvature".into(),
            });
        }
        if curvature <= 0.0 {
            return Err(Error::NegativeCurvature {
                iteration: iterations,
                curvature,
            });
        }
        let alpha = rr / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let relres = rr_new.sqrt() / bnorm;
        history.push(relres);
        if relres <= cfg.tol || rr_new == 0.0 {
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }

    let converged = history.last().is_some_and(|&r| r <= cfg.tol);
    Ok((
        x.clone(),
        SolveLog {
            solver: "cg".into(),
            iterations,
            relative_residuals: history,
            converged,
            final_explicit_residual: explicit_residual(op, b, &x, bnorm),
            wall_time: start.elapsed().as_secs_f64(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = DMatrix::<f64>::identity(5, 5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 4.0];
        for solve in [minres, cg] {
            let (x, log) = solve(&a, &b, &SolverConfig::default()).unwrap();
            assert_eq!(log.iterations, 1);
            assert!(log.converged);
            for (xi, bi) in x.iter().zip(&b) {
                assert!((xi - bi).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn minres_indefinite_diagonal() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let cfg = SolverConfig {
            tol: 1e-12,
            max_iters: 10,
        };
        let (x, log) = minres(&a, &[1.0, 1.0], &cfg).unwrap();
        assert!(log.iterations <= 2);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cg_detects_indefinite_operator() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            cg(&a, &[0.0, 1.0], &SolverConfig::default()),
            Err(Error::NegativeCurvature { .. })
        ));
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let a = DMatrix::<f64>::identity(3, 3);
        let (x, log) = minres(&a, &[0.0; 3], &SolverConfig::default()).unwrap();
        assert_eq!(x, vec![0.0; 3]);
        assert!(log.converged);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let a = DMatrix::<f64>::identity(2, 2);
        let (_, log) = minres(&a, &[1.0, 1.0], &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,relative_residual\n0,1e0\n"));
    }
}

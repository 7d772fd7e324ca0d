//! Four-dimensional operators `L`, `H`, `D`, `R` applied matrix-free, and
//! the three coefficient operators of the weak-constraint inner loop:
//!
//! ```text
//!        [ D  0  L ]          [ D    L        ]
//!   A3 = [ 0  R  H ]     A2 = [ L^T  -H^T R^-1 H ]     A1 = L^T D^-1 L + H^T R^-1 H
//!        [ L^T H^T 0 ]
//! ```
//!
//! Vectors in state space are laid out time-major: block `i` of a vector of
//! length `s = (N + 1) n` holds the `n` components at time `t_i`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::BlockDiagCovariance;
use crate::error::{check_len, Error, Result};
use crate::krylov::LinearOperator;

/// Linearised model steps `M_0 .. M_{N-1}` and their adjoints.
pub trait TangentLinearModel: Send + Sync {
    fn state_dim(&self) -> usize;
    fn steps(&self) -> usize;
    /// `out = M_step dx`.
    fn apply(&self, step: usize, dx: &[f64], out: &mut [f64]);
    /// `out = M_step^T lam`.
    fn apply_adjoint(&self, step: usize, lam: &[f64], out: &mut [f64]);

    /// Dense `M_step`, built column by column.
    fn dense(&self, step: usize) -> DMatrix<f64> {
        let n = self.state_dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(step, &e, &mut col);
            m.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        m
    }
}

/// A tangent-linear model given by explicit matrices.
#[derive(Debug, Clone)]
pub struct MatrixModel {
    matrices: Vec<DMatrix<f64>>,
}

impl MatrixModel {
    pub fn new(matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = matrices
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::Config("MatrixModel needs at least one step".into()))?;
        for m in &matrices {
            if m.shape() != (n, n) {
                return Err(Error::Dimension {
                    context: "MatrixModel step matrix",
                    expected: n,
                    got: m.nrows(),
                });
            }
        }
        Ok(Self { matrices })
    }

    /// `M_i = 0` for every step, which makes `L` the identity.
    pub fn zeros(n: usize, steps: usize) -> Self {
        Self {
            matrices: vec![DMatrix::zeros(n, n); steps],
        }
    }

    /// Densify another model.
    pub fn from_model(model: &dyn TangentLinearModel) -> Self {
        Self {
            matrices: (0..model.steps()).map(|i| model.dense(i)).collect(),
        }
    }
}

impl TangentLinearModel for MatrixModel {
    fn state_dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    fn steps(&self) -> usize {
        self.matrices.len()
    }

    fn apply(&self, step: usize, dx: &[f64], out: &mut [f64]) {
        let m = &self.matrices[step];
        for (i, o) in out.iter_mut().enumerate() {
            *o = m.row(i).iter().zip(dx).map(|(a, b)| a * b).sum();
        }
    }

    fn apply_adjoint(&self, step: usize, lam: &[f64], out: &mut [f64]) {
        let m = &self.matrices[step];
        for (j, o) in out.iter_mut().enumerate() {
            *o = m.column(j).iter().zip(lam).map(|(a, b)| a * b).sum();
        }
    }

    fn dense(&self, step: usize) -> DMatrix<f64> {
        self.matrices[step].clone()
    }
}

/// Which state components are observed at which time steps.
///
/// Component indices are zero-based (`0` is `X^1`). Unobserved time steps
/// simply have an empty list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationNetwork {
    n: usize,
    per_time: Vec<Vec<usize>>,
}

impl ObservationNetwork {
    /// `per_time[i]` lists the observed components at `t_i`, `i = 0..=N`.
    pub fn new(n: usize, per_time: Vec<Vec<usize>>) -> Result<Self> {
        if per_time.is_empty() {
            return Err(Error::Config("network needs at least one time level".into()));
        }
        for (t, comps) in per_time.iter().enumerate() {
            if comps.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!(
                    "observed components at t_{t} must be strictly increasing"
                )));
            }
            if let Some(&c) = comps.last() {
                if c >= n {
                    return Err(Error::Config(format!(
                        "component {c} observed at t_{t} is outside 0..{n}"
                    )));
                }
            }
        }
        Ok(Self { n, per_time })
    }

    /// Build from `(time, component)` pairs in any order.
    pub fn from_pairs(n: usize, steps: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut per_time = vec![Vec::new(); steps + 1];
        for (t, c) in pairs {
            if t > steps {
                return Err(Error::Config(format!("time index {t} beyond N = {steps}")));
            }
            per_time[t].push(c);
        }
        for comps in &mut per_time {
            comps.sort_unstable();
            let before = comps.len();
            comps.dedup();
            if comps.len() != before {
                return Err(Error::Config("duplicate observation in network".into()));
            }
        }
        Self::new(n, per_time)
    }

    pub fn full(n: usize, steps: usize) -> Self {
        Self {
            n,
            per_time: vec![(0..n).collect(); steps + 1],
        }
    }

    pub fn empty(n: usize, steps: usize) -> Self {
        Self {
            n,
            per_time: vec![Vec::new(); steps + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of model steps `N` (time levels are `0..=N`).
    pub fn steps(&self) -> usize {
        self.per_time.len() - 1
    }

    pub fn p(&self) -> usize {
        self.per_time.iter().map(Vec::len).sum()
    }

    pub fn p_at(&self, t: usize) -> usize {
        self.per_time[t].len()
    }

    pub fn components_at(&self, t: usize) -> &[usize] {
        &self.per_time[t]
    }

    pub fn contains(&self, t: usize, c: usize) -> bool {
        self.per_time.get(t).is_some_and(|v| v.binary_search(&c).is_ok())
    }

    /// All observations as `(time, component)` in observation-vector order.
    pub fn observations(&self) -> Vec<(usize, usize)> {
        self.per_time
            .iter()
            .enumerate()
            .flat_map(|(t, cs)| cs.iter().map(move |&c| (t, c)))
            .collect()
    }

    /// Positions in the four-dimensional state vector selected by `H`.
    pub fn state_indices(&self) -> Vec<usize> {
        self.observations().into_iter().map(|(t, c)| t * self.n + c).collect()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n == other.n
            && self.steps() == other.steps()
            && self.observations().into_iter().all(|(t, c)| other.contains(t, c))
    }

    /// A copy with one more observation.
    pub fn with_observation(&self, t: usize, c: usize) -> Result<Self> {
        if self.contains(t, c) {
            return Err(Error::Config(format!("component {c} at t_{t} already observed")));
        }
        let mut pairs = self.observations();
        pairs.push((t, c));
        Self::from_pairs(self.n, self.steps(), pairs)
    }
}

/// The three linear-system formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formulation {
    /// 3x3 block saddle point system, order `2s + p`.
    A3,
    /// 2x2 block saddle point system, order `2s`.
    A2,
    /// Symmetric positive definite system, order `s`.
    A1,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::A3, Formulation::A2, Formulation::A1];

    pub fn dim(self, s: usize, p: usize) -> usize {
        match self {
            Formulation::A3 => 2 * s + p,
            Formulation::A2 => 2 * s,
            Formulation::A1 => s,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Formulation::A3 => "A3",
            Formulation::A2 => "A2",
            Formulation::A1 => "A1",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A3" | "3" => Ok(Formulation::A3),
            "A2" | "2" => Ok(Formulation::A2),
            "A1" | "1" => Ok(Formulation::A1),
            _ => Err(Error::Config(format!("unknown formulation {s:?}"))),
        }
    }
}

/// Largest dense assembly allowed.
pub const DENSE_CAP: usize = 4000;

/// `L`, `H`, `D` and `R` for one linearisation and one observation network.
pub struct BlockOperators {
    model: Box<dyn TangentLinearModel>,
    network: ObservationNetwork,
    d: BlockDiagCovariance,
    r: BlockDiagCovariance,
    h_index: Vec<usize>,
}

impl fmt::Debug for BlockOperators {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockOperators")
            .field("n", &self.n())
            .field("steps", &self.steps())
            .field("p", &self.p())
            .finish()
    }
}

impl BlockOperators {
    pub fn new(
        model: Box<dyn TangentLinearModel>,
        network: ObservationNetwork,
        d: BlockDiagCovariance,
        r: BlockDiagCovariance,
    ) -> Result<Self> {
        let n = model.state_dim();
        let steps = model.steps();
        check_len("network state dimension", n, network.n())?;
        check_len("network steps", steps, network.steps())?;
        check_len("D dimension", (steps + 1) * n, d.dim())?;
        check_len("R dimension", network.p(), r.dim())?;
        let h_index = network.state_indices();
        Ok(Self {
            model,
            network,
            d,
            r,
            h_index,
        })
    }

    pub fn n(&self) -> usize {
        self.model.state_dim()
    }

    pub fn steps(&self) -> usize {
        self.model.steps()
    }

    /// `s = (N + 1) n`.
    pub fn s(&self) -> usize {
        (self.steps() + 1) * self.n()
    }

    pub fn p(&self) -> usize {
        self.h_index.len()
    }

    pub fn network(&self) -> &ObservationNetwork {
        &self.network
    }

    pub fn d(&self) -> &BlockDiagCovariance {
        &self.d
    }

    pub fn r(&self) -> &BlockDiagCovariance {
        &self.r
    }

    pub fn model(&self) -> &dyn TangentLinearModel {
        self.model.as_ref()
    }

    fn l_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n();
        out[..n].copy_from_slice(&v[..n]);
        let mut mv = vec![0.0; n];
        for i in 1..=self.steps() {
            self.model.apply(i - 1, &v[(i - 1) * n..i * n], &mut mv);
            for j in 0..n {
                out[i * n + j] = v[i * n + j] - mv[j];
            }
        }
    }

    fn lt_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n();
        let steps = self.steps();
        let mut mv = vec![0.0; n];
        for i in 0..steps {
            self.model.apply_adjoint(i, &v[(i + 1) * n..(i + 2) * n], &mut mv);
            for j in 0..n {
                out[i * n + j] = v[i * n + j] - mv[j];
            }
        }
        out[steps * n..].copy_from_slice(&v[steps * n..]);
    }

    fn h_into(&self, v: &[f64], out: &mut [f64]) {
        for (o, &k) in out.iter_mut().zip(&self.h_index) {
            *o = v[k];
        }
    }

    fn ht_into(&self, w: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&wk, &k) in w.iter().zip(&self.h_index) {
            out[k] += wk;
        }
    }

    /// Block `i` of the result is `v_i - M_{i-1} v_{i-1}`.
    pub fn apply_l(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_L", self.s(), v.len())?;
        let mut out = vec![0.0; v.len()];
        self.l_into(v, &mut out);
        Ok(out)
    }

    /// Block `i` of the result is `v_i - M_i^T v_{i+1}`.
    pub fn apply_lt(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_Lt", self.s(), v.len())?;
        let mut out = vec![0.0; v.len()];
        self.lt_into(v, &mut out);
        Ok(out)
    }

    pub fn apply_h(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_H", self.s(), v.len())?;
        let mut out = vec![0.0; self.p()];
        self.h_into(v, &mut out);
        Ok(out)
    }

    pub fn apply_ht(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_Ht", self.p(), w.len())?;
        let mut out = vec![0.0; self.s()];
        self.ht_into(w, &mut out);
        Ok(out)
    }

    /// `H^T R^{-1} H v`.
    pub fn apply_htrinvh(&self, v: &[f64]) -> Result<Vec<f64>> {
        let hv = self.apply_h(v)?;
        self.apply_ht(&self.r.solve(&hv)?)
    }

    /// Dense `L` (`s x s`).
    pub fn dense_l(&self) -> DMatrix<f64> {
        let n = self.n();
        let s = self.s();
        let mut l = DMatrix::identity(s, s);
        for i in 0..self.steps() {
            let m = self.model.dense(i);
            l.view_mut(((i + 1) * n, i * n), (n, n)).copy_from(&(-m));
        }
        l
    }

    /// Dense selection matrix `H` (`p x s`).
    pub fn dense_h(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.p(), self.s());
        for (row, &k) in self.h_index.iter().enumerate() {
            h[(row, k)] = 1.0;
        }
        h
    }

    /// Dense `H^T R^{-1} H` (`s x s`), exactly symmetric.
    pub fn dense_htrinvh(&self) -> DMatrix<f64> {
        let rinv = self.r.dense_inverse();
        let mut m = DMatrix::zeros(self.s(), self.s());
        for (a, &ka) in self.h_index.iter().enumerate() {
            for (b, &kb) in self.h_index.iter().enumerate() {
                m[(ka, kb)] += rinv[(a, b)];
            }
        }
        m
    }

    /// Dense `L^T D^{-1} L`, symmetrised.
    pub fn dense_ltdinvl(&self) -> DMatrix<f64> {
        let l = self.dense_l();
        let dinv_l = self.d.solve_matrix(&l).expect("D matches L rows");
        let k = l.transpose() * dinv_l;
        (&k + k.transpose()) * 0.5
    }
}

/// An assembled linear system `A z = rhs` in one formulation.
#[derive(Debug)]
pub struct SystemInstance<'a> {
    formulation: Formulation,
    ops: &'a BlockOperators,
    rhs: Vec<f64>,
    b: Vec<f64>,
    d: Vec<f64>,
}

impl<'a> SystemInstance<'a> {
    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn operators(&self) -> &'a BlockOperators {
        self.ops
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `A z`.
    pub fn matvec(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len("system matvec", self.dim(), z.len())?;
        let mut out = vec![0.0; z.len()];
        self.apply(z, &mut out);
        Ok(out)
    }
}

impl LinearOperator for SystemInstance<'_> {
    fn dim(&self) -> usize {
        self.rhs.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let ops = self.ops;
        let s = ops.s();
        let p = ops.p();
        match self.formulation {
            Formulation::A3 => {
                let (q1, rest) = x.split_at(s);
                let (q2, q3) = rest.split_at(p);
                let (y1, rest) = y.split_at_mut(s);
                let (y2, y3) = rest.split_at_mut(p);
                let dq1 = ops.d.apply(q1).expect("dims");
                ops.l_into(q3, y1);
                for (a, b) in y1.iter_mut().zip(&dq1) {
                    *a += b;
                }
                let rq2 = ops.r.apply(q2).expect("dims");
                ops.h_into(q3, y2);
                for (a, b) in y2.iter_mut().zip(&rq2) {
                    *a += b;
                }
                let mut ht = vec![0.0; s];
                ops.ht_into(q2, &mut ht);
                ops.lt_into(q1, y3);
                for (a, b) in y3.iter_mut().zip(&ht) {
                    *a += b;
                }
            }
            Formulation::A2 => {
                let (q1, q3) = x.split_at(s);
                let (y1, y3) = y.split_at_mut(s);
                let dq1 = ops.d.apply(q1).expect("dims");
                ops.l_into(q3, y1);
                for (a, b) in y1.iter_mut().zip(&dq1) {
                    *a += b;
                }
                let g = ops.apply_htrinvh(q3).expect("dims");
                ops.lt_into(q1, y3);
                for (a, b) in y3.iter_mut().zip(&g) {
                    *a -= b;
                }
            }
            Formulation::A1 => {
                let mut lq = vec![0.0; s];
                ops.l_into(x, &mut lq);
                let dl = ops.d.solve(&lq).expect("dims");
                ops.lt_into(&dl, y);
                let g = ops.apply_htrinvh(x).expect("dims");
                for (a, b) in y.iter_mut().zip(&g) {
                    *a += b;
                }
            }
        }
    }
}

/// Build the system of `formulation` with right-hand side data `b` (length
/// `s`) and innovations `d` (length `p`).
pub fn make_system<'a>(
    ops: &'a BlockOperators,
    formulation: Formulation,
    b: &[f64],
    d: &[f64],
) -> Result<SystemInstance<'a>> {
    check_len("make_system b", ops.s(), b.len())?;
    check_len("make_system d", ops.p(), d.len())?;
    if ops.p() == 0 && formulation != Formulation::A1 {
        return Err(Error::EmptyObservations);
    }
    let rhs = match formulation {
        Formulation::A3 => {
            let mut rhs = Vec::with_capacity(formulation.dim(ops.s(), ops.p()));
            rhs.extend_from_slice(b);
            rhs.extend_from_slice(d);
            rhs.extend(std::iter::repeat_n(0.0, ops.s()));
            rhs
        }
        Formulation::A2 => {
            let mut rhs = b.to_vec();
            let g = ops.apply_ht(&ops.r.solve(d)?)?;
            rhs.extend(g.iter().map(|v| -v));
            rhs
        }
        Formulation::A1 => {
            let mut rhs = ops.apply_lt(&ops.d.solve(b)?)?;
            if ops.p() > 0 {
                let g = ops.apply_ht(&ops.r.solve(d)?)?;
                rhs.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
            }
            rhs
        }
    };
    Ok(SystemInstance {
        formulation,
        ops,
        rhs,
        b: b.to_vec(),
        d: d.to_vec(),
    })
}

/// State increment and Lagrange multipliers recovered from a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Increment {
    pub dx: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    /// `||L^T lambda + H^T mu||`, zero at the exact optimum.
    pub optimality_residual: f64,
    /// `||L^T lambda|| + ||H^T mu||`, a natural scale for the residual.
    pub optimality_scale: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Split a solution of `system` into `(dx, lambda, mu)`. Multipliers that
/// are not part of the formulation are reconstructed from their
/// definitions `lambda = D^{-1}(b - L dx)`, `mu = R^{-1}(d - H dx)`.
pub fn recover_increment(system: &SystemInstance<'_>, solution: &[f64]) -> Result<Increment> {
    check_len("recover_increment", system.dim(), solution.len())?;
    let ops = system.ops;
    let s = ops.s();
    let p = ops.p();
    let mu_from = |dx: &[f64]| -> Result<Vec<f64>> {
        if p == 0 {
            return Ok(Vec::new());
        }
        let hdx = ops.apply_h(dx)?;
        let resid: Vec<f64> = system.d.iter().zip(&hdx).map(|(a, b)| a - b).collect();
        ops.r.solve(&resid)
    };
    let (dx, lambda, mu) = match system.formulation {
        Formulation::A3 => (
            solution[s + p..].to_vec(),
            solution[..s].to_vec(),
            solution[s..s + p].to_vec(),
        ),
        Formulation::A2 => {
            let dx = solution[s..].to_vec();
            let mu = mu_from(&dx)?;
            (dx, solution[..s].to_vec(), mu)
        }
        Formulation::A1 => {
            let dx = solution.to_vec();
            let ldx = ops.apply_l(&dx)?;
            let resid: Vec<f64> = system.b.iter().zip(&ldx).map(|(a, b)| a - b).collect();
            let lambda = ops.d.solve(&resid)?;
            let mu = mu_from(&dx)?;
            (dx, lambda, mu)
        }
    };
    let lt = ops.apply_lt(&lambda)?;
    let ht = if p > 0 { ops.apply_ht(&mu)? } else { vec![0.0; s] };
    let resid: Vec<f64> = lt.iter().zip(&ht).map(|(a, b)| a + b).collect();
    Ok(Increment {
        optimality_residual: norm(&resid),
        optimality_scale: norm(&lt) + norm(&ht),
        dx,
        lambda,
        mu,
    })
}

/// Explicit symmetric matrix of `formulation`.
pub fn assemble_dense(ops: &BlockOperators, formulation: Formulation) -> Result<DMatrix<f64>> {
    let s = ops.s();
    let p = ops.p();
    let dim = formulation.dim(s, p);
    if dim > DENSE_CAP {
        return Err(Error::SizeCap { dim, cap: DENSE_CAP });
    }
    if p == 0 && formulation != Formulation::A1 {
        return Err(Error::EmptyObservations);
    }
    let m = match formulation {
        Formulation::A3 => {
            let l = ops.dense_l();
            let h = ops.dense_h();
            let mut a = DMatrix::zeros(dim, dim);
            a.view_mut((0, 0), (s, s)).copy_from(&ops.d.dense());
            a.view_mut((s, s), (p, p)).copy_from(&ops.r.dense());
            a.view_mut((0, s + p), (s, s)).copy_from(&l);
            a.view_mut((s + p, 0), (s, s)).copy_from(&l.transpose());
            a.view_mut((s, s + p), (p, s)).copy_from(&h);
            a.view_mut((s + p, s), (s, p)).copy_from(&h.transpose());
            a
        }
        Formulation::A2 => {
            let l = ops.dense_l();
            let mut a = DMatrix::zeros(dim, dim);
            a.view_mut((0, 0), (s, s)).copy_from(&ops.d.dense());
            a.view_mut((0, s), (s, s)).copy_from(&l);
            a.view_mut((s, 0), (s, s)).copy_from(&l.transpose());
            a.view_mut((s, s), (s, s)).copy_from(&(-ops.dense_htrinvh()));
            a
        }
        Formulation::A1 => {
            let mut a = ops.dense_ltdinvl();
            if p > 0 {
                a += ops.dense_htrinvh();
            }
            a
        }
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::build_r;

    fn identity_ops(n: usize, steps: usize, network: ObservationNetwork) -> BlockOperators {
        let d = BlockDiagCovariance::from_blocks(vec![DMatrix::identity(n, n); steps + 1]).unwrap();
        let r = build_r(&network, 1.0).unwrap();
        BlockOperators::new(Box::new(MatrixModel::zeros(n, steps)), network, d, r).unwrap()
    }

    #[test]
    fn network_validation() {
        assert!(ObservationNetwork::new(4, vec![vec![1, 1]]).is_err());
        assert!(ObservationNetwork::new(4, vec![vec![4]]).is_err());
        assert!(ObservationNetwork::new(4, vec![vec![2, 1]]).is_err());
        let net = ObservationNetwork::from_pairs(4, 2, [(2, 3), (0, 1), (2, 0)]).unwrap();
        assert_eq!(net.observations(), vec![(0, 1), (2, 0), (2, 3)]);
        assert_eq!(net.state_indices(), vec![1, 8, 11]);
        assert!(net.with_observation(0, 1).is_err());
        let bigger = net.with_observation(1, 2).unwrap();
        assert!(net.is_subset_of(&bigger));
        assert!(!bigger.is_subset_of(&net));
    }

    #[test]
    fn zero_model_gives_identity_l() {
        let ops = identity_ops(4, 3, ObservationNetwork::full(4, 3));
        let v: Vec<f64> = (0..16).map(|i| i as f64 - 3.5).collect();
        assert_eq!(ops.apply_l(&v).unwrap(), v);
        assert_eq!(ops.apply_lt(&v).unwrap(), v);
    }

    #[test]
    fn full_network_h_is_identity() {
        let ops = identity_ops(4, 2, ObservationNetwork::full(4, 2));
        assert_eq!(ops.dense_h(), DMatrix::identity(12, 12));
    }

    #[test]
    fn h_of_ht_is_identity() {
        let net = ObservationNetwork::from_pairs(4, 2, [(0, 1), (2, 3), (1, 0)]).unwrap();
        let ops = identity_ops(4, 2, net);
        let w = vec![1.5, -2.0, 0.25];
        assert_eq!(ops.apply_h(&ops.apply_ht(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn dimension_errors() {
        let ops = identity_ops(4, 2, ObservationNetwork::full(4, 2));
        assert!(ops.apply_l(&[0.0; 5]).is_err());
        assert!(ops.apply_ht(&[0.0; 5]).is_err());
        assert!(make_system(&ops, Formulation::A3, &[0.0; 12], &[0.0; 3]).is_err());
    }

    #[test]
    fn formulation_dims() {
        assert_eq!(Formulation::A3.dim(640, 1), 1281);
        assert_eq!(Formulation::A2.dim(640, 1), 1280);
        assert_eq!(Formulation::A1.dim(640, 1), 640);
        assert_eq!("a2".parse::<Formulation>().unwrap(), Formulation::A2);
        assert!("A4".parse::<Formulation>().is_err());
    }
}

//! Lorenz 96 dynamics on a periodic ring, classical RK4 stepping, and the
//! exact tangent-linear and adjoint maps of one discrete RK4 step.
//!
//! The tangent-linear model is obtained by differentiating the RK4 scheme
//! stage by stage, so `adjoint_apply` is the transpose of `tlm_apply` to
//! machine precision.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::operators::TangentLinearModel;

/// Model dimensions and integration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Number of state variables on the ring.
    pub n: usize,
    /// Constant forcing `F`.
    pub forcing: f64,
    /// RK4 time step.
    pub dt: f64,
    /// Number of steps `N` in the assimilation window.
    pub steps: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n: 40,
            forcing: 8.0,
            dt: 2.5e-2,
            steps: 15,
        }
    }
}

impl ModelConfig {
    pub fn new(n: usize, forcing: f64, dt: f64, steps: usize) -> Result<Self> {
        let cfg = Self {
            n,
            forcing,
            dt,
            steps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `dt == 0` is accepted: it makes every step the identity map, which
    /// the tests use as a degenerate case.
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Config(format!("n must be at least 4, got {}", self.n)));
        }
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return Err(Error::Config(format!("dt must be finite and non-negative, got {}", self.dt)));
        }
        if !self.forcing.is_finite() {
            return Err(Error::Config("forcing must be finite".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        Ok(())
    }

    /// Total size `(N + 1) n` of a four-dimensional state vector.
    pub fn window_dim(&self) -> usize {
        (self.steps + 1) * self.n
    }
}

#[inline]
fn wrap(j: isize, n: usize) -> usize {
    j.rem_euclid(n as isize) as usize
}

fn tendency_into(x: &[f64], forcing: f64, out: &mut [f64]) {
    let n = x.len();
    for j in 0..n {
        let jm2 = x[wrap(j as isize - 2, n)];
        let jm1 = x[wrap(j as isize - 1, n)];
        let jp1 = x[(j + 1) % n];
        out[j] = (jp1 - jm2) * jm1 - x[j] + forcing;
    }
}

/// Right-hand side `dX/dt` of the Lorenz 96 system with cyclic indices.
pub fn tendency(x: &[f64], cfg: &ModelConfig) -> Result<Vec<f64>> {
    check_len("tendency", cfg.n, x.len())?;
    let mut out = vec![0.0; x.len()];
    tendency_into(x, cfg.forcing, &mut out);
    Ok(out)
}

/// Jacobian of the tendency at `y` applied to `v`.
fn jacobian_apply(y: &[f64], v: &[f64], out: &mut [f64]) {
    let n = y.len();
    for j in 0..n {
        let jm2 = wrap(j as isize - 2, n);
        let jm1 = wrap(j as isize - 1, n);
        let jp1 = (j + 1) % n;
        out[j] = (y[jp1] - y[jm2]) * v[jm1] - y[jm1] * v[jm2] + y[jm1] * v[jp1] - v[j];
    }
}

/// Transposed Jacobian of the tendency at `y` applied to `w`.
fn jacobian_transpose_apply(y: &[f64], w: &[f64], out: &mut [f64]) {
    let n = y.len();
    for i in 0..n {
        let im2 = wrap(i as isize - 2, n);
        let im1 = wrap(i as isize - 1, n);
        let ip1 = (i + 1) % n;
        let ip2 = (i + 2) % n;
        out[i] = w[ip1] * (y[ip2] - y[im1]) - w[ip2] * y[ip1] + w[im1] * y[im2] - w[i];
    }
}

/// The four RK4 stage states of one step, enough to linearise it.
#[derive(Debug, Clone, PartialEq)]
pub struct StageData {
    dt: f64,
    /// Points at which the tendency was evaluated: `x`, `x + dt/2 k1`,
    /// `x + dt/2 k2`, `x + dt k3`.
    stages: [Vec<f64>; 4],
}

impl StageData {
    pub fn dim(&self) -> usize {
        self.stages[0].len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// State at the start of the step.
    pub fn start(&self) -> &[f64] {
        &self.stages[0]
    }

    pub fn stage(&self, k: usize) -> &[f64] {
        &self.stages[k]
    }

    /// Re-evaluate the step from the cached stage points.
    pub fn replay(&self, forcing: f64) -> Vec<f64> {
        let n = self.dim();
        let h = self.dt;
        let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for (s, kk) in self.stages.iter().zip(k.iter_mut()) {
            tendency_into(s, forcing, kk);
        }
        combine(&self.stages[0], h, &k)
    }
}

fn combine(x: &[f64], h: f64, k: &[Vec<f64>; 4]) -> Vec<f64> {
    (0..x.len())
        .map(|j| x[j] + h / 6.0 * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]))
        .collect()
}

fn step_unchecked(x: &[f64], forcing: f64, h: f64) -> (Vec<f64>, StageData) {
    let n = x.len();
    let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let s1 = x.to_vec();
    tendency_into(&s1, forcing, &mut k[0]);
    let s2: Vec<f64> = (0..n).map(|j| x[j] + 0.5 * h * k[0][j]).collect();
    tendency_into(&s2, forcing, &mut k[1]);
    let s3: Vec<f64> = (0..n).map(|j| x[j] + 0.5 * h * k[1][j]).collect();
    tendency_into(&s3, forcing, &mut k[2]);
    let s4: Vec<f64> = (0..n).map(|j| x[j] + h * k[2][j]).collect();
    tendency_into(&s4, forcing, &mut k[3]);
    let next = combine(x, h, &k);
    (
        next,
        StageData {
            dt: h,
            stages: [s1, s2, s3, s4],
        },
    )
}

/// One classical RK4 step. Fails if the result is not finite.
pub fn rk4_step(x: &[f64], cfg: &ModelConfig) -> Result<(Vec<f64>, StageData)> {
    check_len("rk4_step", cfg.n, x.len())?;
    let (next, stage) = step_unchecked(x, cfg.forcing, cfg.dt);
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalBlowup { step: 0 });
    }
    Ok((next, stage))
}

/// Exact Jacobian-vector product of the RK4 step linearised at `stage`.
pub fn tlm_apply(stage: &StageData, dx: &[f64]) -> Result<Vec<f64>> {
    check_len("tlm_apply", stage.dim(), dx.len())?;
    let n = dx.len();
    let h = stage.dt;
    let mut dk = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut arg = dx.to_vec();
    let coeff = [0.5 * h, 0.5 * h, h];
    for s in 0..4 {
        jacobian_apply(&stage.stages[s], &arg, &mut dk[s]);
        if s < 3 {
            for j in 0..n {
                arg[j] = dx[j] + coeff[s] * dk[s][j];
            }
        }
    }
    Ok(combine(dx, h, &dk))
}

/// Transpose of the RK4 Jacobian at `stage` applied to `lam`.
pub fn adjoint_apply(stage: &StageData, lam: &[f64]) -> Result<Vec<f64>> {
    check_len("adjoint_apply", stage.dim(), lam.len())?;
    let n = lam.len();
    let h = stage.dt;
    let mut out = lam.to_vec();
    // Adjoints of the stage increments k1..k4.
    let mut adj_k = [
        lam.iter().map(|v| h / 6.0 * v).collect::<Vec<_>>(),
        lam.iter().map(|v| h / 3.0 * v).collect::<Vec<_>>(),
        lam.iter().map(|v| h / 3.0 * v).collect::<Vec<_>>(),
        lam.iter().map(|v| h / 6.0 * v).collect::<Vec<_>>(),
    ];
    let coeff = [0.5 * h, 0.5 * h, h];
    let mut t = vec![0.0; n];
    for s in (0..4).rev() {
        jacobian_transpose_apply(&stage.stages[s], &adj_k[s], &mut t);
        for j in 0..n {
            out[j] += t[j];
        }
        if s > 0 {
            let c = coeff[s - 1];
            for j in 0..n {
                adj_k[s - 1][j] += c * t[j];
            }
        }
    }
    Ok(out)
}

/// States `x_0..x_N` together with the stage data of every step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    cfg: ModelConfig,
    states: Vec<Vec<f64>>,
    stage_cache: Vec<StageData>,
    model_error: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i]
    }

    pub fn stages(&self) -> &[StageData] {
        &self.stage_cache
    }

    /// The trajectory flattened into one `(N + 1) n` vector.
    pub fn flatten(&self) -> Vec<f64> {
        self.states.iter().flatten().copied().collect()
    }

    /// Rebuild every state from the cached stages and the stored model
    /// errors. Bit-identical to `states()`.
    pub fn replay(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.states.len());
        out.push(self.states[0].clone());
        for (stage, eta) in self.stage_cache.iter().zip(&self.model_error) {
            let mut next = stage.replay(self.cfg.forcing);
            for (v, e) in next.iter_mut().zip(eta) {
                *v += e;
            }
            out.push(next);
        }
        out
    }

    /// Model errors `eta_1..eta_N` added during integration (zeros for a
    /// perfect-model run).
    pub fn model_errors(&self) -> &[Vec<f64>] {
        &self.model_error
    }
}

/// Integrate `N` steps from `x0`, adding `model_error[i]` after step `i`
/// (`x_{i+1} = m(x_i) + eta_{i+1}`).
pub fn integrate(x0: &[f64], cfg: &ModelConfig, model_error: Option<&[Vec<f64>]>) -> Result<Trajectory> {
    cfg.validate()?;
    check_len("integrate initial state", cfg.n, x0.len())?;
    if let Some(eta) = model_error {
        check_len("integrate model error steps", cfg.steps, eta.len())?;
        for e in eta {
            check_len("integrate model error", cfg.n, e.len())?;
        }
    }
    let mut states = Vec::with_capacity(cfg.steps + 1);
    let mut stage_cache = Vec::with_capacity(cfg.steps);
    let model_error: Vec<Vec<f64>> = match model_error {
        Some(eta) => eta.to_vec(),
        None => vec![vec![0.0; cfg.n]; cfg.steps],
    };
    states.push(x0.to_vec());
    for (i, eta) in model_error.iter().enumerate() {
        let (mut next, stage) = step_unchecked(&states[i], cfg.forcing, cfg.dt);
        for (v, e) in next.iter_mut().zip(eta) {
            *v += e;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup { step: i + 1 });
        }
        stage_cache.push(stage);
        states.push(next);
    }
    Ok(Trajectory {
        cfg: *cfg,
        states,
        stage_cache,
        model_error,
    })
}

/// Run `steps` RK4 steps without storing anything; used to move an initial
/// condition onto the attractor before the assimilation window.
pub fn spin_up(x0: &[f64], cfg: &ModelConfig, steps: usize) -> Result<Vec<f64>> {
    check_len("spin_up", cfg.n, x0.len())?;
    let mut x = x0.to_vec();
    for step in 0..steps {
        x = step_unchecked(&x, cfg.forcing, cfg.dt).0;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup { step: step + 1 });
        }
    }
    Ok(x)
}

/// Worst normalised adjoint mismatch
/// `|<M dx, y> - <dx, M^T y>| / (||M dx|| ||y||)` over `pairs` random
/// standard normal pairs per step of `traj`.
pub fn adjoint_mismatch(traj: &Trajectory, pairs: usize, seed: u64) -> f64 {
    let mut rng = crate::rng::seeded(seed);
    let n = traj.cfg.n;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut worst = 0.0f64;
    for stage in &traj.stage_cache {
        for _ in 0..pairs {
            let dx = crate::rng::standard_normals(&mut rng, n);
            let y = crate::rng::standard_normals(&mut rng, n);
            let mdx = tlm_apply(stage, &dx).expect("lengths match");
            let mty = adjoint_apply(stage, &y).expect("lengths match");
            let scale = dot(&mdx, &mdx).sqrt() * dot(&y, &y).sqrt();
            worst = worst.max((dot(&mdx, &y) - dot(&dx, &mty)).abs() / scale);
        }
    }
    worst
}

/// Relative finite-difference errors
/// `||(m(x + eps dx) - m(x)) / eps - M dx|| / ||M dx||` of one RK4 step,
/// one entry per `eps`.
pub fn taylor_errors(x: &[f64], dx: &[f64], cfg: &ModelConfig, eps: &[f64]) -> Result<Vec<f64>> {
    check_len("taylor_errors dx", x.len(), dx.len())?;
    let (base, stage) = rk4_step(x, cfg)?;
    let mdx = tlm_apply(&stage, dx)?;
    let norm = mdx.iter().map(|v| v * v).sum::<f64>().sqrt();
    eps.iter()
        .map(|&e| {
            let xp: Vec<f64> = x.iter().zip(dx).map(|(a, b)| a + e * b).collect();
            let (pert, _) = rk4_step(&xp, cfg)?;
            let err = pert
                .iter()
                .zip(&base)
                .zip(&mdx)
                .map(|((p, b), m)| ((p - b) / e - m).powi(2))
                .sum::<f64>()
                .sqrt();
            Ok(err / norm)
        })
        .collect()
}

impl TangentLinearModel for Trajectory {
    fn state_dim(&self) -> usize {
        self.cfg.n
    }

    fn steps(&self) -> usize {
        self.cfg.steps
    }

    fn apply(&self, step: usize, dx: &[f64], out: &mut [f64]) {
        let y = tlm_apply(&self.stage_cache[step], dx).expect("length checked by caller");
        out.copy_from_slice(&y);
    }

    fn apply_adjoint(&self, step: usize, lam: &[f64], out: &mut [f64]) {
        let y = adjoint_apply(&self.stage_cache[step], lam).expect("length checked by caller");
        out.copy_from_slice(&y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg4() -> ModelConfig {
        ModelConfig::new(4, 8.0, 0.025, 3).unwrap()
    }

    #[test]
    fn equilibrium_has_zero_tendency() {
        let cfg = ModelConfig::default();
        let x = vec![cfg.forcing; cfg.n];
        assert!(tendency(&x, &cfg).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_state_tendency_is_forcing() {
        let cfg = ModelConfig::default();
        let t = tendency(&vec![0.0; cfg.n], &cfg).unwrap();
        assert!(t.iter().all(|v| *v == 8.0));
    }

    #[test]
    fn hand_evaluated_tendency_n4() {
        // dX^j = -X^{j-2} X^{j-1} + X^{j-1} X^{j+1} - X^j + F with X = (1,2,3,4):
        //  j=1: -3*4 + 4*2 - 1 + 8 = 3
        //  j=2: -4*1 + 1*3 - 2 + 8 = 5
        //  j=3: -1*2 + 2*4 - 3 + 8 = 11
        //  j=4: -2*3 + 3*1 - 4 + 8 = 1
        let t = tendency(&[1.0, 2.0, 3.0, 4.0], &cfg4()).unwrap();
        assert_eq!(t, vec![3.0, 5.0, 11.0, 1.0]);
    }

    #[test]
    fn tendency_rejects_wrong_length() {
        assert!(matches!(
            tendency(&[1.0; 5], &cfg4()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(ModelConfig::new(3, 8.0, 0.025, 1).is_err());
        assert!(ModelConfig::new(4, 8.0, -0.1, 1).is_err());
        assert!(ModelConfig::new(4, 8.0, 0.1, 0).is_err());
        assert!(ModelConfig::new(4, 8.0, 0.0, 1).is_ok());
    }

    #[test]
    fn rk4_fixed_point_and_zero_step() {
        let cfg = ModelConfig::default();
        let eq = vec![cfg.forcing; cfg.n];
        assert_eq!(rk4_step(&eq, &cfg).unwrap().0, eq);

        let cfg0 = ModelConfig { dt: 0.0, ..cfg };
        let x: Vec<f64> = (0..cfg.n).map(|i| (i as f64).sin()).collect();
        assert_eq!(rk4_step(&x, &cfg0).unwrap().0, x);
    }

    #[test]
    fn blowup_reports_step() {
        let cfg = ModelConfig::new(4, 8.0, 10.0, 20).unwrap();
        let err = integrate(&[1.0, 2.0, 3.0, 4.0], &cfg, None).unwrap_err();
        assert!(matches!(err, Error::NumericalBlowup { step } if step >= 1));
    }

    #[test]
    fn single_step_with_unit_model_error() {
        let cfg = ModelConfig::new(4, 8.0, 0.025, 1).unwrap();
        let x0 = [1.0, 2.0, 3.0, 4.0];
        let e1 = vec![vec![1.0, 0.0, 0.0, 0.0]];
        let traj = integrate(&x0, &cfg, Some(&e1)).unwrap();
        let mut expect = rk4_step(&x0, &cfg).unwrap().0;
        expect[0] += 1.0;
        assert_eq!(traj.state(1), expect.as_slice());
    }

    #[test]
    fn dt_zero_adjoint_is_identity() {
        let cfg = ModelConfig::new(6, 8.0, 0.0, 1).unwrap();
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.3).collect();
        let (_, stage) = rk4_step(&x, &cfg).unwrap();
        let lam = vec![1.0, -2.0, 0.5, 3.0, 0.0, 4.0];
        assert_eq!(adjoint_apply(&stage, &lam).unwrap(), lam);
        assert_eq!(tlm_apply(&stage, &lam).unwrap(), lam);
    }
}

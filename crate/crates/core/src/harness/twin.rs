//! Identical-twin data: a truth run with model error, a perturbed
//! background, noisy observations, and the first-outer-loop linearisation.

use nalgebra::DMatrix;

use crate::covariance::{build_d, soar_matrix, BlockDiagCovariance};
use crate::error::{check_len, Result};
use crate::harness::config::{BackgroundNoise, ExperimentConfig};
use crate::lorenz96::{integrate, spin_up, Trajectory};
use crate::operators::ObservationNetwork;
use crate::rng::{self, Stream};

/// Synthetic data shared by every network of one configuration.
#[derive(Debug, Clone)]
pub struct TwinData {
    pub truth: Trajectory,
    pub background: Vec<f64>,
    /// Perfect-model forecast from the background; the linearisation
    /// trajectory of the first outer loop.
    pub forecast: Trajectory,
    /// `y[t][c] = x^t_t[c] + eps` for every component; a network selects
    /// its entries, so all networks see the same observation errors.
    pub observations: Vec<Vec<f64>>,
    /// `B` (also used for every `Q_i`).
    pub b_matrix: DMatrix<f64>,
    pub d: BlockDiagCovariance,
}

/// Generate the truth, background and observations for `cfg`.
///
/// Randomness comes from independent streams of `cfg.seed`: the initial
/// condition `F + N(0, I)` (spun up), model errors drawn from `Q = B`,
/// the background perturbation (from `B` unless configured otherwise),
/// and observation errors `sigma_o N(0, I)`.
pub fn run_twin(cfg: &ExperimentConfig) -> Result<TwinData> {
    cfg.validate()?;
    let model = cfg.model_config()?;
    let cov = cfg.covariance_spec();
    let n = model.n;

    let b_matrix = soar_matrix(n, &cov)?;
    let d = build_d(&b_matrix, &b_matrix, model.steps)?;
    // Q = B, so one sampler serves both the model errors and the background.
    let b_cov = BlockDiagCovariance::from_blocks(vec![b_matrix.clone()])?;

    let mut ic_rng = rng::stream(cfg.seed, Stream::InitialCondition);
    let x_init: Vec<f64> = rng::standard_normals(&mut ic_rng, n)
        .into_iter()
        .map(|z| model.forcing + z)
        .collect();
    let x0 = spin_up(&x_init, &model, cfg.model.spinup_steps)?;

    let mut eta_rng = rng::stream(cfg.seed, Stream::ModelError);
    let eta: Vec<Vec<f64>> = (0..model.steps).map(|_| b_cov.sample(&mut eta_rng)).collect();
    let truth = integrate(&x0, &model, Some(&eta))?;

    let mut bg_rng = rng::stream(cfg.seed, Stream::Background);
    let perturbation = match cfg.covariance.background_noise {
        BackgroundNoise::B => b_cov.sample(&mut bg_rng),
        BackgroundNoise::White => rng::standard_normals(&mut bg_rng, n)
            .into_iter()
            .map(|z| cov.sigma_b * z)
            .collect(),
    };
    let background: Vec<f64> = x0.iter().zip(perturbation).map(|(x, e)| x + e).collect();

    let mut obs_rng = rng::stream(cfg.seed, Stream::Observation);
    let observations = truth
        .states()
        .iter()
        .map(|x| {
            let z = rng::standard_normals(&mut obs_rng, n);
            x.iter().zip(z).map(|(x, z)| x + cov.sigma_o * z).collect()
        })
        .collect();

    let forecast = integrate(&background, &model, None)?;
    Ok(TwinData {
        truth,
        background,
        forecast,
        observations,
        b_matrix,
        d,
    })
}

impl TwinData {
    /// `b = (x_0 - x^b, -eta_1, .., -eta_N)` on the linearisation trajectory.
    pub fn b(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .forecast
            .state(0)
            .iter()
            .zip(&self.background)
            .map(|(x, xb)| x - xb)
            .collect();
        for eta in self.forecast.model_errors() {
            b.extend(eta.iter().map(|e| -e));
        }
        b
    }

    /// Innovations `d_i = y_i - H_i x_i` in observation-vector order.
    pub fn d(&self, network: &ObservationNetwork) -> Result<Vec<f64>> {
        check_len("network state dimension", self.background.len(), network.n())?;
        check_len("network steps", self.forecast.states().len() - 1, network.steps())?;
        Ok(network
            .observations()
            .into_iter()
            .map(|(t, c)| self.observations[t][c] - self.forecast.state(t)[c])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.model.spinup_steps = 200;
        cfg
    }

    #[test]
    fn deterministic_per_seed() {
        let a = run_twin(&small()).unwrap();
        let b = run_twin(&small()).unwrap();
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.observations, b.observations);
        let mut other = small();
        other.seed = 2;
        assert_ne!(run_twin(&other).unwrap().truth, a.truth);
    }

    #[test]
    fn first_outer_loop_b_is_zero() {
        let twin = run_twin(&small()).unwrap();
        assert!(twin.b().iter().all(|&v| v == 0.0));
        assert_eq!(twin.b().len(), 640);
    }
}

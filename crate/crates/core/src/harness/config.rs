//! Experiment configuration, read from a TOML file.
//!
//! Every key is optional; missing keys take the defaults of the Lorenz 96
//! experiments. A complete file:
//!
//! ```toml
//! seed = 1
//! network = "f"            # a..f, ignored when `observations` is given
//! eigensolver = "tridiagonal"
//!
//! [model]
//! n = 40
//! forcing = 8.0
//! dt = 0.025
//! steps = 15
//! spinup_steps = 2000
//!
//! [covariance]
//! sigma_b = 0.05
//! sigma_o = 0.1
//! length_scale = 0.015
//! background_noise = "b"   # or "white": sigma_b N(0, I)
//!
//! [solver]
//! tol = 1e-4
//! max_iters = 400
//!
//! [alt]
//! sigma_b = 1.0
//! sigma_o = 1.5
//! network = "d"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceSpec;
use crate::error::{Error, Result};
use crate::krylov::SolverConfig;
use crate::lorenz96::ModelConfig;
use crate::spectral::EigenSolver;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub n: usize,
    pub forcing: f64,
    pub dt: f64,
    pub steps: usize,
    /// RK4 steps used to move the initial condition onto the attractor.
    pub spinup_steps: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        let m = ModelConfig::default();
        Self {
            n: m.n,
            forcing: m.forcing,
            dt: m.dt,
            steps: m.steps,
            spinup_steps: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceSection {
    pub sigma_b: f64,
    pub sigma_o: f64,
    pub length_scale: f64,
    pub background_noise: BackgroundNoise,
}

/// Distribution of the background perturbation `x^b - x^t_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackgroundNoise {
    /// `N(0, B)`.
    #[default]
    B,
    /// `sigma_b N(0, I)`.
    White,
}

impl Default for CovarianceSection {
    fn default() -> Self {
        let c = CovarianceSpec::for_grid(40);
        Self {
            sigma_b: c.sigma_b,
            sigma_o: c.sigma_o,
            length_scale: c.length_scale,
            background_noise: BackgroundNoise::B,
        }
    }
}

/// Overrides for the scenario where the alternative bounds are sharper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AltSection {
    pub sigma_b: f64,
    pub sigma_o: f64,
    pub network: String,
}

impl Default for AltSection {
    fn default() -> Self {
        Self {
            sigma_b: 1.0,
            sigma_o: 1.5,
            network: "d".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every random draw derives from it.
    pub seed: u64,
    /// Named network `a`..`f`.
    pub network: String,
    /// Explicit `[time, component]` pairs (zero-based), overriding `network`.
    pub observations: Option<Vec<[usize; 2]>>,
    pub eigensolver: EigenSolver,
    pub model: ModelSection,
    pub covariance: CovarianceSection,
    pub solver: SolverConfig,
    pub alt: AltSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            network: "f".into(),
            observations: None,
            eigensolver: EigenSolver::Tridiagonal,
            model: ModelSection::default(),
            covariance: CovarianceSection::default(),
            solver: SolverConfig::default(),
            alt: AltSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.model_config()?;
        self.covariance_spec().validate()?;
        if !(self.solver.tol.is_finite() && self.solver.tol > 0.0) {
            return Err(Error::Config("solver.tol must be positive".into()));
        }
        Ok(())
    }

    pub fn model_config(&self) -> Result<ModelConfig> {
        let m = &self.model;
        let cfg = ModelConfig::new(m.n, m.forcing, m.dt, m.steps)?;
        if cfg.dt == 0.0 {
            return Err(Error::Config("model.dt must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn covariance_spec(&self) -> CovarianceSpec {
        CovarianceSpec {
            sigma_b: self.covariance.sigma_b,
            sigma_o: self.covariance.sigma_o,
            length_scale: self.covariance.length_scale,
            dx: 1.0 / self.model.n as f64,
        }
    }

    /// The alternative scenario: same seed and model, `alt` error statistics
    /// and network.
    pub fn alt_scenario(&self) -> Self {
        let mut cfg = self.clone();
        cfg.covariance.sigma_b = self.alt.sigma_b;
        cfg.covariance.sigma_o = self.alt.sigma_o;
        cfg.network = self.alt.network.clone();
        cfg.observations = None;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.model.steps, 15);
        assert_eq!(cfg.covariance.sigma_o, 0.1);
    }

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.seed = 9;
        cfg.solver.max_iters = 12;
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_and_bad_values_fail() {
        assert!(ExperimentConfig::from_toml_str("sead = 3").is_err());
        assert!(ExperimentConfig::from_toml_str("[covariance]\nsigma_o = -1.0").is_err());
        assert!(ExperimentConfig::from_toml_str("[model]\ndt = 0.0").is_err());
    }

    #[test]
    fn alt_scenario_overrides() {
        let alt = ExperimentConfig::default().alt_scenario();
        assert_eq!(alt.covariance.sigma_o, 1.5);
        assert_eq!(alt.covariance.sigma_b, 1.0);
        assert_eq!(alt.network, "d");
    }
}

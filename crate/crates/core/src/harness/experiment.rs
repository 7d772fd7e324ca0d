//! One assimilation instance (configuration + network) and the dense
//! analysis of its three systems.

use serde::Serialize;

use crate::bounds::{bounds_alternative, bounds_for, individual_bounds_a2, individual_bounds_a3, BoundsReport};
use crate::covariance::build_r;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::networks::build_network;
use crate::harness::twin::TwinData;
use crate::krylov::{cg, minres, SolveLog, SolverConfig};
use crate::operators::{assemble_dense, make_system, BlockOperators, Formulation, ObservationNetwork};
use crate::spectral::{
    alternative_inputs, htrinvh_eigenvalues, summarize, sym_eig_with, AlternativeInputs, EigenSolver, Inertia, SpectralSummary,
    Spectrum, XiMethod,
};

/// The operators and right-hand side data for one network.
#[derive(Debug)]
pub struct Instance {
    pub label: String,
    pub ops: BlockOperators,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
}

impl Instance {
    pub fn new(cfg: &ExperimentConfig, twin: &TwinData, network: ObservationNetwork, label: impl Into<String>) -> Result<Self> {
        let r = build_r(&network, cfg.covariance.sigma_o)?;
        let d = twin.d(&network)?;
        let ops = BlockOperators::new(Box::new(twin.forecast.clone()), network, twin.d.clone(), r)?;
        Ok(Self {
            label: label.into(),
            ops,
            b: twin.b(),
            d,
        })
    }

    /// Instance for the network named in `cfg` (or its explicit list).
    pub fn from_config(cfg: &ExperimentConfig, twin: &TwinData) -> Result<Self> {
        let m = &cfg.model;
        match &cfg.observations {
            Some(pairs) => {
                let net = ObservationNetwork::from_pairs(m.n, m.steps, pairs.iter().map(|&[t, c]| (t, c)))?;
                Self::new(cfg, twin, net, "custom")
            }
            None => Self::named(cfg, twin, &cfg.network),
        }
    }

    pub fn named(cfg: &ExperimentConfig, twin: &TwinData, id: &str) -> Result<Self> {
        let net = build_network(id, cfg.model.n, cfg.model.steps)?;
        Self::new(cfg, twin, net, id.to_ascii_lowercase())
    }

    pub fn spectrum(&self, formulation: Formulation, solver: EigenSolver) -> Result<Spectrum> {
        sym_eig_with(&assemble_dense(&self.ops, formulation)?, solver)
    }

    /// Solve with MINRES (`A3`, `A2`) or CG (`A1`) from a zero start.
    pub fn solve(&self, formulation: Formulation, cfg: &SolverConfig) -> Result<(Vec<f64>, SolveLog)> {
        let system = make_system(&self.ops, formulation, &self.b, &self.d)?;
        match formulation {
            Formulation::A1 => cg(&system, system.rhs(), cfg),
            _ => minres(&system, system.rhs(), cfg),
        }
    }
}

/// Spectra, summary and bounds of all three formulations of one instance.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub label: String,
    pub p: usize,
    pub s: usize,
    pub summary: SpectralSummary,
    #[serde(skip)]
    pub spectra: Vec<(Formulation, Spectrum)>,
    pub inertia: Vec<(Formulation, Inertia)>,
    /// Standard bounds, already checked against the spectra.
    pub bounds: Vec<BoundsReport>,
    /// Alternative bounds for `A3` and `A2`, when requested.
    pub alternative_inputs: Option<AlternativeInputs>,
    pub alternative_bounds: Vec<BoundsReport>,
    /// Eigenvalue indices outside their individual bands (`A3`, `A2`).
    pub band_violations: Vec<(Formulation, usize)>,
}

impl Analysis {
    pub fn spectrum(&self, f: Formulation) -> &Spectrum {
        &self.spectra.iter().find(|(g, _)| *g == f).expect("all formulations analysed").1
    }

    pub fn bounds(&self, f: Formulation) -> &BoundsReport {
        self.bounds.iter().find(|b| b.formulation == f).expect("all formulations bounded")
    }

    pub fn alternative_bounds(&self, f: Formulation) -> Option<&BoundsReport> {
        self.alternative_bounds.iter().find(|b| b.formulation == f)
    }

    pub fn all_contained(&self) -> bool {
        self.bounds
            .iter()
            .chain(&self.alternative_bounds)
            .all(|b| b.is_contained() == Some(true))
    }
}

pub fn analyse(instance: &Instance, solver: EigenSolver, with_alternative: bool) -> Result<Analysis> {
    let ops = &instance.ops;
    let summary = summarize(ops, solver)?;
    let mut spectra = Vec::new();
    let mut bounds = Vec::new();
    let mut inertia = Vec::new();
    for f in Formulation::ALL {
        let spec = instance.spectrum(f, solver)?;
        let mut report = bounds_for(f, &summary);
        report.check(&spec);
        inertia.push((f, spec.inertia()));
        bounds.push(report);
        spectra.push((f, spec));
    }
    let (alternative_inputs, alternative_bounds) = if with_alternative {
        let inputs = alternative_inputs(ops, XiMethod::SymmetricSqrt, solver)?;
        let mut reports = Vec::new();
        for f in [Formulation::A3, Formulation::A2] {
            let mut r = bounds_alternative(f, &summary, &inputs)?;
            r.check(&spectra.iter().find(|(g, _)| *g == f).expect("analysed").1);
            reports.push(r);
        }
        (Some(inputs), reports)
    } else {
        (None, Vec::new())
    };

    let d_eigs = ops.d().eigenvalues();
    let r_eigs = ops.r().eigenvalues();
    let nu = htrinvh_eigenvalues(ops, solver)?;
    let mut band_violations = Vec::new();
    let a3_bands = individual_bounds_a3(&summary, &d_eigs, &r_eigs);
    let a2_bands = individual_bounds_a2(&summary, &d_eigs, &nu)?;
    for (f, bands) in [(Formulation::A3, a3_bands), (Formulation::A2, a2_bands)] {
        let spec = &spectra.iter().find(|(g, _)| *g == f).expect("analysed").1;
        band_violations.extend(bands.violations(spec)?.into_iter().map(|k| (f, k)));
    }

    Ok(Analysis {
        label: instance.label.clone(),
        p: ops.p(),
        s: ops.s(),
        summary,
        spectra,
        inertia,
        bounds,
        alternative_inputs,
        alternative_bounds,
        band_violations,
    })
}

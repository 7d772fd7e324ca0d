//! File artifacts: spectra, bounds, residual histories, tables and the
//! verification summary.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::{monotonicity_report, BoundsReport, ChainStep, MonotonicityReport};
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{analyse, Analysis, Instance};
use crate::harness::networks::{build_network, single_observation_chain, NETWORK_IDS};
use crate::harness::twin::{run_twin, TwinData};
use crate::krylov::SolveLog;
use crate::lorenz96::{adjoint_mismatch, taylor_errors};
use crate::operators::{recover_increment, make_system, Formulation};
use crate::spectral::{summarize, EigenSolver, Spectrum, SpectralSummary};

/// Networks of the tables for the three formulations.
pub const TABLE_NETWORKS: [&str; 4] = ["a", "c", "e", "f"];

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn form_tag(f: Formulation) -> String {
    f.label().to_ascii_lowercase()
}

/// `spectrum_<form>_<net>.csv` with `index,eigenvalue`.
pub fn write_spectrum(dir: &Path, f: Formulation, net: &str, spectrum: &Spectrum) -> Result<PathBuf> {
    let (path, out) = create(dir, &format!("spectrum_{}_{net}.csv", form_tag(f)))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "eigenvalue"])?;
    for (i, v) in spectrum.values().iter().enumerate() {
        w.write_record([i.to_string(), format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(path)
}

/// Contents of `bounds_<form>_<net>.json`.
#[derive(Debug, Serialize)]
pub struct BoundsFile<'a> {
    pub network: &'a str,
    pub p: usize,
    pub summary: &'a SpectralSummary,
    pub standard: &'a BoundsReport,
    pub alternative: Option<&'a BoundsReport>,
}

pub fn write_bounds(dir: &Path, f: Formulation, net: &str, file: &BoundsFile<'_>) -> Result<PathBuf> {
    let (path, out) = create(dir, &format!("bounds_{}_{net}.json", form_tag(f)))?;
    serde_json::to_writer_pretty(out, file)?;
    Ok(path)
}

/// `residuals_<form>_<net>.csv` with `iteration,relative_residual`.
pub fn write_residuals(dir: &Path, f: Formulation, net: &str, log: &SolveLog) -> Result<PathBuf> {
    let (path, out) = create(dir, &format!("residuals_{}_{net}.csv", form_tag(f)))?;
    log.write_csv(out)?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, out) = create(dir, name)?;
    serde_json::to_writer_pretty(out, value)?;
    Ok(path)
}

/// Write spectra and bounds files for every formulation of `analysis`.
pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for f in Formulation::ALL {
        paths.push(write_spectrum(dir, f, &analysis.label, analysis.spectrum(f))?);
        let file = BoundsFile {
            network: &analysis.label,
            p: analysis.p,
            summary: &analysis.summary,
            standard: analysis.bounds(f),
            alternative: analysis.alternative_bounds(f),
        };
        paths.push(write_bounds(dir, f, &analysis.label, &file)?);
    }
    Ok(paths)
}

/// One row of a bounds table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub network: String,
    pub bound: String,
    pub neg_bound_lo: Option<f64>,
    pub neg_bound_hi: Option<f64>,
    pub neg_eig_min: Option<f64>,
    pub neg_eig_max: Option<f64>,
    pub pos_bound_lo: f64,
    pub pos_bound_hi: f64,
    pub pos_eig_min: Option<f64>,
    pub pos_eig_max: Option<f64>,
    pub verdict: String,
}

impl TableRow {
    pub fn from_report(network: &str, report: &BoundsReport) -> Self {
        let c = report.containment.as_ref();
        Self {
            network: network.to_string(),
            bound: match report.kind {
                crate::bounds::BoundKind::Standard => "standard".into(),
                crate::bounds::BoundKind::Alternative => "alternative".into(),
            },
            neg_bound_lo: report.negative.map(|i| i.lo),
            neg_bound_hi: report.negative.map(|i| i.hi),
            neg_eig_min: c.and_then(|c| c.negative_extremes).map(|e| e.0),
            neg_eig_max: c.and_then(|c| c.negative_extremes).map(|e| e.1),
            pos_bound_lo: report.positive.lo,
            pos_bound_hi: report.positive.hi,
            pos_eig_min: c.and_then(|c| c.positive_extremes).map(|e| e.0),
            pos_eig_max: c.and_then(|c| c.positive_extremes).map(|e| e.1),
            verdict: match report.is_contained() {
                Some(true) => "CONTAINED".into(),
                Some(false) => "VIOLATED".into(),
                None => "UNCHECKED".into(),
            },
        }
    }

    pub fn contained(&self) -> bool {
        self.verdict == "CONTAINED"
    }
}

pub fn write_table(dir: &Path, k: usize, rows: &[TableRow]) -> Result<PathBuf> {
    let (path, out) = create(dir, &format!("table{k}.csv"))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path)
}

/// Tables 2-6: `A3`, `A2`, `A1` over networks a, c, e, f, then the
/// alternative-scenario comparison for `A3` and `A2`.
#[derive(Debug, Clone)]
pub struct Tables {
    /// `tables[0]` is table 2, .., `tables[4]` is table 6.
    pub tables: Vec<Vec<TableRow>>,
    pub analyses: Vec<Analysis>,
    pub alt: Analysis,
}

impl Tables {
    pub fn all_contained(&self) -> bool {
        self.tables.iter().flatten().all(TableRow::contained)
    }
}

pub fn reproduce_tables(cfg: &ExperimentConfig) -> Result<Tables> {
    let twin = run_twin(cfg)?;
    let solver = cfg.eigensolver;
    let analyses = TABLE_NETWORKS
        .iter()
        .map(|id| analyse(&Instance::named(cfg, &twin, id)?, solver, false))
        .collect::<Result<Vec<_>>>()?;
    let mut tables: Vec<Vec<TableRow>> = [Formulation::A3, Formulation::A2, Formulation::A1]
        .iter()
        .map(|&f| {
            analyses
                .iter()
                .map(|a| TableRow::from_report(&a.label, a.bounds(f)))
                .collect()
        })
        .collect();

    let alt_cfg = cfg.alt_scenario();
    let alt_twin = run_twin(&alt_cfg)?;
    let alt = analyse(&Instance::from_config(&alt_cfg, &alt_twin)?, solver, true)?;
    for f in [Formulation::A3, Formulation::A2] {
        let mut rows = vec![TableRow::from_report(&alt.label, alt.bounds(f))];
        if let Some(r) = alt.alternative_bounds(f) {
            rows.push(TableRow::from_report(&alt.label, r));
        }
        tables.push(rows);
    }
    Ok(Tables { tables, analyses, alt })
}

pub fn write_tables(dir: &Path, tables: &Tables) -> Result<Vec<PathBuf>> {
    tables
        .tables
        .iter()
        .enumerate()
        .map(|(i, rows)| write_table(dir, i + 2, rows))
        .collect()
}

/// Spectra with bounds for every network (figure 1) and residual
/// histories of every solve (figure 2).
#[derive(Debug, Clone)]
pub struct Figures {
    pub analyses: Vec<Analysis>,
    pub logs: Vec<(String, Formulation, SolveLog)>,
}

pub fn reproduce_figures(cfg: &ExperimentConfig) -> Result<Figures> {
    let twin = run_twin(cfg)?;
    let mut analyses = Vec::new();
    let mut logs = Vec::new();
    for id in NETWORK_IDS {
        let inst = Instance::named(cfg, &twin, id)?;
        analyses.push(analyse(&inst, cfg.eigensolver, false)?);
        for f in Formulation::ALL {
            let (_, log) = inst.solve(f, &cfg.solver)?;
            logs.push((id.to_string(), f, log));
        }
    }
    Ok(Figures { analyses, logs })
}

pub fn write_figures(dir: &Path, figures: &Figures) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for a in &figures.analyses {
        paths.extend(write_analysis(dir, a)?);
    }
    for (net, f, log) in &figures.logs {
        paths.push(write_residuals(dir, *f, net, log)?);
    }
    Ok(paths)
}

/// One named pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Containment checks make the command fail; the rest are reported.
    pub containment: bool,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
            containment: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub networks: Vec<String>,
    pub checks: Vec<Check>,
    pub monotonicity: Option<MonotonicityReport>,
    pub passed: bool,
    pub containment_passed: bool,
}

/// Checks on one analysed network: inertia, containment, individual bands,
/// and the count of `A2` eigenvalues near `-1/sigma_o^2`.
pub fn network_checks(cfg: &ExperimentConfig, a: &Analysis) -> Vec<Check> {
    let mut checks = Vec::new();
    let (s, p) = (a.s, a.p);
    for (f, inertia) in &a.inertia {
        let expected = match f {
            Formulation::A3 => (s + p, s, 0),
            Formulation::A2 => (s, s, 0),
            Formulation::A1 => (s, 0, 0),
        };
        let got = (inertia.positive, inertia.negative, inertia.zero);
        checks.push(Check::new(
            format!("{}/{f}/inertia", a.label),
            got == expected,
            format!("(+, -, 0) = {got:?}, expected {expected:?}"),
        ));
    }
    for b in a.bounds.iter().chain(&a.alternative_bounds) {
        let c = b.containment.as_ref();
        let mut check = Check::new(
            format!(
                "{}/{}/containment/{}",
                a.label,
                b.formulation,
                match b.kind {
                    crate::bounds::BoundKind::Standard => "standard",
                    crate::bounds::BoundKind::Alternative => "alternative",
                }
            ),
            b.is_contained() == Some(true),
            format!("{} eigenvalues outside", c.map_or(0, |c| c.violation_count)),
        );
        check.containment = true;
        checks.push(check);
    }
    checks.push(Check::new(
        format!("{}/individual_bands", a.label),
        a.band_violations.is_empty(),
        format!("{} eigenvalues outside their bands", a.band_violations.len()),
    ));
    let centre = 1.0 / cfg.covariance.sigma_o.powi(2);
    let sigma_max = a.summary.sigma_max;
    if p < s && centre > 2.0 * sigma_max {
        let count = a.spectrum(Formulation::A2).count_in(-centre - sigma_max, -centre + sigma_max);
        checks.push(Check::new(
            format!("{}/A2/observed_cluster", a.label),
            count == p,
            format!(
                "{count} eigenvalues in [{:.4}, {:.4}], p = {p}",
                -centre - sigma_max,
                -centre + sigma_max
            ),
        ));
    }
    checks
}

/// Solver checks: MINRES residuals non-increasing, `A3`/`A2` increments
/// agree when both converge, and (for the fully observed network) all
/// three solves converge.
pub fn solver_checks(cfg: &ExperimentConfig, inst: &Instance) -> Result<(Vec<Check>, Vec<(Formulation, SolveLog)>)> {
    let mut checks = Vec::new();
    let mut logs = Vec::new();
    let mut increments = Vec::new();
    for f in Formulation::ALL {
        let (x, log) = inst.solve(f, &cfg.solver)?;
        let system = make_system(&inst.ops, f, &inst.b, &inst.d)?;
        increments.push((f, log.converged, recover_increment(&system, &x)?.dx));
        if f != Formulation::A1 {
            let monotone = log
                .relative_residuals
                .windows(2)
                .all(|w| w[1] <= w[0] * (1.0 + 1e-12));
            checks.push(Check::new(
                format!("{}/{f}/minres_monotone", inst.label),
                monotone,
                format!("{} iterations", log.iterations),
            ));
        }
        if inst.ops.p() == inst.ops.s() {
            checks.push(Check::new(
                format!("{}/{f}/converged", inst.label),
                log.converged,
                format!("final relative residual {:e} after {} iterations", log.final_residual(), log.iterations),
            ));
        }
        logs.push((f, log));
    }
    let (_, c3, x3) = &increments[0];
    let (_, c2, x2) = &increments[1];
    if *c3 && *c2 {
        let diff = x3.iter().zip(x2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = x3.iter().map(|a| a * a).sum::<f64>().sqrt();
        let allowed = 10.0 * cfg.solver.tol * norm;
        checks.push(Check::new(
            format!("{}/A3_A2_increment_agreement", inst.label),
            diff <= allowed,
            format!("||dx3 - dx2|| = {diff:e}, allowed {allowed:e}"),
        ));
    }
    Ok((checks, logs))
}

/// Adjoint identity and Taylor test on the linearisation trajectory.
pub fn model_checks(cfg: &ExperimentConfig, twin: &TwinData) -> Result<Vec<Check>> {
    let mismatch = adjoint_mismatch(&twin.forecast, 100, cfg.seed);
    let model = cfg.model_config()?;
    let x = twin.forecast.state(0);
    let dx = crate::rng::standard_normals(&mut crate::rng::seeded(cfg.seed), model.n);
    let eps = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
    let errs = taylor_errors(x, &dx, &model, &eps)?;
    // First order: each tenfold reduction of eps cuts the error roughly
    // tenfold until round-off takes over at the smallest eps.
    let first_order = errs.windows(2).take(3).all(|w| w[1] < 0.2 * w[0]);
    Ok(vec![
        Check::new(
            "model/adjoint_identity",
            mismatch <= 1e-12,
            format!("worst normalised mismatch {mismatch:e}"),
        ),
        Check::new(
            "model/taylor_first_order",
            first_order,
            format!("errors {:?} at eps {eps:?}", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()),
        ),
    ])
}

/// Dense measurements along a nested chain of networks.
pub fn chain_steps(
    cfg: &ExperimentConfig,
    twin: &TwinData,
    networks: &[crate::operators::ObservationNetwork],
    solver: EigenSolver,
) -> Result<Vec<ChainStep>> {
    networks
        .iter()
        .map(|net| {
            let inst = Instance::new(cfg, twin, net.clone(), format!("p{}", net.p()))?;
            let summary = summarize(&inst.ops, solver)?;
            Ok(ChainStep {
                network: net.clone(),
                summary,
                a3: inst.spectrum(Formulation::A3, solver)?,
                a2: inst.spectrum(Formulation::A2, solver)?,
                a1: inst.spectrum(Formulation::A1, solver)?,
                diagonal_r: inst.ops.r().is_diagonal(),
            })
        })
        .collect()
}

/// Run the checks for one network, or for all six networks plus the
/// alternative scenario and the nested-chain monotonicity claims.
pub fn verify(cfg: &ExperimentConfig, network: Option<&str>) -> Result<VerifyReport> {
    let twin = run_twin(cfg)?;
    let solver = cfg.eigensolver;
    let ids: Vec<String> = match network {
        Some(id) => vec![id.to_ascii_lowercase()],
        None => NETWORK_IDS.iter().map(|s| s.to_string()).collect(),
    };
    let mut checks = model_checks(cfg, &twin)?;
    for id in &ids {
        let inst = Instance::named(cfg, &twin, id)?;
        let a = analyse(&inst, solver, false)?;
        checks.extend(network_checks(cfg, &a));
        checks.extend(solver_checks(cfg, &inst)?.0);
    }
    let monotonicity = if network.is_none() {
        let alt_cfg = cfg.alt_scenario();
        let alt_twin = run_twin(&alt_cfg)?;
        let alt = analyse(&Instance::from_config(&alt_cfg, &alt_twin)?, solver, true)?;
        checks.extend(network_checks(&alt_cfg, &alt).into_iter().map(|mut c| {
            c.name = format!("alt/{}", c.name);
            c
        }));

        let (n, steps) = (cfg.model.n, cfg.model.steps);
        let mut nets: Vec<_> = NETWORK_IDS
            .iter()
            .map(|id| build_network(id, n, steps))
            .collect::<Result<_>>()?;
        // Single-observation steps from a to b, then whole-network steps.
        let mut chain = single_observation_chain(&nets[0], &nets[1])?;
        chain.extend(nets.drain(2..));
        let steps = chain_steps(cfg, &twin, &chain, solver)?;
        let report = monotonicity_report(&steps)?;
        for v in &report.verdicts {
            checks.push(Check::new(
                format!("monotonicity/{:?}", v.claim),
                v.status != crate::bounds::Status::Violated,
                format!("{:?}: {} checked, {} skipped", v.status, v.checked, v.skipped),
            ));
        }
        Some(report)
    } else {
        None
    };
    let passed = checks.iter().all(|c| c.passed);
    let containment_passed = checks.iter().filter(|c| c.containment).all(|c| c.passed);
    Ok(VerifyReport {
        seed: cfg.seed,
        networks: ids,
        checks,
        monotonicity,
        passed,
        containment_passed,
    })
}

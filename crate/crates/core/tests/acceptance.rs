//! Acceptance criteria, one PASS/FAIL line each. Runs the default
//! experiment (seed 1) at full size; expect a few minutes on one core.

use std::process::ExitCode;

use wc4dvar::bounds::{monotonicity_report, ChainStep, Claim, MonotonicityReport, Status};
use wc4dvar::harness::artifacts::{chain_steps, solver_checks};
use wc4dvar::harness::{analyse, run_twin, single_observation_chain, Analysis, ExperimentConfig, Instance, NETWORK_IDS};
use wc4dvar::lorenz96::{adjoint_mismatch, taylor_errors};
use wc4dvar::operators::{Formulation, ObservationNetwork};
use wc4dvar::rng;
use wc4dvar::spectral::EigenSolver;

/// Relative tolerance for deterministic table entries.
const TIGHT: f64 = 5e-3;
/// Relative tolerance for SOAR- and trajectory-dependent entries.
const LOOSE: f64 = 0.25;
const ADJOINT_TOL: f64 = 1e-12;
/// Window for the clustered `A2` eigenvalues near `-1/sigma_o^2 = -100`.
const CLUSTER: (f64, f64) = (-110.0, -90.0);

struct Outcome {
    passed: bool,
    detail: String,
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn within(got: f64, want: f64, tol: f64, what: &str, notes: &mut Vec<String>) -> bool {
    let r = rel(got, want);
    notes.push(format!("{what} {got:.4e} vs {want:.4e} ({:.1}%)", 100.0 * r));
    r <= tol
}

struct Run {
    cfg: ExperimentConfig,
    instances: Vec<Instance>,
    analyses: Vec<Analysis>,
    alt: Analysis,
}

impl Run {
    fn get(&self, id: &str) -> &Analysis {
        &self.analyses[NETWORK_IDS.iter().position(|&n| n == id).expect("known id")]
    }
}

fn inertia(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let mut passed = true;
    for id in ["a", "c", "e", "f"] {
        let a = run.get(id);
        for (f, i) in &a.inertia {
            let want = match f {
                Formulation::A3 => (640 + a.p, 640, 0),
                Formulation::A2 => (640, 640, 0),
                Formulation::A1 => (640, 0, 0),
            };
            let got = (i.positive, i.negative, i.zero);
            if got != want {
                passed = false;
                notes.push(format!("{id}/{f} {got:?} != {want:?}"));
            }
        }
    }
    if passed {
        notes.push("(+, -, 0) as expected for A3, A2, A1 on a, c, e, f".into());
    }
    // The harness uses Householder + QL; cross-check one spectrum with Jacobi.
    let f = &run.instances[5];
    let jac = f.spectrum(Formulation::A1, EigenSolver::Jacobi).expect("jacobi");
    let ql = run.get("f").spectrum(Formulation::A1);
    let gap = jac
        .values()
        .iter()
        .zip(ql.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / ql.norm();
    passed &= gap <= 1e-12;
    notes.push(format!("Jacobi vs QL on A1(f): max gap {gap:.1e} relative"));
    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

fn containment(run: &Run) -> Outcome {
    let mut outside = Vec::new();
    for a in run.analyses.iter().chain([&run.alt]) {
        for b in &a.bounds {
            if b.is_contained() != Some(true) {
                let n = b.containment.as_ref().map_or(0, |c| c.violation_count);
                outside.push(format!("{}/{}: {n} outside", a.label, b.formulation));
            }
        }
    }
    Outcome {
        passed: outside.is_empty(),
        detail: if outside.is_empty() {
            "all eigenvalues of a-f and the alternative scenario inside their intervals".into()
        } else {
            outside.join("; ")
        },
    }
}

fn deterministic_entries(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let f = run.get("f");
    let neg = f.bounds(Formulation::A2).negative.expect("A2 has negative bounds");
    let mut passed = within(neg.lo, -1.0005e2, TIGHT, "A2(f) I- lower", &mut notes);
    passed &= within(neg.hi, -1.00e2, TIGHT, "A2(f) I- upper", &mut notes);
    passed &= within(f.bounds(Formulation::A1).positive.lo, 1.00e2, TIGHT, "A1(f) lower", &mut notes);
    for a in &run.analyses {
        let want_min = if a.label == "f" { 100.0 } else { 0.0 };
        let ok = rel(a.summary.nu_max, 100.0) <= 1e-12 && (a.summary.nu_min - want_min).abs() <= 1e-12 * 100.0;
        if !ok {
            notes.push(format!("{} nu = [{:e}, {:e}]", a.label, a.summary.nu_min, a.summary.nu_max));
        }
        passed &= ok;
    }
    notes.push("nu_max = 100 on a-f, nu_min = 0 on a-e and 100 on f".into());
    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

fn soar_entries(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let s = &run.get("f").summary;
    let mut passed = s.tau_min == s.psi_min;
    passed &= within(s.tau_min, 5.93e-4, LOOSE, "tau_min = psi_min", &mut notes);
    passed &= within(
        run.get("f").bounds(Formulation::A3).positive.lo,
        5.93e-4,
        LOOSE,
        "A3(f) I+ lower",
        &mut notes,
    );
    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

fn trajectory_entries(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let f = run.get("f");
    let b3 = f.bounds(Formulation::A3);
    let mut passed = within(b3.negative.expect("A3").lo, -2.410, LOOSE, "A3(f) I- lower", &mut notes);
    passed &= within(b3.positive.hi, 2.416, LOOSE, "A3(f) I+ upper", &mut notes);
    passed &= within(f.bounds(Formulation::A1).positive.hi, 9.80e3, LOOSE, "A1(f) upper", &mut notes);
    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

fn cluster_count(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let mut passed = true;
    for a in run.analyses.iter().filter(|a| a.label != "f") {
        let count = a.spectrum(Formulation::A2).count_in(CLUSTER.0, CLUSTER.1);
        passed &= count == a.p;
        notes.push(format!("{}: {count}/{}", a.label, a.p));
    }
    Outcome {
        passed,
        detail: format!("A2 eigenvalues in [{}, {}] vs p: {}", CLUSTER.0, CLUSTER.1, notes.join(", ")),
    }
}

const CHAIN_CLAIMS: [Claim; 7] = [
    Claim::A3Extremes,
    Claim::A2Extremes,
    Claim::A1Eigenvalues,
    Claim::ThetaGrows,
    Claim::RhoSpreads,
    Claim::NuMaxGrows,
    Claim::A2PositiveInsideA3,
];

fn claims_hold(label: &str, report: &MonotonicityReport, notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    for claim in CHAIN_CLAIMS {
        let v = report.verdict(claim);
        if v.status != Status::Holds {
            ok = false;
            notes.push(format!("{label}: {claim:?} {:?} (first at step {:?})", v.status, v.first_violation));
        }
    }
    notes.push(format!("{label}: {} networks", report.steps));
    ok
}

fn step_from(a: &Analysis, network: ObservationNetwork) -> ChainStep {
    ChainStep {
        network,
        summary: a.summary.clone(),
        a3: a.spectrum(Formulation::A3).clone(),
        a2: a.spectrum(Formulation::A2).clone(),
        a1: a.spectrum(Formulation::A1).clone(),
        diagonal_r: true,
    }
}

fn monotonicity(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let cfg = &run.cfg;
    let twin = run_twin(cfg).expect("twin");

    // Whole networks a to f.
    let whole: Vec<ChainStep> = run
        .instances
        .iter()
        .zip(&run.analyses)
        .map(|(i, a)| step_from(a, i.ops.network().clone()))
        .collect();
    let mut passed = claims_hold("a..f", &monotonicity_report(&whole).expect("nested"), &mut notes);

    // One observation at a time from a to b, full size.
    let (na, nb) = (run.instances[0].ops.network(), run.instances[1].ops.network());
    let chain = single_observation_chain(na, nb).expect("nested");
    let inner = chain_steps(cfg, &twin, &chain[1..chain.len() - 1], cfg.eigensolver).expect("chain");
    let mut steps = vec![whole[0].clone()];
    steps.extend(inner);
    steps.push(whole[1].clone());
    passed &= claims_hold("a..b by one", &monotonicity_report(&steps).expect("nested"), &mut notes);

    // Reduced size, one observation at a time from one observation to full.
    let mut small = cfg.clone();
    small.model.n = 10;
    small.model.steps = 3;
    small.model.spinup_steps = 500;
    let small_twin = run_twin(&small).expect("twin");
    let start = ObservationNetwork::from_pairs(10, 3, [(3, 0)]).expect("network");
    let chain = single_observation_chain(&start, &ObservationNetwork::full(10, 3)).expect("nested");
    let steps = chain_steps(&small, &small_twin, &chain, small.eigensolver).expect("chain");
    passed &= claims_hold("n=10 N=3 by one", &monotonicity_report(&steps).expect("nested"), &mut notes);

    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

fn solver_protocol(run: &Run) -> Outcome {
    let (checks, logs) = solver_checks(&run.cfg, &run.instances[5]).expect("solves");
    let mut notes: Vec<String> = logs
        .iter()
        .map(|(f, l)| format!("{f}: {} its, relres {:.2e}", l.iterations, l.final_residual()))
        .collect();
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        notes.push(format!("{}: {}", c.name, c.detail));
    }
    Outcome {
        passed: failed.is_empty(),
        detail: notes.join("; "),
    }
}

fn tangent_linear(run: &Run) -> Outcome {
    let twin = run_twin(&run.cfg).expect("twin");
    let mismatch = adjoint_mismatch(&twin.forecast, 100, 7);
    let model = run.cfg.model_config().expect("model");
    let dx = rng::standard_normals(&mut rng::seeded(11), model.n);
    let eps = [1e-2, 1e-3, 1e-4, 1e-5];
    let errs = taylor_errors(twin.forecast.state(0), &dx, &model, &eps).expect("taylor");
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let first_order = ratios.iter().all(|r| (5.0..20.0).contains(r));
    Outcome {
        passed: mismatch <= ADJOINT_TOL && first_order,
        detail: format!(
            "adjoint mismatch {mismatch:.1e} over 100 pairs x 15 steps; Taylor error ratios per decade {:?}",
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    }
}

fn alternative(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let alt = &run.alt;
    let mut passed = true;
    // Reference values: A3 then A2, (I- lower, I- upper, I+ lower, I+ upper).
    let want = [
        (Formulation::A3, [-5.10, -1.33e-2, 2.37e-1, 7.53]),
        (Formulation::A2, [-15.79, -1.33e-2, 2.37e-1, 7.51]),
    ];
    for (f, w) in want {
        let std = alt.bounds(f);
        let an = alt.alternative_bounds(f).expect("alternative bounds computed");
        let (sn, an_n) = (std.negative.expect("neg"), an.negative.expect("neg"));
        let wider = an_n.lo < sn.lo && an.positive.hi > std.positive.hi;
        if !wider {
            notes.push(format!("{f}: alternative not wider on the outer ends"));
        }
        passed &= wider;
        for (got, want, what) in [
            (an_n.lo, w[0], "I- lower"),
            (an_n.hi, w[1], "I- upper"),
            (an.positive.lo, w[2], "I+ lower"),
            (an.positive.hi, w[3], "I+ upper"),
        ] {
            passed &= within(got, want, LOOSE, &format!("{f} {what}"), &mut notes);
        }
    }
    let a3 = alt.alternative_bounds(Formulation::A3).expect("computed");
    let exact = a3.positive.lo == alt.summary.tau_min;
    if !exact {
        notes.push("A3 I+ lower differs from tau_min".into());
    }
    Outcome {
        passed: passed && exact,
        detail: notes.join("; "),
    }
}

fn main() -> ExitCode {
    let cfg = ExperimentConfig::default();
    let twin = run_twin(&cfg).expect("twin experiment");
    let instances: Vec<Instance> = NETWORK_IDS
        .iter()
        .map(|id| Instance::named(&cfg, &twin, id).expect("network"))
        .collect();
    let analyses: Vec<Analysis> = instances
        .iter()
        .map(|i| analyse(i, cfg.eigensolver, false).expect("analysis"))
        .collect();
    let alt_cfg = cfg.alt_scenario();
    let alt_twin = run_twin(&alt_cfg).expect("alternative twin");
    let alt = analyse(&Instance::from_config(&alt_cfg, &alt_twin).expect("network"), cfg.eigensolver, true)
        .expect("alternative analysis");
    let run = Run {
        cfg,
        instances,
        analyses,
        alt,
    };

    let criteria: [(&str, fn(&Run) -> Outcome); 10] = [
        ("inertia", inertia),
        ("bound containment", containment),
        ("deterministic table entries", deterministic_entries),
        ("SOAR-dependent entries", soar_entries),
        ("trajectory-dependent entries", trajectory_entries),
        ("observed cluster count", cluster_count),
        ("monotonicity", monotonicity),
        ("solver protocol", solver_protocol),
        ("adjoint and Taylor", tangent_linear),
        ("alternative bounds", alternative),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check(&run);
        if !o.passed {
            failures += 1;
        }
        println!("{} {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

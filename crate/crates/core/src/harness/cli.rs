//! Command-line front end used by the `wc4dvar` binary.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::artifacts::{
    reproduce_figures, reproduce_tables, verify, write_analysis, write_figures, write_json, write_residuals,
    write_tables,
};
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{analyse, Instance};
use crate::harness::networks::NETWORK_IDS;
use crate::harness::twin::run_twin;
use crate::operators::Formulation;

pub const OUTPUT_ENV: &str = "WC4DVAR_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "wc4dvar", version, about = "Weak-constraint 4D-Var inner-loop spectra and bounds")]
pub struct Cli {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUTPUT_ENV, default_value = "output")]
    pub output: PathBuf,
    /// Override the master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identical twin and write the trajectories and innovations.
    Simulate {
        #[arg(long)]
        network: Option<String>,
    },
    /// Dense spectra of the three systems.
    Spectrum {
        #[arg(long)]
        network: Option<String>,
    },
    /// Bounds and their containment check; exits 2 if any eigenvalue escapes.
    Bounds {
        #[arg(long)]
        network: Option<String>,
        /// Also compute the alternative bounds for `A3` and `A2`.
        #[arg(long)]
        alternative: bool,
    },
    /// MINRES / CG residual histories.
    Solve {
        #[arg(long)]
        network: Option<String>,
        /// Restrict to one formulation (A3, A2, A1).
        #[arg(long)]
        formulation: Option<Formulation>,
    },
    /// table2.csv .. table6.csv.
    Tables,
    /// Spectra, bounds and residuals for every network.
    Figures,
    /// All checks; writes verify.json and exits 2 on containment failure.
    Verify {
        #[arg(long)]
        network: Option<String>,
    },
}

fn check_network(id: &str) -> Result<String> {
    let id = id.to_ascii_lowercase();
    if NETWORK_IDS.contains(&id.as_str()) {
        Ok(id)
    } else {
        Err(Error::UnknownNetwork(id))
    }
}

fn config_for(cli: &Cli, network: Option<&str>) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(id) = network {
        cfg.network = check_network(id)?;
        cfg.observations = None;
    } else if cfg.observations.is_none() {
        cfg.network = check_network(&cfg.network)?;
    }
    Ok(cfg)
}

#[derive(serde::Serialize)]
struct SimulateFile<'a> {
    network: &'a str,
    p: usize,
    truth: &'a [Vec<f64>],
    forecast: &'a [Vec<f64>],
    background: &'a [f64],
    innovations: Vec<f64>,
}

/// Run one command. `Ok(false)` means a containment check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let out = &cli.output;
    match &cli.command {
        Command::Simulate { network } => {
            let cfg = config_for(cli, network.as_deref())?;
            let twin = run_twin(&cfg)?;
            let inst = Instance::from_config(&cfg, &twin)?;
            let file = SimulateFile {
                network: &inst.label,
                p: inst.ops.p(),
                truth: twin.truth.states(),
                forecast: twin.forecast.states(),
                background: &twin.background,
                innovations: inst.d.clone(),
            };
            let path = write_json(out, &format!("simulate_{}.json", inst.label), &file)?;
            println!("{}", path.display());
            Ok(true)
        }
        Command::Spectrum { network } | Command::Bounds { network, .. } => {
            let alternative = matches!(cli.command, Command::Bounds { alternative: true, .. });
            let cfg = config_for(cli, network.as_deref())?;
            let twin = run_twin(&cfg)?;
            let inst = Instance::from_config(&cfg, &twin)?;
            let a = analyse(&inst, cfg.eigensolver, alternative)?;
            for path in write_analysis(out, &a)? {
                println!("{}", path.display());
            }
            for b in a.bounds.iter().chain(&a.alternative_bounds) {
                let c = b.containment.as_ref();
                eprintln!(
                    "{} {:?}: {}",
                    b.formulation,
                    b.kind,
                    if b.is_contained() == Some(true) {
                        "contained".to_string()
                    } else {
                        format!("{} eigenvalues outside", c.map_or(0, |c| c.violation_count))
                    }
                );
            }
            Ok(a.all_contained())
        }
        Command::Solve { network, formulation } => {
            let cfg = config_for(cli, network.as_deref())?;
            let twin = run_twin(&cfg)?;
            let inst = Instance::from_config(&cfg, &twin)?;
            let forms: Vec<Formulation> = match formulation {
                Some(f) => vec![*f],
                None => Formulation::ALL.to_vec(),
            };
            for f in forms {
                let (_, log) = inst.solve(f, &cfg.solver)?;
                let path = write_residuals(out, f, &inst.label, &log)?;
                eprintln!(
                    "{f}: {} iterations, relative residual {:e}, converged {}",
                    log.iterations,
                    log.final_residual(),
                    log.converged
                );
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Tables => {
            let cfg = config_for(cli, None)?;
            let tables = reproduce_tables(&cfg)?;
            for path in write_tables(out, &tables)? {
                println!("{}", path.display());
            }
            Ok(tables.all_contained())
        }
        Command::Figures => {
            let cfg = config_for(cli, None)?;
            let figures = reproduce_figures(&cfg)?;
            for path in write_figures(out, &figures)? {
                println!("{}", path.display());
            }
            Ok(figures.analyses.iter().all(|a| a.all_contained()))
        }
        Command::Verify { network } => {
            let net = network.as_deref().map(check_network).transpose()?;
            let cfg = config_for(cli, None)?;
            let report = verify(&cfg, net.as_deref())?;
            for c in &report.checks {
                eprintln!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            println!("{}", write_json(out, "verify.json", &report)?.display());
            Ok(report.containment_passed)
        }
    }
}

/// Parse arguments and run. Exit codes: 0 success, 1 error, 2 usage error
/// or containment failure.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: eigenvalues outside their bounds");
            ExitCode::from(2)
        }
        Err(e @ Error::UnknownNetwork(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

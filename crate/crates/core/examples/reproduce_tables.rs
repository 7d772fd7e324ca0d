//! Full-size twin experiment: tables 2-6 and the verification report,
//! written under `WC4DVAR_OUTPUT_DIR` (or a temporary directory).

use std::path::PathBuf;

use wc4dvar::harness::artifacts::{reproduce_tables, write_tables};
use wc4dvar::harness::cli::OUTPUT_ENV;
use wc4dvar::harness::ExperimentConfig;

fn main() -> wc4dvar::Result<()> {
    let out = std::env::var_os(OUTPUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("wc4dvar-tables"));
    let tables = reproduce_tables(&ExperimentConfig::default())?;
    for (path, rows) in write_tables(&out, &tables)?.iter().zip(&tables.tables) {
        println!("{}", path.display());
        for r in rows {
            println!(
                "  {} {:<11} I- [{:>11.4e}, {:>11.4e}]  I+ [{:.4e}, {:.4e}]  {}",
                r.network,
                r.bound,
                r.neg_bound_lo.unwrap_or(f64::NAN),
                r.neg_bound_hi.unwrap_or(f64::NAN),
                r.pos_bound_lo,
                r.pos_bound_hi,
                r.verdict
            );
        }
    }
    Ok(())
}

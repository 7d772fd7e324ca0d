//! Identical-twin experiments over observation networks a-f and the
//! artifacts reproducing the tables and figures.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod experiment;
pub mod networks;
pub mod twin;

pub use config::ExperimentConfig;
pub use experiment::{analyse, Analysis, Instance};
pub use networks::{build_network, single_observation_chain, NETWORK_IDS};
pub use twin::{run_twin, TwinData};
pub use artifacts::{reproduce_figures, reproduce_tables, verify, Tables, VerifyReport};

//! Weak-constraint 4D-Var inner-loop systems for the Lorenz 96 model.

pub mod bounds;
pub mod covariance;
pub mod error;
pub mod harness;
pub mod krylov;
pub mod lorenz96;
pub mod operators;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};

//! Ground states of the nonlinear Schrödinger energy with combined power
//! nonlinearities on periodic metric graphs.

pub mod competitors;
pub mod error;
pub mod functionals;
pub mod graph;
pub mod linsolve;
pub mod mesh;
pub mod minimize;
mod optim;
pub mod thresholds;

pub use error::{Error, Result};

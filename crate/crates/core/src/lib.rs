//! Graphons, measure-valued graphons and optimization dynamics on them.

pub mod error;
pub mod graphon;
pub mod hamiltonian;
pub mod flow;
pub mod metropolis;
pub mod mvg;
pub mod runner;
pub mod sde;

pub use error::{Error, Result};

//! Relative equilibria of the planar N-body problem: central-configuration
//! solvers, the reduced moving-frame Hamiltonian, degree-4 Birkhoff normal
//! forms with resonance and nondegeneracy verdicts, and shooting-based
//! periodic-orbit families on the reduced dynamics.
//!
//! The high-level entry points live in [`analysis`]; the `relequi` binary
//! wraps them in `analyze`, `sweep`, `orbits`, `oracle` and `scan`
//! subcommands.

pub mod analysis;
pub mod central;
pub mod cli;
pub mod collinear;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod masses;
pub mod normal_form;
pub mod poly;
pub mod potential;
pub mod reduced;
pub mod report;
pub mod resonance;
pub mod spectrum;

pub use analysis::{analyze, AnalysisReport, ConfigRequest};
pub use error::{Error, Result};
pub use masses::MassSystem;

//! Reference implementations used to check the solvers from the outside:
//! slice-based divergences, a brute-force grid minimizer and random samplers.

pub mod grid;
pub mod reference;

pub use grid::{grid_minimize, Domain, GridMin};
pub use reference::{divergence, log_uniform, prox_objective, regularizer};

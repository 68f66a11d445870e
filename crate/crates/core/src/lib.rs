//! Bregman proximal gradient methods for relatively smooth convex problems
//! `min_{x ∈ C} f(x) + Ψ(x)`, including the accelerated variants with exponent
//! and gain adaptation and accelerated dual averaging.

pub mod error;
pub mod instances;
pub mod kernels;
pub mod objectives;
pub mod solvers;
pub mod stepsize;
pub mod subproblems;

pub use error::{Error, Result};
pub use instances::{gen_doptimal, gen_poisson, gen_relentropy, load_libsvm, Family, Instance};
pub use kernels::{BregmanKernel, KernelKind};
pub use objectives::{Objective, ObjectiveKind, Regularizer};
pub use solvers::{run, Algorithm, CompositeProblem, SolverConfig, SolverTrace, TraceRow};
pub use stepsize::{ThetaMode, ThetaSequence};
pub use subproblems::FeasibleSet;

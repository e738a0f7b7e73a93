//! Bayesian multiobjective optimization on scalarized objectives.
//!
//! An expensive multiobjective problem is reduced, each iteration, to one
//! scalar target per evaluated sample by one of fifteen scalarizing
//! functions. A Gaussian process is fitted to those targets and the next
//! expensive evaluation is chosen by maximizing expected improvement with a
//! real-coded genetic algorithm. The [`harness`] module runs that loop on
//! the DTLZ and WFG suites and compares scalarizers with IGD, hypervolume
//! and rank-sum statistics.

pub mod acquisition;
pub mod domain;
pub mod error;
pub mod harness;
pub mod io;
pub mod pareto;
pub mod problems;
pub mod rng;
pub mod sampling;
pub mod scalarizers;
pub mod surrogate;

pub use domain::{Archive, EvaluatedSample, NormalizationBounds, ProblemSpec, RunState};
pub use error::{Error, Result};
pub use scalarizers::{ScalarizerKind, ScalarizerSpec};

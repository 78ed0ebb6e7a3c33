//! Convergence analysis for finite-state inference methods on empirical
//! problems given by truth automata.

pub mod bayes;
pub mod convergence;
pub mod dsl;
pub mod error;
pub mod graph;
pub mod methods;
pub mod numeric;
pub mod problem;
pub mod product;
pub mod rng;
pub mod statistics;

pub use convergence::{ConvergenceVerdict, Mode, Verdict};
pub use error::{Error, Result};
pub use methods::{InferenceMethod, MethodOutput};
pub use problem::{Alphabet, EmpiricalProblem, Evidence, Hypothesis, HypothesisId, Symbol, World};

use thiserror::Error;

/// Errors raised by the analysis, simulation and conditioning routines.
///
/// Structural problems with a problem or method definition are reported as
/// data through the `validate` functions instead; these errors cover bad
/// inputs at call time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown observation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol index {index} is outside an alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },
    #[error("method `{method}` targets problem `{expected}`, not `{found}`")]
    ProblemMismatch {
        method: String,
        expected: String,
        found: String,
    },
    #[error("alphabet mismatch: method reads {method} symbols, problem has {problem}")]
    AlphabetMismatch { method: usize, problem: usize },
    #[error("a world's repeating block must contain at least one observation")]
    EmptyCycle,
    #[error("invalid definition: {0}")]
    Invalid(String),
    #[error("the frequency estimate is undefined for an empty sample")]
    UndefinedEstimate,
    #[error("conditioning on evidence with zero total likelihood")]
    NullConditioning,
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

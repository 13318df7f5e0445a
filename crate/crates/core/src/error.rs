use thiserror::Error;

/// Errors reported by the pauliflow library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("trace is {0}, expected 1")]
    NonUnitTrace(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("coefficient tensor must have e[0][0] = 1 (got {0})")]
    InvalidTensor(f64),

    #[error("local terms alpha/beta are not supported; only the nonlocal coupling matrix can be canonicalized")]
    UnsupportedLocalTerms,

    #[error("state is not globally pure (global purity {0})")]
    GloballyMixed(f64),

    #[error("qubit state is not pure (|bloch|^2 = {0})")]
    NotPure(f64),

    #[error("objective is flat over the search window")]
    FlatObjective,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("no feasible parameter point inside the bounds")]
    Infeasible,

    #[error("operation supports {supported} free parameter(s), problem has {found}")]
    UnsupportedFreeParameters { supported: usize, found: usize },

    #[error("cannot compose an empty list of maps")]
    EmptyComposition,

    #[error("invalid duration {0}: durations must be finite and non-negative")]
    InvalidDuration(f64),

    #[error("bloch vector has norm {0} > 1")]
    UnphysicalBloch(f64),

    #[error("unknown entanglement measure `{0}`")]
    UnknownMeasure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

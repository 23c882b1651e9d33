use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),

    #[error("duplicate state {0:?}")]
    DuplicateState(Vec<usize>),

    #[error("state {state:?} is outside the alphabet of `{variable}` (cardinality {cardinality})")]
    StateOutOfRange {
        state: Vec<usize>,
        variable: String,
        cardinality: usize,
    },

    #[error("negative probability {value} for state {state:?}")]
    NegativeProbability { state: Vec<usize>, value: f64 },

    #[error("probabilities sum to {sum}, which is not within {tolerance:e} of 1")]
    Normalization { sum: f64, tolerance: f64 },

    #[error("table has {actual} entries but the alphabets require {expected}")]
    TableLength { expected: usize, actual: usize },

    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: usize },

    #[error("empty variable set")]
    EmptyVarSet,

    #[error("variable sets overlap")]
    OverlappingVarSets,

    #[error("distributions are defined over different variables")]
    VariableMismatch,

    #[error("absolute continuity violated at state {state:?}: p = {p:e} but q = {q:e}")]
    AbsoluteContinuity { state: Vec<usize>, p: f64, q: f64 },

    #[error("input count mismatch: {left} vs {right}")]
    InputCountMismatch { left: usize, right: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("{n} inputs exceed the lattice cap of {cap}")]
    TooManyInputs { n: usize, cap: usize },

    #[error("the empty face is not a player")]
    EmptyFace,

    #[error("face {0} is not a member of the coalition")]
    NotInCoalition(String),

    #[error("not a chain of the input lattice: {0}")]
    NotAChain(String),

    #[error("expected {expected} variables, got {actual}")]
    Arity { expected: usize, actual: usize },

    #[error("constraint node {0} does not cover every variable")]
    UncoveredNode(String),

    #[error("inconsistent marginal constraints: {0}")]
    InconsistentConstraints(String),

    #[error("iterative scaling did not converge at {node} after {sweeps} sweeps (gap {gap:e})")]
    NonConvergence {
        node: String,
        sweeps: usize,
        gap: f64,
    },

    #[error("missing coalition value for {0}")]
    MissingCoalitionValue(String),

    #[error("invalid notation `{input}`: {message}")]
    Notation { input: String, message: String },

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by malformed or inconsistent input data.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownVariable(_)
                | Error::DuplicateVariable(_)
                | Error::DuplicateState(_)
                | Error::StateOutOfRange { .. }
                | Error::NegativeProbability { .. }
                | Error::Normalization { .. }
                | Error::TableLength { .. }
                | Error::Io(_)
        )
    }

    /// True for numerical failures of the projection step.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::InconsistentConstraints(_)
                | Error::AbsoluteContinuity { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

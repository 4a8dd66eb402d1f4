use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {0:?}: expected \"p\" or \"p/q\" with q != 0")]
pub struct ParseScalarError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular system: rank {rank} < {needed}")]
    Singular { rank: usize, needed: usize },
    #[error("inconsistent linear system")]
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),

    #[error("L̄_{op} image of basis vector v_{index} is not known (window {window}); enlarge the window")]
    WindowOverflow {
        op: usize,
        index: usize,
        window: usize,
    },

    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("element has {found} variables, module expects {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("singular generalized Vandermonde system (rank {rank} < {needed})")]
    SingularSystem { rank: usize, needed: usize },

    #[error("samples are not of the declared exponential-polynomial form")]
    InconsistentSamples,

    #[error("invalid exponential structure: {0}")]
    InvalidStructure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no strictly smaller element found while reducing degree {degree:?}")]
    NotReducible { degree: Vec<u32> },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("undecided at window: {0}")]
    UnsupportedComparison(String),

    #[error("replay mismatch: {0}")]
    Replay(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<ParseScalarError> for Error {
    fn from(e: ParseScalarError) -> Self {
        Error::InvalidDescriptor(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

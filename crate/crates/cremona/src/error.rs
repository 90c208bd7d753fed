use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown point id `{0}`")]
    UnknownPoint(String),
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("iteration bound exceeded: {0}")]
    IterationBound(String),
    #[error("invalid quadratic centers: {0}")]
    InvalidCenters(String),
    #[error("wrong surface: {0}")]
    WrongSurface(String),
    #[error("fiber splits: multiplicity {mu} exceeds k = {k}")]
    FiberSplits { mu: i64, k: i64 },
    #[error("negative section splits off: {0}")]
    SectionSplits(String),
    #[error("base case")]
    BaseCase,
    #[error("not realizable: {0}")]
    NotRealizable(String),
    #[error("not homaloidal: {0}")]
    NotHomaloidal(String),
    #[error("not admissible")]
    NotAdmissible,
    #[error("empty system")]
    EmptySystem,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by the input rather than by the engine.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Internal(_) | Error::IterationBound(_) | Error::Overflow
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

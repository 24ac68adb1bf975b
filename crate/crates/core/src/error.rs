use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape sums disagree: m = {m}, sum p = {p_sum}, sum q = {q_sum}")]
    SumMismatch { m: u64, p_sum: u64, q_sum: u64 },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("set is not open: {0}")]
    NotOpen(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid rank function: {}", .0.join("; "))]
    InvalidRankFunction(Vec<String>),
    #[error("infinite value where a finite one is required")]
    InfiniteValue,
    #[error("invalid standard-form hom: {}", .0.join("; "))]
    InvalidHom(Vec<String>),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("declared pair is not way-below: {0}")]
    NotWayBelow(String),
    #[error("table fails lifting hypotheses: {0}")]
    ConditionsFailed(String),
    #[error("negative multiplicity: {0}")]
    NegativeMultiplicity(String),
    #[error("negative rank in subtraction: {0}")]
    NegativeRank(String),
    #[error("infeasible profile: {0}")]
    Infeasible(String),
    #[error("boundary misalignment: {0}")]
    BoundaryMisalignment(String),
    #[error("depth {got} too small, need at least {needed}")]
    DepthTooSmall { needed: u32, got: u32 },
    #[error("postcondition failure: {0}")]
    PostconditionFailure(String),
    #[error("stage out of range: {0}")]
    StageOutOfRange(String),
    #[error("tower exhausted: {0}")]
    StageExhausted(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent table family at depth {depth}: {reason}")]
    InconsistentFamily { depth: u32, reason: String },
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

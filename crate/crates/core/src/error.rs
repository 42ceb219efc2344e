use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension {0} unsupported (expected 1..=6)")]
    BadDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("valence mismatch: {0}")]
    Valence(String),

    #[error("contraction needs an upper and a lower slot (upper {upper}, lower {lower})")]
    ContractionSlot { upper: usize, lower: usize },

    #[error("kinds {0} have no explicit double-derivative formula")]
    UnsupportedKinds(String),

    #[error("duplicate derivative kind {0}")]
    DuplicateKind(&'static str),

    #[error("empty selection")]
    Empty,

    #[error("connection is not symmetric in its lower indices")]
    NotSymmetric,

    #[error("symmetric part of the metric is singular")]
    SingularMetric,

    #[error("{0} vanishes inside the requested window")]
    Vanishing(String),

    #[error("negative radicand at t = {0}")]
    NegativeRadicand(String),

    #[error("v'-w must be positive for recovery, got {0}")]
    NonPositiveCoupling(String),

    #[error("mixing weights row {row} sums to {sum}, expected 1")]
    WeightRowSum { row: usize, sum: String },

    #[error("combination {0:?} is not in the identity catalogue")]
    Uncatalogued([u8; 4]),

    #[error("no coefficient vector in the family reproduces {pqrs:?}: {detail}")]
    NoSolution { pqrs: [u8; 4], detail: String },

    #[error("coefficient vector for {pqrs:?} is not determined (rank {rank} of 17)")]
    Ambiguous { pqrs: [u8; 4], rank: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse rational '{0}'")]
    ParseRational(String),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty corpus: no letters A-Z after normalisation")]
    EmptyCorpus,

    #[error("corpus too short: need at least {needed} letters, got {got}")]
    CorpusTooShort { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid letter {0:?}: expected A-Z")]
    InvalidLetter(char),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("degenerate distribution: every key has zero likelihood")]
    Degenerate,

    #[error("multiplicity {count} exceeds score table rows ({rows})")]
    MultiplicityExceeded { count: usize, rows: usize },

    #[error(
        "repeat of length {run} exceeds tabulated maximum {max_r}; estimate with max_r >= {run}"
    )]
    RunTooLong { run: usize, max_r: usize },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("statistics cover r <= {have}, need r <= {need}")]
    InsufficientOrder { have: usize, need: usize },

    #[error("no overlap between messages at distance {0}")]
    NoOverlap(i64),

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

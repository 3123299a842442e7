use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("rank {rank} out of range (N = {count})")]
    RankOutOfRange { rank: u64, count: u64 },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid base {0}: must be at least 2")]
    InvalidBase(u64),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("scene {0} is not discovered by any query in the sequence")]
    UndiscoverableScene(String),

    #[error("incomplete sequence: {0}")]
    IncompleteSequence(String),

    #[error("incomplete reference sequence: {0}")]
    IncompleteReference(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("position {position} out of range for sequence of length {len}")]
    IndexOutOfRange { position: usize, len: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors caused by problem size rather than malformed input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_) | Error::Overflow(_))
    }
}

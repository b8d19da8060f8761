use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityDomain(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Monte Carlo run needs at least one block")]
    NoBlocks,

    #[error(
        "instance K={k}, B={b}, L={l} is outside the enumeration limits \
         (K <= {max_k}, L <= {max_l}, integer schedule); roughly {estimated_leaves:.3e} leaves"
    )]
    EnumerationTooLarge {
        k: u32,
        b: f64,
        l: usize,
        max_k: u32,
        max_l: usize,
        estimated_leaves: f64,
    },

    #[error("malformed transcript line {line}: {reason}")]
    TranscriptParse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

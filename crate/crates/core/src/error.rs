use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("block count mismatch: {left} vs {right}")]
    BlockMismatch { left: usize, right: usize },

    #[error("{target} is not a multiple of {r}")]
    NotDivisible { r: usize, target: usize },

    #[error("exhaustive search over r = {r} blocks exceeds the limit of {limit}")]
    TooLarge { r: usize, limit: usize },

    #[error("net enumeration needs {needed} functions, above the cap of {cap}; raise epsilon")]
    NetTooLarge { needed: u128, cap: u128 },

    #[error("entry {value} at ({i}, {j}) is outside the domain of the entropy term")]
    EntropyDomain { i: usize, j: usize, value: f64 },

    #[error("missing decoration for edge {0}")]
    MissingDecoration(usize),

    #[error("state precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value at step {step}: {what}")]
    NonFinite { step: u64, what: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: space expects {expected}, vector has {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("invalid space spec: {0}")]
    InvalidSpace(String),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("atom grid too coarse: refinement to at least n = {needed} atoms required")]
    RefinementNeeded { needed: usize },

    #[error("no feasible unit pair at distance >= {d} found within budget")]
    PairSearchExhausted { d: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

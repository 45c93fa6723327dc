//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid RDP parameters: p={p}, family={family}, n={n}, r2={r2:?}: {reason}")]
    InvalidRdpParameters {
        p: u32,
        family: String,
        n: u32,
        r2: Option<u32>,
        reason: String,
    },

    #[error("characteristic mismatch: {0} vs {1}")]
    CharacteristicMismatch(u32, u32),

    #[error("exponent overflow in Laurent polynomial arithmetic")]
    ExponentOverflow,

    #[error("Witt length cap exceeded: requested n={requested}, cap={cap}")]
    LengthCapExceeded { requested: usize, cap: usize },

    #[error("Witt laws mismatch: vectors have different characteristic or length")]
    LawsMismatch,

    #[error("box overflow: image escapes codomain box (B={b}); raise the box bound")]
    BoxOverflow { b: u32 },

    #[error("unstable: dimension {dim_b} at box B={b} but {dim_2b} at 2B; raise the box bound")]
    Unstable { b: u32, dim_b: usize, dim_2b: usize },

    #[error("peel failure: class is not congruent to V^{depth}(g) modulo boundaries")]
    PeelFailure { depth: usize },

    #[error("level cap exceeded while lifting (cap={cap}); module did not stabilize")]
    LevelCapExceeded { cap: usize },

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

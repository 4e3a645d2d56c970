//! Error type shared across the library.
//!
//! Every variant carries a stable short code (the string before the colon in
//! its display form) so callers and the CLI can match on failures without
//! parsing prose.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands live in different Hilbert-space dimensions.
    #[error("dim-mismatch: {0}")]
    DimMismatch(String),

    /// An operation that needs at least one state got none.
    #[error("empty-set")]
    EmptySet,

    /// Amplitudes do not form a unit vector within tolerance.
    #[error("not-normalized: {0}")]
    NotNormalized(String),

    /// Candidate columns are not pairwise orthonormal, or a matrix claimed
    /// to be unitary fails the U†U = I test.
    #[error("not-isometry: {0}")]
    NotIsometry(String),

    /// A 1-based state index fell outside `1..=N`.
    #[error("bad-index: {0}")]
    BadIndex(String),

    /// Comparator feasibility needs N ≥ 2; sorter feasibility needs N ≥ 3.
    #[error("too-few-states: {0}")]
    TooFewStates(String),

    /// A transformation spec violates its structural invariants.
    #[error("bad-spec: {0}")]
    BadSpec(String),

    /// Synthesis was asked to act on a set with a non-orthogonal pair.
    #[error("not-orthogonal: {0}")]
    NotOrthogonal(String),

    /// Register count outside the supported dense-simulation range.
    #[error("bad-n: {0}")]
    BadN(String),

    /// A factor index fell outside a composite state's factor list.
    #[error("bad-factor: {0}")]
    BadFactor(String),

    /// A simulated register failed to decode against the alphabet; this
    /// signals a synthesis or circuit-file bug, not a user error.
    #[error("decode-failed: {0}")]
    DecodeFailed(String),
}

impl Error {
    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimMismatch(_) => "dim-mismatch",
            Error::EmptySet => "empty-set",
            Error::NotNormalized(_) => "not-normalized",
            Error::NotIsometry(_) => "not-isometry",
            Error::BadIndex(_) => "bad-index",
            Error::TooFewStates(_) => "too-few-states",
            Error::BadSpec(_) => "bad-spec",
            Error::NotOrthogonal(_) => "not-orthogonal",
            Error::BadN(_) => "bad-n",
            Error::BadFactor(_) => "bad-factor",
            Error::DecodeFailed(_) => "decode-failed",
        }
    }
}

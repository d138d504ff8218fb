use thiserror::Error;

/// Errors raised by the toolkit. Every variant names the invariant that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("non-hermitian input (residual {0:.3e})")]
    NonHermitian(f64),

    #[error("singular input (smallest eigenvalue {0:.3e})")]
    Singular(f64),

    #[error("not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NonPsd(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("not faithful (smallest eigenvalue {0:.3e})")]
    NotFaithful(f64),

    #[error("margin violation: tr_K[S] differs from rho0 by {0:.3e}")]
    MarginViolation(f64),

    #[error("channel is not unital (residual {0:.3e})")]
    NonUnital(f64),

    #[error("reference states differ")]
    RefMismatch,

    #[error("reference state is not invariant under the representation (residual {0:.3e})")]
    NonInvariantReference(f64),

    #[error("reference state is not diagonal in the number basis (off-diagonal mass {0:.3e})")]
    NondiagonalReference(f64),

    #[error("channel is not covariant (residual {0:.3e})")]
    NotCovariant(f64),

    #[error("tau normalization violated at m = {m}: sum |tau|^2 = {sum}")]
    NormalizationViolation { m: usize, sum: f64 },

    #[error("tau entry (l = {l}, j = {j}, m = {m}) maps outside the truncation 0..{d}")]
    TruncationViolation { l: i64, j: usize, m: usize, d: usize },

    #[error("invalid spin: 2j = {0}")]
    InvalidSpin(i64),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("empty Kraus set")]
    EmptyKraus,
}

pub type Result<T> = std::result::Result<T, Error>;

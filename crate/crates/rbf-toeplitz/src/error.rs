use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("buffer length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is singular (pivot vanished in column {0})")]
    Singular(usize),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("requested size exceeds the memory budget: {0}")]
    SizeBudget(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("stencil symbol is not positive: min {min:.6e} at xi = {argmin:.6} (try larger m or n)")]
    SymbolNotPositive { min: f64, argmin: f64 },

    #[error("degenerate stencil: symbol vanishes almost everywhere")]
    DegenerateStencil,

    #[error("degenerate rank-one correction: e^T D e is zero")]
    DegenerateCorrection,

    #[error("preconditioner is not positive semidefinite: eigenvalue {0:.6e}")]
    PreconditionerNotPsd(f64),

    #[error("operator is indefinite on the search space: d^T A d = {0:.6e}")]
    Indefinite(f64),

    #[error("preconditioner is not positive definite: r^T C r = {0:.6e}")]
    PreconditionerNotPd(f64),

    #[error("solver breakdown: {0}")]
    Breakdown(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed stencil file: {0}")]
    StencilFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

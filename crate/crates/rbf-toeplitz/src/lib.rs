//! Banded Toeplitz preconditioners for radial basis function
//! interpolation on regular grids.
//!
//! Interpolation with a Gaussian or multiquadric kernel on the grid
//! `[-N, N]^d` produces a symmetric (multilevel) Toeplitz system. This
//! crate builds banded preconditioners from the central column of a small
//! finite-section inverse, applies them inside (projected) preconditioned
//! conjugate gradients, and ships the diagnostics used to verify them:
//! symbol-product scans, preconditioned spectra, and a Fejér-kernel
//! Rayleigh-quotient oracle for the multiquadric symbol.
//!
//! See the `examples/` directory for one runnable example per capability,
//! or the `rbf-toeplitz` binary for the experiment harness.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod kernels;
pub mod krylov;
pub mod numkit;
pub mod precond;
pub mod toeplitz;

pub use error::{Error, Result};
pub use kernels::{bessel_k1, phi_hat_mq, symbol_gaussian, symbol_mq, RadialKernel, SymbolFn};
pub use krylov::{
    cg, pcg, project_q, projected_pcg_stable, projected_pcg_unstable, recover_multiplier,
    LinearOp, SolveConfig, SolveReport, SolveStatus,
};
pub use numkit::{jacobi_eigs, lu_solve, ComplexBuffer, DenseMatrix, Direction, Rng};
pub use precond::{build_stencil, make_projected, verify_positivity, PrecondStencil, ProjectedPreconditioner};
pub use toeplitz::{BandedSymbol, SymToeplitz};

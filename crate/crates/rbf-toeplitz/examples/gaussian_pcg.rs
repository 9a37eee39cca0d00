//! Solve a Gaussian interpolation system on [-N, N] with banded PCG and
//! print the convergence history.

use rbf_toeplitz::kernels::RadialKernel;
use rbf_toeplitz::krylov::{pcg, BandedOperator, SolveConfig};
use rbf_toeplitz::numkit::Rng;
use rbf_toeplitz::precond::build_stencil;
use rbf_toeplitz::toeplitz::SymToeplitz;

fn main() -> rbf_toeplitz::Result<()> {
    let kernel = RadialKernel::gaussian(1.0)?;
    let cap_n = 32768;
    let a = SymToeplitz::from_kernel(&kernel, cap_n, 1)?;
    let stencil = build_stencil(&kernel, 64, 9)?;
    let c = BandedOperator {
        sym: stencil.coeffs(),
        len: a.len(),
    };
    let b = Rng::new(1).uniform_vector(a.len());
    let report = pcg(&a, &c, &b, &SolveConfig::default())?;
    println!("system size {}, status {:?}", a.len(), report.status);
    println!("iter  residual        direction");
    for h in &report.history {
        println!("{:4}  {:.6e}  {:.6e}", h.iteration, h.residual_norm, h.direction_norm);
    }
    Ok(())
}

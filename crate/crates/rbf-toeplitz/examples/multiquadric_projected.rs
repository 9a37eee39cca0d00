//! Solve the constrained multiquadric system A x + e y = b, eᵀx = 0 with
//! projected PCG and the rank-one-corrected banded preconditioner.

use rbf_toeplitz::kernels::RadialKernel;
use rbf_toeplitz::krylov::{projected_pcg_stable, SolveConfig};
use rbf_toeplitz::numkit::Rng;
use rbf_toeplitz::precond::{build_stencil, make_projected};
use rbf_toeplitz::toeplitz::SymToeplitz;

fn main() -> rbf_toeplitz::Result<()> {
    let kernel = RadialKernel::multiquadric(1.0)?;
    let cap_n = 2048;
    let a = SymToeplitz::from_kernel(&kernel, cap_n, 1)?;
    let stencil = build_stencil(&kernel, 64, 9)?;
    let c = make_projected(&stencil, cap_n)?;
    let b = Rng::new(1).uniform_vector(a.len());
    // the quadratic form is negative on zero-sum vectors, so the solver
    // runs on (-A, -b) internally
    let report = projected_pcg_stable(&a, &c, &b, &SolveConfig::default(), true)?;
    println!("system size {}, status {:?}", a.len(), report.status);
    println!("iterations: {}", report.iterations);
    println!("multiplier y = {:.10e}", report.multiplier.unwrap());
    let zero_sum: f64 = report.solution.iter().sum();
    println!("constraint e'x = {zero_sum:.3e}");
    Ok(())
}

//! Build preconditioner stencils and print their coefficients.
//!
//! The Gaussian stencil keeps the central band of the finite-section
//! inverse directly; the multiquadric stencil is negated, mean-corrected to
//! sum to zero, and sign-normalized so its symbol is positive at π.

use rbf_toeplitz::kernels::RadialKernel;
use rbf_toeplitz::precond::build_stencil;

fn main() -> rbf_toeplitz::Result<()> {
    let gaussian = RadialKernel::gaussian(1.0)?;
    let stencil = build_stencil(&gaussian, 64, 9)?;
    println!("Gaussian (n=64, m=9):");
    for (j, c) in stencil.coeffs().coeffs().iter().enumerate() {
        println!("  c_{j} = {c:.7}");
    }

    let mq = RadialKernel::multiquadric(1.0)?;
    for m in [1usize, 9] {
        let stencil = build_stencil(&mq, 64, m)?;
        println!(
            "Multiquadric (n=64, m={m}), zero-sum {}, sign flipped {}:",
            stencil.zero_sum(),
            stencil.sign_flipped()
        );
        for (j, d) in stencil.coeffs().coeffs().iter().enumerate() {
            println!("  d_{j} = {d:.7}");
        }
        let total = stencil.coeffs().coeffs()[0]
            + 2.0 * stencil.coeffs().coeffs()[1..].iter().sum::<f64>();
        println!("  band sum = {total:.3e}");
    }
    Ok(())
}

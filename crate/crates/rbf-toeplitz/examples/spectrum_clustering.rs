//! Compare the spectra of the preconditioned multiquadric operator for
//! narrow and wide stencils at n = 64. The wide stencil clusters nearly
//! all eigenvalues at unity.

use rbf_toeplitz::diagnostics::preconditioned_spectrum;
use rbf_toeplitz::kernels::RadialKernel;
use rbf_toeplitz::precond::build_stencil;

fn main() -> rbf_toeplitz::Result<()> {
    let kernel = RadialKernel::multiquadric(1.0)?;
    for m in [1usize, 9] {
        let stencil = build_stencil(&kernel, 64, m)?;
        let report = preconditioned_spectrum(&kernel, &stencil, 64)?;
        println!("m = {m}:");
        println!("  largest eigenvalue      {:.4}", report.largest());
        println!("  fraction in [0.99,1.01] {:.3}", report.cluster_tight());
        println!("  fraction in [0.9, 1.1]  {:.3}", report.cluster_loose());
        let plot = report.plot_data();
        println!(
            "  plot range (largest omitted): [{:.4e}, {:.4}]",
            plot.first().unwrap(),
            plot.last().unwrap()
        );
    }
    Ok(())
}

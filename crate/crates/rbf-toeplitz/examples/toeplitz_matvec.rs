//! Fast Toeplitz matrix-vector products through circulant embedding.
//!
//! Checks the FFT product against the dense matrix on a 2-d grid, then
//! times the operator at a size where forming the dense matrix would take
//! tens of gigabytes.

use std::time::Instant;

use rbf_toeplitz::kernels::RadialKernel;
use rbf_toeplitz::numkit::Rng;
use rbf_toeplitz::toeplitz::SymToeplitz;

fn main() -> rbf_toeplitz::Result<()> {
    let kernel = RadialKernel::gaussian(1.0)?;

    let small = SymToeplitz::from_kernel(&kernel, 5, 2)?;
    let dense = small.to_dense()?;
    let x = Rng::new(7).uniform_vector(small.len());
    let fast = small.matvec(&x);
    let slow = dense.matvec(&x);
    let err = fast
        .iter()
        .zip(&slow)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("2-d grid [-5,5]^2 ({} points): max |fft - dense| = {err:.3e}", small.len());

    let big = SymToeplitz::from_kernel(&kernel, 131072, 1)?;
    let x = Rng::new(8).uniform_vector(big.len());
    let start = Instant::now();
    let y = big.matvec(&x);
    println!(
        "1-d grid with {} points: matvec in {:.1} ms (y[0] = {:.6})",
        big.len(),
        start.elapsed().as_secs_f64() * 1e3,
        y[0]
    );
    Ok(())
}

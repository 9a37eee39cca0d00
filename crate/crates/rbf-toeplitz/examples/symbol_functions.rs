//! Evaluate the kernel symbols and cross-check the multiquadric one with
//! the Fejér-kernel Rayleigh-quotient oracle, which approaches σ(η)
//! through quadratic forms of zero-summing sequences.

use std::f64::consts::PI;

use rbf_toeplitz::diagnostics::fejer_rayleigh;
use rbf_toeplitz::kernels::{symbol_gaussian, symbol_mq, RadialKernel};

fn main() -> rbf_toeplitz::Result<()> {
    println!("Gaussian symbol, lambda = 1:");
    for xi in [0.0, PI / 2.0, PI] {
        println!("  sigma({xi:.4}) = {:.7}", symbol_gaussian(1.0, xi));
    }

    println!("Multiquadric symbol, c = 1 (negative, double pole at 2*pi*Z):");
    let mq = RadialKernel::multiquadric(1.0)?;
    for xi in [0.5, PI / 2.0, PI] {
        let direct = symbol_mq(1.0, xi);
        let oracle = fejer_rayleigh(&mq, xi, 256)?;
        println!("  sigma({xi:.4}) = {direct:.7}   Rayleigh oracle (n=256): {oracle:.7}");
    }

    println!("Pole behaviour: |sigma(xi)| * xi^2 -> 2 as xi -> 0:");
    for xi in [0.1, 0.03, 0.01] {
        println!("  xi = {xi:<5}: {:.6}", symbol_mq(1.0, xi).abs() * xi * xi);
    }
    Ok(())
}

//! Demonstrate why the projected solver re-projects the residual every
//! iteration: without it, rounding lets the iterates drift out of the
//! zero-sum subspace and the method cycles instead of converging.
//!
//! The system is the multiquadric on [-64, 64] with the squares
//! right-hand side b_j = (j + 65)², which excites the drift quickly.

use rbf_toeplitz::kernels::RadialKernel;
use rbf_toeplitz::krylov::{projected_pcg_stable, projected_pcg_unstable, SolveConfig};
use rbf_toeplitz::precond::{build_stencil, make_projected};
use rbf_toeplitz::toeplitz::SymToeplitz;

fn main() -> rbf_toeplitz::Result<()> {
    let kernel = RadialKernel::multiquadric(1.0)?;
    let cap_n = 64;
    let a = SymToeplitz::from_kernel(&kernel, cap_n, 1)?;
    let stencil = build_stencil(&kernel, 64, 9)?;
    let c = make_projected(&stencil, cap_n)?;
    let b: Vec<f64> = (1..=(2 * cap_n + 1)).map(|i| (i * i) as f64).collect();

    let cfg = SolveConfig {
        max_iters: 100,
        ..SolveConfig::default()
    };
    let unstable = projected_pcg_unstable(&a, &c, &b, &cfg, true)?;
    let stable = projected_pcg_stable(&a, &c, &b, &SolveConfig::default(), true)?;

    println!("without re-projection: status {:?} after {} iterations", unstable.status, unstable.iterations);
    println!("with re-projection:    status {:?} after {} iterations", stable.status, stable.iterations);
    println!();
    println!("iter  direction (no Q)  drift (no Q)   direction (Q)");
    let rows = unstable.history.len().max(stable.history.len()).min(20);
    for i in 0..rows {
        let u = unstable.history.get(i);
        let s = stable.history.get(i);
        println!(
            "{:4}  {}  {}  {}",
            i,
            u.map_or("               -".into(), |h| format!("{:16.6e}", h.direction_norm)),
            u.map_or("             -".into(), |h| format!("{:14.6e}", h.e_drift)),
            s.map_or("              -".into(), |h| format!("{:14.6e}", h.direction_norm)),
        );
    }
    Ok(())
}

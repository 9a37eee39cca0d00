//! Spectral and symbol-level verification tools.
//!
//! Three independent ways to check a preconditioner: the spectrum of the
//! symmetrically preconditioned dense operator, a grid scan of the product
//! of the preconditioner symbol with the kernel symbol, and a Fejér-kernel
//! Rayleigh-quotient construction that recovers the multiquadric symbol
//! without ever summing its Fourier series.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{RadialKernel, SymbolFn};
use crate::numkit::{jacobi_eigs, DenseMatrix};
use crate::precond::{make_projected, PrecondStencil};
use crate::toeplitz::SymToeplitz;

/// Eigenvalues of the preconditioned operator plus clustering statistics.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    eigenvalues: Vec<f64>,
    largest: f64,
    cluster_tight: f64,
    cluster_loose: f64,
    omitted_top: bool,
}

impl SpectrumReport {
    fn from_sorted(eigenvalues: Vec<f64>, omitted_top: bool) -> Self {
        assert!(!eigenvalues.is_empty());
        debug_assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let largest = *eigenvalues.last().unwrap();
        let count = eigenvalues.len() as f64;
        let within = |delta: f64| {
            eigenvalues
                .iter()
                .filter(|&&ev| (ev - 1.0).abs() <= delta)
                .count() as f64
                / count
        };
        SpectrumReport {
            cluster_tight: within(0.01),
            cluster_loose: within(0.1),
            eigenvalues,
            largest,
            omitted_top,
        }
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn largest(&self) -> f64 {
        self.largest
    }

    /// Fraction of eigenvalues within `[0.99, 1.01]`.
    pub fn cluster_tight(&self) -> f64 {
        self.cluster_tight
    }

    /// Fraction of eigenvalues within `[0.9, 1.1]`.
    pub fn cluster_loose(&self) -> f64 {
        self.cluster_loose
    }

    pub fn omitted_top(&self) -> bool {
        self.omitted_top
    }

    /// Eigenvalues intended for plotting. Drops the single largest entry
    /// when `omitted_top` is set; it usually dwarfs the cluster at unity.
    pub fn plot_data(&self) -> &[f64] {
        if self.omitted_top && self.eigenvalues.len() > 1 {
            &self.eigenvalues[..self.eigenvalues.len() - 1]
        } else {
            &self.eigenvalues
        }
    }
}

/// Spectrum of the preconditioned operator `C A` on `[-n, n]`.
///
/// Both matrices are assembled densely. The multiquadric operator is
/// negated so that the result is positive semidefinite, and its
/// preconditioner is the rank-one-corrected projected form; the Gaussian
/// uses the plain banded section. Eigenvalues are computed from the
/// symmetric similarity `P A P` with `P = C^{1/2}`, whose nonzero spectrum
/// equals that of `C A`.
pub fn preconditioned_spectrum(
    kernel: &RadialKernel,
    stencil: &PrecondStencil,
    n: usize,
) -> Result<SpectrumReport> {
    let size = 2 * n + 1;
    let mut a = SymToeplitz::from_kernel(kernel, n, 1)?.to_dense()?;
    if !kernel.is_gaussian() {
        a.scale(-1.0);
    }
    let c = if stencil.zero_sum() {
        make_projected(stencil, n)?.to_dense()?
    } else {
        stencil.coeffs().to_dense(size)?
    };
    spectrum_of_pair(&a, &c)
}

/// Spectrum of `C A` from explicit dense factors. Exposed so callers can
/// substitute reference preconditioners (exact inverse, identity).
pub fn spectrum_of_pair(a: &DenseMatrix, c: &DenseMatrix) -> Result<SpectrumReport> {
    assert_eq!(a.rows(), c.rows(), "operator and preconditioner sizes differ");
    let size = a.rows();
    let (lam, u) = jacobi_eigs(c)?;
    let scale = lam.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())).max(1.0);
    if let Some(&worst) = lam.iter().find(|&&v| v < -1e-10 * scale) {
        return Err(Error::PreconditionerNotPsd(worst));
    }
    let roots: Vec<f64> = lam.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let p = DenseMatrix::from_fn_symmetric(size, |r, col| {
        (0..size).map(|k| u.get(r, k) * roots[k] * u.get(col, k)).sum()
    });
    let pap = p.matmul(a).matmul(&p);
    let sym = DenseMatrix::from_fn_symmetric(size, |r, col| 0.5 * (pap.get(r, col) + pap.get(col, r)));
    let (eigs, _) = jacobi_eigs(&sym)?;
    Ok(SpectrumReport::from_sorted(eigs, true))
}

/// One row of a symbol-product scan.
#[derive(Clone, Copy, Debug)]
pub struct SymbolSample {
    pub xi: f64,
    pub product: f64,
}

/// Summary of a scan of `σ_C(ξ)·σ(ξ)` over a uniform grid on `(0, 2π)`.
#[derive(Clone, Debug)]
pub struct SymbolScan {
    pub samples: Vec<SymbolSample>,
    pub min: f64,
    pub max: f64,
    pub sup_deviation: f64,
}

/// Samples the product of the stencil symbol with the kernel symbol.
///
/// A good preconditioner keeps the product near unity. For the
/// multiquadric the kernel symbol is negated to match the sign convention
/// of the stencil, and points within 1e-3 of the poles at `2πZ` are
/// skipped; the zero-sum stencil symbol vanishes to second order there, so
/// the product stays bounded on the rest of the interval.
pub fn symbol_product_scan(
    kernel: &RadialKernel,
    stencil: &PrecondStencil,
    gridsize: usize,
) -> SymbolScan {
    assert!(gridsize >= 8, "symbol scan needs a nontrivial grid");
    let two_pi = 2.0 * std::f64::consts::PI;
    let exclusion = if kernel.is_gaussian() { 0.0 } else { 1e-3 };
    let sym = SymbolFn::new(*kernel);
    let sign = if kernel.is_gaussian() { 1.0 } else { -1.0 };
    let mut samples = Vec::with_capacity(gridsize);
    for i in 0..gridsize {
        let xi = two_pi * (i as f64 + 0.5) / gridsize as f64;
        if xi < exclusion || two_pi - xi < exclusion {
            continue;
        }
        let product = stencil.coeffs().symbol_eval(xi) * sign * sym.eval(xi);
        samples.push(SymbolSample { xi, product });
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sup = 0.0f64;
    for s in &samples {
        min = min.min(s.product);
        max = max.max(s.product);
        sup = sup.max((s.product - 1.0).abs());
    }
    SymbolScan {
        samples,
        min,
        max,
        sup_deviation: sup,
    }
}

/// Fourier coefficients of `ξ ↦ L_n(ξ−η)·sin(ξ/2)` where `L_n` is the
/// normalized Dirichlet-type factor whose squared modulus is the Fejér
/// kernel. The `sin(ξ/2)` factor forces the coefficients to sum to zero,
/// which puts the sequence in the constraint space of the multiquadric
/// quadratic form.
#[derive(Clone, Debug)]
pub struct ZeroSummingSequence {
    n: usize,
    eta: f64,
    coeffs: Vec<Complex64>,
    offset: i64,
}

impl ZeroSummingSequence {
    /// Builds the sequence for frequency `η ∈ (0, 2π)`.
    ///
    /// Written against integer frequencies: multiplying the half-integer
    /// expansion of `L_n(ξ−η) sin(ξ/2)` by `e^{-iξ/2}` shifts the support
    /// to `j ∈ [-1, n]` without changing either quadratic form below.
    pub fn new(eta: f64, n: usize) -> Self {
        assert!(n >= 1, "sequence order must be at least 1");
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!(
            eta > 0.0 && eta < two_pi,
            "frequency must lie in (0, 2*pi), got {eta}"
        );
        let scale = 1.0 / (2.0 * (n as f64).sqrt());
        let half = Complex64::new(0.0, -scale);
        // coeffs[j+1] holds y_j for j = -1..=n; y_n is identically zero but
        // keeping the slot makes the support window explicit.
        let mut coeffs = vec![Complex64::ZERO; n + 2];
        for j in -1i64..=(n as i64 - 1) {
            let mut v = Complex64::ZERO;
            if (0..n as i64).contains(&j) {
                v += Complex64::from_polar(1.0, -(j as f64) * eta);
            }
            if (-1..n as i64 - 1).contains(&j) {
                v -= Complex64::from_polar(1.0, -((j + 1) as f64) * eta);
            }
            coeffs[(j + 1) as usize] = half * v;
        }
        ZeroSummingSequence {
            n,
            eta,
            coeffs,
            offset: -1,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Coefficients `y_j` for `j = offset()..offset() + len`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// `Σ y_j`; zero up to rounding by construction.
    pub fn coeff_sum(&self) -> Complex64 {
        self.coeffs.iter().sum()
    }

    /// `Σ |y_j|²`; tends to `sin²(η/2)` as `n` grows.
    pub fn parseval_sum(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm_sqr()).sum()
    }

    /// The quadratic form `Σ_{j,k} y_j ȳ_k φ(|j−k|) / Σ |y_j|²`.
    pub fn rayleigh(&self, kernel: &RadialKernel) -> f64 {
        let len = self.coeffs.len();
        let mut quad = Complex64::ZERO;
        for j in 0..len {
            for k in 0..len {
                let r = (j as f64 - k as f64).abs();
                quad += self.coeffs[j] * self.coeffs[k].conj() * kernel.phi(r);
            }
        }
        debug_assert!(quad.im.abs() <= 1e-10 * (1.0 + quad.re.abs()));
        quad.re / self.parseval_sum()
    }
}

/// Rayleigh-quotient estimate of the multiquadric symbol at `η`.
///
/// Converges to `σ(η)` as `n → ∞`, giving an oracle for the symbol that
/// never evaluates the Fourier transform of `φ`. Requires `η` at least 0.1
/// away from the poles at 0 and `2π`, where convergence degrades.
pub fn fejer_rayleigh(kernel: &RadialKernel, eta: f64, n: usize) -> Result<f64> {
    if kernel.is_gaussian() {
        return Err(Error::Parameter(
            "the Rayleigh oracle targets the multiquadric kernel".into(),
        ));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    if !(eta >= 0.1 && eta <= two_pi - 0.1) {
        return Err(Error::Parameter(format!(
            "frequency {eta} is too close to a pole of the symbol"
        )));
    }
    Ok(ZeroSummingSequence::new(eta, n).rayleigh(kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::symbol_mq;
    use crate::numkit::lu_solve;
    use crate::precond::build_stencil;
    use std::f64::consts::PI;

    fn dense_inverse(a: &DenseMatrix) -> DenseMatrix {
        let size = a.rows();
        let mut inv = DenseMatrix::zeros(size, size);
        for col in 0..size {
            let mut e = vec![0.0; size];
            e[col] = 1.0;
            let x = lu_solve(a, &e).unwrap();
            for (r, v) in x.iter().enumerate() {
                inv.set(r, col, *v);
            }
        }
        // column-by-column solves are asymmetric at rounding level
        DenseMatrix::from_fn_symmetric(size, |r, c| 0.5 * (inv.get(r, c) + inv.get(c, r)))
    }

    #[test]
    fn exact_inverse_gives_unit_spectrum() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let a = SymToeplitz::from_kernel(&kernel, 8, 1).unwrap().to_dense().unwrap();
        let c = dense_inverse(&a);
        let report = spectrum_of_pair(&a, &c).unwrap();
        for &ev in report.eigenvalues() {
            assert!((ev - 1.0).abs() < 1e-9, "eigenvalue {ev} should be unity");
        }
        assert_eq!(report.cluster_tight(), 1.0);
    }

    #[test]
    fn identity_preconditioner_spectrum_respects_symbol_bracket() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let a = SymToeplitz::from_kernel(&kernel, 16, 1).unwrap().to_dense().unwrap();
        let c = DenseMatrix::identity(33);
        let report = spectrum_of_pair(&a, &c).unwrap();
        let lo = crate::kernels::symbol_gaussian(1.0, PI);
        let hi = crate::kernels::symbol_gaussian(1.0, 0.0);
        for &ev in report.eigenvalues() {
            assert!(ev >= lo - 1e-8 && ev <= hi + 1e-8, "eigenvalue {ev} outside [{lo}, {hi}]");
        }
        assert_eq!(report.largest(), *report.eigenvalues().last().unwrap());
    }

    #[test]
    fn spectrum_report_plot_data_omits_largest() {
        let report = SpectrumReport::from_sorted(vec![0.5, 1.0, 7.0], true);
        assert_eq!(report.plot_data(), &[0.5, 1.0]);
        assert_eq!(report.largest(), 7.0);
        assert!(report.omitted_top());
        let kept = SpectrumReport::from_sorted(vec![0.5, 1.0, 7.0], false);
        assert_eq!(kept.plot_data().len(), 3);
    }

    #[test]
    fn clustering_improves_with_band_width_gaussian() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let wide = build_stencil(&kernel, 64, 9).unwrap();
        let narrow = build_stencil(&kernel, 64, 1).unwrap();
        let r_wide = preconditioned_spectrum(&kernel, &wide, 64).unwrap();
        let r_narrow = preconditioned_spectrum(&kernel, &narrow, 64).unwrap();
        assert!(
            r_wide.cluster_loose() > r_narrow.cluster_loose(),
            "m=9 clustering {} should beat m=1 clustering {}",
            r_wide.cluster_loose(),
            r_narrow.cluster_loose()
        );
    }

    #[test]
    fn clustering_improves_with_band_width_multiquadric() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let wide = build_stencil(&kernel, 64, 9).unwrap();
        let narrow = build_stencil(&kernel, 64, 1).unwrap();
        let r_wide = preconditioned_spectrum(&kernel, &wide, 64).unwrap();
        let r_narrow = preconditioned_spectrum(&kernel, &narrow, 64).unwrap();
        assert!(
            r_wide.cluster_loose() > r_narrow.cluster_loose(),
            "m=9 clustering {} should beat m=1 clustering {}",
            r_wide.cluster_loose(),
            r_narrow.cluster_loose()
        );
    }

    #[test]
    fn multiquadric_spectrum_has_single_zero_eigenvalue() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 32, 3).unwrap();
        let report = preconditioned_spectrum(&kernel, &stencil, 32).unwrap();
        let largest = report.largest();
        let zeros = report
            .eigenvalues()
            .iter()
            .filter(|&&ev| ev.abs() < 1e-8 * largest.max(1.0))
            .count();
        assert_eq!(zeros, 1, "projected preconditioner kills exactly span{{e}}");
        let nonzero_min = report
            .eigenvalues()
            .iter()
            .filter(|&&ev| ev.abs() >= 1e-8 * largest.max(1.0))
            .fold(f64::INFINITY, |acc, &ev| acc.min(ev));
        assert!(nonzero_min > 0.0, "remaining spectrum must be positive");
    }

    #[test]
    fn gaussian_symbol_product_stays_near_unity() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let stencil = build_stencil(&kernel, 64, 9).unwrap();
        let scan = symbol_product_scan(&kernel, &stencil, 2048);
        assert!(
            scan.sup_deviation < 0.01,
            "sup deviation {} should be below 1%",
            scan.sup_deviation
        );
        assert_eq!(scan.samples.len(), 2048);
    }

    #[test]
    fn narrow_band_scans_worse_than_wide_band() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let wide = symbol_product_scan(&kernel, &build_stencil(&kernel, 64, 9).unwrap(), 2048);
        let narrow = symbol_product_scan(&kernel, &build_stencil(&kernel, 64, 1).unwrap(), 2048);
        assert!(narrow.sup_deviation > wide.sup_deviation);
    }

    #[test]
    fn multiquadric_product_is_bounded_near_the_pole() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 32, 1).unwrap();
        let scan = symbol_product_scan(&kernel, &stencil, 4096);
        assert!(scan.max.is_finite() && scan.min.is_finite());
        assert!(
            scan.max < 1e3,
            "zero-sum symbol must cancel the double pole, got max {}",
            scan.max
        );
        assert!(scan.min > 0.0, "product should stay positive, got {}", scan.min);
    }

    #[test]
    fn sequence_sums_to_zero() {
        for &n in &[4usize, 32, 256] {
            for &eta in &[0.5, PI, 5.0] {
                let seq = ZeroSummingSequence::new(eta, n);
                assert!(
                    seq.coeff_sum().norm() < 1e-12,
                    "n={n} eta={eta}: sum {}",
                    seq.coeff_sum().norm()
                );
                assert_eq!(seq.coeffs().len(), n + 2);
            }
        }
    }

    #[test]
    fn parseval_sum_approaches_half_angle_sine() {
        for &eta in &[1.0, PI, 4.5] {
            let seq = ZeroSummingSequence::new(eta, 256);
            let target = (eta / 2.0).sin().powi(2);
            let got = seq.parseval_sum();
            assert!(
                (got - target).abs() <= 0.02 * target,
                "eta={eta}: parseval {got} vs sin^2(eta/2)={target}"
            );
        }
    }

    #[test]
    fn rayleigh_quotient_converges_to_the_symbol_at_pi() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let q64 = fejer_rayleigh(&kernel, PI, 64).unwrap();
        let q128 = fejer_rayleigh(&kernel, PI, 128).unwrap();
        let q256 = fejer_rayleigh(&kernel, PI, 256).unwrap();
        assert!((q256 - q128).abs() < (q128 - q64).abs());
        let sigma = symbol_mq(1.0, PI);
        assert!(
            (q256 - sigma).abs() <= 0.02 * sigma.abs(),
            "quotient {q256} vs symbol {sigma}"
        );
        assert!(q256 < 0.0, "the multiquadric symbol is negative away from the poles");
    }

    #[test]
    fn rayleigh_quotient_is_even_about_pi() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        for &delta in &[0.3, 0.8, 1.3, 1.9, 2.6] {
            let left = fejer_rayleigh(&kernel, PI - delta, 256).unwrap();
            let right = fejer_rayleigh(&kernel, PI + delta, 256).unwrap();
            assert!(
                (left - right).abs() <= 0.02 * left.abs(),
                "delta={delta}: {left} vs {right}"
            );
        }
    }

    #[test]
    fn rayleigh_rejects_pole_neighborhood_and_gaussian() {
        let mq = RadialKernel::multiquadric(1.0).unwrap();
        assert!(fejer_rayleigh(&mq, 0.05, 64).is_err());
        assert!(fejer_rayleigh(&mq, 2.0 * PI - 0.01, 64).is_err());
        let gauss = RadialKernel::gaussian(1.0).unwrap();
        assert!(fejer_rayleigh(&gauss, PI, 64).is_err());
    }
}

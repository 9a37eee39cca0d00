//! Construction of the symbol-based preconditioners.
//!
//! The stencil coefficients are the central column of the inverse of a
//! small dense section: solve `A_n c = e⁰` and keep `c_0, …, c_m`. For the
//! Gaussian the resulting banded operator is already positive definite.
//! For the multiquadric the extracted coefficients are negated, shifted to
//! sum to zero (the symbol must vanish at the lattice to cancel the double
//! pole of `σ`), and sign-normalized so the stencil symbol is nonnegative;
//! a rank-one correction then produces a positive semidefinite
//! preconditioner whose kernel is exactly `span{e}`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::numkit::lu_solve;
use crate::toeplitz::{BandedSymbol, SymToeplitz};

const POSITIVITY_GRID: usize = 4096;
const MAX_SECTION_HALFWIDTH: usize = 512;

/// Banded preconditioner stencil extracted from a finite-section inverse.
#[derive(Clone, Debug)]
pub struct PrecondStencil {
    kernel: RadialKernel,
    section_halfwidth: usize,
    coeffs: BandedSymbol,
    zero_sum: bool,
    sign_flipped: bool,
}

impl PrecondStencil {
    pub fn kernel(&self) -> RadialKernel {
        self.kernel
    }

    pub fn section_halfwidth(&self) -> usize {
        self.section_halfwidth
    }

    pub fn halfband(&self) -> usize {
        self.coeffs.halfband()
    }

    pub fn coeffs(&self) -> &BandedSymbol {
        &self.coeffs
    }

    pub fn zero_sum(&self) -> bool {
        self.zero_sum
    }

    pub fn sign_flipped(&self) -> bool {
        self.sign_flipped
    }

    /// Uniformly scaled copy. A positive scale changes no CG iterate (the
    /// step sizes absorb it), which is the invariant tested downstream.
    pub fn scaled(&self, factor: f64) -> PrecondStencil {
        assert!(factor > 0.0, "scale factor must be positive");
        PrecondStencil {
            kernel: self.kernel,
            section_halfwidth: self.section_halfwidth,
            coeffs: BandedSymbol::new(self.coeffs.coeffs().iter().map(|c| c * factor).collect()),
            zero_sum: self.zero_sum,
            sign_flipped: self.sign_flipped,
        }
    }

    /// JSON cache format; coefficients carry 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        match self.kernel {
            RadialKernel::Gaussian { lambda } => {
                out.push_str("  \"kernel\": \"gaussian\",\n");
                let _ = writeln!(out, "  \"lambda\": {:.16e},", lambda);
            }
            RadialKernel::Multiquadric { c } => {
                out.push_str("  \"kernel\": \"multiquadric\",\n");
                let _ = writeln!(out, "  \"c\": {:.16e},", c);
            }
        }
        let _ = writeln!(out, "  \"n\": {},", self.section_halfwidth);
        let _ = writeln!(out, "  \"m\": {},", self.halfband());
        out.push_str("  \"coeffs\": [");
        for (i, c) in self.coeffs.coeffs().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{:.16e}", c);
        }
        out.push_str("],\n");
        let _ = writeln!(out, "  \"zero_sum\": {},", self.zero_sum);
        let _ = writeln!(out, "  \"sign_flipped\": {}", self.sign_flipped);
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::StencilFormat(e.to_string()))?;
        let kind = v["kernel"]
            .as_str()
            .ok_or_else(|| Error::StencilFormat("missing kernel".into()))?;
        let kernel = match kind {
            "gaussian" => RadialKernel::gaussian(
                v["lambda"]
                    .as_f64()
                    .ok_or_else(|| Error::StencilFormat("missing lambda".into()))?,
            )?,
            "multiquadric" => RadialKernel::multiquadric(
                v["c"]
                    .as_f64()
                    .ok_or_else(|| Error::StencilFormat("missing c".into()))?,
            )?,
            other => return Err(Error::StencilFormat(format!("unknown kernel {other}"))),
        };
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| Error::StencilFormat("missing n".into()))? as usize;
        let coeffs: Vec<f64> = v["coeffs"]
            .as_array()
            .ok_or_else(|| Error::StencilFormat("missing coeffs".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| Error::StencilFormat("bad coeff".into())))
            .collect::<Result<_>>()?;
        if coeffs.is_empty() {
            return Err(Error::StencilFormat("empty coeffs".into()));
        }
        Ok(PrecondStencil {
            kernel,
            section_halfwidth: n,
            coeffs: BandedSymbol::new(coeffs),
            zero_sum: v["zero_sum"].as_bool().unwrap_or(false),
            sign_flipped: v["sign_flipped"].as_bool().unwrap_or(false),
        })
    }
}

/// Solves `A_n c = e⁰` on the dense `(2n+1)` section and extracts the
/// banded stencil `c_0, …, c_m`.
pub fn build_stencil(kernel: &RadialKernel, n: usize, m: usize) -> Result<PrecondStencil> {
    if m == 0 || m > n {
        return Err(Error::Parameter(format!(
            "stencil needs 0 < m <= n, got m={m}, n={n}"
        )));
    }
    if n > MAX_SECTION_HALFWIDTH {
        return Err(Error::SizeBudget(format!(
            "dense section halfwidth {n} exceeds {MAX_SECTION_HALFWIDTH}"
        )));
    }
    let section = SymToeplitz::from_kernel(kernel, n, 1)?.to_dense()?;
    let size = 2 * n + 1;
    let mut e0 = vec![0.0; size];
    e0[n] = 1.0;
    let solution = lu_solve(&section, &e0)?;
    let mut coeffs: Vec<f64> = solution[n..=n + m].to_vec();

    let mut zero_sum = false;
    let mut sign_flipped = false;
    match kernel {
        RadialKernel::Gaussian { .. } => {
            let band = BandedSymbol::new(coeffs);
            let (min, argmin) = verify_positivity(&band, POSITIVITY_GRID);
            if min <= 0.0 {
                return Err(Error::SymbolNotPositive { min, argmin });
            }
            return Ok(PrecondStencil {
                kernel: *kernel,
                section_halfwidth: n,
                coeffs: band,
                zero_sum,
                sign_flipped,
            });
        }
        RadialKernel::Multiquadric { .. } => {
            // c_j = -(A_n^{-1})_{j0}, then subtract the mean of the 2m+1
            // extended coefficients so the symbol vanishes at the lattice.
            for c in coeffs.iter_mut() {
                *c = -*c;
            }
            let extended_sum = coeffs[0] + 2.0 * coeffs[1..].iter().sum::<f64>();
            let mean = extended_sum / (2 * m + 1) as f64;
            for c in coeffs.iter_mut() {
                *c -= mean;
            }
            // one refinement pass keeps |Σ d_j| at the 1e-16 level
            let residual = coeffs[0] + 2.0 * coeffs[1..].iter().sum::<f64>();
            coeffs[0] -= residual;
            zero_sum = true;

            let mut band = BandedSymbol::new(coeffs);
            let max_abs = (0..POSITIVITY_GRID)
                .map(|i| {
                    band.symbol_eval(2.0 * std::f64::consts::PI * i as f64 / POSITIVITY_GRID as f64)
                        .abs()
                })
                .fold(0.0, f64::max);
            if max_abs < 1e-14 {
                return Err(Error::DegenerateStencil);
            }
            if band.symbol_eval(std::f64::consts::PI) < 0.0 {
                let flipped: Vec<f64> = band.coeffs().iter().map(|c| -c).collect();
                band = BandedSymbol::new(flipped);
                sign_flipped = true;
            }
            Ok(PrecondStencil {
                kernel: *kernel,
                section_halfwidth: n,
                coeffs: band,
                zero_sum,
                sign_flipped,
            })
        }
    }
}

/// Minimum of the stencil symbol over a uniform grid on `[0, 2π)`.
///
/// A sampling check, not a proof; for the band widths used here the grid
/// (default 4096 points) oversamples the trigonometric polynomial heavily.
pub fn verify_positivity(sym: &BandedSymbol, gridsize: usize) -> (f64, f64) {
    assert!(
        gridsize >= 4 * (sym.halfband() + 1),
        "positivity grid too coarse for the band"
    );
    let mut min = f64::INFINITY;
    let mut argmin = 0.0;
    for i in 0..gridsize {
        let xi = 2.0 * std::f64::consts::PI * i as f64 / gridsize as f64;
        let v = sym.symbol_eval(xi);
        if v < min {
            min = v;
            argmin = xi;
        }
    }
    (min, argmin)
}

/// Banded operator with rank-one correction, `C = D - (De)(De)ᵀ/(eᵀDe)`;
/// positive semidefinite with kernel exactly `span{e}`.
#[derive(Clone, Debug)]
pub struct ProjectedPreconditioner {
    band: BandedSymbol,
    len: usize,
    de: Vec<f64>,
    et_de: f64,
}

impl ProjectedPreconditioner {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn band(&self) -> &BandedSymbol {
        &self.band
    }

    /// `C x = D x - (eᵀD x / eᵀD e) D e`, without materializing `C`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.len, "preconditioner length mismatch");
        let mut dx = self.band.matvec(x);
        let alpha = dx.iter().sum::<f64>() / self.et_de;
        for (v, de) in dx.iter_mut().zip(&self.de) {
            *v -= alpha * de;
        }
        dx
    }

    /// Densely materialized `C`; test oracle for `apply`.
    pub fn to_dense(&self) -> Result<crate::numkit::DenseMatrix> {
        let mut d = self.band.to_dense(self.len)?;
        for r in 0..self.len {
            for c in 0..self.len {
                let v = d.get(r, c) - self.de[r] * self.de[c] / self.et_de;
                d.set(r, c, v);
            }
        }
        Ok(d)
    }
}

/// Builds the rank-one-corrected preconditioner on `2N+1` points.
pub fn make_projected(stencil: &PrecondStencil, cap_n: usize) -> Result<ProjectedPreconditioner> {
    if !stencil.zero_sum() {
        return Err(Error::Parameter(
            "projected preconditioner needs a zero-sum stencil".into(),
        ));
    }
    let len = 2 * cap_n + 1;
    let de = stencil.coeffs().matvec(&vec![1.0; len]);
    let et_de: f64 = de.iter().sum();
    if et_de.abs() < 1e-300 {
        return Err(Error::DegenerateCorrection);
    }
    Ok(ProjectedPreconditioner {
        band: stencil.coeffs().clone(),
        len,
        de,
        et_de,
    })
}

/// Sup-norm scan of `|σ(ξ) σ_C(ξ) - 1|` over a 2048-point grid for each
/// `(m, n)` pair; the quantitative form of the symbol-approximation lemma.
pub fn lemma21_sweep(lambda: f64, ms: &[usize], ns: &[usize]) -> Result<Vec<(usize, usize, f64)>> {
    let kernel = RadialKernel::gaussian(lambda)?;
    let symbol = crate::kernels::SymbolFn::new(kernel);
    let grid = 2048usize;
    let mut out = Vec::new();
    for &n in ns {
        for &m in ms {
            if m > n {
                continue;
            }
            let stencil = build_stencil(&kernel, n, m)?;
            let mut sup: f64 = 0.0;
            for i in 0..grid {
                let xi = 2.0 * std::f64::consts::PI * i as f64 / grid as f64;
                let dev = (symbol.eval(xi) * stencil.coeffs().symbol_eval(xi) - 1.0).abs();
                sup = sup.max(dev);
            }
            out.push((m, n, sup));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Rng;
    use std::f64::consts::PI;

    /// Ten reference coefficients for the Gaussian stencil at λ=1, n=64,
    /// m=9 (published to five significant figures).
    pub(crate) const GAUSSIAN_STENCIL_64_9: [f64; 10] = [
        1.4301, -0.59563, 0.22265, -0.082083, 0.030205, -0.011112, 0.0040880, -0.0015039,
        0.00055325, -0.00020353,
    ];

    #[test]
    fn gaussian_stencil_matches_reference_values() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let stencil = build_stencil(&kernel, 64, 9).unwrap();
        for (c, r) in stencil.coeffs().coeffs().iter().zip(&GAUSSIAN_STENCIL_64_9) {
            assert!(
                ((c - r) / r).abs() < 5e-5,
                "coefficient {c} vs reference {r}"
            );
        }
        assert!(!stencil.zero_sum());
        assert!(!stencil.sign_flipped());
    }

    #[test]
    fn stencil_solves_defining_system() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let n = 1;
        let stencil = build_stencil(&kernel, n, 1).unwrap();
        // verify A_1 c = e0 residual via the full solve
        let dense = SymToeplitz::from_kernel(&kernel, n, 1)
            .unwrap()
            .to_dense()
            .unwrap();
        let mut e0 = vec![0.0; 3];
        e0[1] = 1.0;
        let full = lu_solve(&dense, &e0).unwrap();
        let r = dense
            .matvec(&full)
            .iter()
            .zip(&e0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(r < 1e-12);
        // extraction consistency
        assert!((stencil.coeffs().coeffs()[0] - full[1]).abs() < 1e-15);
    }

    #[test]
    fn gaussian_defining_residual_n16() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let n = 16;
        let dense = SymToeplitz::from_kernel(&kernel, n, 1)
            .unwrap()
            .to_dense()
            .unwrap();
        let mut e0 = vec![0.0; 2 * n + 1];
        e0[n] = 1.0;
        let c = lu_solve(&dense, &e0).unwrap();
        let r = dense
            .matvec(&c)
            .iter()
            .zip(&e0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(r < 1e-10);
    }

    #[test]
    fn mq_m1_zero_sum_forces_divided_difference_shape() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 64, 1).unwrap();
        let c = stencil.coeffs().coeffs();
        assert!(stencil.zero_sum());
        // Σ d_j = 0 with evenness forces d_1 = -d_0/2
        assert!((c[1] + 0.5 * c[0]).abs() < 1e-12 * c[0].abs());
        // reference stencil values (offset parameter unstated there; this
        // run uses c = 1): report deviation rather than assert tightly
        let dev0 = (c[0] - 7.8538) / 7.8538;
        let dev1 = (c[1] + 3.9269) / 3.9269;
        println!("m=1 stencil: d0={:.6} (dev {:.2e}), d1={:.6} (dev {:.2e})", c[0], dev0, c[1], dev1);
        assert!(c[0] > 0.0);
    }

    #[test]
    fn mq_zero_sum_is_exact() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        for m in [1usize, 5, 9] {
            let stencil = build_stencil(&kernel, 64, m).unwrap();
            let c = stencil.coeffs().coeffs();
            let sum = c[0] + 2.0 * c[1..].iter().sum::<f64>();
            assert!(sum.abs() < 1e-14, "m={m}: sum {sum}");
        }
    }

    #[test]
    fn parameter_validation() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        assert!(matches!(
            build_stencil(&kernel, 4, 5),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            build_stencil(&kernel, 4, 0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn stencil_convergence_in_section_size() {
        // Cauchy-style surrogate: |c_j^{(n)} - c_j^{(2n)}| decreases as n
        // doubles through 16, 32, 64.
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        for j in 0..=3usize {
            let mut gaps = Vec::new();
            for n in [16usize, 32, 64] {
                let a = build_stencil(&kernel, n, 4).unwrap().coeffs().coeffs()[j];
                let b = build_stencil(&kernel, 2 * n, 4).unwrap().coeffs().coeffs()[j];
                gaps.push((a - b).abs());
            }
            assert!(gaps[0] >= gaps[1] && gaps[1] >= gaps[2], "j={j}: {gaps:?}");
        }
    }

    #[test]
    fn positivity_scan_gaussian_and_harmonic() {
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let stencil = build_stencil(&kernel, 64, 9).unwrap();
        let (min, _) = verify_positivity(stencil.coeffs(), 4096);
        assert!(min > 0.0);

        let harmonic = BandedSymbol::new(vec![0.0, 1.0]);
        let (min, argmin) = verify_positivity(&harmonic, 4096);
        assert!((min + 2.0).abs() < 1e-12);
        assert!((argmin - PI).abs() < 1e-2);
    }

    #[test]
    fn mq_normalized_stencil_is_nonnegative() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 64, 9).unwrap();
        let (min, argmin) = verify_positivity(stencil.coeffs(), 4096);
        assert!(min >= -1e-12, "min {min} at {argmin}");
        // near-zero values only close to the lattice points
        if min.abs() < 1e-6 {
            let dist = argmin.min(2.0 * PI - argmin);
            assert!(dist < 0.1, "vanishing away from lattice: xi={argmin}");
        }
    }

    #[test]
    fn projected_kernel_and_range() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 64, 9).unwrap();
        let proj = make_projected(&stencil, 32).unwrap();
        let len = proj.len();

        let e = vec![1.0; len];
        let ce = proj.apply(&e);
        let de_norm: f64 = proj.de.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ce_norm: f64 = ce.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(ce_norm <= 1e-12 * de_norm.max(1.0), "C e = {ce_norm}");

        let mut rng = Rng::new(2);
        for _ in 0..5 {
            let x = rng.uniform_vector(len);
            let cx = proj.apply(&x);
            let et_cx: f64 = cx.iter().sum();
            let cx_norm: f64 = cx.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(et_cx.abs() < 1e-12 * (len as f64).sqrt() * cx_norm.max(1.0));
        }
    }

    #[test]
    fn projected_matches_dense_rank_one_oracle() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 16, 3).unwrap();
        let proj = make_projected(&stencil, 8).unwrap();
        let dense = proj.to_dense().unwrap();
        let mut rng = Rng::new(4);
        let x = rng.uniform_vector(proj.len());
        let fast = proj.apply(&x);
        let slow = dense.matvec(&x);
        let scale = slow.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-13 * scale);
        }
    }

    #[test]
    fn projected_symmetry_and_psd() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 32, 5).unwrap();
        let proj = make_projected(&stencil, 20).unwrap();
        let mut rng = Rng::new(8);
        let x = rng.uniform_vector(proj.len());
        let y = rng.uniform_vector(proj.len());
        let lhs: f64 = x.iter().zip(proj.apply(&y)).map(|(a, b)| a * b).sum();
        let rhs: f64 = y.iter().zip(proj.apply(&x)).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));

        for _ in 0..20 {
            let x = rng.uniform_vector(proj.len());
            let quad: f64 = x.iter().zip(proj.apply(&x)).map(|(a, b)| a * b).sum();
            let nx: f64 = x.iter().map(|v| v * v).sum();
            assert!(quad >= -1e-10 * nx);
            // the projected part of a random vector is essentially all of
            // it, so the form should be strictly positive here
            let mean = x.iter().sum::<f64>() / x.len() as f64;
            let qx_norm: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>().sqrt();
            if qx_norm > 1e-6 * nx.sqrt() {
                assert!(quad > 0.0);
            }
        }
    }

    #[test]
    fn lemma_sweep_decreases_in_bandwidth() {
        let rows = lemma21_sweep(1.0, &[1, 9], &[64]).unwrap();
        let e1 = rows.iter().find(|r| r.0 == 1).unwrap().2;
        let e9 = rows.iter().find(|r| r.0 == 9).unwrap().2;
        assert!(e9 < 0.01, "E(9,64) = {e9}");
        assert!(e1 > e9);
    }

    #[test]
    fn exact_inverse_sanity_anchor() {
        // With m = n = 4 the stencil is the exact central column of the
        // inverse; applying A_n to the full solution reproduces e0.
        let kernel = RadialKernel::gaussian(1.0).unwrap();
        let n = 4;
        let dense = SymToeplitz::from_kernel(&kernel, n, 1)
            .unwrap()
            .to_dense()
            .unwrap();
        let mut e0 = vec![0.0; 2 * n + 1];
        e0[n] = 1.0;
        let c = lu_solve(&dense, &e0).unwrap();
        let back = dense.matvec(&c);
        for (a, b) in back.iter().zip(&e0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn stencil_json_round_trip() {
        let kernel = RadialKernel::multiquadric(1.0).unwrap();
        let stencil = build_stencil(&kernel, 16, 3).unwrap();
        let text = stencil.to_json();
        let back = PrecondStencil::from_json(&text).unwrap();
        assert_eq!(stencil.coeffs().coeffs(), back.coeffs().coeffs());
        assert_eq!(stencil.zero_sum(), back.zero_sum());
        assert_eq!(stencil.sign_flipped(), back.sign_flipped());
        // 17-digit printing round-trips bit-exactly
        assert_eq!(text, back.to_json());
    }
}

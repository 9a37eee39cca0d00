//! Symmetric (multilevel) Toeplitz operators with FFT matvec, and banded
//! Toeplitz operators defined by an even coefficient stencil.
//!
//! The full operator acts on vectors indexed by `[-n, n]^d` and stores its
//! generator only over the nonnegative orthant `[0, 2n]^d`; coordinate
//! evenness unfolds the rest. The matvec embeds the Toeplitz product into
//! a d-dimensional circulant whose per-axis size is the next power of two
//! at least `2(2n+1) - 1`, so a radix-2 FFT diagonalizes it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::numkit::{fft_in_place, DenseMatrix, Direction};

/// Elements allowed in the padded circulant grid (16 bytes each).
const EMBEDDING_BUDGET: usize = 1 << 26;
/// Entries allowed in a densely materialized section.
const DENSE_BUDGET: usize = 1 << 22;

/// Symmetric multilevel Toeplitz operator `(φ(‖j-k‖))_{j,k ∈ [-n,n]^d}`.
#[derive(Clone, Debug)]
pub struct SymToeplitz {
    dim: usize,
    halfwidth: usize,
    side: usize,     // 2n+1, per axis
    gen_side: usize, // 2n+1 lags per axis (lags 0..=2n)
    generator: Vec<f64>,
    axis_len: usize, // padded circulant size per axis
    spectrum: Vec<Complex64>,
}

fn embedding_total(n: usize, d: usize) -> Result<(usize, usize)> {
    let axis_len = (2 * (2 * n + 1) - 1).next_power_of_two();
    axis_len
        .checked_pow(d as u32)
        .filter(|&t| t <= EMBEDDING_BUDGET)
        .map(|t| (axis_len, t))
        .ok_or_else(|| {
            Error::SizeBudget(format!(
                "circulant embedding {axis_len}^{d} exceeds {EMBEDDING_BUDGET} elements"
            ))
        })
}

impl SymToeplitz {
    /// Builds the operator for a radial kernel on the grid `[-n, n]^d`.
    pub fn from_kernel(kernel: &RadialKernel, n: usize, d: usize) -> Result<Self> {
        assert!(d >= 1, "dimension must be at least 1");
        embedding_total(n, d)?;
        let gen_side = 2 * n + 1;
        let mut generator = vec![0.0; gen_side.pow(d as u32)];
        let mut idx = vec![0usize; d];
        for v in generator.iter_mut() {
            let r2: f64 = idx.iter().map(|&k| (k * k) as f64).sum();
            *v = kernel.phi(r2.sqrt());
            // odometer over [0, 2n]^d
            for axis in (0..d).rev() {
                idx[axis] += 1;
                if idx[axis] < gen_side {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Self::from_generator(generator, n, d)
    }

    /// Builds the operator from generator samples `t_k`, `k ∈ [0, 2n]^d`.
    pub fn from_generator(generator: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        let gen_side = 2 * n + 1;
        assert_eq!(
            generator.len(),
            gen_side.pow(d as u32),
            "generator must cover [0, 2n]^d"
        );
        let side = 2 * n + 1;
        let (axis_len, total) = embedding_total(n, d)?;

        // Embed the generator into the circulant grid: per-axis position p
        // folds to the lag p (p ≤ 2n) or axis_len - p (p ≥ axis_len - 2n),
        // zero in the gap between.
        let mut embedded = vec![Complex64::new(0.0, 0.0); total];
        let mut pos = vec![0usize; d];
        'outer: for slot in embedded.iter_mut() {
            let mut gen_index = 0usize;
            let mut ok = true;
            for &p in pos.iter() {
                let lag = if p <= 2 * n {
                    Some(p)
                } else if axis_len - p <= 2 * n {
                    Some(axis_len - p)
                } else {
                    None
                };
                match lag {
                    Some(l) => gen_index = gen_index * gen_side + l,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                *slot = Complex64::new(generator[gen_index], 0.0);
            }
            for axis in (0..d).rev() {
                pos[axis] += 1;
                if pos[axis] < axis_len {
                    continue 'outer;
                }
                pos[axis] = 0;
            }
        }
        fft_nd(&mut embedded, axis_len, d, Direction::Forward);

        Ok(SymToeplitz {
            dim: d,
            halfwidth: n,
            side,
            gen_side,
            generator,
            axis_len,
            spectrum: embedded,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    /// Number of grid points, `(2n+1)^d`.
    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    /// Generator value at the (componentwise nonnegative) lag vector.
    fn generator_at(&self, lags: &[usize]) -> f64 {
        let mut index = 0usize;
        for &l in lags {
            index = index * self.gen_side + l;
        }
        self.generator[index]
    }

    /// `y_j = Σ_k φ(‖j-k‖) x_k` via circulant embedding and FFT.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.len(), "matvec length mismatch");
        let d = self.dim;
        let total = self.spectrum.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); total];

        // scatter x into the corner [0, side)^d of the padded grid
        let mut pos = vec![0usize; d];
        for &value in x {
            let mut flat = 0usize;
            for &p in pos.iter() {
                flat = flat * self.axis_len + p;
            }
            buf[flat] = Complex64::new(value, 0.0);
            for axis in (0..d).rev() {
                pos[axis] += 1;
                if pos[axis] < self.side {
                    break;
                }
                pos[axis] = 0;
            }
        }

        fft_nd(&mut buf, self.axis_len, d, Direction::Forward);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        fft_nd(&mut buf, self.axis_len, d, Direction::Inverse);

        let mut y = vec![0.0; self.len()];
        let mut pos = vec![0usize; d];
        let mut max_imag: f64 = 0.0;
        for out in y.iter_mut() {
            let mut flat = 0usize;
            for &p in pos.iter() {
                flat = flat * self.axis_len + p;
            }
            let v = buf[flat];
            max_imag = max_imag.max(v.im.abs());
            *out = v.re;
            for axis in (0..d).rev() {
                pos[axis] += 1;
                if pos[axis] < self.side {
                    break;
                }
                pos[axis] = 0;
            }
        }
        // roundoff scales with the spectrum and input, not the (possibly
        // heavily cancelled) output
        let scale = self.spectrum.iter().fold(0.0f64, |acc, s| acc.max(s.norm()))
            * x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        debug_assert!(
            max_imag <= 1e-11 * (1.0 + scale),
            "imaginary residue {max_imag} too large for operator scale {scale}"
        );
        y
    }

    /// Densely materialized section; the test oracle for the FFT matvec.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let size = self.len();
        if size.saturating_mul(size) > DENSE_BUDGET {
            return Err(Error::SizeBudget(format!(
                "dense section {size}x{size} exceeds {DENSE_BUDGET} entries"
            )));
        }
        let d = self.dim;
        let side = self.side;
        let unflatten = |mut f: usize| -> Vec<usize> {
            let mut out = vec![0usize; d];
            for axis in (0..d).rev() {
                out[axis] = f % side;
                f /= side;
            }
            out
        };
        let mut m = DenseMatrix::zeros(size, size);
        for r in 0..size {
            let jr = unflatten(r);
            for c in 0..=r {
                let jc = unflatten(c);
                let lags: Vec<usize> = jr
                    .iter()
                    .zip(&jc)
                    .map(|(&a, &b)| a.abs_diff(b))
                    .collect();
                let v = self.generator_at(&lags);
                m.set(r, c, v);
                m.set(c, r, v);
            }
        }
        Ok(m)
    }
}

/// In-place FFT along every axis of a `d`-dimensional hypercube with equal
/// per-axis length.
fn fft_nd(data: &mut [Complex64], axis_len: usize, d: usize, direction: Direction) {
    if d == 1 {
        fft_in_place(data, direction);
        return;
    }
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); axis_len];
    for axis in 0..d {
        // stride between consecutive entries along `axis`
        let stride = axis_len.pow((d - 1 - axis) as u32);
        let block = stride * axis_len;
        for base_block in (0..total).step_by(block) {
            for offset in 0..stride {
                let base = base_block + offset;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft_in_place(&mut line, direction);
                for (i, &v) in line.iter().enumerate() {
                    data[base + i * stride] = v;
                }
            }
        }
    }
}

/// Even finite coefficient stencil `(c_0, …, c_m)` with `c_{-j} = c_j`,
/// acting as a banded symmetric Toeplitz operator.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSymbol {
    coeffs: Vec<f64>,
}

impl BandedSymbol {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "stencil needs at least c_0");
        BandedSymbol { coeffs }
    }

    pub fn halfband(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Direct banded matvec; `m` is small in every experiment, so no FFT.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let len = x.len();
        let m = self.halfband() as isize;
        let mut y = vec![0.0; len];
        for i in 0..len as isize {
            let mut acc = 0.0;
            let lo = (i - m).max(0);
            let hi = (i + m).min(len as isize - 1);
            for j in lo..=hi {
                acc += self.coeffs[(i - j).unsigned_abs()] * x[j as usize];
            }
            y[i as usize] = acc;
        }
        y
    }

    /// Trigonometric-polynomial symbol `c_0 + 2 Σ c_j cos(jξ)`.
    pub fn symbol_eval(&self, xi: f64) -> f64 {
        let mut acc = self.coeffs[0];
        for (j, &c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * c * (j as f64 * xi).cos();
        }
        acc
    }

    pub fn to_dense(&self, size: usize) -> Result<DenseMatrix> {
        if size.saturating_mul(size) > DENSE_BUDGET {
            return Err(Error::SizeBudget(format!(
                "dense banded section {size}x{size} exceeds {DENSE_BUDGET} entries"
            )));
        }
        let m = self.halfband();
        Ok(DenseMatrix::from_fn_symmetric(size, |r, c| {
            let lag = r.abs_diff(c);
            if lag <= m {
                self.coeffs[lag]
            } else {
                0.0
            }
        }))
    }
}

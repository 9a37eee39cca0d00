//! Dense linear algebra, radix-2 FFT and seeded random numbers.
//!
//! Everything in here is deliberately small and self-contained: LU with
//! partial pivoting (the multiquadric sections are indefinite, so Cholesky
//! is out), a cyclic Jacobi eigensolver for symmetric matrices, an
//! iterative bit-reversal FFT, and a splitmix64 random stream so that
//! experiment tables are bit-reproducible across platforms.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a symmetric matrix from its lower triangle so that
    /// `a[j][k] == a[k][j]` holds exactly.
    pub fn from_fn_symmetric(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..=r {
                let v = f(r, c);
                m.set(r, c, v);
                m.set(c, r, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..r {
                if self.get(r, c) != self.get(c, r) {
                    return false;
                }
            }
        }
        true
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec length mismatch");
        let mut y = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[r] = acc;
        }
        y
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }
}

/// Solves `A x = b` by LU factorization with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.rows(), a.cols(), "lu_solve needs a square matrix");
    assert_eq!(a.rows(), b.len(), "lu_solve dimension mismatch");
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        // partial pivot
        let mut pivot_row = col;
        let mut pivot_val = lu.get(col, col).abs();
        for r in col + 1..n {
            let v = lu.get(r, col).abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val < 1e-300 {
            return Err(Error::Singular(col));
        }
        if pivot_row != col {
            for c in 0..n {
                let tmp = lu.get(col, c);
                lu.set(col, c, lu.get(pivot_row, c));
                lu.set(pivot_row, c, tmp);
            }
            x.swap(col, pivot_row);
            perm.swap(col, pivot_row);
        }
        let inv_pivot = 1.0 / lu.get(col, col);
        for r in col + 1..n {
            let factor = lu.get(r, col) * inv_pivot;
            lu.set(r, col, factor);
            for c in col + 1..n {
                lu.set(r, c, lu.get(r, c) - factor * lu.get(col, c));
            }
            x[r] -= factor * x[col];
        }
    }

    // back substitution
    for r in (0..n).rev() {
        let mut acc = x[r];
        for c in r + 1..n {
            acc -= lu.get(r, c) * x[c];
        }
        x[r] = acc / lu.get(r, r);
    }
    Ok(x)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues sorted ascending and the matrix whose columns are
/// the matching orthonormal eigenvectors.
pub fn jacobi_eigs(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let fro = a.frobenius_norm();
    if n <= 1 || fro == 0.0 {
        let eigs = (0..n).map(|i| m.get(i, i)).collect();
        return Ok((eigs, v));
    }
    let target = 1e-13 * fro;

    for _sweep in 0..60 {
        let mut off = 0.0;
        for r in 0..n {
            for c in r + 1..n {
                off += m.get(r, c).powi(2);
            }
        }
        if (2.0 * off).sqrt() < target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok((eigenvalues, vectors))
}

/// Power-of-two-length complex workspace for the FFT.
#[derive(Clone, Debug)]
pub struct ComplexBuffer {
    values: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl ComplexBuffer {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let len = values.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(ComplexBuffer { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// In-place transform. Forward computes `X_k = sum_j x_j e^{-2πi jk/L}`;
    /// inverse is the conjugate transform scaled by `1/L`, so
    /// `inverse ∘ forward` is the identity.
    pub fn transform(&mut self, direction: Direction) {
        fft_in_place(&mut self.values, direction);
    }
}

/// Iterative radix-2 FFT with bit-reversal reordering.
///
/// Length must be a power of two; `ComplexBuffer` enforces this at
/// construction for external callers.
pub(crate) fn fft_in_place(values: &mut [Complex64], direction: Direction) {
    let len = values.len();
    debug_assert!(len.is_power_of_two());
    if len <= 1 {
        return;
    }

    // bit-reversal permutation
    let bits = len.trailing_zeros();
    for i in 0..len {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            values.swap(i, j);
        }
    }

    // twiddle table for the full length, reused by every stage via stride
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let half = len / 2;
    let mut twiddles = Vec::with_capacity(half);
    for k in 0..half {
        let angle = sign * 2.0 * std::f64::consts::PI * k as f64 / len as f64;
        twiddles.push(Complex64::new(angle.cos(), angle.sin()));
    }

    let mut width = 2;
    while width <= len {
        let stride = len / width;
        for start in (0..len).step_by(width) {
            for k in 0..width / 2 {
                let w = twiddles[k * stride];
                let a = values[start + k];
                let b = values[start + k + width / 2] * w;
                values[start + k] = a + b;
                values[start + k + width / 2] = a - b;
            }
        }
        width <<= 1;
    }

    if direction == Direction::Inverse {
        let scale = 1.0 / len as f64;
        for v in values.iter_mut() {
            *v *= scale;
        }
    }
}

/// Splitmix64 stream. Identical seeds give identical output on every
/// platform, which keeps the experiment tables reproducible.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1]`.
    pub fn uniform(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    pub fn uniform_vector(&mut self, length: usize) -> Vec<f64> {
        assert!(length >= 1, "uniform_vector needs length >= 1");
        (0..length).map(|_| self.uniform()).collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let angle = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                    acc += v * Complex64::new(angle.cos(), angle.sin());
                }
                acc
            })
            .collect()
    }

    #[test]
    fn fft_of_delta_is_flat() {
        let mut buf = ComplexBuffer::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        buf.transform(Direction::Forward);
        for v in buf.values() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn fft_round_trip_is_identity() {
        let mut rng = Rng::new(7);
        let original: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.uniform(), rng.uniform()))
            .collect();
        let mut buf = ComplexBuffer::new(original.clone()).unwrap();
        buf.transform(Direction::Forward);
        buf.transform(Direction::Inverse);
        let max_err = buf
            .values()
            .iter()
            .zip(&original)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-12, "round-trip error {max_err}");
    }

    #[test]
    fn fft_matches_naive_dft() {
        let mut rng = Rng::new(11);
        let x: Vec<Complex64> = (0..8)
            .map(|_| Complex64::new(rng.uniform(), rng.uniform()))
            .collect();
        let expected = naive_dft(&x);
        let mut buf = ComplexBuffer::new(x).unwrap();
        buf.transform(Direction::Forward);
        for (a, b) in buf.values().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_rejects_non_power_of_two() {
        assert!(matches!(
            ComplexBuffer::from_real(&[1.0, 2.0, 3.0]),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn lu_identity_returns_rhs() {
        let a = DenseMatrix::identity(4);
        let b = [3.0, -1.0, 0.5, 2.0];
        let x = lu_solve(&a, &b).unwrap();
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn lu_hilbert_matches_cramer_oracle() {
        // 3x3 Hilbert system solved independently by Cramer's rule.
        let h = DenseMatrix::from_fn(3, 3, |r, c| 1.0 / (r + c + 1) as f64);
        let b = [1.0, 1.0, 1.0];

        let det3 = |m: &[[f64; 3]; 3]| -> f64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let base = [
            [1.0, 1.0 / 2.0, 1.0 / 3.0],
            [1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0],
            [1.0 / 3.0, 1.0 / 4.0, 1.0 / 5.0],
        ];
        let d = det3(&base);
        let mut expected = [0.0; 3];
        for col in 0..3 {
            let mut m = base;
            for row in 0..3 {
                m[row][col] = b[row];
            }
            expected[col] = det3(&m) / d;
        }

        let x = lu_solve(&h, &b).unwrap();
        for (xi, ei) in x.iter().zip(&expected) {
            assert!((xi - ei).abs() < 1e-10 * ei.abs().max(1.0));
        }
    }

    #[test]
    fn lu_rejects_singular_matrix() {
        let a = DenseMatrix::from_fn(2, 2, |r, _| if r == 0 { 1.0 } else { 2.0 });
        assert!(matches!(lu_solve(&a, &[1.0, 1.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn lu_random_residual_is_small() {
        let mut rng = Rng::new(3);
        for _ in 0..5 {
            let n = 40;
            let mut a = DenseMatrix::from_fn(n, n, |_, _| rng.uniform());
            for i in 0..n {
                a.set(i, i, a.get(i, i) + n as f64); // well-conditioned
            }
            let b = rng.uniform_vector(n);
            let x = lu_solve(&a, &b).unwrap();
            let r: f64 = a
                .matvec(&x)
                .iter()
                .zip(&b)
                .map(|(u, v)| (u - v).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-9 * norm2(&b));
        }
    }

    #[test]
    fn jacobi_diagonal_matrix() {
        let mut a = DenseMatrix::zeros(3, 3);
        a.set(0, 0, 3.0);
        a.set(1, 1, 1.0);
        a.set(2, 2, 2.0);
        let (eigs, _) = jacobi_eigs(&a).unwrap();
        assert_eq!(eigs, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobi_2x2_closed_form() {
        let a = DenseMatrix::from_fn_symmetric(2, |r, c| if r == c { 2.0 } else { 1.0 });
        let (eigs, _) = jacobi_eigs(&a).unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_trace_and_orthogonality() {
        let mut rng = Rng::new(5);
        let a = DenseMatrix::from_fn_symmetric(10, |_, _| rng.uniform());
        let (eigs, v) = jacobi_eigs(&a).unwrap();
        let sum: f64 = eigs.iter().sum();
        assert!((sum - a.trace()).abs() < 1e-10);

        // V^T V = I
        let n = 10;
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += v.get(k, r) * v.get(k, c);
                }
                let expected = if r == c { 1.0 } else { 0.0 };
                assert!((acc - expected).abs() < 1e-9);
            }
        }

        // A V = V diag(eigs), columnwise
        for c in 0..n {
            let col: Vec<f64> = (0..n).map(|r| v.get(r, c)).collect();
            let av = a.matvec(&col);
            for r in 0..n {
                assert!((av[r] - eigs[c] * col[r]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn jacobi_rejects_non_symmetric() {
        let a = DenseMatrix::from_fn(2, 2, |r, c| (r * 2 + c) as f64);
        assert!(matches!(jacobi_eigs(&a), Err(Error::NotSymmetric)));
    }

    #[test]
    fn rng_is_deterministic() {
        let a = Rng::new(42).uniform_vector(4);
        let b = Rng::new(42).uniform_vector(4);
        assert_eq!(a, b);
    }

    #[test]
    fn rng_range_and_mean() {
        let v = Rng::new(1).uniform_vector(100_000);
        assert!(v.iter().all(|&x| (-1.0..=1.0).contains(&x)));
        let mean: f64 = v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
    }
}

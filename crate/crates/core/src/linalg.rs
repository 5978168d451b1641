//! Small dense matrices and the eigen-solvers used by the spectrum routes.
//!
//! Matrices here are at most a few dozen rows, so the algorithms favour
//! accuracy and simplicity over asymptotic speed: cyclic Jacobi rotations for
//! symmetric (and, through a real embedding, Hermitian) matrices, and Sturm
//! bisection for symmetric tridiagonal ones.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{int, lit, Real};

/// A complex `(2j+1) x (2j+1)` matrix whose rows and columns are labelled by
/// `n = -j..=j`.
#[derive(Clone, PartialEq)]
pub struct RepMatrix<T> {
    j: u32,
    data: Vec<Complex<T>>,
}

impl<T: Real> RepMatrix<T> {
    pub fn zeros(j: u32) -> Self {
        let d = (2 * j + 1) as usize;
        Self { j, data: vec![Complex::zero(); d * d] }
    }

    pub fn identity(j: u32) -> Self {
        let mut m = Self::zeros(j);
        for n in -(j as i32)..=(j as i32) {
            m.set(n, n, Complex::one());
        }
        m
    }

    pub fn from_diag(j: u32, f: impl Fn(i32) -> Complex<T>) -> Self {
        let mut m = Self::zeros(j);
        for n in -(j as i32)..=(j as i32) {
            m.set(n, n, f(n));
        }
        m
    }

    /// Builds a matrix entry by entry from `f(row_n, col_n)`.
    pub fn from_fn(j: u32, f: impl Fn(i32, i32) -> Complex<T>) -> Self {
        let mut m = Self::zeros(j);
        let jj = j as i32;
        for r in -jj..=jj {
            for c in -jj..=jj {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn dim(&self) -> usize {
        (2 * self.j + 1) as usize
    }

    #[inline]
    fn idx(&self, row: i32, col: i32) -> usize {
        let j = self.j as i32;
        debug_assert!(row.abs() <= j && col.abs() <= j, "index outside -j..=j");
        (row + j) as usize * self.dim() + (col + j) as usize
    }

    #[inline]
    pub fn get(&self, row: i32, col: i32) -> Complex<T> {
        self.data[self.idx(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: i32, col: i32, v: Complex<T>) {
        let i = self.idx(row, col);
        self.data[i] = v;
    }

    /// Entry by zero-based position.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim() + c]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(self.j);
        for r in 0..d {
            for c in 0..d {
                out.data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { j: self.j, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).map(|i| self.at(i, i)).fold(Complex::zero(), |a, b| a + b)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.j, other.j, "matrices built for different j");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    /// Matrix-vector product with a coefficient vector ordered `n = -j..=j`.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let d = self.dim();
        assert_eq!(v.len(), d, "vector length does not match matrix");
        (0..d)
            .map(|r| (0..d).fold(Complex::zero(), |acc, c| acc + self.data[r * d + c] * v[c]))
            .collect()
    }

    /// Real parts, row-major, for matrices known to be real.
    pub fn real_part(&self) -> Vec<T> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn max_imag(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.im.abs()))
    }
}

impl<T: Real> fmt::Debug for RepMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        writeln!(f, "RepMatrix(j = {})", self.j)?;
        for r in 0..d {
            let row: Vec<String> = (0..d)
                .map(|c| {
                    let z = self.at(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Real> Mul for &RepMatrix<T> {
    type Output = RepMatrix<T>;

    fn mul(self, rhs: &RepMatrix<T>) -> RepMatrix<T> {
        assert_eq!(self.j, rhs.j, "matrices built for different j");
        let d = self.dim();
        let mut out = RepMatrix::zeros(self.j);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] = out.data[r * d + c] + a * rhs.data[k * d + c];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &RepMatrix<T> {
    type Output = RepMatrix<T>;

    fn add(self, rhs: &RepMatrix<T>) -> RepMatrix<T> {
        assert_eq!(self.j, rhs.j, "matrices built for different j");
        RepMatrix { j: self.j, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect() }
    }
}

impl<T: Real> Sub for &RepMatrix<T> {
    type Output = RepMatrix<T>;

    fn sub(self, rhs: &RepMatrix<T>) -> RepMatrix<T> {
        assert_eq!(self.j, rhs.j, "matrices built for different j");
        RepMatrix { j: self.j, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect() }
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<T>>,
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric `n x n` matrix given
/// row-major. Only the upper triangle is trusted.
pub fn symmetric_eigen<T: Real>(a: &[T], n: usize) -> SymmetricEigen<T> {
    assert_eq!(a.len(), n * n, "matrix is not n x n");
    let mut m: Vec<T> = a.to_vec();
    for r in 0..n {
        for c in 0..r {
            m[r * n + c] = m[c * n + r];
        }
    }
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }

    let frob = m.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
    let target = frob * T::epsilon() * lit(0.1);
    for _sweep in 0..64 {
        let off = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .fold(T::zero(), |s, (p, q)| s + m[p * n + q] * m[p * n + q])
            .sqrt();
        if off <= target || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (lit::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x * n + x].partial_cmp(&m[y * n + y]).expect("finite eigenvalues"));
    SymmetricEigen {
        values: order.iter().map(|&k| m[k * n + k]).collect(),
        vectors: order.iter().map(|&k| (0..n).map(|r| v[r * n + k]).collect()).collect(),
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
///
/// Uses the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose spectrum
/// is that of the Hermitian matrix with every eigenvalue doubled.
pub fn hermitian_eigenvalues<T: Real>(h: &RepMatrix<T>) -> Vec<T> {
    let d = h.dim();
    let n = 2 * d;
    let mut a = vec![T::zero(); n * n];
    for r in 0..d {
        for c in 0..d {
            // Hermitian part only; guards against round-off asymmetry.
            let z = (h.at(r, c) + h.at(c, r).conj()).scale(lit(0.5));
            a[r * n + c] = z.re;
            a[(r + d) * n + (c + d)] = z.re;
            a[r * n + (c + d)] = -z.im;
            a[(r + d) * n + c] = z.im;
        }
    }
    let eig = symmetric_eigen(&a, n);
    eig.values.chunks(2).map(|pair| (pair[0] + pair[1]) * lit(0.5)).collect()
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// squared off-diagonal entries `off_sq` (`off_sq[k]` couples rows `k` and
/// `k+1`), found by Sturm-sequence bisection.
///
/// A non-symmetric tridiagonal matrix whose opposite off-diagonal products are
/// positive is similar to this one, which is how the Lamé pencils use it.
pub fn tridiagonal_eigenvalues<T: Real>(diag: &[T], off_sq: &[T]) -> Vec<T> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    assert_eq!(off_sq.len() + 1, n, "off-diagonal length must be n - 1");
    assert!(off_sq.iter().all(|e| *e >= T::zero()), "squared off-diagonals must be non-negative");

    // Gershgorin interval.
    let off = |k: usize| if k < off_sq.len() { off_sq[k].sqrt() } else { T::zero() };
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for k in 0..n {
        let radius = off(k) + if k > 0 { off(k - 1) } else { T::zero() };
        lo = lo.min(diag[k] - radius);
        hi = hi.max(diag[k] + radius);
    }
    let span = (hi - lo).max(hi.abs().max(lo.abs())).max(T::one());
    lo = lo - span * lit(1e-3);
    hi = hi + span * lit(1e-3);

    // Number of eigenvalues strictly below x.
    let count_below = |x: T| -> usize {
        let pivmin = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < T::zero() {
            count += 1;
        }
        for k in 1..n {
            q = diag[k] - x - off_sq[k - 1] / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    };

    (0..n)
        .map(|k| {
            // k-th smallest: smallest x with count_below(x) > k.
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = (a + b) * lit(0.5);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
                if (b - a) <= T::epsilon() * (a.abs().max(b.abs())) * int(2) {
                    break;
                }
            }
            (a + b) * lit(0.5)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_char_poly_roots_2x2(a: f64, b: f64, d: f64) -> (f64, f64) {
        let tr = a + d;
        let det = a * d - b * b;
        let disc = (tr * tr / 4.0 - det).sqrt();
        (tr / 2.0 - disc, tr / 2.0 + disc)
    }

    #[test]
    fn jacobi_2x2_matches_closed_form() {
        let eig = symmetric_eigen(&[2.0, 1.0, 1.0, -3.0], 2);
        let (l0, l1) = brute_char_poly_roots_2x2(2.0, 1.0, -3.0);
        assert!((eig.values[0] - l0).abs() < 1e-14);
        assert!((eig.values[1] - l1).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let n = 5;
        let a: Vec<f64> = (0..n * n)
            .map(|k| {
                let (r, c) = (k / n, k % n);
                ((r + 1) * (c + 1)) as f64 / (1.0 + (r as f64 - c as f64).abs()) + if r == c { r as f64 } else { 0.0 }
            })
            .collect();
        let eig = symmetric_eigen(&a, n);
        for r in 0..n {
            for c in 0..n {
                let rec: f64 = (0..n).map(|k| eig.values[k] * eig.vectors[k][r] * eig.vectors[k][c]).sum();
                assert!((rec - a[r * n + c]).abs() < 1e-12, "({r},{c})");
            }
        }
    }

    #[test]
    fn hermitian_embedding_on_pauli_y() {
        let mut m = RepMatrix::<f64>::zeros(0);
        m.set(0, 0, Complex::new(1.5, 0.0));
        assert_eq!(hermitian_eigenvalues(&m), vec![1.5]);

        // j = 1/2 does not exist here; use a 3x3 Hermitian with known spectrum.
        // i * (antisymmetric) has eigenvalues {-sqrt2, 0, sqrt2} for this pattern.
        let mut h = RepMatrix::<f64>::zeros(1);
        h.set(-1, 0, Complex::new(0.0, -1.0));
        h.set(0, -1, Complex::new(0.0, 1.0));
        h.set(0, 1, Complex::new(0.0, -1.0));
        h.set(1, 0, Complex::new(0.0, 1.0));
        let ev = hermitian_eigenvalues(&h);
        let s = 2f64.sqrt();
        for (a, b) in ev.iter().zip([-s, 0.0, s]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn sturm_bisection_matches_jacobi() {
        let diag = [4.0, -1.0, 2.5, 7.0, 0.3];
        let off = [0.5f64, 2.0, 1.5, 0.1];
        let off_sq: Vec<f64> = off.iter().map(|x| x * x).collect();
        let n = diag.len();
        let mut a = vec![0.0; n * n];
        for k in 0..n {
            a[k * n + k] = diag[k];
            if k + 1 < n {
                a[k * n + k + 1] = off[k];
                a[(k + 1) * n + k] = off[k];
            }
        }
        let jac = symmetric_eigen(&a, n).values;
        let bis = tridiagonal_eigenvalues(&diag, &off_sq);
        for (x, y) in jac.iter().zip(&bis) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }
}

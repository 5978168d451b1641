//! The space `F^j` of trigonometric polynomials in a complex variable `q`,
//! the operators `l_a` acting on it, its scalar product and reproducing kernel.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::RepMatrix;
use crate::quadrature::gauss_legendre_interval;
use crate::scalar::{cpow, imag_unit, int, lit, Real};
use crate::so3::Axis;

/// A point `q = alpha + i beta` of the strip `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexQ<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> ComplexQ<T> {
    /// Reduces `alpha` into `[0, 2pi)`.
    pub fn new(alpha: T, beta: T) -> Self {
        let tau = T::TAU();
        let mut a = alpha % tau;
        if a < T::zero() {
            a = a + tau;
        }
        if a >= tau {
            a = a - tau;
        }
        Self { alpha: a, beta }
    }

    pub fn real(alpha: T) -> Self {
        Self::new(alpha, T::zero())
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(&self) -> Complex<T> {
        Complex::new(self.alpha, self.beta)
    }

    pub fn conj(&self) -> Self {
        Self { alpha: self.alpha, beta: -self.beta }
    }
}

/// An element `sum_n c_n e^{inq}` of `F^j`, coefficients ordered `n = -j..=j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierState<T> {
    pub j: u32,
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> FourierState<T> {
    pub fn new(j: u32, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let d = 2 * j as usize + 1;
        if coeffs.len() != d {
            return Err(Error::Domain(format!("F^{j} needs {d} coefficients, got {}", coeffs.len())));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(Self { j, coeffs })
    }

    /// The basis function `psi_n = e^{inq}`.
    pub fn basis(j: u32, n: i32) -> Result<Self> {
        if n.unsigned_abs() > j {
            return Err(Error::Domain(format!("|n| = {} exceeds j = {j}", n.abs())));
        }
        let mut c = vec![Complex::zero(); 2 * j as usize + 1];
        c[(n + j as i32) as usize] = Complex::one();
        Ok(Self { j, coeffs: c })
    }

    pub fn coeff(&self, n: i32) -> Complex<T> {
        self.coeffs[(n + self.j as i32) as usize]
    }

    pub fn apply(&self, m: &RepMatrix<T>) -> Result<Self> {
        if m.j() != self.j {
            return Err(Error::Dimension { expected: self.j, found: m.j() });
        }
        Ok(Self { j: self.j, coeffs: m.apply(&self.coeffs) })
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { j: self.j, coeffs: self.coeffs.iter().map(|c| *c * s).collect() }
    }

    /// `(u, u)_Q`.
    pub fn norm_sqr(&self) -> T {
        inner_product(self, self).map(|z| z.re).unwrap_or_else(|_| T::nan())
    }
}

/// `B_{nj} = (j!)^2 / ((j-n)! (j+n)!)`.
pub fn weight_b<T: Real>(n: i32, j: u32) -> Result<T> {
    let k = n.unsigned_abs();
    if k > j {
        return Err(Error::Domain(format!("|n| = {k} exceeds j = {j}")));
    }
    Ok((1..=k).fold(T::one(), |acc, i| acc * int::<T>((j - i + 1) as i64) / int::<T>((j + i) as i64)))
}

/// `B_{nj}` as an exact rational.
pub fn weight_b_exact(n: i32, j: u32) -> Result<BigRational> {
    let k = n.unsigned_abs();
    if k > j {
        return Err(Error::Domain(format!("|n| = {k} exceeds j = {j}")));
    }
    Ok((1..=k).fold(BigRational::one(), |acc, i| {
        acc * BigRational::new(BigInt::from(j - i + 1), BigInt::from(j + i))
    }))
}

/// `C_j = (2j+1)! / (2^j (j!)^2)`.
pub fn const_c<T: Real>(j: u32) -> T {
    (1..=j).fold(int::<T>(2 * j as i64 + 1), |acc, k| acc * int::<T>((j + k) as i64) / int::<T>(2 * k as i64))
}

pub fn const_c_exact(j: u32) -> BigRational {
    (1..=j).fold(BigRational::from_integer(BigInt::from(2 * j + 1)), |acc, k| {
        acc * BigRational::new(BigInt::from(j + k), BigInt::from(2 * k))
    })
}

/// A finite Fourier series `sum_k c_k e^{ikq}` with `k` from `lo` upward.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly<T> {
    pub lo: i32,
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> TrigPoly<T> {
    pub fn zero() -> Self {
        Self { lo: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self { lo: 0, coeffs: vec![c] }
    }

    pub fn real_constant(c: T) -> Self {
        Self::constant(Complex::new(c, T::zero()))
    }

    /// `c e^{ikq}`.
    pub fn monomial(k: i32, c: Complex<T>) -> Self {
        Self { lo: k, coeffs: vec![c] }
    }

    pub fn cos() -> Self {
        let h = Complex::new(lit(0.5), T::zero());
        Self { lo: -1, coeffs: vec![h, Complex::zero(), h] }
    }

    pub fn sin() -> Self {
        // (e^{iq} - e^{-iq}) / 2i
        let h = Complex::new(T::zero(), lit(0.5));
        Self { lo: -1, coeffs: vec![h, Complex::zero(), -h] }
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> Complex<T> {
        if k < self.lo || k > self.hi() {
            Complex::zero()
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() {
            return other.clone();
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        Self { lo, coeffs: (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            for (b, y) in other.coeffs.iter().enumerate() {
                out[a + b] = out[a + b] + *x * *y;
            }
        }
        Self { lo: self.lo + other.lo, coeffs: out }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { lo: self.lo, coeffs: self.coeffs.iter().map(|c| *c * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `d/dq`.
    pub fn derivative(&self) -> Self {
        let i = imag_unit::<T>();
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| *c * i * int::<T>(self.lo as i64 + k as i64)).collect(),
        }
    }

    pub fn eval(&self, q: Complex<T>) -> Complex<T> {
        let i = imag_unit::<T>();
        self.coeffs
            .iter()
            .enumerate()
            .fold(Complex::zero(), |acc, (k, c)| acc + *c * (i * q * int::<T>(self.lo as i64 + k as i64)).exp())
    }
}

/// A first-order operator `a(q) d/dq + b(q)` with trigonometric coefficients.
#[derive(Debug, Clone)]
pub struct FirstOrderOp<T> {
    pub deriv: TrigPoly<T>,
    pub mult: TrigPoly<T>,
}

/// The operators `l_a(q, d/dq, j)` as coefficient functions.
pub fn ell_operator<T: Real>(axis: Axis, j: u32) -> FirstOrderOp<T> {
    let i = imag_unit::<T>();
    let jj: T = int(j as i64);
    match axis {
        Axis::X => FirstOrderOp {
            deriv: TrigPoly::sin().scale(-i),
            mult: TrigPoly::cos().scale(i * jj),
        },
        Axis::Y => FirstOrderOp {
            deriv: TrigPoly::cos().scale(-i),
            mult: TrigPoly::sin().scale(-i * jj),
        },
        Axis::Z => FirstOrderOp { deriv: TrigPoly::real_constant(T::one()), mult: TrigPoly::zero() },
    }
}

/// Image of `e^{inq}` under a linear differential operator with trigonometric
/// coefficients, given the list of coefficient functions for `d^k/dq^k`.
pub fn apply_to_exponential<T: Real>(coeff_of_derivative: &[TrigPoly<T>], n: i32) -> TrigPoly<T> {
    let i = imag_unit::<T>();
    let inn = i * int::<T>(n as i64);
    let mut factor = Complex::one();
    let mut out = TrigPoly::zero();
    for c in coeff_of_derivative {
        out = out.add(&c.mul(&TrigPoly::monomial(n, factor)));
        factor = factor * inn;
    }
    out
}

/// Matrix of an operator on `psi_n`, together with the largest coefficient
/// produced outside `n in -j..=j`.
pub fn operator_matrix<T: Real>(coeff_of_derivative: &[TrigPoly<T>], j: u32) -> (RepMatrix<T>, T) {
    let jj = j as i32;
    let mut m = RepMatrix::zeros(j);
    let mut leak = T::zero();
    for n in -jj..=jj {
        let image = apply_to_exponential(coeff_of_derivative, n);
        for k in image.lo..=image.hi() {
            let c = image.coeff(k);
            if k.abs() <= jj {
                m.set(k, n, c);
            } else {
                leak = leak.max(c.norm());
            }
        }
    }
    (m, leak)
}

/// Matrix of `l_a` together with its leakage out of `F^j`.
pub fn ell_matrix_with_leakage<T: Real>(axis: Axis, j: u32) -> (RepMatrix<T>, T) {
    let op = ell_operator::<T>(axis, j);
    operator_matrix(&[op.mult, op.deriv], j)
}

/// Matrix of `l_a` on the basis `psi_n = e^{inq}`.
pub fn ell_matrix<T: Real>(axis: Axis, j: u32) -> RepMatrix<T> {
    ell_matrix_with_leakage(axis, j).0
}

/// `sum_a (-i l_a)^2`.
pub fn casimir_matrix<T: Real>(j: u32) -> RepMatrix<T> {
    let mut acc = RepMatrix::zeros(j);
    for axis in Axis::ALL {
        let l = ell_matrix::<T>(axis, j);
        acc = &acc + &(&l * &l);
    }
    acc.scale_real(-T::one())
}

/// `G = diag(1 / B_{nj})`.
pub fn gram_metric<T: Real>(j: u32) -> RepMatrix<T> {
    RepMatrix::from_diag(j, |n| Complex::new(T::one() / weight_b::<T>(n, j).expect("|n| <= j"), T::zero()))
}

/// `max |(M^dagger G - G M)_{mn}| / sqrt(G_mm G_nn)`, the deviation from
/// Hermiticity measured in the Gram-orthonormal frame.
pub fn gram_hermiticity_defect<T: Real>(m: &RepMatrix<T>) -> T {
    let j = m.j();
    let jj = j as i32;
    let g = |n: i32| T::one() / weight_b::<T>(n, j).expect("|n| <= j");
    let mut worst = T::zero();
    for r in -jj..=jj {
        for c in -jj..=jj {
            let d = m.get(c, r).conj() * g(c) - m.get(r, c) * g(r);
            worst = worst.max(d.norm() / (g(r) * g(c)).sqrt());
        }
    }
    worst
}

/// `(u, v)_Q = sum_n conj(u_n) v_n / B_{nj}`.
pub fn inner_product<T: Real>(u: &FourierState<T>, v: &FourierState<T>) -> Result<Complex<T>> {
    if u.j != v.j {
        return Err(Error::Dimension { expected: u.j, found: v.j });
    }
    let jj = u.j as i32;
    Ok((-jj..=jj).fold(Complex::zero(), |acc, n| {
        acc + u.coeff(n).conj() * v.coeff(n) / weight_b::<T>(n, u.j).expect("|n| <= j")
    }))
}

/// Largest `|beta|` accepted by [`evaluate_state`].
pub const DEFAULT_BETA_CAP: f64 = 50.0;

/// `sum_n c_n e^{inq}`.
pub fn evaluate_state<T: Real>(u: &FourierState<T>, q: ComplexQ<T>) -> Result<Complex<T>> {
    evaluate_state_capped(u, q, lit(DEFAULT_BETA_CAP))
}

pub fn evaluate_state_capped<T: Real>(u: &FourierState<T>, q: ComplexQ<T>, beta_cap: T) -> Result<Complex<T>> {
    if !(q.beta.abs() <= beta_cap) {
        return Err(Error::Overflow(format!("|Im q| = {} exceeds the cap {}", q.beta.abs(), beta_cap)));
    }
    Ok(evaluate_series(&u.coeffs, u.j, q.to_complex()))
}

/// `sum_n c_n e^{inq}` at any complex `q`, without range checks.
pub fn evaluate_series<T: Real>(coeffs: &[Complex<T>], j: u32, q: Complex<T>) -> Complex<T> {
    let z = (imag_unit::<T>() * q).exp();
    let zinv = Complex::<T>::one() / z;
    let jj = j as i32;
    let mut acc = coeffs[jj as usize];
    let mut up = Complex::one();
    let mut down = Complex::one();
    for n in 1..=jj {
        up = up * z;
        down = down * zinv;
        acc = acc + coeffs[(jj + n) as usize] * up + coeffs[(jj - n) as usize] * down;
    }
    acc
}

/// `d^k/dq^k` of `sum_n c_n e^{inq}`.
pub fn evaluate_series_derivative<T: Real>(coeffs: &[Complex<T>], j: u32, q: Complex<T>, k: u32) -> Complex<T> {
    let jj = j as i32;
    let i = imag_unit::<T>();
    let scaled: Vec<Complex<T>> =
        (-jj..=jj).map(|n| coeffs[(n + jj) as usize] * cpow(i * int::<T>(n as i64), k)).collect();
    evaluate_series(&scaled, j, q)
}

/// Closed form `delta_j(q, q') = (2j+1)/C_j (1 + cos(q - conj q'))^j`.
pub fn delta_j<T: Real>(q: ComplexQ<T>, qp: ComplexQ<T>, j: u32) -> Complex<T> {
    let arg = q.to_complex() - qp.to_complex().conj();
    let base = arg.cos() + T::one();
    cpow(base, j) * (int::<T>(2 * j as i64 + 1) / const_c::<T>(j))
}

/// Series form `sum_n B_{nj} e^{inq} conj(e^{inq'})`.
pub fn delta_j_series<T: Real>(q: ComplexQ<T>, qp: ComplexQ<T>, j: u32) -> Complex<T> {
    let jj = j as i32;
    let arg = q.to_complex() - qp.to_complex().conj();
    let coeffs: Vec<Complex<T>> =
        (-jj..=jj).map(|n| Complex::new(weight_b::<T>(n, j).expect("|n| <= j"), T::zero())).collect();
    evaluate_series(&coeffs, j, arg)
}

/// Tensor-product rule for the real-form measure
/// `kappa_j d(alpha) d(beta) / (1 + cosh 2 beta)^{j+1}` on `Q`.
#[derive(Debug, Clone)]
pub struct MeasureQuadrature<T> {
    pub j: u32,
    pub beta_max: T,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Calibrated so that `(psi_0, psi_0)_Q = 1` on this rule.
    pub kappa: T,
    alpha_nodes: Vec<T>,
    beta_nodes: Vec<(T, T)>,
}

impl<T: Real> MeasureQuadrature<T> {
    pub fn new(j: u32, beta_max: T, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if !(beta_max > T::zero()) {
            return Err(Error::Domain(format!("beta_max must be positive, got {beta_max}")));
        }
        let min_nodes = 2 * j as usize + 2;
        if n_alpha < min_nodes || n_beta < min_nodes {
            return Err(Error::Domain(format!("node counts must be at least {min_nodes}")));
        }
        let step = T::TAU() / int(n_alpha as i64);
        let alpha_nodes = (0..n_alpha).map(|k| step * int(k as i64)).collect();
        let (x, w) = gauss_legendre_interval(n_beta, -beta_max, beta_max);
        let beta_nodes: Vec<(T, T)> = x
            .iter()
            .zip(&w)
            .map(|(&b, &wt)| (b, wt / (T::one() + (b + b).cosh()).powi(j as i32 + 1)))
            .collect();
        let raw = T::TAU() * beta_nodes.iter().fold(T::zero(), |a, (_, w)| a + *w);
        Ok(Self { j, beta_max, n_alpha, n_beta, kappa: T::one() / raw, alpha_nodes, beta_nodes })
    }

    /// Default resolution: tail bound below `1e-10` for unit-size states.
    pub fn default_for(j: u32) -> Self {
        let target: T = lit(1e-10);
        let kappa = kappa_exact::<T>(j);
        let pre = T::TAU() * kappa * lit::<T>(2.0).powi(j as i32 + 1);
        let beta_max = ((pre / target).ln() * lit(0.5)).max(lit(8.0)).ceil();
        let n_beta = 240.max(16 * beta_max.to_usize().unwrap_or(15));
        let n_alpha = (2 * j as usize + 2).max(8);
        Self::new(j, beta_max, n_alpha, n_beta).expect("default parameters are valid")
    }

    /// Bound on the neglected `|beta| > beta_max` part of `(u, v)_Q`.
    pub fn tail_bound(&self, u: &FourierState<T>, v: &FourierState<T>) -> T {
        let l1 = |s: &FourierState<T>| s.coeffs.iter().fold(T::zero(), |a, c| a + c.norm());
        T::TAU() * self.kappa * lit::<T>(2.0).powi(self.j as i32 + 1) * (-(self.beta_max + self.beta_max)).exp() * l1(u) * l1(v)
    }

    /// Quadrature value of `int conj(u) v dmu_j`.
    pub fn integrate(&self, u: &FourierState<T>, v: &FourierState<T>) -> Result<Complex<T>> {
        if u.j != self.j {
            return Err(Error::Dimension { expected: self.j, found: u.j });
        }
        if v.j != self.j {
            return Err(Error::Dimension { expected: self.j, found: v.j });
        }
        let w_alpha = T::TAU() / int(self.n_alpha as i64);
        let mut acc = Complex::zero();
        for &(beta, wb) in &self.beta_nodes {
            let mut row = Complex::zero();
            for &alpha in &self.alpha_nodes {
                let q = Complex::new(alpha, beta);
                row = row + evaluate_series(&u.coeffs, u.j, q).conj() * evaluate_series(&v.coeffs, v.j, q);
            }
            acc = acc + row * (wb * w_alpha);
        }
        Ok(acc * self.kappa)
    }

    /// `int f(q) dmu_j` for an arbitrary integrand.
    pub fn integrate_fn<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(Complex<T>) -> Complex<T>,
    {
        let w_alpha = T::TAU() / int(self.n_alpha as i64);
        let mut acc = Complex::zero();
        for &(beta, wb) in &self.beta_nodes {
            let row = self.alpha_nodes.iter().fold(Complex::zero(), |a, &alpha| a + f(Complex::new(alpha, beta)));
            acc = acc + row * (wb * w_alpha);
        }
        acc * self.kappa
    }

    /// `(alpha, beta, weight)` for every node, weights including `kappa`.
    pub fn nodes(&self) -> Vec<(T, T, T)> {
        let w_alpha = T::TAU() / int(self.n_alpha as i64);
        let mut out = Vec::with_capacity(self.n_alpha * self.n_beta);
        for &(beta, wb) in &self.beta_nodes {
            for &alpha in &self.alpha_nodes {
                out.push((alpha, beta, wb * w_alpha * self.kappa));
            }
        }
        out
    }
}

/// Analytic value of the calibrated constant, `C_j / (2 pi)`.
pub fn kappa_exact<T: Real>(j: u32) -> T {
    const_c::<T>(j) / T::TAU()
}

/// Numerical `(u, v)_Q`, refusing when the truncated tail may exceed `tol`.
pub fn inner_product_quadrature<T: Real>(
    u: &FourierState<T>,
    v: &FourierState<T>,
    beta_max: T,
    n_alpha: usize,
    n_beta: usize,
    tol: T,
) -> Result<Complex<T>> {
    let rule = MeasureQuadrature::new(u.j, beta_max, n_alpha, n_beta)?;
    let bound = rule.tail_bound(u, v);
    if bound > tol {
        return Err(Error::Convergence {
            bound: bound.to_f64().unwrap_or(f64::INFINITY),
            tol: tol.to_f64().unwrap_or(0.0),
        });
    }
    rule.integrate(u, v)
}

/// Coefficients recovered as `c_n = B_{nj} (psi_n, u)_Q` on a quadrature rule.
pub fn reproduce_coefficients<T: Real>(u: &FourierState<T>, rule: &MeasureQuadrature<T>) -> Result<Vec<Complex<T>>> {
    let jj = u.j as i32;
    (-jj..=jj)
        .map(|n| {
            let basis = FourierState::basis(u.j, n)?;
            Ok(rule.integrate(&basis, u)? * weight_b::<T>(n, u.j)?)
        })
        .collect()
}

/// `e^{inq}` for a single `n`.
pub fn exp_inq<T: Real>(n: i32, q: Complex<T>) -> Complex<T> {
    (imag_unit::<T>() * q * int::<T>(n as i64)).exp()
}

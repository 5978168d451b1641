//! Polynomial solutions of the Lamé equation
//! `4 P L'' + 2 P' L' + (E - j(j+1) rho) L = 0`, `P = (rho-A)(rho-B)(rho-C)`.
//!
//! Every class is `w(rho) sum_k c_k (rho-B)^{mu-k}` with
//! `w = (rho-A)^{a/2} (rho-C)^{c/2}`, and the operator acts on `w u^p`
//! (`u = rho - B`) as `w (c2(p) u^{p+1} + c1(p) u^p + c0(p) u^{p-1})`.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use super::{fix_phase, EnergyLevel, Parity, Route, TopParams};
use crate::error::{Error, Result};
use crate::lambda_rep::{FourierState, TrigPoly};
use crate::linalg::tridiagonal_eigenvalues;
use crate::scalar::{imag_unit, int, lit, Real};

/// The four symmetry classes of Lamé polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LameClass {
    /// No square-root prefactor.
    Bare,
    /// Prefactor `sqrt(rho - A)`.
    RootA,
    /// Prefactor `sqrt(rho - C)`.
    RootC,
    /// Prefactor `sqrt((rho - A)(rho - C))`.
    RootAC,
}

impl LameClass {
    pub const ALL: [LameClass; 4] = [LameClass::Bare, LameClass::RootA, LameClass::RootC, LameClass::RootAC];

    pub fn number(self) -> u8 {
        match self {
            LameClass::Bare => 1,
            LameClass::RootA => 2,
            LameClass::RootC => 3,
            LameClass::RootAC => 4,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(LameClass::Bare),
            2 => Ok(LameClass::RootA),
            3 => Ok(LameClass::RootC),
            4 => Ok(LameClass::RootAC),
            _ => Err(Error::Domain(format!("Lamé class {n} not in 1..=4"))),
        }
    }

    /// Exponents `(a, c)` of the prefactor `(rho-A)^{a/2} (rho-C)^{c/2}`.
    fn exponents(self) -> (i64, i64) {
        match self {
            LameClass::Bare => (0, 0),
            LameClass::RootA => (1, 0),
            LameClass::RootC => (0, 1),
            LameClass::RootAC => (1, 1),
        }
    }

    /// Leading power `mu` of `rho - B`.
    pub fn leading_power<T: Real>(self, j: u32) -> T {
        let jf: T = int(j as i64);
        let half: T = lit(0.5);
        match self {
            LameClass::Bare => jf * half,
            LameClass::RootA | LameClass::RootC => (jf - T::one()) * half,
            LameClass::RootAC => jf * half - T::one(),
        }
    }

    /// Number of terms in the series, which is also the number of energies.
    pub fn size(self, j: u32) -> usize {
        let j = j as usize;
        match self {
            LameClass::Bare => j / 2 + 1,
            LameClass::RootA | LameClass::RootC => j.div_ceil(2),
            LameClass::RootAC => j / 2,
        }
    }

    /// Symmetry of the corresponding lambda-representation state under `n -> -n`.
    pub fn parity(self) -> Parity {
        match self {
            LameClass::Bare | LameClass::RootC => Parity::Even,
            LameClass::RootA | LameClass::RootAC => Parity::Odd,
        }
    }
}

impl fmt::Display for LameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Expected class sizes by parity of `j`: `(j/2+1, j/2, j/2, j/2)` for even
/// `j` and `((j+1)/2, (j+1)/2, (j+1)/2, (j-1)/2)` for odd `j`.
fn degree_counts(j: u32) -> [usize; 4] {
    let j = j as usize;
    if j.is_multiple_of(2) {
        [j / 2 + 1, j / 2, j / 2, j / 2]
    } else {
        [j.div_ceil(2), j.div_ceil(2), j.div_ceil(2), (j - 1) / 2]
    }
}

struct Coefficients<T> {
    class: LameClass,
    j: u32,
    p: TopParams<T>,
}

impl<T: Real> Coefficients<T> {
    fn sigma(&self) -> T {
        let (a, c) = self.class.exponents();
        int::<T>(a + c) * lit(0.5)
    }

    fn c2(&self, pw: T) -> T {
        let jf: T = int(self.j as i64);
        let x = pw + pw + self.sigma() + self.sigma();
        (x - jf) * (x + jf + T::one())
    }

    /// `c1` without the `E` term.
    fn d1(&self, pw: T) -> T {
        let (a, c) = self.class.exponents();
        let TopParams { a: pa, b: pb, c: pc } = self.p;
        let jf: T = int(self.j as i64);
        let four: T = lit(4.0);
        -pb * jf * (jf + T::one()) + four * pw * pw * (pb + pb - pa - pc) + int::<T>(a) * (four * pw + T::one()) * (pb - pc)
            - int::<T>(c) * (four * pw + T::one()) * (pa - pb)
    }

    fn c0(&self, pw: T) -> T {
        let TopParams { a: pa, b: pb, c: pc } = self.p;
        -(pw + pw) * (pw + pw - T::one()) * (pa - pb) * (pb - pc)
    }
}

/// Tridiagonal matrix whose eigenvalues are the energies of one class.
#[derive(Debug, Clone)]
pub struct LamePencil<T> {
    pub class: LameClass,
    pub j: u32,
    pub mu: T,
    pub diag: Vec<T>,
    /// `upper[k]` couples row `k` to column `k+1`.
    pub upper: Vec<T>,
    /// `lower[k]` couples row `k+1` to column `k`.
    pub lower: Vec<T>,
}

impl<T: Real> LamePencil<T> {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Dense row-major copy.
    pub fn matrix(&self) -> Vec<T> {
        let n = self.size();
        let mut m = vec![T::zero(); n * n];
        for k in 0..n {
            m[k * n + k] = self.diag[k];
            if k + 1 < n {
                m[k * n + k + 1] = self.upper[k];
                m[(k + 1) * n + k] = self.lower[k];
            }
        }
        m
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let products: Vec<T> = self.upper.iter().zip(&self.lower).map(|(u, l)| *u * *l).collect();
        if products.iter().any(|x| *x < T::zero() || !x.is_finite()) {
            return Err(Error::RootCount { class: self.class.number(), expected: self.size(), found: 0 });
        }
        Ok(tridiagonal_eigenvalues(&self.diag, &products))
    }
}

/// Recurrence of class `class`:
/// `c2(mu-k-1) x_{k+1} + c1(mu-k) x_k + c0(mu-k+1) x_{k-1} = 0`, written as
/// an eigenvalue problem in `E`.
pub fn lame_recurrence<T: Real>(class: LameClass, j: u32, p: &TopParams<T>) -> Result<LamePencil<T>> {
    p.require_strict()?;
    let co = Coefficients { class, j, p: *p };
    let mu: T = class.leading_power(j);
    let n = class.size(j);
    let pw = |k: usize| mu - int::<T>(k as i64);
    let diag = (0..n).map(|k| -co.d1(pw(k))).collect();
    let upper = (0..n.saturating_sub(1)).map(|k| -co.c2(pw(k) - T::one())).collect();
    let lower = (0..n.saturating_sub(1)).map(|k| -co.c0(pw(k + 1) + T::one())).collect();
    Ok(LamePencil { class, j, mu, diag, upper, lower })
}

/// All `2j+1` levels from the four Lamé classes, tagged by class.
pub fn lame_spectrum<T: Real>(j: u32, p: &TopParams<T>) -> Result<Vec<EnergyLevel<T>>> {
    p.require_strict()?;
    let expected = degree_counts(j);
    let mut all: Vec<(T, LameClass)> = Vec::with_capacity(2 * j as usize + 1);
    for (class, want) in LameClass::ALL.into_iter().zip(expected) {
        let roots = lame_recurrence(class, j, p)?.eigenvalues()?;
        let finite = roots.iter().filter(|x| x.is_finite()).count();
        if finite != want {
            return Err(Error::RootCount { class: class.number(), expected: want, found: finite });
        }
        all.extend(roots.into_iter().map(|e| (e, class)));
    }
    all.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite roots"));
    Ok(all
        .into_iter()
        .enumerate()
        .map(|(k, (energy, class))| EnergyLevel {
            j,
            s: k as i32 - j as i32,
            energy,
            lame_class: Some(class),
            route: Route::Lame,
        })
        .collect())
}

/// A terminating Lamé series `w(rho) sum_k coeffs[k] (rho-B)^{mu-k}`.
#[derive(Debug, Clone)]
pub struct LameSeries<T> {
    pub class: LameClass,
    pub j: u32,
    pub energy: T,
    pub mu: T,
    pub coeffs: Vec<T>,
    /// Relative size of the first coefficient past the end.
    pub termination: T,
    params: TopParams<T>,
}

impl<T: Real> LameSeries<T> {
    pub fn params(&self) -> &TopParams<T> {
        &self.params
    }

    /// `(Lambda, Lambda', Lambda'')` at `rho`, principal branches throughout.
    pub fn eval_with_derivatives(&self, rho: Complex<T>) -> [Complex<T>; 3] {
        let TopParams { a: pa, b: pb, c: pc } = self.params;
        let (ea, ec) = self.class.exponents();
        let ha: T = int::<T>(ea) * lit(0.5);
        let hc: T = int::<T>(ec) * lit(0.5);
        let ra = rho - pa;
        let rc = rho - pc;
        let u = rho - pb;
        let one = Complex::new(T::one(), T::zero());
        let w = (if ea == 1 { ra.sqrt() } else { one }) * (if ec == 1 { rc.sqrt() } else { one });
        let lw1 = ra.inv() * ha + rc.inv() * hc;
        let lw2 = lw1 * lw1 - (ra * ra).inv() * ha - (rc * rc).inv() * hc;

        let ln_u = u.ln();
        let mut s0 = Complex::<T>::zero();
        let mut s1 = Complex::<T>::zero();
        let mut s2 = Complex::<T>::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let pw = self.mu - int::<T>(k as i64);
            let term = (ln_u * pw).exp() * *c;
            s0 = s0 + term;
            s1 = s1 + term * pw / u;
            s2 = s2 + term * (pw * (pw - T::one())) / (u * u);
        }
        let l0 = w * s0;
        let l1 = w * (s1 + lw1 * s0);
        let l2 = w * (s2 + lw1 * s1 * lit::<T>(2.0) + lw2 * s0);
        [l0, l1, l2]
    }

    pub fn eval(&self, rho: Complex<T>) -> Complex<T> {
        self.eval_with_derivatives(rho)[0]
    }

    /// `(|L Lambda|, scale)` where the scale is the sum of the magnitudes of
    /// the individual terms.
    pub fn residual(&self, rho: Complex<T>) -> (T, T) {
        let TopParams { a: pa, b: pb, c: pc } = self.params;
        let [l0, l1, l2] = self.eval_with_derivatives(rho);
        let pr = (rho - pa) * (rho - pb) * (rho - pc);
        let dp = (rho - pb) * (rho - pc) + (rho - pa) * (rho - pc) + (rho - pa) * (rho - pb);
        let jf: T = int(self.j as i64);
        let t1 = pr * l2 * lit::<T>(4.0);
        let t2 = dp * l1 * lit::<T>(2.0);
        let t3 = l0 * self.energy;
        let t4 = rho * l0 * (jf * (jf + T::one()));
        ((t1 + t2 + t3 - t4).norm(), t1.norm() + t2.norm() + t3.norm() + t4.norm())
    }
}

/// Runs the recurrence from `x_0 = 1` at energy `energy` and checks that it terminates.
pub fn lame_polynomial<T: Real>(class: LameClass, j: u32, energy: T, p: &TopParams<T>) -> Result<LameSeries<T>> {
    p.require_strict()?;
    let n = class.size(j);
    if n == 0 {
        return Err(Error::Domain(format!("class {class} has no polynomial solutions at j = {j}")));
    }
    let co = Coefficients { class, j, p: *p };
    let mu: T = class.leading_power(j);
    let pw = |k: usize| mu - int::<T>(k as i64);
    let mut x: Vec<T> = vec![T::one()];
    let mut remainder = T::zero();
    let mut remainder_scale = T::zero();
    for k in 0..n {
        let c1 = co.d1(pw(k)) + energy;
        let prev = if k >= 1 { x[k - 1] } else { T::zero() };
        let cz = if k >= 1 { co.c0(pw(k) + T::one()) } else { T::zero() };
        let rhs = c1 * x[k] + cz * prev;
        if k + 1 < n {
            x.push(-rhs / co.c2(pw(k) - T::one()));
        } else {
            remainder = rhs.abs();
            remainder_scale = (co.d1(pw(k)).abs() + energy.abs() + p.scale()) * x[k].abs() + (cz * prev).abs();
        }
    }
    let termination = if remainder_scale > T::zero() { remainder / remainder_scale } else { remainder };
    if !(termination < lit(1e-8)) {
        return Err(Error::NotTerminating(termination.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(LameSeries { class, j, energy, mu, coeffs: x, termination, params: *p })
}

/// `rho(q') = 2(A-C)(B-C) / (A+B-2C-(A-B) cos 2q') + C`.
pub fn rho_map<T: Real>(q: Complex<T>, p: &TopParams<T>) -> Result<Complex<T>> {
    p.require_strict()?;
    let TopParams { a, b, c } = *p;
    let two: T = lit(2.0);
    let denom = Complex::new(a + b - two * c, T::zero()) - (q * two).cos() * (a - b);
    if denom.norm() <= a * T::epsilon() * lit(16.0) {
        return Err(Error::Pole(format!("rho(q') has a pole at q' = {q}")));
    }
    Ok(Complex::new(two * (a - c) * (b - c), T::zero()) / denom + c)
}

/// `Phi(q')` of a Lamé solution as a Fourier state, normalized and phased
/// like the lambda route. Returns the state and the largest coefficient
/// outside `F^j`.
pub fn phi_from_lame<T: Real>(series: &LameSeries<T>) -> (FourierState<T>, T) {
    let TopParams { a, b, c } = series.params;
    let j = series.j;
    let ratio = (a - c) / (a - b);
    let cos = TrigPoly::<T>::cos();
    let gap = TrigPoly::real_constant(ratio).add(&cos.mul(&cos).scale_real(-T::one()));
    let pow = |base: &TrigPoly<T>, e: usize| (0..e).fold(TrigPoly::real_constant(T::one()), |acc, _| acc.mul(base));
    let shift = match series.class {
        LameClass::Bare => 0,
        LameClass::RootA | LameClass::RootC => 1,
        LameClass::RootAC => 2,
    };
    let mut sum = TrigPoly::zero();
    let mut weight = T::one();
    for (k, x) in series.coeffs.iter().enumerate() {
        let e = j as usize - 2 * k - shift;
        sum = sum.add(&pow(&cos, e).mul(&pow(&gap, k)).scale_real(*x * weight));
        weight = weight / (b - c);
    }
    if matches!(series.class, LameClass::RootA | LameClass::RootAC) {
        sum = TrigPoly::<T>::sin().scale(imag_unit()).mul(&sum);
    }
    let jj = j as i32;
    let mut leak = T::zero();
    for k in sum.lo..=sum.hi() {
        if k.abs() > jj {
            leak = leak.max(sum.coeff(k).norm());
        }
    }
    let raw: Vec<Complex<T>> = (-jj..=jj).map(|n| sum.coeff(n)).collect();
    let coeffs = fix_phase(&raw, j, series.class.parity());
    (FourierState { j, coeffs }, leak)
}

//! Energy levels of the asymmetric top by three independent routes: the
//! Wigner `|j,m,n>` basis, the lambda-representation operator `H(-i l)`, and
//! polynomial solutions of the Lamé equation.

mod lame;

pub use lame::{
    lame_polynomial, lame_recurrence, lame_spectrum, phi_from_lame, rho_map, LameClass, LamePencil, LameSeries,
};

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lambda_rep::{
    ell_matrix, evaluate_series_derivative, operator_matrix, weight_b, FourierState, TrigPoly,
};
use crate::linalg::{hermitian_eigenvalues, symmetric_eigen, RepMatrix};
use crate::scalar::{imag_unit, int, lit, Real};
use crate::so3::Axis;

/// Rotational constants with `A >= B >= C > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> TopParams<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParams("rotational constants must be finite".into()));
        }
        if !(a >= b && b >= c && c > T::zero()) {
            return Err(Error::InvalidParams(format!("need A >= B >= C > 0, got A = {a}, B = {b}, C = {c}")));
        }
        Ok(Self { a, b, c })
    }

    /// Energy scale used for relative tolerances.
    pub fn scale(&self) -> T {
        self.a
    }

    /// Whether `A - B` and `B - C` both exceed `1e-9 A`.
    pub fn is_strict(&self) -> bool {
        self.require_strict().is_ok()
    }

    pub fn require_strict(&self) -> Result<()> {
        let tol = self.a * lit(1e-9);
        if self.a - self.b < tol || self.b - self.c < tol {
            return Err(Error::DegenerateParams(format!(
                "A - B = {} and B - C = {} must both exceed {}",
                self.a - self.b,
                self.b - self.c,
                tol
            )));
        }
        Ok(())
    }

    /// `(A + B + C) j (j+1) (2j+1) / 3`, the trace of the Hamiltonian on one `j` block.
    pub fn trace(&self, j: u32) -> T {
        let jf: T = int(j as i64);
        (self.a + self.b + self.c) * jf * (jf + T::one()) * (jf + jf + T::one()) / lit(3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Wigner,
    Lambda,
    Lame,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Wigner, Route::Lambda, Route::Lame];

    pub fn name(self) -> &'static str {
        match self {
            Route::Wigner => "wigner",
            Route::Lambda => "lambda",
            Route::Lame => "lame",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wigner" => Ok(Route::Wigner),
            "lambda" => Ok(Route::Lambda),
            "lame" => Ok(Route::Lame),
            other => Err(Error::Domain(format!("unknown route '{other}'"))),
        }
    }
}

/// One eigenvalue `E_{j,s}`; `s` runs over `-j..=j` in ascending energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel<T> {
    pub j: u32,
    pub s: i32,
    pub energy: T,
    pub lame_class: Option<LameClass>,
    pub route: Route,
}

/// Hermitian `L_1, L_2, L_3` on `|j,m,n>`, rows and columns `n = -j..=j`,
/// with `L_3 = diag(-n)` and `[L_1, L_2] = i L_3`.
pub fn angular_momentum_matrices<T: Real>(j: u32) -> [RepMatrix<T>; 3] {
    let jf: T = int(j as i64);
    let jj = j as i32;
    let i = imag_unit::<T>();
    let half: T = lit(0.5);
    let mut l1 = RepMatrix::zeros(j);
    let mut l2 = RepMatrix::zeros(j);
    let l3 = RepMatrix::from_diag(j, |n| Complex::new(-int::<T>(n as i64), T::zero()));
    for n in -jj..=jj {
        let nf: T = int(n as i64);
        if n < jj {
            let up = ((jf - nf) * (jf + nf + T::one())).sqrt() * half;
            l2.set(n + 1, n, Complex::new(up, T::zero()));
            l1.set(n + 1, n, -i * up);
        }
        if n > -jj {
            let down = ((jf + nf) * (jf - nf + T::one())).sqrt() * half;
            l2.set(n - 1, n, Complex::new(down, T::zero()));
            l1.set(n - 1, n, i * down);
        }
    }
    [l1, l2, l3]
}

/// `A L_1^2 + B L_2^2 + C L_3^2` on `|j,m,n>`.
pub fn h_matrix_wigner<T: Real>(j: u32, p: &TopParams<T>) -> RepMatrix<T> {
    let [l1, l2, l3] = angular_momentum_matrices::<T>(j);
    let t1 = (&l1 * &l1).scale_real(p.a);
    let t2 = (&l2 * &l2).scale_real(p.b);
    let t3 = (&l3 * &l3).scale_real(p.c);
    &(&t1 + &t2) + &t3
}

/// `H(-i l) = -(A l_1^2 + B l_2^2 + C l_3^2)` on `psi_n = e^{inq}`.
pub fn h_matrix_lambda<T: Real>(j: u32, p: &TopParams<T>) -> RepMatrix<T> {
    let sq = |a: Axis| {
        let l = ell_matrix::<T>(a, j);
        &l * &l
    };
    let sum = &(&sq(Axis::X).scale_real(p.a) + &sq(Axis::Y).scale_real(p.b)) + &sq(Axis::Z).scale_real(p.c);
    sum.scale_real(-T::one())
}

/// Coefficient functions of `d^0, d^1, d^2` in the reduced equation for `Phi(q')`,
/// without the `-E` term.
pub fn reduced_ode_coefficients<T: Real>(j: u32, p: &TopParams<T>) -> [TrigPoly<T>; 3] {
    let s = TrigPoly::<T>::sin();
    let c = TrigPoly::<T>::cos();
    let s2 = s.mul(&s);
    let c2 = c.mul(&c);
    let jf: T = int(j as i64);
    let second = s2.scale_real(p.a).add(&c2.scale_real(p.b)).add(&TrigPoly::real_constant(-p.c));
    let first = s.mul(&c).scale_real((T::one() - jf - jf) * (p.a - p.b));
    let zeroth = c2
        .scale_real(p.a)
        .add(&s2.scale_real(p.b))
        .scale_real(jf * jf)
        .add(&s2.scale_real(p.a).add(&c2.scale_real(p.b)).scale_real(jf));
    [zeroth, first, second]
}

/// Matrix of the reduced differential operator on `e^{inq}`, and the largest
/// coefficient it produces outside `F^j`.
pub fn h_matrix_lambda_ode<T: Real>(j: u32, p: &TopParams<T>) -> (RepMatrix<T>, T) {
    operator_matrix(&reduced_ode_coefficients(j, p), j)
}

/// Residual `|(D - E) Phi|` of the reduced equation at `q`, derivatives of
/// the Fourier series taken term by term.
pub fn reduced_ode_residual<T: Real>(state: &FourierState<T>, energy: T, p: &TopParams<T>, q: Complex<T>) -> T {
    let [c0, c1, c2] = reduced_ode_coefficients(state.j, p);
    let f0 = evaluate_series_derivative(&state.coeffs, state.j, q, 0);
    let f1 = evaluate_series_derivative(&state.coeffs, state.j, q, 1);
    let f2 = evaluate_series_derivative(&state.coeffs, state.j, q, 2);
    (c2.eval(q) * f2 + c1.eval(q) * f1 + (c0.eval(q) - Complex::new(energy, T::zero())) * f0).norm()
}

/// Symmetry of a state under `n -> -n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Normalizes `c` to `(Phi, Phi)_Q = 2j+1` and fixes its phase: the
/// lowest-index component of largest magnitude of `c` (or of `c / i` for odd
/// states) is made real and positive.
pub fn fix_phase<T: Real>(coeffs: &[Complex<T>], j: u32, parity: Parity) -> Vec<Complex<T>> {
    let i = imag_unit::<T>();
    let base: Vec<Complex<T>> = match parity {
        Parity::Even => coeffs.to_vec(),
        Parity::Odd => coeffs.iter().map(|c| *c / i).collect(),
    };
    let biggest = base.iter().fold(T::zero(), |m, c| m.max(c.norm()));
    let pick = base.iter().position(|c| c.norm() >= biggest * (T::one() - lit(1e-9))).unwrap_or(0);
    let rot = if base[pick].norm() > T::zero() { base[pick].conj() / base[pick].norm() } else { Complex::new(T::one(), T::zero()) };
    let jj = j as i32;
    let norm: T = (-jj..=jj).fold(T::zero(), |acc, n| {
        acc + base[(n + jj) as usize].norm_sqr() / weight_b::<T>(n, j).expect("|n| <= j")
    });
    let scale = (int::<T>(2 * j as i64 + 1) / norm).sqrt();
    base.iter()
        .map(|c| {
            let v = *c * rot * scale;
            match parity {
                Parity::Even => v,
                Parity::Odd => v * i,
            }
        })
        .collect()
}

/// Eigen-decomposition of `H(-i l)` in the Gram-orthonormal frame.
#[derive(Debug, Clone)]
pub struct LambdaEigenbasis<T> {
    pub j: u32,
    /// Ascending energies, index `s + j`.
    pub energies: Vec<T>,
    /// Fourier states with `(Phi_s, Phi_s)_Q = 2j+1`.
    pub states: Vec<FourierState<T>>,
    pub parities: Vec<Parity>,
}

impl<T: Real> LambdaEigenbasis<T> {
    pub fn state(&self, s: i32) -> Result<&FourierState<T>> {
        self.index(s).map(|k| &self.states[k])
    }

    pub fn energy(&self, s: i32) -> Result<T> {
        self.index(s).map(|k| self.energies[k])
    }

    fn index(&self, s: i32) -> Result<usize> {
        let jj = self.j as i32;
        if s.abs() > jj {
            return Err(Error::Domain(format!("|s| = {} exceeds j = {}", s.abs(), self.j)));
        }
        Ok((s + jj) as usize)
    }

    /// Whether level `s` lies within `1e-9 * scale` of a neighbour, in which
    /// case its eigenvector is only fixed up to rotation inside the block.
    pub fn is_degenerate(&self, s: i32, scale: T) -> bool {
        let Ok(k) = self.index(s) else { return false };
        let tol = scale * lit(1e-9);
        let e = self.energies[k];
        (k > 0 && (e - self.energies[k - 1]).abs() < tol) || (k + 1 < self.energies.len() && (self.energies[k + 1] - e).abs() < tol)
    }
}

/// Diagonalizes `G^{1/2} M G^{-1/2}` separately on the even and odd sectors.
pub fn lambda_eigenbasis<T: Real>(j: u32, p: &TopParams<T>) -> LambdaEigenbasis<T> {
    let m = h_matrix_lambda(j, p);
    let jj = j as i32;
    let d = (2 * j + 1) as usize;
    let sqrt_b: Vec<T> = (-jj..=jj).map(|n| weight_b::<T>(n, j).expect("|n| <= j").sqrt()).collect();
    // S = G^{1/2} M G^{-1/2}, real symmetric.
    let s_at = |r: i32, c: i32| m.get(r, c).re * sqrt_b[(c + jj) as usize] / sqrt_b[(r + jj) as usize];

    let root_half: T = lit::<T>(0.5).sqrt();
    let mut sectors: Vec<(Parity, Vec<Vec<T>>)> = Vec::new();
    let mut even = Vec::new();
    let mut zero = vec![T::zero(); d];
    zero[jj as usize] = T::one();
    even.push(zero);
    let mut odd = Vec::new();
    for n in 1..=jj {
        let mut e = vec![T::zero(); d];
        e[(jj + n) as usize] = root_half;
        e[(jj - n) as usize] = root_half;
        even.push(e);
        let mut o = vec![T::zero(); d];
        o[(jj + n) as usize] = root_half;
        o[(jj - n) as usize] = -root_half;
        odd.push(o);
    }
    sectors.push((Parity::Even, even));
    if !odd.is_empty() {
        sectors.push((Parity::Odd, odd));
    }

    let mut found: Vec<(T, Parity, Vec<Complex<T>>)> = Vec::with_capacity(d);
    for (parity, basis) in &sectors {
        let k = basis.len();
        let mut proj = vec![T::zero(); k * k];
        for a in 0..k {
            for b in 0..k {
                let mut acc = T::zero();
                for r in -jj..=jj {
                    let ur = basis[a][(r + jj) as usize];
                    if ur.is_zero() {
                        continue;
                    }
                    for c in -jj..=jj {
                        let uc = basis[b][(c + jj) as usize];
                        if !uc.is_zero() {
                            acc = acc + ur * s_at(r, c) * uc;
                        }
                    }
                }
                proj[a * k + b] = acc;
            }
        }
        let eig = symmetric_eigen(&proj, k);
        for (value, vec) in eig.values.iter().zip(&eig.vectors) {
            let y: Vec<T> = (0..d).map(|r| (0..k).fold(T::zero(), |acc, a| acc + vec[a] * basis[a][r])).collect();
            let c: Vec<Complex<T>> =
                y.iter().zip(&sqrt_b).map(|(yr, sb)| Complex::new(*yr * *sb, T::zero())).collect();
            let c = match parity {
                Parity::Even => c,
                Parity::Odd => c.iter().map(|x| *x * imag_unit::<T>()).collect(),
            };
            found.push((*value, *parity, fix_phase(&c, j, *parity)));
        }
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite energies"));
    LambdaEigenbasis {
        j,
        energies: found.iter().map(|f| f.0).collect(),
        parities: found.iter().map(|f| f.1).collect(),
        states: found.into_iter().map(|f| FourierState { j, coeffs: f.2 }).collect(),
    }
}

/// `Phi_{j,s}` from the lambda route.
pub fn phi_state<T: Real>(j: u32, s: i32, p: &TopParams<T>) -> Result<FourierState<T>> {
    lambda_eigenbasis(j, p).state(s).cloned()
}

fn label<T: Real>(j: u32, energies: Vec<(T, Option<LameClass>)>, route: Route) -> Vec<EnergyLevel<T>> {
    energies
        .into_iter()
        .enumerate()
        .map(|(k, (energy, lame_class))| EnergyLevel { j, s: k as i32 - j as i32, energy, lame_class, route })
        .collect()
}

/// The `2j+1` levels of one `j` block by the chosen route.
pub fn spectrum<T: Real>(j: u32, p: &TopParams<T>, route: Route) -> Result<Vec<EnergyLevel<T>>> {
    match route {
        Route::Wigner => {
            let e = hermitian_eigenvalues(&h_matrix_wigner(j, p));
            Ok(label(j, e.into_iter().map(|x| (x, None)).collect(), route))
        }
        Route::Lambda => {
            let e = lambda_eigenbasis(j, p).energies;
            Ok(label(j, e.into_iter().map(|x| (x, None)).collect(), route))
        }
        Route::Lame => lame_spectrum(j, p),
    }
}

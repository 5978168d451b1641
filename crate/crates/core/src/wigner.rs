//! Jacobi polynomials and the Wigner functions `d^j_{mn}` and `D^j_{mn}`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::RepMatrix;
use crate::scalar::{cis, int, lit, ln_factorial, Real};
use crate::so3::{EulerAngles, HaarRule};

/// Labels `(j, m, n)` of a matrix element with `|m|, |n| <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WignerIndex {
    pub j: u32,
    pub m: i32,
    pub n: i32,
}

impl WignerIndex {
    pub fn new(j: u32, m: i32, n: i32) -> Result<Self> {
        let jj = j as i32;
        if m.abs() > jj || n.abs() > jj {
            return Err(Error::Domain(format!("|m| = {} or |n| = {} exceeds j = {j}", m.abs(), n.abs())));
        }
        Ok(Self { j, m, n })
    }
}

/// Generalized binomial coefficient `x (x-1) ... (x-k+1) / k!`.
fn gen_binom<T: Real>(x: T, k: u32) -> T {
    (0..k).fold(T::one(), |acc, i| acc * (x - int(i as i64)) / int(i as i64 + 1))
}

fn jacobi_explicit<T: Real>(n: u32, alpha: T, beta: T, z: T) -> T {
    let nf: T = int(n as i64);
    let half: T = lit(0.5);
    let lo = (z - T::one()) * half;
    let hi = (z + T::one()) * half;
    (0..=n).fold(T::zero(), |acc, s| {
        acc + gen_binom(nf + alpha, n - s) * gen_binom(nf + beta, s) * lo.powi(s as i32) * hi.powi((n - s) as i32)
    })
}

/// `P_n^{(alpha, beta)}(z)` by the three-term recurrence in `n`.
///
/// Falls back to the explicit finite sum when a recurrence denominator
/// vanishes, which only happens for negative integer parameter combinations.
pub fn jacobi_poly<T: Real>(n: u32, alpha: T, beta: T, z: T) -> T {
    if n == 0 {
        return T::one();
    }
    let two: T = lit(2.0);
    let ab = alpha + beta;
    let p1 = (alpha + T::one()) + (ab + two) * (z - T::one()) * lit(0.5);
    if n == 1 {
        return p1;
    }
    let mut prev = T::one();
    let mut cur = p1;
    for k in 2..=n {
        let kf: T = int(k as i64);
        let c = two * kf + ab;
        let denom = two * kf * (kf + ab) * (c - two);
        if denom.abs() <= T::epsilon() {
            return jacobi_explicit(n, alpha, beta, z);
        }
        let a1 = (c - T::one()) * (c * (c - two) * z + alpha * alpha - beta * beta);
        let a2 = two * (kf + alpha - T::one()) * (kf + beta - T::one()) * c;
        let next = (a1 * cur - a2 * prev) / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// Small-d in the region `m >= |n|`, where the Jacobi parameters are non-negative.
fn small_d_canonical<T: Real>(j: u32, m: i32, n: i32, theta: T) -> T {
    let jj = j as i32;
    let ln_ratio = (ln_factorial::<T>((jj + m) as u32) + ln_factorial::<T>((jj - m) as u32)
        - ln_factorial::<T>((jj + n) as u32)
        - ln_factorial::<T>((jj - n) as u32))
        * lit(0.5);
    let (s, c) = (theta * lit(0.5)).sin_cos();
    let sign = if (m - n) % 2 == 0 { T::one() } else { -T::one() };
    let p = jacobi_poly((jj - m) as u32, int::<T>((m - n) as i64), int::<T>((m + n) as i64), theta.cos());
    sign * ln_ratio.exp() * s.powi(m - n) * c.powi(m + n) * p
}

/// `d^j_{mn}(theta)`.
pub fn wigner_small_d<T: Real>(idx: WignerIndex, theta: T) -> T {
    let WignerIndex { j, m, n } = idx;
    let top = m.abs().max(n.abs());
    let parity = if (m - n) % 2 == 0 { T::one() } else { -T::one() };
    if m == top {
        small_d_canonical(j, m, n, theta)
    } else if n == top {
        parity * small_d_canonical(j, n, m, theta)
    } else if -m == top {
        parity * small_d_canonical(j, -m, -n, theta)
    } else {
        small_d_canonical(j, -n, -m, theta)
    }
}

/// `D^j_{mn}(g) = e^{i m phi + i n psi} d^j_{mn}(theta)`.
pub fn wigner_d<T: Real>(idx: WignerIndex, g: &EulerAngles<T>) -> Complex<T> {
    let phase = int::<T>(idx.m as i64) * g.phi + int::<T>(idx.n as i64) * g.psi;
    cis(phase) * wigner_small_d(idx, g.theta)
}

/// The full matrix `D^j(g)`, rows `m`, columns `n`.
pub fn wigner_matrix<T: Real>(j: u32, g: &EulerAngles<T>) -> RepMatrix<T> {
    let small = small_d_matrix(j, g.theta);
    RepMatrix::from_fn(j, |m, n| {
        let k = (j as i32) * 2 + 1;
        let v = small[((m + j as i32) * k + n + j as i32) as usize];
        cis(int::<T>(m as i64) * g.phi + int::<T>(n as i64) * g.psi) * v
    })
}

fn small_d_matrix<T: Real>(j: u32, theta: T) -> Vec<T> {
    let jj = j as i32;
    let mut out = Vec::with_capacity(((2 * j + 1) * (2 * j + 1)) as usize);
    for m in -jj..=jj {
        for n in -jj..=jj {
            out.push(wigner_small_d(WignerIndex { j, m, n }, theta));
        }
    }
    out
}

/// Haar-quadrature overlaps `int conj(D^j_{mn}) D^jt_{m'n'} dmu`.
#[derive(Debug, Clone)]
pub struct WignerGram<T> {
    pub j: u32,
    pub jt: u32,
    data: Vec<Complex<T>>,
}

impl<T: Real> WignerGram<T> {
    fn index(&self, m: i32, n: i32, mt: i32, nt: i32) -> usize {
        let (j, jt) = (self.j as i32, self.jt as i32);
        let (d, dt) = ((2 * j + 1) as usize, (2 * jt + 1) as usize);
        (((m + j) as usize * d + (n + j) as usize) * dt + (mt + jt) as usize) * dt + (nt + jt) as usize
    }

    pub fn get(&self, m: i32, n: i32, mt: i32, nt: i32) -> Complex<T> {
        self.data[self.index(m, n, mt, nt)]
    }

    /// `delta_{j jt} delta_{m m'} delta_{n n'} / (2j+1)`.
    pub fn expected(&self, m: i32, n: i32, mt: i32, nt: i32) -> T {
        if self.j == self.jt && m == mt && n == nt {
            T::one() / int(2 * self.j as i64 + 1)
        } else {
            T::zero()
        }
    }

    /// Largest deviation from the orthogonality relation.
    pub fn defect(&self) -> T {
        let (j, jt) = (self.j as i32, self.jt as i32);
        let mut worst = T::zero();
        for m in -j..=j {
            for n in -j..=j {
                for mt in -jt..=jt {
                    for nt in -jt..=jt {
                        let e = self.expected(m, n, mt, nt);
                        worst = worst.max((self.get(m, n, mt, nt) - Complex::new(e, T::zero())).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Evaluates the overlap tensor on the product rule, one factor per angle.
pub fn wigner_gram<T: Real>(j: u32, jt: u32, rule: &HaarRule<T>) -> Result<WignerGram<T>> {
    if rule.degree < j.max(jt) {
        return Err(Error::Domain(format!(
            "Haar rule of degree {} cannot resolve j = {j}, jt = {jt}",
            rule.degree
        )));
    }
    let (ji, jti) = (j as i32, jt as i32);
    let n_ang: T = int(rule.angle_grid.len() as i64);
    // Mean of e^{i k x} over the uniform grid, for k in -(j+jt)..=(j+jt).
    let span = ji + jti;
    let mean: Vec<Complex<T>> = (-span..=span)
        .map(|k| rule.angle_grid.iter().fold(Complex::zero(), |acc, &x| acc + cis(int::<T>(k as i64) * x)) / n_ang)
        .collect();
    let mean_at = |k: i32| mean[(k + span) as usize];

    let d = (2 * j + 1) as usize;
    let dt = (2 * jt + 1) as usize;
    let smalls: Vec<(Vec<T>, Vec<T>, T)> =
        rule.theta_nodes.iter().map(|&(th, w)| (small_d_matrix(j, th), small_d_matrix(jt, th), w)).collect();

    let mut data = vec![Complex::zero(); d * d * dt * dt];
    let mut gram = WignerGram { j, jt, data: Vec::new() };
    for m in -ji..=ji {
        for n in -ji..=ji {
            for mt in -jti..=jti {
                for nt in -jti..=jti {
                    let theta_part = smalls.iter().fold(T::zero(), |acc, (a, b, w)| {
                        acc + *w * a[(m + ji) as usize * d + (n + ji) as usize] * b[(mt + jti) as usize * dt + (nt + jti) as usize]
                    });
                    let v = mean_at(mt - m) * mean_at(nt - n) * theta_part;
                    data[gram.index(m, n, mt, nt)] = v;
                }
            }
        }
    }
    gram.data = data;
    Ok(gram)
}

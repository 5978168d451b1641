//! Wavefunctions `Psi_{q,j,s}(g)` of the top, the kernel of the operators
//! `T^j(g)`, their matrices on `psi_n`, and the states `|j,m,s>`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lambda_rep::{
    const_c, delta_j, evaluate_series, evaluate_state, weight_b, ComplexQ, FourierState, MeasureQuadrature,
};
use crate::linalg::RepMatrix;
use crate::scalar::{cis, cpow, i_pow, imag_unit, int, lit, Real};
use crate::so3::{field_derivative, Axis, EulerAngles, FieldOptions, HaarRule, Side};
use crate::spectra::{lambda_eigenbasis, TopParams};
use crate::wigner::wigner_matrix;

/// A single evaluated wavefunction value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample<T> {
    pub q: ComplexQ<T>,
    pub j: u32,
    pub s: i32,
    pub g: EulerAngles<T>,
    pub value: Complex<T>,
}

/// `(c, s, e)` with `c, s = cos, sin((q+phi)/2)` and `e = e^{i theta}`.
fn half_angle<T: Real>(q: ComplexQ<T>, g: &EulerAngles<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
    let x = (q.to_complex() + g.phi) * lit::<T>(0.5);
    (x.cos(), x.sin(), cis(g.theta))
}

/// Prefactor base `cos(theta) + i cos(q+phi) sin(theta)` and `w = e^{iu}`,
/// `u = psi + 2 arctan(e^{-i theta} tan((q+phi)/2))`.
///
/// `w` is evaluated as `e^{i psi} (c + i e^{-i theta} s) / (c - i e^{-i theta} s)`,
/// which has no branch cut and no pole at `cos((q+phi)/2) = 0`.
pub fn mobius_phase<T: Real>(q: ComplexQ<T>, g: &EulerAngles<T>) -> Result<(Complex<T>, Complex<T>)> {
    let i = imag_unit::<T>();
    let (c, s, e) = half_angle(q, g);
    let ebar = e.conj();
    let num = c + i * ebar * s;
    let den = c - i * ebar * s;
    let size = c.norm() + s.norm();
    if den.norm() <= size * T::epsilon() * lit(16.0) {
        return Err(Error::Pole(format!("Möbius phase undefined at q = {}, g = {:?}", q.to_complex(), g)));
    }
    let (st, ct) = g.theta.sin_cos();
    let base = Complex::new(ct, T::zero()) + i * (q.to_complex() + g.phi).cos() * st;
    Ok((base, cis(g.psi) * num / den))
}

/// `Psi(g) = P^j sum_n c_n w^n` for an arbitrary state, in the pole-free
/// factored form `sum_n c_n e^{ij theta} e^{in psi} (c + i ebar s)^{j+n} (c - i ebar s)^{j-n}`.
pub fn psi_eval_state<T: Real>(q: ComplexQ<T>, state: &FourierState<T>, g: &EulerAngles<T>) -> Complex<T> {
    let i = imag_unit::<T>();
    let j = state.j;
    let jj = j as i32;
    let (c, s, e) = half_angle(q, g);
    let ebar = e.conj();
    let plus = c + i * ebar * s;
    let minus = c - i * ebar * s;
    let pre = cpow(e, j);
    let mut acc = Complex::<T>::zero();
    for n in -jj..=jj {
        let cn = state.coeff(n);
        if cn.is_zero() {
            continue;
        }
        acc = acc + cn * cis(int::<T>(n as i64) * g.psi) * cpow(plus, (jj + n) as u32) * cpow(minus, (jj - n) as u32);
    }
    acc * pre
}

/// `Psi_{q,j,s}(g)`.
pub fn psi_eval<T: Real>(q: ComplexQ<T>, j: u32, s: i32, p: &TopParams<T>, g: &EulerAngles<T>) -> Result<Complex<T>> {
    let basis = lambda_eigenbasis(j, p);
    Ok(psi_eval_state(q, basis.state(s)?, g))
}

/// `Psi(g)` through `mobius_phase`, literally `P^j sum_n c_n w^n`.
pub fn psi_eval_mobius<T: Real>(q: ComplexQ<T>, state: &FourierState<T>, g: &EulerAngles<T>) -> Result<Complex<T>> {
    let (base, w) = mobius_phase(q, g)?;
    Ok(cpow(base, state.j) * evaluate_series(&state.coeffs, state.j, -imag_unit::<T>() * w.ln()))
}

/// Closed form of the kernel `D^j_{qq'}(g)`.
pub fn kernel_eval<T: Real>(q: ComplexQ<T>, qp: ComplexQ<T>, j: u32, g: &EulerAngles<T>) -> Complex<T> {
    let i = imag_unit::<T>();
    let a = q.to_complex() + g.phi;
    let b = qp.to_complex().conj() - g.psi;
    let (st, ct) = g.theta.sin_cos();
    let brace = (a.cos() * b.cos() + T::one()) * ct + i * (a.cos() + b.cos()) * st + a.sin() * b.sin();
    cpow(brace, j) * (int::<T>(2 * j as i64 + 1) / const_c::<T>(j))
}

/// The kernel as `P^j delta_j(u, q')` with `u` from `mobius_phase`.
pub fn kernel_eval_du<T: Real>(q: ComplexQ<T>, qp: ComplexQ<T>, j: u32, g: &EulerAngles<T>) -> Result<Complex<T>> {
    let (base, w) = mobius_phase(q, g)?;
    // cos(u - conj(q')) from w = e^{iu}
    let v = cis(qp.alpha) * qp.beta.exp();
    let cos_diff = (w / v + v / w) * lit::<T>(0.5);
    let delta = cpow(cos_diff + T::one(), j) * (int::<T>(2 * j as i64 + 1) / const_c::<T>(j));
    Ok(cpow(base, j) * delta)
}

/// Kernel through its expansion over `|j,m,n>`:
/// `sum_{mn} sqrt(B_n B_m) e^{-in conj(q') + imq - i pi (m-n)/2} D^j_{mn}(g)`.
pub fn kernel_eval_series<T: Real>(q: ComplexQ<T>, qp: ComplexQ<T>, j: u32, g: &EulerAngles<T>) -> Complex<T> {
    let i = imag_unit::<T>();
    let d = wigner_matrix(j, g);
    let jj = j as i32;
    let qc = q.to_complex();
    let qpc = qp.to_complex().conj();
    let mut acc = Complex::zero();
    for m in -jj..=jj {
        for n in -jj..=jj {
            let w = (weight_b::<T>(n, j).expect("|n| <= j") * weight_b::<T>(m, j).expect("|m| <= j")).sqrt();
            let phase = (i * (qc * int::<T>(m as i64) - qpc * int::<T>(n as i64))).exp() * i_pow::<T>(-(m - n) as i64);
            acc = acc + phase * d.get(m, n) * w;
        }
    }
    acc
}

/// Matrix of `T^j(g)` on `psi_n`.
#[derive(Debug, Clone)]
pub struct TMatrix<T: Real> {
    pub j: u32,
    pub entries: RepMatrix<T>,
}

impl<T: Real> TMatrix<T> {
    pub fn get(&self, m: i32, n: i32) -> Complex<T> {
        self.entries.get(m, n)
    }

    /// `max |t^dagger G t - G|`.
    pub fn gram_unitarity_defect(&self) -> T {
        let g = crate::lambda_rep::gram_metric::<T>(self.j);
        let lhs = &(&self.entries.adjoint() * &g) * &self.entries;
        lhs.max_abs_diff(&g)
    }

    pub fn apply(&self, state: &FourierState<T>) -> Result<FourierState<T>> {
        state.apply(&self.entries)
    }
}

/// `t_{mn}(g) = sqrt(B_m / B_n) (-i)^{m-n} D^j_{mn}(g)`.
pub fn t_matrix<T: Real>(j: u32, g: &EulerAngles<T>) -> TMatrix<T> {
    let d = wigner_matrix(j, g);
    let sb: Vec<T> = (-(j as i32)..=j as i32).map(|n| weight_b::<T>(n, j).expect("|n| <= j").sqrt()).collect();
    let jj = j as i32;
    let entries = RepMatrix::from_fn(j, |m, n| {
        d.get(m, n) * i_pow::<T>(-(m - n) as i64) * (sb[(m + jj) as usize] / sb[(n + jj) as usize])
    });
    TMatrix { j, entries }
}

/// Recovers `D^j(g)` from `t(g)` through the Gram matrix elements
/// `(psi_m, T psi_n)_Q = t_{mn} / B_m`.
pub fn wigner_from_t<T: Real>(t: &TMatrix<T>) -> RepMatrix<T> {
    let j = t.j;
    RepMatrix::from_fn(j, |m, n| {
        let bm = weight_b::<T>(m, j).expect("|m| <= j");
        let bn = weight_b::<T>(n, j).expect("|n| <= j");
        let gram = t.get(m, n) / bm;
        gram * (bn * bm).sqrt() * i_pow::<T>((m - n) as i64)
    })
}

/// `D^j_{mn}(g)` from the double integral of the kernel against
/// `conj(e^{imq}) e^{inq'}` on a quadrature rule of `Q`.
pub fn wigner_from_kernel_quadrature<T: Real>(j: u32, g: &EulerAngles<T>, rule: &MeasureQuadrature<T>) -> Result<RepMatrix<T>> {
    if rule.j != j {
        return Err(Error::Dimension { expected: j, found: rule.j });
    }
    let nodes = rule.nodes();
    let jj = j as i32;
    let qs: Vec<ComplexQ<T>> = nodes.iter().map(|(a, b, _)| ComplexQ { alpha: *a, beta: *b }).collect();
    let i = imag_unit::<T>();
    // inner[n][k] = sum_l K(q_k, q_l) w_l e^{in q_l}
    let mut inner = vec![vec![Complex::zero(); qs.len()]; (2 * j + 1) as usize];
    for (k, qk) in qs.iter().enumerate() {
        for (l, ql) in qs.iter().enumerate() {
            let kv = kernel_eval(*qk, *ql, j, g) * nodes[l].2;
            if kv.is_zero() {
                continue;
            }
            let z = (i * ql.to_complex()).exp();
            let zinv = Complex::<T>::new(T::one(), T::zero()) / z;
            let mut up = Complex::new(T::one(), T::zero());
            let mut down = Complex::new(T::one(), T::zero());
            inner[jj as usize][k] = inner[jj as usize][k] + kv;
            for n in 1..=jj {
                up = up * z;
                down = down * zinv;
                inner[(jj + n) as usize][k] = inner[(jj + n) as usize][k] + kv * up;
                inner[(jj - n) as usize][k] = inner[(jj - n) as usize][k] + kv * down;
            }
        }
    }
    let mut out = RepMatrix::zeros(j);
    for m in -jj..=jj {
        let bm = weight_b::<T>(m, j)?;
        for n in -jj..=jj {
            let bn = weight_b::<T>(n, j)?;
            let mut acc = Complex::zero();
            for (k, qk) in qs.iter().enumerate() {
                let fm = (i * qk.to_complex() * int::<T>(m as i64)).exp();
                acc = acc + fm.conj() * inner[(n + jj) as usize][k] * nodes[k].2;
            }
            out.set(m, n, acc * (bn * bm).sqrt() * i_pow::<T>((m - n) as i64));
        }
    }
    Ok(out)
}

/// `T^j(g) Phi_{j,s}` evaluated at `q`.
pub fn psi_via_kernel<T: Real>(q: ComplexQ<T>, j: u32, s: i32, p: &TopParams<T>, g: &EulerAngles<T>) -> Result<Complex<T>> {
    let basis = lambda_eigenbasis(j, p);
    let moved = t_matrix(j, g).apply(basis.state(s)?)?;
    evaluate_state(&moved, q)
}

/// Coefficients `a_n` of `|j,m,s> = sum_n a_n |j,m,n>`, with
/// `a_n = e^{-i pi (m-n)/2} c_n / sqrt(B_{nj})` from `Phi_{j,s} = sum_n c_n e^{inq}`.
pub fn state_jms<T: Real>(j: u32, m: i32, s: i32, p: &TopParams<T>) -> Result<Vec<Complex<T>>> {
    if m.unsigned_abs() > j {
        return Err(Error::Domain(format!("|m| = {} exceeds j = {j}", m.abs())));
    }
    let basis = lambda_eigenbasis(j, p);
    let phi = basis.state(s)?;
    let jj = j as i32;
    Ok((-jj..=jj)
        .map(|n| phi.coeff(n) * i_pow::<T>(-(m - n) as i64) / weight_b::<T>(n, j).expect("|n| <= j").sqrt())
        .collect())
}

/// `<j,m,s|j,m,s'>` from coefficient vectors, using `<j,m,n|j,m,n'> = delta / (2j+1)`.
pub fn jms_overlap<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let d: T = int(a.len() as i64);
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * *y) / d
}

/// Finite-difference residuals of the defining equations at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeResidual<T> {
    /// `|H(g) Psi - E Psi|`.
    pub schrodinger: T,
    /// `|(eta_a + l_a(q, d_q, j)) Psi|` for `a = 1, 2, 3`.
    pub symmetry: [T; 3],
}

/// Residuals of the Schrödinger equation and of the right-invariant symmetry
/// equations, all derivatives by central differences of step `h`.
pub fn pde_residual<T: Real>(
    q: ComplexQ<T>,
    j: u32,
    s: i32,
    p: &TopParams<T>,
    g: EulerAngles<T>,
    h: T,
) -> Result<PdeResidual<T>> {
    let basis = lambda_eigenbasis(j, p);
    let state = basis.state(s)?.clone();
    let energy = basis.energy(s)?;
    pde_residual_state(q, &state, energy, p, g, FieldOptions { step: h, ..FieldOptions::default() })
}

pub fn pde_residual_state<T: Real>(
    q: ComplexQ<T>,
    state: &FourierState<T>,
    energy: T,
    p: &TopParams<T>,
    g: EulerAngles<T>,
    opts: FieldOptions<T>,
) -> Result<PdeResidual<T>> {
    let h = opts.step;
    if !(h > T::zero()) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    if !(g.theta > opts.guard && g.theta < T::PI() - opts.guard) {
        return Err(Error::Domain(format!("theta = {} lies within {} of a pole", g.theta, opts.guard)));
    }
    let psi = |x: EulerAngles<T>| psi_eval_state(q, state, &x);
    let second = |a: Axis| {
        let inner = |x: EulerAngles<T>| field_derivative(Side::Left, a, &psi, x, h);
        field_derivative(Side::Left, a, &inner, g, h)
    };
    let value = psi(g);
    let h_psi = -(second(Axis::X) * p.a + second(Axis::Y) * p.b + second(Axis::Z) * p.c);
    let schrodinger = (h_psi - value * energy).norm();

    let i = imag_unit::<T>();
    let jf: T = int(state.j as i64);
    let at_q = |d: T| psi_eval_state(ComplexQ { alpha: q.alpha + d, beta: q.beta }, state, &g);
    let d_q = (at_q(h) - at_q(-h)) / (h + h);
    let qc = q.to_complex();
    let ell = [
        -i * qc.sin() * d_q + i * jf * qc.cos() * value,
        -i * qc.cos() * d_q - i * jf * qc.sin() * value,
        d_q,
    ];
    let mut symmetry = [T::zero(); 3];
    for (k, axis) in Axis::ALL.into_iter().enumerate() {
        symmetry[k] = (field_derivative(Side::Right, axis, &psi, g, h) + ell[k]).norm();
    }
    Ok(PdeResidual { schrodinger, symmetry })
}

/// Residuals at steps `h` and `h/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeConvergence<T> {
    pub coarse: PdeResidual<T>,
    pub fine: PdeResidual<T>,
}

impl<T: Real> PdeConvergence<T> {
    fn pairs(&self) -> [(T, T); 4] {
        [
            (self.coarse.schrodinger, self.fine.schrodinger),
            (self.coarse.symmetry[0], self.fine.symmetry[0]),
            (self.coarse.symmetry[1], self.fine.symmetry[1]),
            (self.coarse.symmetry[2], self.fine.symmetry[2]),
        ]
    }

    /// `coarse / fine` for the Schrödinger residual and each symmetry residual.
    pub fn ratios(&self) -> [T; 4] {
        self.pairs().map(|(c, f)| c / f)
    }

    /// Residuals below `1e-7` of the largest coarse residual are treated as
    /// exact; they carry only rounding noise.
    fn floor(&self) -> T {
        let top = self.pairs().iter().fold(T::zero(), |m, &(c, _)| m.max(c));
        (top * lit(1e-7)).max(T::epsilon() * lit(1e3))
    }

    /// Largest `|coarse / fine - 4|` over the residuals above the floor.
    pub fn ratio_defect(&self) -> T {
        let floor = self.floor();
        self.pairs().iter().fold(T::zero(), |worst, &(c, f)| {
            if c < floor && f < floor {
                worst
            } else if f > T::zero() {
                worst.max((c / f - lit(4.0)).abs())
            } else {
                T::infinity()
            }
        })
    }

    /// Each residual above the floor shrinks by a factor in `[lo, hi]`.
    pub fn is_second_order(&self, lo: T, hi: T) -> bool {
        let floor = self.floor();
        self.pairs().iter().all(|&(c, f)| (c < floor && f < floor) || (f > T::zero() && c / f >= lo && c / f <= hi))
    }
}

pub fn pde_convergence<T: Real>(
    q: ComplexQ<T>,
    j: u32,
    s: i32,
    p: &TopParams<T>,
    g: EulerAngles<T>,
    h: T,
) -> Result<PdeConvergence<T>> {
    Ok(PdeConvergence { coarse: pde_residual(q, j, s, p, g, h)?, fine: pde_residual(q, j, s, p, g, h * lit(0.5))? })
}

/// Haar quadrature of `|Psi_{q,j,s}|^2`.
pub fn so3_norm<T: Real>(q: ComplexQ<T>, j: u32, s: i32, p: &TopParams<T>, rule: &HaarRule<T>) -> Result<T> {
    if rule.degree < j {
        return Err(Error::Domain(format!("Haar rule of degree {} cannot resolve j = {j}", rule.degree)));
    }
    let basis = lambda_eigenbasis(j, p);
    let state = basis.state(s)?;
    Ok(rule.integrate(|g| Complex::new(psi_eval_state(q, state, g).norm_sqr(), T::zero())).re)
}

/// Result of integrating two kernels against each other over SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGram<T> {
    pub value: Complex<T>,
    pub expected: Complex<T>,
}

impl<T: Real> KernelGram<T> {
    pub fn defect(&self) -> T {
        (self.value - self.expected).norm()
    }
}

/// `int conj(D^j_{qq'}) D^jt_{q~q~'} dmu(g)` against
/// `delta_{j jt} delta_j(q~, q) delta_j(q', q~') / (2j+1)`.
pub fn kernel_gram<T: Real>(
    j: u32,
    jt: u32,
    rule: &HaarRule<T>,
    points: [ComplexQ<T>; 4],
) -> Result<KernelGram<T>> {
    if rule.degree < j.max(jt) {
        return Err(Error::Domain(format!(
            "Haar rule of degree {} cannot resolve j = {j}, jt = {jt}",
            rule.degree
        )));
    }
    let [q, qp, qt, qtp] = points;
    let value = rule.integrate(|g| kernel_eval(q, qp, j, g).conj() * kernel_eval(qt, qtp, jt, g));
    let expected = if j == jt {
        delta_j(qt, q, j) * delta_j(qp, qtp, j) / int::<T>(2 * j as i64 + 1)
    } else {
        Complex::zero()
    };
    Ok(KernelGram { value, expected })
}

/// `|sum_s |Phi_{j,s}(q)|^2 / (2j+1) - delta_j(q, conj q)|`.
pub fn completeness_defect<T: Real>(j: u32, p: &TopParams<T>, q: ComplexQ<T>) -> T {
    let basis = lambda_eigenbasis(j, p);
    let qc = q.to_complex();
    let sum = basis
        .states
        .iter()
        .fold(T::zero(), |acc, st| acc + evaluate_series(&st.coeffs, j, qc).norm_sqr());
    (Complex::new(sum / int::<T>(2 * j as i64 + 1), T::zero()) - delta_j(q, q, j)).norm()
}

/// `(Delta K)^2 = j(j+1) delta_j(q, conj q)`.
pub fn uncertainty<T: Real>(q: ComplexQ<T>, j: u32) -> T {
    let jf: T = int(j as i64);
    jf * (jf + T::one()) * delta_j(q, q, j).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::haar_rule;

    fn params() -> TopParams<f64> {
        TopParams::new(3.3, 2.1, 0.7).unwrap()
    }

    #[test]
    fn mobius_at_identity() {
        let q = ComplexQ::new(0.8, 0.3);
        let (base, w) = mobius_phase(q, &EulerAngles::identity()).unwrap();
        assert!((base - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((w - (imag_unit::<f64>() * q.to_complex()).exp()).norm() < 1e-14);
    }

    #[test]
    fn mobius_unit_modulus_on_real_axis() {
        let g = EulerAngles::new(0.3f64, 0.0, 1.7);
        let (_, w) = mobius_phase(ComplexQ::real(2.2), &g).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn j0_wavefunction_is_one() {
        let v = psi_eval(ComplexQ::new(0.4, 0.2), 0, 0, &params(), &EulerAngles::new(1.0, 2.0, 3.0)).unwrap();
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn kernel_forms_agree() {
        let q = ComplexQ::new(0.7, 0.3);
        let qp = ComplexQ::new(2.1, -0.4);
        let g = EulerAngles::new(0.9, 1.2, 4.4);
        for j in 0..4 {
            let a = kernel_eval(q, qp, j, &g);
            let b = kernel_eval_du(q, qp, j, &g).unwrap();
            let c = kernel_eval_series(q, qp, j, &g);
            assert!((a - b).norm() < 1e-11 * (1.0 + a.norm()), "j {j}");
            assert!((a - c).norm() < 1e-11 * (1.0 + a.norm()), "j {j}");
        }
        let id = EulerAngles::identity();
        assert!((kernel_eval(q, qp, 2, &id) - delta_j(q, qp, 2)).norm() < 1e-13);
    }

    #[test]
    fn t_identity_and_unitarity() {
        let t = t_matrix::<f64>(3, &EulerAngles::identity());
        assert!(t.entries.max_abs_diff(&RepMatrix::identity(3)) < 1e-15);
        let t = t_matrix::<f64>(3, &EulerAngles::new(0.3, 1.9, 5.1));
        assert!(t.gram_unitarity_defect() < 1e-12);
    }

    #[test]
    fn so3_norm_j1_real_q() {
        let v: f64 = so3_norm(ComplexQ::real(1.1), 1, 0, &params(), &haar_rule(1)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(so3_norm(ComplexQ::real(1.1), 2, 0, &params(), &haar_rule(1)).is_err());
    }

    #[test]
    fn uncertainty_values() {
        assert_eq!(uncertainty(ComplexQ::new(0.5, 0.5), 0), 0.0);
        assert!((uncertainty(ComplexQ::real(0.5f64), 1) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn pde_guard() {
        let g = EulerAngles::new(0.0, 1e-4, 0.0);
        assert!(pde_residual(ComplexQ::real(0.3), 1, 0, &params(), g, 1e-3).is_err());
    }
}

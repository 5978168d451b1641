//! Euler-angle geometry of SO(3): rotation matrices, Haar quadrature and the
//! left/right invariant vector fields applied by finite differences.

use std::ops::Mul;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::{int, lit, Real};

/// A point `g = g_z(phi) g_x(theta) g_z(psi)` of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles<T> {
    pub phi: T,
    pub theta: T,
    pub psi: T,
}

fn wrap_two_pi<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut r = x % tau;
    if r < T::zero() {
        r = r + tau;
    }
    if r >= tau {
        r = r - tau;
    }
    r
}

impl<T: Real> EulerAngles<T> {
    /// Normalizes into `phi, psi in [0, 2pi)` and `theta in [0, pi]`.
    ///
    /// A `theta` outside `[0, pi]` is folded back using
    /// `g_x(-theta) = g_z(pi) g_x(theta) g_z(pi)`.
    pub fn new(phi: T, theta: T, psi: T) -> Self {
        let pi = T::PI();
        let mut t = wrap_two_pi(theta);
        let (mut p, mut s) = (phi, psi);
        if t > pi {
            t = T::TAU() - t;
            p = p + pi;
            s = s + pi;
        }
        Self { phi: wrap_two_pi(p), theta: t, psi: wrap_two_pi(s) }
    }

    pub fn identity() -> Self {
        Self { phi: T::zero(), theta: T::zero(), psi: T::zero() }
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.theta.is_finite() && self.psi.is_finite()
    }

    pub fn to_matrix(&self) -> RotationMatrix<T> {
        euler_to_matrix(*self)
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        compose(*self, *other)
    }

    pub fn inverse(&self) -> Self {
        // (g_z(a) g_x(b) g_z(c))^{-1} = g_z(-c) g_x(-b) g_z(-a)
        Self::new(T::PI() - self.psi, self.theta, T::PI() - self.phi)
    }
}

/// A 3x3 real rotation matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> RotationMatrix<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { m: [[o, z, z], [z, o, z], [z, z, o]] }
    }

    /// Rotation about the z axis, `g_z(t)`.
    pub fn rot_z(t: T) -> Self {
        let (s, c) = t.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self { m: [[c, -s, z], [s, c, z], [z, z, o]] }
    }

    /// Rotation about the x axis, `g_x(t)`.
    pub fn rot_x(t: T) -> Self {
        let (s, c) = t.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self { m: [[o, z, z], [z, c, -s], [z, s, c]] }
    }

    /// Rotation about the y axis, `g_y(t)`.
    pub fn rot_y(t: T) -> Self {
        let (s, c) = t.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self { m: [[c, z, s], [z, o, z], [-s, z, c]] }
    }

    pub fn transpose(&self) -> Self {
        let mut out = *self;
        for r in 0..3 {
            for c in 0..3 {
                out.m[r][c] = self.m[c][r];
            }
        }
        out
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for r in 0..3 {
            for c in 0..3 {
                d = d.max((self.m[r][c] - other.m[r][c]).abs());
            }
        }
        d
    }

    /// `max |M^T M - I|`.
    pub fn orthogonality_defect(&self) -> T {
        (self.transpose() * *self).max_abs_diff(&Self::identity())
    }

    /// Euler angles of this matrix. At gimbal lock all of the z rotation is
    /// put into `phi` and `psi = 0`.
    pub fn to_euler(&self) -> EulerAngles<T> {
        let m = &self.m;
        let sin_theta = m[0][2].hypot(m[1][2]);
        let theta = sin_theta.atan2(m[2][2]);
        if sin_theta < T::epsilon() * lit(1e4) {
            let phi = m[1][0].atan2(m[0][0]);
            return EulerAngles::new(phi, theta, T::zero());
        }
        let phi = m[0][2].atan2(-m[1][2]);
        let psi = m[2][0].atan2(m[2][1]);
        EulerAngles::new(phi, theta, psi)
    }
}

impl<T: Real> Mul for RotationMatrix<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (0..3).fold(T::zero(), |acc, k| acc + self.m[r][k] * rhs.m[k][c]);
            }
        }
        Self { m: out }
    }
}

pub fn euler_to_matrix<T: Real>(g: EulerAngles<T>) -> RotationMatrix<T> {
    RotationMatrix::rot_z(g.phi) * RotationMatrix::rot_x(g.theta) * RotationMatrix::rot_z(g.psi)
}

pub fn compose<T: Real>(g1: EulerAngles<T>, g2: EulerAngles<T>) -> EulerAngles<T> {
    (euler_to_matrix(g1) * euler_to_matrix(g2)).to_euler()
}

/// Product quadrature for the normalized Haar measure
/// `sin(theta) dphi dtheta dpsi / (8 pi^2)`.
///
/// Uniform `2*degree+1` point grids in `phi` and `psi`, Gauss–Legendre in
/// `cos(theta)` with `degree+1` nodes. Exact for every product
/// `conj(D^j_{mn}) D^jt_{m'n'}` with `j, jt <= degree`.
#[derive(Debug, Clone)]
pub struct HaarRule<T> {
    pub degree: u32,
    /// Shared uniform grid for `phi` and `psi`; each point has weight `1/len`.
    pub angle_grid: Vec<T>,
    /// `(theta, weight)` with the weights summing to 1.
    pub theta_nodes: Vec<(T, T)>,
}

impl<T: Real> HaarRule<T> {
    pub fn new(degree: u32) -> Self {
        let n_ang = 2 * degree as usize + 1;
        let step = T::TAU() / int(n_ang as i64);
        let angle_grid = (0..n_ang).map(|k| step * int(k as i64)).collect();
        let (x, w) = gauss_legendre::<T>(degree as usize + 1);
        let theta_nodes = x.iter().zip(&w).map(|(&c, &wt)| (c.max(-T::one()).min(T::one()).acos(), wt * lit(0.5))).collect();
        Self { degree, angle_grid, theta_nodes }
    }

    pub fn len(&self) -> usize {
        self.angle_grid.len() * self.angle_grid.len() * self.theta_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes with their weights.
    pub fn nodes(&self) -> Vec<(EulerAngles<T>, T)> {
        let w_ang = T::one() / int((self.angle_grid.len() * self.angle_grid.len()) as i64);
        let mut out = Vec::with_capacity(self.len());
        for &(theta, wt) in &self.theta_nodes {
            for &phi in &self.angle_grid {
                for &psi in &self.angle_grid {
                    out.push((EulerAngles { phi, theta, psi }, wt * w_ang));
                }
            }
        }
        out
    }

    pub fn integrate<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(&EulerAngles<T>) -> Complex<T>,
    {
        self.nodes().iter().fold(Complex::zero(), |acc, (g, w)| acc + f(g) * *w)
    }
}

pub fn haar_rule<T: Real>(degree: u32) -> HaarRule<T> {
    HaarRule::new(degree)
}

/// Which family of invariant vector fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Left-invariant fields `xi_a`.
    Left,
    /// Right-invariant fields `eta_a`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Axis from `1..=3`.
    pub fn from_index(a: u8) -> Result<Self> {
        match a {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            3 => Ok(Axis::Z),
            _ => Err(Error::Domain(format!("axis index {a} not in 1..=3"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }
}

/// Step size and pole guard for the finite-difference field operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptions<T> {
    pub step: T,
    pub guard: T,
}

impl<T: Real> Default for FieldOptions<T> {
    fn default() -> Self {
        Self { step: lit(1e-5), guard: lit(1e-3) }
    }
}

impl<T: Real> FieldOptions<T> {
    pub fn with_step(step: T) -> Self {
        Self { step, ..Self::default() }
    }
}

/// Coefficients of `d/dphi`, `d/dtheta`, `d/dpsi` in the field at `g`.
pub fn field_coefficients<T: Real>(side: Side, axis: Axis, g: &EulerAngles<T>) -> [T; 3] {
    let z = T::zero();
    let (st, ct) = g.theta.sin_cos();
    let cot = ct / st;
    match side {
        Side::Left => {
            let (sp, cp) = g.psi.sin_cos();
            match axis {
                Axis::X => [sp / st, cp, -cot * sp],
                Axis::Y => [cp / st, -sp, -cot * cp],
                Axis::Z => [z, z, T::one()],
            }
        }
        Side::Right => {
            let (sp, cp) = g.phi.sin_cos();
            match axis {
                Axis::X => [cot * sp, -cp, -sp / st],
                Axis::Y => [-cot * cp, -sp, cp / st],
                Axis::Z => [-T::one(), z, z],
            }
        }
    }
}

fn shifted<T: Real>(g: &EulerAngles<T>, k: usize, d: T) -> EulerAngles<T> {
    let mut out = *g;
    match k {
        0 => out.phi = out.phi + d,
        1 => out.theta = out.theta + d,
        _ => out.psi = out.psi + d,
    }
    out
}

/// Central-difference gradient `(df/dphi, df/dtheta, df/dpsi)`.
pub fn gradient<T, F>(f: &F, g: &EulerAngles<T>, h: T) -> [Complex<T>; 3]
where
    T: Real,
    F: Fn(EulerAngles<T>) -> Complex<T> + ?Sized,
{
    let two_h = h + h;
    let mut out = [Complex::zero(); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = (f(shifted(g, k, h)) - f(shifted(g, k, -h))) / two_h;
    }
    out
}

/// Applies a field without checking the pole guard. Used when nesting
/// operators, where the outer call has already checked the point.
pub fn field_derivative<T, F>(side: Side, axis: Axis, f: &F, g: EulerAngles<T>, h: T) -> Complex<T>
where
    T: Real,
    F: Fn(EulerAngles<T>) -> Complex<T> + ?Sized,
{
    let coef = field_coefficients(side, axis, &g);
    let grad = gradient(f, &g, h);
    (0..3).fold(Complex::zero(), |acc, k| if coef[k].is_zero() { acc } else { acc + grad[k] * coef[k] })
}

fn check_interior<T: Real>(g: &EulerAngles<T>, opts: &FieldOptions<T>) -> Result<()> {
    if !(opts.step > T::zero()) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {}", opts.step)));
    }
    if !(g.theta > opts.guard && g.theta < T::PI() - opts.guard) {
        return Err(Error::Domain(format!(
            "theta = {} lies within {} of a pole of the invariant fields",
            g.theta, opts.guard
        )));
    }
    Ok(())
}

/// `xi_a f` or `eta_a f` at `g` by central differences.
pub fn invariant_field_apply<T, F>(side: Side, axis: Axis, f: F, g: EulerAngles<T>, opts: FieldOptions<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(EulerAngles<T>) -> Complex<T>,
{
    check_interior(&g, &opts)?;
    Ok(field_derivative(side, axis, &f, g, opts.step))
}

/// `X_a X_b f` with both fields from the same family, by nested central differences.
pub fn field_product<T, F>(side_a: Side, a: Axis, side_b: Side, b: Axis, f: &F, g: EulerAngles<T>, h: T) -> Complex<T>
where
    T: Real,
    F: Fn(EulerAngles<T>) -> Complex<T> + ?Sized,
{
    let inner = |x: EulerAngles<T>| field_derivative(side_b, b, f, x, h);
    field_derivative(side_a, a, &inner, g, h)
}

/// Casimir operator `L^2 = K(-i xi) = K(i eta)` in its explicit second-order
/// form, by central differences.
pub fn casimir_apply<T, F>(f: F, g: EulerAngles<T>, opts: FieldOptions<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(EulerAngles<T>) -> Complex<T>,
{
    check_interior(&g, &opts)?;
    let h = opts.step;
    let h2 = h * h;
    let f0 = f(g);
    let two: T = lit(2.0);
    let second = |k: usize| (f(shifted(&g, k, h)) - f0 * two + f(shifted(&g, k, -h))) / h2;
    let d_phi2 = second(0);
    let d_theta2 = second(1);
    let d_psi2 = second(2);
    let d_theta = (f(shifted(&g, 1, h)) - f(shifted(&g, 1, -h))) / (h + h);
    let corner = |a: T, b: T| f(EulerAngles { phi: g.phi + a, theta: g.theta, psi: g.psi + b });
    let d_phi_psi = (corner(h, h) - corner(h, -h) - corner(-h, h) + corner(-h, -h)) / (h2 * lit(4.0));

    let (st, ct) = g.theta.sin_cos();
    let angular = (d_psi2 + d_phi2 - d_phi_psi * (ct * two)) / (st * st);
    Ok(-angular - d_theta2 - d_theta * (ct / st))
}

/// Default step for second-order operators, where roundoff grows like `eps/h^2`.
pub fn casimir_options<T: Real>() -> FieldOptions<T> {
    FieldOptions { step: lit(1e-4), guard: lit(1e-3) }
}

/// Richardson extrapolation of an `O(h^2)` estimate from steps `h` and `h/2`.
pub fn richardson<T: Real>(coarse: Complex<T>, fine: Complex<T>) -> Complex<T> {
    (fine * lit::<T>(4.0) - coarse) / lit::<T>(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g(phi: f64, theta: f64, psi: f64) -> EulerAngles<f64> {
        EulerAngles::new(phi, theta, psi)
    }

    #[test]
    fn quarter_turn_about_z() {
        let m = euler_to_matrix(g(PI / 2.0, 0.0, 0.0));
        let expect = RotationMatrix { m: [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]] };
        assert!(m.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn new_folds_theta() {
        let a = g(0.3, -0.4, 1.1);
        assert!(a.theta >= 0.0 && a.theta <= PI);
        let m1 = euler_to_matrix(a);
        let m2 = RotationMatrix::rot_z(0.3) * RotationMatrix::rot_x(-0.4) * RotationMatrix::rot_z(1.1);
        assert!(m1.max_abs_diff(&m2) < 1e-14);
    }

    #[test]
    fn to_euler_round_trip() {
        let a = g(5.9, 2.2, 0.1);
        let b = euler_to_matrix(a).to_euler();
        assert!((a.phi - b.phi).abs() < 1e-12 && (a.theta - b.theta).abs() < 1e-12 && (a.psi - b.psi).abs() < 1e-12);
    }

    #[test]
    fn gimbal_lock_puts_rotation_in_phi() {
        let c = compose(g(1.0, 0.0, 0.0), g(0.0, 0.0, 2.5));
        assert!((c.phi - 3.5).abs() < 1e-12);
        assert_eq!(c.psi, 0.0);
        assert_eq!(c.theta, 0.0);

        let flipped = g(0.7, PI, 0.2).to_matrix().to_euler();
        assert!(euler_to_matrix(flipped).max_abs_diff(&g(0.7, PI, 0.2).to_matrix()) < 1e-12);
        assert_eq!(flipped.psi, 0.0);
    }

    #[test]
    fn inverse_gives_identity() {
        let a = g(0.4, 1.3, 2.9);
        let m = euler_to_matrix(a) * euler_to_matrix(a.inverse());
        assert!(m.max_abs_diff(&RotationMatrix::identity()) < 1e-14);
    }

    #[test]
    fn haar_weights_sum_to_one() {
        for d in 0..6 {
            let rule: HaarRule<f64> = haar_rule(d);
            let s: f64 = rule.nodes().iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn haar_integrates_cos_theta_squared() {
        let rule: HaarRule<f64> = haar_rule(1);
        let v = rule.integrate(|g| Complex::new(g.theta.cos().powi(2), 0.0));
        assert!((v.re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn xi3_and_eta3_on_exponentials() {
        let at = g(0.3, 1.1, 2.0);
        let opts = FieldOptions::default();
        let v = invariant_field_apply(Side::Left, Axis::Z, |x| Complex::new(0.0, x.psi).exp(), at, opts).unwrap();
        assert!((v - Complex::new(0.0, 1.0) * Complex::new(0.0, at.psi).exp()).norm() < 1e-9);
        let v = invariant_field_apply(Side::Right, Axis::Z, |x| Complex::new(0.0, x.phi).exp(), at, opts).unwrap();
        assert!((v + Complex::new(0.0, 1.0) * Complex::new(0.0, at.phi).exp()).norm() < 1e-9);
    }

    #[test]
    fn guard_rejects_poles() {
        let f = |_: EulerAngles<f64>| Complex::new(1.0, 0.0);
        let opts = FieldOptions::default();
        assert!(invariant_field_apply(Side::Left, Axis::X, f, g(0.0, 1e-4, 0.0), opts).is_err());
        assert!(casimir_apply(f, g(0.0, PI - 1e-4, 0.0), opts).is_err());
        let bad = FieldOptions { step: 0.0, guard: 1e-3 };
        assert!(invariant_field_apply(Side::Left, Axis::X, f, g(0.0, 1.0, 0.0), bad).is_err());
    }

    #[test]
    fn casimir_on_cos_theta() {
        let at = g(0.2, 0.9, 4.0);
        let v = casimir_apply(|x| Complex::new(x.theta.cos(), 0.0), at, casimir_options()).unwrap();
        assert!((v.re - 2.0 * at.theta.cos()).abs() < 1e-6);
        let c = casimir_apply(|_| Complex::new(1.0, 0.0), at, casimir_options()).unwrap();
        assert!(c.norm() < 1e-12);
    }
}

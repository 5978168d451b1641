use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use asymtop::so3::haar_rule;
use asymtop::wigner::{jacobi_poly, wigner_d, wigner_gram, wigner_matrix, wigner_small_d};
use asymtop::{EulerAngles, RepMatrix, WignerIndex};

fn factorial(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Explicit sum over `k` for `d^j_{mn}(theta)` in the convention where
/// `d^1_{10} = -sin(theta)/sqrt(2)`.
fn small_d_sum(j: i32, m: i32, n: i32, theta: f64) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    let pre = (factorial(j + m) * factorial(j - m) * factorial(j + n) * factorial(j - n)).sqrt();
    let mut acc = 0.0;
    for k in 0..=2 * j {
        let (a, b, cc, d) = (j + n - k, k, m - n + k, j - m - k);
        if a < 0 || cc < 0 || d < 0 {
            continue;
        }
        let sign = if (m - n + k) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * c.powi(2 * j + n - m - 2 * k) * s.powi(m - n + 2 * k)
            / (factorial(a) * factorial(b) * factorial(cc) * factorial(d));
    }
    pre * acc
}

fn angles() -> impl Strategy<Value = EulerAngles> {
    (0.0..TAU, 0.0..PI, 0.0..TAU).prop_map(|(a, b, c)| EulerAngles::new(a, b, c))
}

fn index() -> impl Strategy<Value = WignerIndex> {
    (0u32..=8).prop_flat_map(|j| {
        let jj = j as i32;
        (Just(j), -jj..=jj, -jj..=jj).prop_map(|(j, m, n)| WignerIndex::new(j, m, n).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn small_d_matches_explicit_sum(idx in index(), theta in 0.0..PI) {
        let got = wigner_small_d(idx, theta);
        let want = small_d_sum(idx.j as i32, idx.m, idx.n, theta);
        prop_assert!((got - want).abs() < 1e-11, "{idx:?}: {got} vs {want}");
    }

    #[test]
    fn unitarity(j in 0u32..=8, g in angles()) {
        let d = wigner_matrix(j, &g);
        prop_assert!((&d * &d.adjoint()).max_abs_diff(&RepMatrix::identity(j)) < 1e-10);
    }

    #[test]
    fn representation_property(j in 0u32..=6, g1 in angles(), g2 in angles()) {
        let lhs = wigner_matrix(j, &g1.compose(&g2));
        let rhs = &wigner_matrix(j, &g1) * &wigner_matrix(j, &g2);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn element_matches_matrix(idx in index(), g in angles()) {
        let m = wigner_matrix(idx.j, &g);
        prop_assert!((m.get(idx.m, idx.n) - wigner_d(idx, &g)).norm() < 1e-14);
    }

    #[test]
    fn inverse_is_adjoint(j in 0u32..=6, g in angles()) {
        let d = wigner_matrix(j, &g);
        let di = wigner_matrix(j, &g.inverse());
        prop_assert!(di.max_abs_diff(&d.adjoint()) < 1e-10);
    }

    #[test]
    fn jacobi_symmetry(n in 0u32..10, a in 0.0..4.0f64, b in 0.0..4.0f64, z in -1.0..1.0f64) {
        let lhs = jacobi_poly(n, a, b, -z);
        let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi_poly(n, b, a, z);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs.abs()));
    }
}

#[test]
fn orthogonality_with_exact_rule() {
    for j in 0..=5 {
        for jt in 0..=5 {
            let gram = wigner_gram(j, jt, &haar_rule::<f64>(j.max(jt))).unwrap();
            assert!(gram.defect() < 1e-10, "j {j} jt {jt}: {}", gram.defect());
        }
    }
}

#[test]
fn too_coarse_rule_is_refused() {
    assert!(wigner_gram(3, 2, &haar_rule::<f64>(2)).is_err());
}

#[test]
fn low_order_values() {
    let g = EulerAngles::new(0.2, 0.9, 1.4);
    let d00 = wigner_d(WignerIndex::new(1, 0, 0).unwrap(), &g);
    assert!((d00 - Complex64::new(0.9f64.cos(), 0.0)).norm() < 1e-15);
    assert!(WignerIndex::new(0, 1, 0).is_err());
}

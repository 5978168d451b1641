use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use asymtop::lambda_rep::{evaluate_series, inner_product};
use asymtop::spectra::{
    h_matrix_lambda, h_matrix_lambda_ode, h_matrix_wigner, lambda_eigenbasis, lame_polynomial, lame_recurrence,
    lame_spectrum, phi_from_lame, reduced_ode_residual, rho_map, spectrum, Parity,
};
use asymtop::{Error, LameClass, Route, TopParams};

fn strict() -> impl Strategy<Value = TopParams> {
    (0.2..1.5f64, 0.1..2.0f64, 0.1..2.0f64).prop_map(|(c, db, da)| TopParams::new(c + db + da, c + db, c).unwrap())
}

fn trace(m: &asymtop::RepMatrix) -> f64 {
    m.trace().re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn routes_agree(p in strict(), j in 0u32..=10) {
        let tables: Vec<_> = Route::ALL.iter().map(|&r| spectrum(j, &p, r).unwrap()).collect();
        for t in &tables {
            prop_assert_eq!(t.len(), 2 * j as usize + 1);
            prop_assert!(t.windows(2).all(|w| w[0].energy <= w[1].energy));
        }
        for a in 0..3 {
            for b in a + 1..3 {
                for (x, y) in tables[a].iter().zip(&tables[b]) {
                    prop_assert!((x.energy - y.energy).abs() <= 1e-8 * x.energy.abs().max(p.a));
                }
            }
        }
    }

    #[test]
    fn sum_rule_matches_matrix_trace(p in strict(), j in 0u32..=10) {
        let tr = trace(&h_matrix_wigner(j, &p));
        let jf = j as f64;
        let closed = (p.a + p.b + p.c) * jf * (jf + 1.0) * (2.0 * jf + 1.0) / 3.0;
        prop_assert!((tr - closed).abs() <= 1e-10 * closed.max(1.0));
        for route in Route::ALL {
            let s: f64 = spectrum(j, &p, route).unwrap().iter().map(|l| l.energy).sum();
            prop_assert!((s - closed).abs() <= 1e-10 * closed.max(1.0), "{route}: {s} vs {closed}");
        }
    }

    #[test]
    fn lame_class_sizes(p in strict(), j in 0u32..=8) {
        let levels = lame_spectrum(j, &p).unwrap();
        for class in LameClass::ALL {
            let n = levels.iter().filter(|l| l.lame_class == Some(class)).count();
            prop_assert_eq!(n, class.size(j));
        }
    }

    #[test]
    fn reduced_equation_residual(p in strict(), j in 0u32..=8, qs in prop::collection::vec(0.0..PI, 20)) {
        let basis = lambda_eigenbasis(j, &p);
        for (state, &e) in basis.states.iter().zip(&basis.energies) {
            let size: f64 = state.coeffs.iter().map(|c| c.norm()).sum();
            let scale = p.a * ((j * (j + 1)) as f64 + 1.0) * size;
            for &q in &qs {
                let r = reduced_ode_residual(state, e, &p, Complex64::new(q, 0.0));
                prop_assert!(r < 1e-8 * scale, "residual {r}, scale {scale}");
            }
        }
    }

    #[test]
    fn eigenbasis_is_gram_orthonormal(p in strict(), j in 0u32..=8) {
        let basis = lambda_eigenbasis(j, &p);
        let d = (2 * j + 1) as f64;
        for (a, u) in basis.states.iter().enumerate() {
            for (b, v) in basis.states.iter().enumerate() {
                let want = if a == b { d } else { 0.0 };
                prop_assert!((inner_product(u, v).unwrap() - want).norm() < 1e-9 * d);
            }
        }
    }

    #[test]
    fn parity_of_states(p in strict(), j in 0u32..=8) {
        let basis = lambda_eigenbasis(j, &p);
        let jj = j as i32;
        for (state, parity) in basis.states.iter().zip(&basis.parities) {
            let sign = if *parity == Parity::Even { 1.0 } else { -1.0 };
            for n in 1..=jj {
                prop_assert!((state.coeff(-n) - state.coeff(n) * sign).norm() < 1e-10);
            }
        }
    }

    /// `|Phi(q)| = const * |(2(A-C)(B-C) / (rho - C))^{j/2} Lambda(rho(q))|` along the real axis.
    #[test]
    fn lame_solution_maps_to_phi(p in strict(), j in 0u32..=6) {
        let levels = lame_spectrum(j, &p).unwrap();
        let basis = lambda_eigenbasis(j, &p);
        for l in &levels {
            let k = (l.s + j as i32) as usize;
            if basis.is_degenerate(l.s, p.a) {
                continue;
            }
            let series = lame_polynomial(l.lame_class.unwrap(), j, l.energy, &p).unwrap();
            let (phi, leak) = phi_from_lame(&series);
            prop_assert!(leak < 1e-9 * (1.0 + phi.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)));
            let mut ratios = Vec::new();
            for q in [0.21, 0.53, 0.94, 1.27, 2.02, 2.71] {
                let rho = rho_map(Complex64::new(q, 0.0), &p).unwrap();
                let pre = (Complex64::new(2.0 * (p.a - p.c) * (p.b - p.c), 0.0) / (rho - p.c)).powf(j as f64 / 2.0);
                let lam = (pre * series.eval(rho)).norm();
                let f = evaluate_series(&basis.states[k].coeffs, j, Complex64::new(q, 0.0)).norm();
                if lam > 1e-6 {
                    ratios.push(f / lam);
                }
                let g = evaluate_series(&phi.coeffs, j, Complex64::new(q, 0.0)).norm();
                prop_assert!((f - g).abs() < 1e-7 * (1.0 + f), "j {} s {}: {} vs {}", j, l.s, f, g);
            }
            let first = ratios[0];
            for r in &ratios {
                prop_assert!((r / first - 1.0).abs() < 1e-8, "ratios {:?}", ratios);
            }
        }
    }
}

#[test]
fn ode_build_equals_operator_build() {
    let p = TopParams::new(3.7, 1.9, 0.4).unwrap();
    for j in 0..=10 {
        let (ode, leak) = h_matrix_lambda_ode(j, &p);
        assert!(leak < 1e-12);
        assert!(ode.max_abs_diff(&h_matrix_lambda(j, &p)) < 1e-10 * p.a * (j * j + 1) as f64);
    }
}

#[test]
fn degenerate_top_rejected_by_lame_route() {
    let p = TopParams::new(2.0, 2.0, 1.0).unwrap();
    assert!(matches!(spectrum(2, &p, Route::Lame), Err(Error::DegenerateParams(_))));
    assert!(matches!(lame_recurrence(LameClass::Bare, 2, &p), Err(Error::DegenerateParams(_))));
    let w = spectrum(2, &p, Route::Wigner).unwrap();
    let l = spectrum(2, &p, Route::Lambda).unwrap();
    for (a, b) in w.iter().zip(&l) {
        assert!((a.energy - b.energy).abs() < 1e-10);
    }
}

#[test]
fn symmetric_top_levels() {
    // A = B: E = A j(j+1) + (C - A) k^2 for k = 0..j, each |k| > 0 twice.
    let p = TopParams::new(2.5, 2.5, 1.0).unwrap();
    for j in 0..=6u32 {
        let mut want: Vec<f64> = (-(j as i32)..=j as i32)
            .map(|k| p.a * (j * (j + 1)) as f64 + (p.c - p.a) * (k * k) as f64)
            .collect();
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (l, w) in spectrum(j, &p, Route::Wigner).unwrap().iter().zip(&want) {
            assert!((l.energy - w).abs() < 1e-10 * w.max(1.0));
        }
    }
}

#[test]
fn invalid_parameters() {
    assert!(matches!(TopParams::new(1.0, 2.0, 0.5), Err(Error::InvalidParams(_))));
    assert!(TopParams::new(f64::NAN, 1.0, 0.5).is_err());
    assert!(TopParams::new(2.0, 1.0, -0.5).is_err());
}

#[test]
fn spin_one_values_for_321() {
    let p = TopParams::new(3.0, 2.0, 1.0).unwrap();
    let e: Vec<f64> = spectrum(1, &p, Route::Lame).unwrap().iter().map(|l| l.energy).collect();
    for (x, w) in e.iter().zip([3.0, 4.0, 5.0]) {
        assert!((x - w).abs() < 1e-12);
    }
    let e2: Vec<f64> = spectrum(2, &p, Route::Wigner).unwrap().iter().map(|l| l.energy).collect();
    let r = 2.0 * 3f64.sqrt();
    for (x, w) in e2.iter().zip([12.0 - r, 9.0, 12.0, 15.0, 12.0 + r]) {
        assert!((x - w).abs() < 1e-11, "{x} vs {w}");
    }
}

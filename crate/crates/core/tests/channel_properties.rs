use std::f64::consts::{FRAC_PI_3, PI, SQRT_2};

use hyperscatter::channels::{
    chi_full, chi_tilde, chi_tilde_dalpha, from_hyperspherical, lambda0_large, lambda0_small, normalization_b,
    normalization_b_quadrature, solve_lambda, to_hyperspherical,
};
use proptest::prelude::*;

/// 10^4-panel trapezoid with the leading Euler-Maclaurin end correction;
/// the bare rule is only good to about `h^2 lambda^2 / 12`.
fn trapezoid_b(n: usize, lambda: f64) -> f64 {
    let m = 10_000;
    let h = FRAC_PI_3 / m as f64;
    let f = |a: f64| chi_tilde(n, lambda, a).powi(2);
    let df = |a: f64| 2.0 * chi_tilde(n, lambda, a) * chi_tilde_dalpha(n, lambda, a);
    let inner: f64 = (1..m).map(|i| f(i as f64 * h)).sum();
    h * (0.5 * (f(0.0) + f(FRAC_PI_3)) + inner) - h * h / 12.0 * (df(FRAC_PI_3) - df(0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hypercoordinate_round_trip(
        x1 in -50.0f64..50.0,
        x2 in -50.0f64..50.0,
        x3 in -50.0f64..50.0,
    ) {
        let h = to_hyperspherical(x1, x2, x3);
        let back = from_hyperspherical(&h);
        let scale = x1.abs().max(x2.abs()).max(x3.abs()).max(1.0);
        for (a, b) in back.iter().zip([x1, x2, x3]) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{:?} -> {:?}", (x1, x2, x3), back);
        }
        prop_assert!(h.alpha > -PI && h.alpha <= PI);
    }

    #[test]
    fn root_lies_in_bracket_with_jump_condition(n in 0usize..3, log_cr in -6.0f64..4.0) {
        let cr = 10f64.powf(log_cr);
        let ev = solve_lambda(n, cr).unwrap();
        let base = 3.0 * n as f64;
        prop_assert!(ev.lambda > base && ev.lambda < base + 3.0);
        // chi'(0+) - chi'(0-) = sqrt(2) cR chi(0)
        let jump = chi_tilde_dalpha(n, ev.lambda, 0.0) - chi_tilde_dalpha(n, ev.lambda, -0.0);
        let rhs = SQRT_2 * cr * chi_tilde(n, ev.lambda, 0.0);
        let scale = jump.abs().max(rhs.abs()).max(1.0);
        prop_assert!((jump - rhs).abs() <= 1e-10 * scale, "n = {}, cR = {}: {} vs {}", n, cr, jump, rhs);
    }

    #[test]
    fn normalization_closed_form(n in 0usize..3, lambda_frac in 0.001f64..0.999) {
        let lambda = 3.0 * n as f64 + 3.0 * lambda_frac;
        let closed = normalization_b(n, lambda);
        let quad = normalization_b_quadrature(n, lambda).unwrap();
        prop_assert!((closed - quad).abs() <= 1e-8 * closed);
        prop_assert!((closed - trapezoid_b(n, lambda)).abs() <= 1e-8 * closed);
    }

    #[test]
    fn full_eigenfunction_symmetry(log_cr in -4.0f64..3.0, n in 0usize..3) {
        let lambda = solve_lambda(n, 10f64.powf(log_cr)).unwrap().lambda;
        for i in 0..1000 {
            let a = -PI + 2.0 * PI * (i as f64 + 0.5) / 1000.0;
            let v = chi_full(n, lambda, a);
            prop_assert!((v - chi_full(n, lambda, -a + 2.0 * PI / 3.0)).abs() <= 1e-12);
            prop_assert!((v - chi_full(n, lambda, -a)).abs() <= 1e-12);
        }
    }
}

#[test]
fn ground_channel_is_monotone() {
    let mut prev = 0.0;
    for i in 0..=600 {
        let cr = 10f64.powf(-3.0 + 6.0 * i as f64 / 600.0);
        let l = solve_lambda(0, cr).unwrap().lambda;
        assert!(l > prev, "lambda_0 not increasing at cR = {cr}");
        prev = l;
    }
}

#[test]
fn asymptotic_forms() {
    let small = solve_lambda(0, 1e-4).unwrap().lambda;
    assert!((small / lambda0_small(1e-4) - 1.0).abs() < 1e-3);
    let large = solve_lambda(0, 1e4).unwrap().lambda;
    assert!((large / lambda0_large(1e4) - 1.0).abs() < 1e-3);
}

#[test]
fn eigenfunction_solves_free_equation_off_boundaries() {
    // -chi'' = lambda^2 chi away from alpha = nu pi / 3
    let h = 1e-4;
    for &cr in &[0.01, 1.0, 50.0] {
        for n in 0..3 {
            let lambda = solve_lambda(n, cr).unwrap().lambda;
            for i in 1..60 {
                let a = -PI + 2.0 * PI * i as f64 / 60.0 + 0.013;
                let nearest = (a / FRAC_PI_3).round() * FRAC_PI_3;
                if (a - nearest).abs() < 10.0 * h {
                    continue;
                }
                let d2 = (chi_full(n, lambda, a + h) - 2.0 * chi_full(n, lambda, a) + chi_full(n, lambda, a - h)) / (h * h);
                let res = (-d2 - lambda * lambda * chi_full(n, lambda, a)).abs();
                assert!(res <= 1e-6 * lambda.powi(2).max(1.0), "n = {n}, cR = {cr}, alpha = {a}: {res:e}");
            }
        }
    }
}

#[test]
fn coordinate_examples() {
    let h = to_hyperspherical(1.0, -1.0, 0.0);
    assert!(h.x.abs() < 1e-15);
    assert!((h.r - SQRT_2).abs() < 1e-15);
    assert!((h.alpha - PI / 2.0).abs() < 1e-15);
    let swapped = to_hyperspherical(-1.0, 1.0, 0.0);
    assert!((swapped.alpha + h.alpha).abs() < 1e-15);
}

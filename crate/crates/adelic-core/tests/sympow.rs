use std::f64::consts::LN_2;

use adelic_core::bundle::{degree, monomials, sym_power_matrix, AdelicBundle};
use adelic_core::rational::{q, qi, QMatrix};
use adelic_core::slopes::{mu_max, slope};
use adelic_core::sympow::{
    det_sympow_identity_check, gamma_nl, gamma_rate, harmonic, inverse_norm_bound_check,
    siegel_check, sympow_mumax_check, sympow_slope_check,
};
use adelic_core::verify::instances::{random_hermitian_bundle, random_invertible_matrix, rng};
use num_traits::Signed;
use proptest::prelude::*;
use rand::Rng;
use statrs::function::gamma::ln_gamma;

fn gram(d: &[i64]) -> AdelicBundle {
    AdelicBundle::hermitian(
        QMatrix::identity(d.len()),
        QMatrix::diag(&d.iter().map(|&x| qi(x)).collect::<Vec<_>>()),
    )
    .unwrap()
}

/// `log γ_{n,ℓ}` by listing every multi-index.
fn gamma_direct(n: usize, l: usize) -> f64 {
    let mons = monomials(n, l);
    let lf = |k: usize| ln_gamma(k as f64 + 1.0);
    let total: f64 = mons
        .iter()
        .map(|i| lf(l) - i.iter().map(|&k| lf(k)).sum::<f64>())
        .sum();
    total / mons.len() as f64
}

#[test]
fn gamma_examples() {
    for l in 0..10 {
        assert_eq!(gamma_nl(1, l).unwrap().log_value, 0.0);
    }
    let g = gamma_nl(2, 2).unwrap();
    assert!((g.log_value - LN_2 / 3.0).abs() < 1e-15);
    assert_eq!(g.count, 3);
    assert!((g.exact_log_numerator - LN_2).abs() < 1e-15);
    let rate = gamma_rate(2, 64).unwrap();
    assert!((rate - 0.5).abs() < 0.15 * 0.5, "rate {rate}");
    assert!(gamma_nl(0, 2).is_err());
    assert!(gamma_nl(2000, 20).is_err());
}

#[test]
fn gamma_matches_direct_listing() {
    for n in 1..=4 {
        for l in 0..=30 {
            let g = gamma_nl(n, l).unwrap();
            assert!(
                (g.log_value - gamma_direct(n, l)).abs() < 1e-10,
                "n={n} l={l}"
            );
            assert!(g.log_value >= 0.0);
        }
    }
}

#[test]
fn gamma_rate_approaches_harmonic_limit() {
    for n in 1..=4 {
        let limit = harmonic(n) - 1.0;
        for l in 1..=64 {
            let r = gamma_rate(n, l).unwrap();
            assert!(r >= 0.0 && r <= limit + 0.2, "n={n} l={l} rate={r}");
        }
        if n > 1 {
            let (a, b, c) = (
                gamma_rate(n, 8).unwrap(),
                gamma_rate(n, 24).unwrap(),
                gamma_rate(n, 64).unwrap(),
            );
            assert!(a < b && b < c, "n={n}: {a} {b} {c}");
            assert!((limit - c).abs() < (limit - a).abs());
        }
    }
}

#[test]
fn det_sympow_examples() {
    assert!(
        det_sympow_identity_check(&QMatrix::identity(3), 2)
            .unwrap()
            .pass
    );
    let m = QMatrix::diag(&[qi(2), qi(3)]);
    let s = sym_power_matrix(&m, 2).unwrap();
    assert_eq!(s, QMatrix::diag(&[qi(4), qi(6), qi(9)]));
    assert_eq!(s.det().unwrap(), qi(216));
    assert!(det_sympow_identity_check(&m, 2).unwrap().pass);
    let singular = QMatrix::from_i64(&[vec![1, 2], vec![2, 4]]);
    assert!(det_sympow_identity_check(&singular, 2).is_err());
}

#[test]
fn det_sympow_on_random_matrices() {
    let mut g = rng(21);
    for case in 0..100 {
        let n = 1 + case % 3;
        let l = 1 + (case / 3) % 3;
        let m = random_invertible_matrix(&mut g, n, 3);
        let r = det_sympow_identity_check(&m, l).unwrap();
        assert!(r.pass, "case {case}");
        // Independent oracle: S^ℓ is multiplicative, so S^ℓ(M)·S^ℓ(M⁻¹) = I.
        let prod = sym_power_matrix(&m, l)
            .unwrap()
            .mul(&sym_power_matrix(&m.inverse().unwrap(), l).unwrap())
            .unwrap();
        assert_eq!(prod, QMatrix::identity(prod.rows()));
    }
}

#[test]
fn inverse_norm_examples() {
    let r = inverse_norm_bound_check(&QMatrix::identity(2)).unwrap();
    assert!(r.pass);
    let r = inverse_norm_bound_check(&QMatrix::diag(&[qi(1), qi(2)])).unwrap();
    assert!(r.pass);
    let d = &r.details[0];
    assert!((d.lhs - 0.5 * (1.25f64).ln()).abs() < 1e-15);
    assert!((d.rhs - (0.5 * 5f64.ln() - LN_2)).abs() < 1e-15);
    let r = inverse_norm_bound_check(&QMatrix::diag(&[qi(1), q(1, 2)])).unwrap();
    assert!(r.pass);
    let d = r
        .details
        .iter()
        .find(|d| d.label.starts_with("2-adic"))
        .unwrap();
    // ‖M⁻¹‖₂ = 1 and ‖M‖₂ = |det M|₂ = 2: both sides equal log 2.
    assert!((d.lhs - LN_2).abs() < 1e-15 && (d.rhs - LN_2).abs() < 1e-15);
    assert!(inverse_norm_bound_check(&QMatrix::zeros(2, 2)).is_err());
}

#[test]
fn inverse_norm_on_random_matrices() {
    let mut g = rng(22);
    for case in 0..60 {
        let n = 1 + case % 4;
        let mut m = random_invertible_matrix(&mut g, n, 5);
        let den = g.gen_range(1..=6);
        m = m.scale(&q(1, den));
        assert!(inverse_norm_bound_check(&m).unwrap().pass, "case {case}");
    }
}

#[test]
fn sympow_slope_examples() {
    let r = sympow_slope_check(&AdelicBundle::trivial(2), 2).unwrap();
    assert!(r.pass);
    assert!((r.lhs - LN_2 / 6.0).abs() < 1e-12);
    let line = gram(&[3]);
    for l in 1..5 {
        let s = line.symmetric(l).unwrap();
        assert!((slope(&s).unwrap() - l as f64 * slope(&line).unwrap()).abs() < 1e-12);
        assert!(sympow_slope_check(&line, l).unwrap().pass);
    }
    assert!(sympow_slope_check(&gram(&[1, 4]), 2).unwrap().pass);
}

#[test]
fn sympow_degree_of_trivial_bundle_is_half_the_log_numerator() {
    for n in 1..=3 {
        for l in 1..=4 {
            let s = AdelicBundle::trivial(n).symmetric(l).unwrap();
            let g = gamma_nl(n, l).unwrap();
            assert!((degree(&s).unwrap() - 0.5 * g.exact_log_numerator).abs() < 1e-10);
        }
    }
}

#[test]
fn sympow_slope_on_random_bundles() {
    let mut g = rng(23);
    for case in 0..50 {
        let n = 1 + case % 3;
        let l = 1 + (case / 3) % 3;
        let b = random_hermitian_bundle(&mut g, n, 8);
        let r = sympow_slope_check(&b, l).unwrap();
        assert!(r.pass, "case {case}: {r:?}");
    }
}

#[test]
fn sympow_mumax_examples() {
    let r = sympow_mumax_check(&AdelicBundle::trivial(2), 2).unwrap();
    assert!(r.pass);
    let s2 = AdelicBundle::trivial(2).symmetric(2).unwrap();
    assert!((mu_max(&s2).unwrap() - 0.5 * LN_2).abs() < 1e-12);
    let r = sympow_mumax_check(&gram(&[5]), 3).unwrap();
    assert!(r.pass);
    assert!(r.details[0].rhs.abs() < 1e-12);
    assert!(sympow_mumax_check(&gram(&[1, 4]), 2).unwrap().pass);
}

#[test]
fn sympow_mumax_on_random_bundles() {
    let mut g = rng(24);
    for case in 0..12 {
        let (n, l) = if case % 3 == 2 {
            (3, 2)
        } else {
            (2, 2 + case % 2)
        };
        let b = random_hermitian_bundle(&mut g, n, 6);
        assert!(sympow_mumax_check(&b, l).unwrap().pass, "case {case}");
    }
}

#[test]
fn siegel_examples() {
    for n in 1..=4 {
        let r = siegel_check(&AdelicBundle::trivial(n)).unwrap();
        assert!(r.pass);
        assert!(r.lhs.abs() < 1e-12);
    }
    let r = siegel_check(&gram(&[1, 4])).unwrap();
    assert!(r.pass);
    assert!(r.lhs.abs() < 1e-12 && (r.rhs - LN_2).abs() < 1e-12);
}

#[test]
fn siegel_witness_on_random_bundles() {
    let mut g = rng(25);
    for case in 0..30 {
        let b = random_hermitian_bundle(&mut g, 3, 8);
        let r = siegel_check(&b).unwrap();
        assert!(r.pass, "case {case}");
        let w: Vec<Vec<i64>> = serde_json::from_value(r.instance["witness"].clone()).unwrap();
        let m = QMatrix::from_cols(
            &w.iter()
                .map(|c| adelic_core::rational::q_vec(c))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(m.det().unwrap().abs(), qi(1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn gamma_is_nonnegative_and_bounded(n in 1usize..5, l in 0usize..40) {
        let g = gamma_nl(n, l).unwrap();
        prop_assert!(g.log_value >= 0.0);
        prop_assert!(g.log_value <= l as f64 * (n as f64).ln() + 1e-12);
    }
}

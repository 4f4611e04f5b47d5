use std::f64::consts::PI;

use adelic_core::bundle::AdelicBundle;
use adelic_core::convexgeom::ConvexBody;
use adelic_core::minima::{
    adelic_refinement, borek_check, borek_constant, borek_ratio, minima_bracket_check,
    minkowski_second_check, successive_minima, LATTICE_MINIMA_FLAG,
};
use adelic_core::rational::{q_vec, qi, to_f64, QMatrix, Q};
use adelic_core::verify::instances::{random_body_bundle, random_hermitian_bundle, rng};
use rand::Rng;
use statrs::function::gamma::ln_gamma;

fn gram(d: &[i64]) -> AdelicBundle {
    AdelicBundle::hermitian(
        QMatrix::identity(d.len()),
        QMatrix::diag(&d.iter().map(|&x| qi(x)).collect::<Vec<_>>()),
    )
    .unwrap()
}

#[test]
fn minima_examples() {
    let m = successive_minima(&AdelicBundle::trivial(2)).unwrap();
    assert_eq!(m.lambdas, vec![1.0, 1.0]);
    assert_eq!(m.semantics_flag, LATTICE_MINIMA_FLAG);
    let m = successive_minima(&gram(&[1, 4])).unwrap();
    assert_eq!(m.lambdas, vec![1.0, 2.0]);
    assert_eq!(m.witnesses, vec![vec![1, 0], vec![0, 1]]);
    let cube = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    let m = successive_minima(&cube).unwrap();
    assert_eq!(m.lambdas, vec![1.0, 1.0]);
}

/// `λ_i` by scanning a box of integer vectors and taking independent ones greedily.
fn box_minima(b: &AdelicBundle, width: i64) -> Vec<f64> {
    let n = b.rank();
    let a = b.lattice();
    let mut all: Vec<(f64, Vec<i64>)> = Vec::new();
    let total = (2 * width + 1).pow(n as u32);
    for code in 0..total {
        let mut k = code;
        let x: Vec<i64> = (0..n)
            .map(|_| {
                let d = k % (2 * width + 1) - width;
                k /= 2 * width + 1;
                d
            })
            .collect();
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        let v: Vec<f64> = a.mul_vec(&q_vec(&x)).unwrap().iter().map(to_f64).collect();
        all.push((b.arch_norm(&v), x));
    }
    all.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut basis: Vec<Vec<Q>> = Vec::new();
    let mut out = Vec::new();
    for (norm, x) in all {
        let mut trial = basis.clone();
        trial.push(q_vec(&x));
        if QMatrix::from_cols(&trial).unwrap().rank() == trial.len() {
            basis = trial;
            out.push(norm);
        }
    }
    out
}

#[test]
fn minima_agree_with_box_scan() {
    let mut g = rng(8);
    for case in 0..40 {
        let n = 2 + case % 2;
        let b = if case % 4 == 3 {
            random_body_bundle(&mut g, n)
        } else {
            random_hermitian_bundle(&mut g, n, 8)
        };
        let m = successive_minima(&b).unwrap();
        let oracle = box_minima(&b, 6);
        for i in 0..n {
            assert!(
                (m.lambdas[i] - oracle[i]).abs() < 1e-9 * oracle[i].max(1.0),
                "case {case}: {:?} vs {oracle:?}",
                m.lambdas
            );
        }
    }
}

#[test]
fn witnesses_are_independent_and_realize_the_minima() {
    let mut g = rng(9);
    for case in 0..30 {
        let n = 2 + case % 3;
        let b = if case % 3 == 2 && n <= 3 {
            random_body_bundle(&mut g, n)
        } else {
            random_hermitian_bundle(&mut g, n, 8)
        };
        let m = successive_minima(&b).unwrap();
        let w =
            QMatrix::from_cols(&m.witnesses.iter().map(|x| q_vec(x)).collect::<Vec<_>>()).unwrap();
        assert_eq!(w.rank(), n);
        assert!(m.lambdas.windows(2).all(|p| p[0] <= p[1]));
        for (l, x) in m.lambdas.iter().zip(&m.witnesses) {
            let v: Vec<f64> = b
                .lattice()
                .mul_vec(&q_vec(x))
                .unwrap()
                .iter()
                .map(to_f64)
                .collect();
            assert!((b.arch_norm(&v) - l).abs() < 1e-12 * l.max(1.0));
        }
    }
}

#[test]
fn minkowski_examples() {
    // Trivial rank 2: 1 ≤ 4/π and 2 ≤ π.
    let r = minkowski_second_check(&AdelicBundle::trivial(2)).unwrap();
    assert!(r.pass);
    assert!((r.details[0].rhs - (4.0 / PI).ln()).abs() < 1e-12);
    // G = diag(1, 4): λ₁λ₂ = 2, vol = π/2, covol = 1.
    let r = minkowski_second_check(&gram(&[1, 4])).unwrap();
    assert!(r.pass);
    assert!((r.details[0].lhs - 2f64.ln()).abs() < 1e-12);
    assert!((r.details[0].rhs - (8.0 / PI).ln()).abs() < 1e-12);
    assert!((r.details[1].rhs - PI.ln()).abs() < 1e-12);
    assert!((r.details[1].lhs - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn minkowski_bounds_on_random_bundles() {
    let mut g = rng(10);
    for case in 0..100 {
        let n = 1 + case % 4;
        let b = random_hermitian_bundle(&mut g, n, 8);
        let r = minkowski_second_check(&b).unwrap();
        assert!(r.pass, "case {case}: {r:?}");
    }
    for case in 0..10 {
        let b = random_body_bundle(&mut g, 2 + case % 2);
        assert!(minkowski_second_check(&b).unwrap().pass);
    }
}

#[test]
fn borek_examples() {
    assert!((borek_constant(2) - (4.0 / PI).ln()).abs() < 1e-12);
    let r = borek_check(&AdelicBundle::trivial(2)).unwrap();
    assert!(r.pass);
    let r = borek_check(&gram(&[1, 4])).unwrap();
    assert!(r.pass);
    // i = 2: μ_2 + log λ_2 = −log 2 + log 2 = 0.
    let d = r.detail("0 <= mu_2 + log lambda_2").unwrap();
    assert!(d.rhs.abs() < 1e-12);
}

#[test]
fn borek_constant_trend() {
    for n in [4usize, 8, 16, 32] {
        let closed =
            n as f64 * 2f64.ln() - (0.5 * n as f64 * PI.ln() - ln_gamma(1.0 + n as f64 / 2.0));
        assert!((borek_constant(n) - closed).abs() < 1e-10);
    }
    assert!(
        borek_ratio(4) < borek_ratio(8)
            && borek_ratio(8) < borek_ratio(16)
            && borek_ratio(16) < borek_ratio(32)
    );
    // C(n) = (n/2) ln n − c·n + O(ln n), so the ratio tends to 1 from below like 1 − 2c/ln n.
    let c = 0.5 * (2.0 * PI * std::f64::consts::E).ln() - 2f64.ln();
    for n in [256usize, 1024, 4096] {
        let approx = 1.0 - 2.0 * c / (n as f64).ln();
        assert!((borek_ratio(n) - approx).abs() < 0.02, "n = {n}");
        assert!(borek_ratio(n) < 1.0);
    }
}

#[test]
fn borek_on_random_bundles() {
    let mut g = rng(12);
    for case in 0..60 {
        let n = 1 + case % 4;
        let b = random_hermitian_bundle(&mut g, n, 8);
        assert!(borek_check(&b).unwrap().pass, "case {case}");
    }
    for case in 0..6 {
        let b = random_body_bundle(&mut g, 2 + case % 2);
        let r = borek_check(&b).unwrap();
        assert!(r.pass);
        assert!(r.sound_direction_only);
    }
}

#[test]
fn sub_bundle_minima_dominate() {
    let mut g = rng(13);
    for _ in 0..30 {
        let n = 3;
        let b = random_hermitian_bundle(&mut g, n, 8);
        let s: Vec<Vec<Q>> = (0..2)
            .map(|_| (0..n).map(|_| qi(g.gen_range(-2..=2))).collect())
            .collect();
        let s = QMatrix::from_cols(&s).unwrap();
        if s.rank() != 2 {
            continue;
        }
        let sub = b.sub(&s).unwrap();
        let ms = successive_minima(&sub).unwrap();
        let m = successive_minima(&b).unwrap();
        for i in 0..2 {
            assert!(ms.lambdas[i] >= m.lambdas[i] * (1.0 - 1e-12));
        }
    }
}

#[test]
fn hermitian_companions_bracket_body_minima() {
    let mut g = rng(14);
    for case in 0..12 {
        let b = random_body_bundle(&mut g, 2 + case % 2);
        let r = minima_bracket_check(&b).unwrap();
        assert!(r.pass, "case {case}: {r:?}");
    }
    let cube = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    assert!(minima_bracket_check(&cube).unwrap().pass);
}

#[test]
fn finite_rescalings_do_not_lower_minima() {
    let mut g = rng(15);
    for _ in 0..3 {
        let b = random_hermitian_bundle(&mut g, 2, 8);
        let r = adelic_refinement(&b).unwrap();
        assert!(!r.improved);
        for (a, l) in r.best.iter().zip(&r.lattice) {
            assert!((a - l).abs() < 1e-9 * l);
        }
    }
}

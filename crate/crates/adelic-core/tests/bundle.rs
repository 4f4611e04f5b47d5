use std::collections::BTreeSet;
use std::f64::consts::PI;

use adelic_core::bundle::height::dominated_on;
use adelic_core::bundle::io::{parse_bundle, write_bundle};
use adelic_core::bundle::{
    degree, degree_lp_formula, euler_characteristic, height_map, height_vector, kappa_bracket,
    lp_degree_asymptotics, monomials, scalar_extension, scalar_extension_check, sym_power_gram,
    AdelicBundle,
};
use adelic_core::convexgeom::{ball_log_volume, log_volume, ConvexBody};
use adelic_core::lattice::{big, enumerate, gcd_vec};
use adelic_core::places::Idele;
use adelic_core::rational::{q, q_vec, qi, to_f64, QMatrix, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

fn herm(a: &[Vec<i64>], g: &[Vec<i64>]) -> AdelicBundle {
    AdelicBundle::hermitian(QMatrix::from_i64(a), QMatrix::from_i64(g)).unwrap()
}

fn diag(d: &[Q]) -> QMatrix {
    QMatrix::diag(d)
}

fn random_gram(n: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    loop {
        let b = QMatrix::from_vec(
            n,
            n,
            (0..n * n).map(|_| qi(rng.gen_range(-2..=2))).collect(),
        )
        .unwrap();
        let g = b
            .transpose()
            .mul(&b)
            .unwrap()
            .add(&QMatrix::identity(n))
            .unwrap();
        if g.entries().iter().all(|x| x <= &qi(8) && x >= &qi(-8)) {
            return g;
        }
    }
}

fn random_lattice(n: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    loop {
        let a = QMatrix::from_vec(
            n,
            n,
            (0..n * n)
                .map(|_| q(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
                .collect(),
        )
        .unwrap();
        if !a.det().unwrap().is_zero() {
            return a;
        }
    }
}

fn random_bundle(n: usize, rng: &mut ChaCha8Rng) -> AdelicBundle {
    AdelicBundle::hermitian(random_lattice(n, rng), random_gram(n, rng)).unwrap()
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    let mut u = QMatrix::identity(n);
    for _ in 0..6 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = qi(rng.gen_range(-2..=2));
        let mut e = QMatrix::identity(n);
        e[(i, j)] = c;
        u = u.mul(&e).unwrap();
    }
    u
}

#[test]
fn finite_norm_examples() {
    let t = AdelicBundle::trivial(2);
    assert_eq!(t.finite_norm(&q_vec(&[2, 4]), 2).unwrap(), q(1, 2));
    assert_eq!(t.finite_norm(&q_vec(&[1, 0]), 7).unwrap(), Q::one());
    let b = AdelicBundle::hermitian(diag(&[q(1, 2), qi(1)]), QMatrix::identity(2)).unwrap();
    assert_eq!(b.finite_norm(&[q(1, 2), qi(0)], 2).unwrap(), Q::one());
    assert!(t.finite_norm(&q_vec(&[0, 0]), 2).is_err());
}

#[test]
fn degree_examples() {
    assert_eq!(degree(&AdelicBundle::trivial(3)).unwrap(), 0.0);
    let b = herm(&[vec![1, 0], vec![0, 1]], &[vec![1, 0], vec![0, 4]]);
    assert!((degree(&b).unwrap() + 2f64.ln()).abs() < 1e-15);
    let b = AdelicBundle::hermitian(diag(&[q(1, 2), qi(1)]), QMatrix::identity(2)).unwrap();
    assert!((degree(&b).unwrap() - 2f64.ln()).abs() < 1e-15);
    let cube = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    assert!((degree(&cube).unwrap() - (4.0 / PI).ln()).abs() < 1e-12);
}

#[test]
fn lp_degree_formula_examples() {
    for n in 1..=8 {
        let d = degree_lp_formula(n, f64::INFINITY, 0, 1);
        let log_fact = ln_gamma(n as f64 + 1.0);
        // Normalized by [Q(i):Q] = 2.
        assert!((d.definitional / 2.0 - 0.5 * log_fact).abs() < 1e-12);
        assert!((d.printed - log_fact).abs() < 1e-12);
    }
    assert!(degree_lp_formula(2, 2.0, 1, 0).definitional.abs() < 1e-12);
    assert!((degree_lp_formula(2, f64::INFINITY, 1, 0).printed + PI.ln()).abs() < 1e-12);
    for n in 1..=6 {
        for p in [1.0, 2.0, f64::INFINITY] {
            let d = degree_lp_formula(n, p, 1, 0);
            assert!((d.discrepancy - n as f64 * 2f64.ln()).abs() < 1e-10);
            // The definitional value agrees with the volume of the body itself.
            let body = ConvexBody::lp_ball(n, p).unwrap();
            let direct = log_volume(&body).unwrap() - ball_log_volume(n);
            assert!((d.definitional - direct).abs() < 1e-10);
        }
    }
}

#[test]
fn lp_degree_asymptotics_match_definitional_values() {
    for p in [1.0, 3.0, 4.0] {
        let a = lp_degree_asymptotics(p, 1, 0);
        let err = |n: usize| (degree_lp_formula(n, p, 1, 0).definitional - a.evaluate(n)).abs();
        assert!(err(4000) < 1e-3, "p = {p}: {}", err(4000));
        assert!(err(4000) < err(100));
        let c = lp_degree_asymptotics(p, 0, 1);
        let cerr = |n: usize| {
            let d = degree_lp_formula(n, p, 0, 1).definitional;
            (d - c.a * n as f64 * (n as f64).ln() - c.b_definitional * n as f64 - c.c).abs()
        };
        assert!(cerr(4000) < 1e-3, "complex p = {p}: {}", cerr(4000));
    }
}

#[test]
fn euler_characteristic_examples() {
    assert!((euler_characteristic(&AdelicBundle::trivial(2)).unwrap() - PI.ln()).abs() < 1e-12);
    let b = herm(&[vec![1, 0], vec![0, 1]], &[vec![1, 0], vec![0, 4]]);
    assert!((euler_characteristic(&b).unwrap() - (PI / 2.0).ln()).abs() < 1e-12);
    // The unit interval [-1, 1] has length 2 and the lattice 2Z has covolume 2.
    let line = herm(&[vec![2]], &[vec![1]]);
    assert!((euler_characteristic(&line).unwrap() - (2.0f64 / 2.0).ln()).abs() < 1e-15);
}

#[test]
fn algebraic_operation_examples() {
    let b = herm(&[vec![1, 0], vec![0, 1]], &[vec![1, 0], vec![0, 4]]);
    let d = b.dual().unwrap();
    assert_eq!(d.gram().unwrap(), &diag(&[qi(1), q(1, 4)]));
    assert!((degree(&d).unwrap() + degree(&b).unwrap()).abs() < 1e-15);
    let s = b.direct_sum(&b, 2.0).unwrap();
    assert!(s.is_hermitian());
    assert!((degree(&s).unwrap() - 2.0 * degree(&b).unwrap()).abs() < 1e-14);
    let det = b.determinant().unwrap();
    assert!((degree(&det).unwrap() - degree(&b).unwrap()).abs() < 1e-14);
    let s2 = AdelicBundle::trivial(2).symmetric(2).unwrap();
    assert_eq!(s2.gram().unwrap(), &diag(&[qi(1), q(1, 2), qi(1)]));
    assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    let cube = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    assert!(matches!(
        cube.tensor(&b),
        Err(adelic_core::Error::UnsupportedMetric(_))
    ));
    assert!(matches!(
        cube.exterior(1),
        Err(adelic_core::Error::UnsupportedMetric(_))
    ));
}

#[test]
fn symmetric_gram_has_factorial_weights() {
    // For an orthonormal basis the monomial x^i has squared norm i!/ℓ!.
    let g = sym_power_gram(&QMatrix::identity(3), 3).unwrap();
    let fact = |k: usize| (1..=k as i64).product::<i64>();
    for (a, e) in monomials(3, 3).iter().enumerate() {
        let w = Q::new(
            e.iter().map(|&k| fact(k)).product::<i64>().into(),
            fact(3).into(),
        );
        assert_eq!(g[(a, a)], w);
        for b in 0..g.cols() {
            if b != a {
                assert!(g[(a, b)].is_zero());
            }
        }
    }
}

#[test]
fn john_and_lowner_bundle_examples() {
    let b = herm(&[vec![1, 0], vec![0, 1]], &[vec![1, 0], vec![0, 4]]);
    assert_eq!(b.john().unwrap(), b);
    let cube = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    let j = cube.john().unwrap();
    let g = j.gram().unwrap().to_f64();
    assert!(
        (g[(0, 0)] - 1.0).abs() < 1e-6 && g[(0, 1)].abs() < 1e-6 && (g[(1, 1)] - 1.0).abs() < 1e-6
    );
    let vr_term = 2.0 * (4.0 / PI).sqrt().ln();
    assert!((degree(&cube).unwrap() - degree(&j).unwrap() - vr_term).abs() < 1e-6);
    let l = cube.lowner().unwrap();
    let g = l.gram().unwrap().to_f64();
    assert!(
        (g[(0, 0)] - 0.5).abs() < 1e-6 && g[(0, 1)].abs() < 1e-6 && (g[(1, 1)] - 0.5).abs() < 1e-6
    );
}

#[test]
fn height_vector_examples() {
    let t = AdelicBundle::trivial(2);
    assert!((height_vector(&t, &q_vec(&[3, 4])).unwrap().value - 5f64.ln()).abs() < 1e-15);
    assert!((height_vector(&t, &q_vec(&[6, 8])).unwrap().value - 5f64.ln()).abs() < 1e-15);
    assert_eq!(height_vector(&t, &q_vec(&[1, 0])).unwrap().value, 0.0);
    let h = height_vector(&t, &q_vec(&[6, 8])).unwrap();
    assert_eq!(h.finite_part, q(1, 2));
    assert!((h.value - (to_f64(&h.finite_part).ln() + h.arch_part)).abs() < 1e-12);
    assert!(height_vector(&t, &q_vec(&[0, 0])).is_err());
}

#[test]
fn height_map_examples() {
    let t = AdelicBundle::trivial(2);
    let id = QMatrix::identity(2);
    let h = height_map(&t, &t, &id).unwrap();
    assert!(h.value.abs() < 1e-15 && h.exact);
    let cube = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    let h = height_map(&t, &cube, &id).unwrap();
    assert!(h.value <= 1e-12);
    // Oracle: the sup-norm of a unit vector never exceeds one.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        assert!(cube.arch_norm(&[a.cos(), a.sin()]) <= h.arch_part.exp() + 1e-12);
    }
    let m = diag(&[qi(2), qi(1)]);
    let h = height_map(&t, &t, &m).unwrap();
    // ‖diag(2, 1)‖_2 = max(|2|_2, |1|_2) = 1, so only the archimedean place contributes.
    assert!((h.arch_part - 2f64.ln()).abs() < 1e-12);
    assert_eq!(h.finite_part, 0.0);
    assert!((h.value - 2f64.ln()).abs() < 1e-12);
    // A map whose entries share the factor 2 gains -log 2 at the prime 2.
    let h = height_map(&t, &t, &diag(&[qi(2), qi(4)])).unwrap();
    assert!((h.finite_part + 2f64.ln()).abs() < 1e-15);
    assert!((h.value - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn height_map_bounds_on_general_bodies() {
    // Between ℓ^3 and ℓ^4 balls the ellipsoid sandwich must dominate sampled ratios.
    let src = AdelicBundle::with_body(QMatrix::identity(3), ConvexBody::lp_ball(3, 3.0).unwrap())
        .unwrap();
    let dst = AdelicBundle::with_body(QMatrix::identity(3), ConvexBody::lp_ball(3, 4.0).unwrap())
        .unwrap();
    let m = QMatrix::from_i64(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 2]]);
    let h = height_map(&src, &dst, &m).unwrap();
    assert!(!h.exact);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mf = m.to_f64();
    for _ in 0..500 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = &mf * nalgebra::DVector::from_vec(x.clone());
        let ratio = dst.arch_norm(y.as_slice()) / src.arch_norm(&x);
        assert!(ratio <= h.arch_part.exp() * (1.0 + 1e-9));
    }
}

#[test]
fn scalar_extension_examples() {
    for n in 1..=10 {
        let b = AdelicBundle::with_body(QMatrix::identity(n), ConvexBody::cube(n)).unwrap();
        let e = scalar_extension(&b, 1000, 1).unwrap();
        assert!((e.extended_degree - 0.5 * ln_gamma(n as f64 + 1.0)).abs() < 1e-9);
    }
    let b = herm(&[vec![2, 1], vec![0, 1]], &[vec![2, 1], vec![1, 3]]);
    let rep = scalar_extension_check(&b, 1000, 1).unwrap();
    assert!(rep.pass);
    assert!(
        rep.detail("hermitian extension preserves the degree")
            .unwrap()
            .slack
            .abs()
            < 1e-9
    );
    let cube = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    let e = scalar_extension(&cube, 1000, 1).unwrap();
    assert!((e.log_kappa - (PI * PI / 8.0).ln()).abs() < 1e-12);
    let (lo, hi) = kappa_bracket(2);
    assert!((lo - (1.0f64 / 8.0).ln()).abs() < 1e-12 && (hi - 2f64.ln()).abs() < 1e-12);
    // A polytope whose complexification is measured by Monte Carlo.
    let hex =
        ConvexBody::hpoly_symmetric(vec![q_vec(&[1, 0]), q_vec(&[0, 1]), vec![q(1, 2), q(1, 2)]])
            .unwrap();
    let b = AdelicBundle::with_body(QMatrix::identity(2), hex).unwrap();
    let rep = scalar_extension_check(&b, 200_000, 3).unwrap();
    assert!(rep.pass, "{}", rep.to_json_line());
}

#[test]
fn scale_follows_the_transform_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let b = random_bundle(3, &mut rng);
        let f = random_lattice(3, &mut rng);
        let t = random_lattice(3, &mut rng);
        let s = b.scale(&f, &t).unwrap();
        let log_abs = to_f64(&t.det().unwrap()).abs().ln() - to_f64(&f.det().unwrap()).abs().ln();
        assert!((degree(&s).unwrap() - (degree(&b).unwrap() - log_abs)).abs() < 1e-9);
    }
    let a = Idele::principal(&q(6, 5)).unwrap();
    let b = AdelicBundle::trivial(2);
    let s = b.scale_idele(&a).unwrap();
    // Principal ideles have adelic absolute value one, so the degree is unchanged.
    assert!(degree(&s).unwrap().abs() < 1e-12);
}

#[test]
fn degree_is_invariant_under_basis_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    // Rational rotation by the Pythagorean angle (3/5, 4/5).
    let rot = QMatrix::from_rows(&[
        vec![q(3, 5), q(-4, 5), qi(0)],
        vec![q(4, 5), q(3, 5), qi(0)],
        vec![qi(0), qi(0), qi(1)],
    ])
    .unwrap();
    for _ in 0..20 {
        let b = random_bundle(3, &mut rng);
        let u = random_unimodular(3, &mut rng);
        let b2 = AdelicBundle::hermitian(b.lattice().mul(&u).unwrap(), b.gram().unwrap().clone())
            .unwrap();
        assert!((degree(&b).unwrap() - degree(&b2).unwrap()).abs() < 1e-9);
        // x ↦ Rx is an isometry onto the bundle with lattice R·L and Gram R⁻ᵀGR⁻¹.
        let rinv = rot.inverse().unwrap();
        let g3 = rinv
            .transpose()
            .mul(b.gram().unwrap())
            .unwrap()
            .mul(&rinv)
            .unwrap();
        let b3 = AdelicBundle::hermitian(rot.mul(b.lattice()).unwrap(), g3).unwrap();
        assert!((degree(&b).unwrap() - degree(&b3).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn domination_reverses_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let dirs: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    // (Z², |·|_∞) ⪯ (Z², |·|₂) ⪯ (Z², |·|₁) and the sublattice 2Z² dominates Z².
    let inf = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cube(2)).unwrap();
    let two = AdelicBundle::trivial(2);
    let one = AdelicBundle::with_body(QMatrix::identity(2), ConvexBody::cross_polytope(2)).unwrap();
    let sub =
        AdelicBundle::hermitian(QMatrix::identity(2).scale(&qi(2)), QMatrix::identity(2)).unwrap();
    for (lo, hi) in [(&inf, &two), (&two, &one), (&inf, &one), (&two, &sub)] {
        assert!(dominated_on(lo, hi, &dirs).unwrap());
        assert!(degree(hi).unwrap() <= degree(lo).unwrap() + 1e-12);
    }
    assert!(!dominated_on(&one, &inf, &dirs).unwrap());
}

#[test]
fn body_duality_lies_in_the_mahler_window() {
    let n = 2;
    let weak = n as f64 * 4f64.ln() - 2.0 * ln_gamma(n as f64 + 1.0) - 2.0 * ball_log_volume(n);
    for c in [
        ConvexBody::cube(2),
        ConvexBody::cross_polytope(2),
        ConvexBody::lp_ball(2, 3.0).unwrap(),
    ] {
        let b = AdelicBundle::with_body(QMatrix::from_i64(&[vec![2, 1], vec![0, 1]]), c).unwrap();
        let s = degree(&b).unwrap() + degree(&b.dual().unwrap()).unwrap();
        assert!(s <= 1e-12 && s >= weak - 1e-12, "{s}");
    }
}

fn column_span_intersection(s1: &QMatrix, s2: &QMatrix) -> Option<QMatrix> {
    // x = S1 a = S2 b  ⇔  [S1 | −S2] (a, b) = 0.
    let m = s1.hstack(&s2.scale(&qi(-1))).unwrap();
    let ker = m.kernel();
    if ker.is_empty() {
        return None;
    }
    let cols: Vec<Vec<Q>> = ker
        .iter()
        .map(|k| s1.mul_vec(&k[..s1.cols()]).unwrap())
        .collect();
    let mat = QMatrix::from_cols(&cols).unwrap();
    let (r, _) = mat.transpose().rref();
    let rank = mat.rank();
    Some(QMatrix::from_cols(&(0..rank).map(|i| r.row(i)).collect::<Vec<_>>()).unwrap())
}

fn column_span_sum(s1: &QMatrix, s2: &QMatrix) -> QMatrix {
    let m = s1.hstack(s2).unwrap();
    let (r, _) = m.transpose().rref();
    let rank = m.rank();
    QMatrix::from_cols(&(0..rank).map(|i| r.row(i)).collect::<Vec<_>>()).unwrap()
}

fn sub_degree(b: &AdelicBundle, s: &QMatrix) -> f64 {
    if s.cols() == b.rank() {
        degree(b).unwrap()
    } else {
        degree(&b.sub(s).unwrap()).unwrap()
    }
}

#[test]
fn quotient_additivity_and_submodularity() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let b = random_bundle(3, &mut rng);
        let mut rv = |k: usize| {
            QMatrix::from_vec(
                3,
                k,
                (0..3 * k).map(|_| qi(rng.gen_range(-3..=3))).collect(),
            )
            .unwrap()
        };
        let s = rv(1);
        if s.rank() < 1 {
            continue;
        }
        let (quot, _) = b.quotient(&s).unwrap();
        let total = degree(&b.sub(&s).unwrap()).unwrap() + degree(&quot).unwrap();
        assert!((degree(&b).unwrap() - total).abs() < 1e-9);
        let s1 = rv(2);
        let s2 = rv(2);
        if s1.rank() < 2 || s2.rank() < 2 {
            continue;
        }
        let sum = column_span_sum(&s1, &s2);
        let lhs = sub_degree(&b, &sum)
            + column_span_intersection(&s1, &s2).map_or(0.0, |i| sub_degree(&b, &i));
        let rhs = sub_degree(&b, &s1) + sub_degree(&b, &s2);
        assert!(lhs >= rhs - 1e-9, "{lhs} < {rhs}");
    }
}

#[test]
fn hadamard_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..20 {
        let b = random_bundle(3, &mut rng);
        let basis = random_lattice(3, &mut rng);
        let sum_h: f64 = basis
            .columns()
            .iter()
            .map(|e| height_vector(&b, e).unwrap().value)
            .sum();
        let det = b.determinant().unwrap();
        assert!(degree(&det).unwrap() + sum_h >= -1e-9);
    }
}

#[test]
fn northcott_lines_match_direct_enumeration() {
    let b = AdelicBundle::hermitian(
        QMatrix::from_rows(&[vec![q(1, 2), qi(0)], vec![qi(1), qi(3)]]).unwrap(),
        QMatrix::from_i64(&[vec![2, 1], vec![1, 2]]),
    )
    .unwrap();
    let bound = 2.5f64;
    // Enumeration of primitive lattice vectors of norm ≤ e^bound, one per line.
    let g = b.coordinate_gram().unwrap().to_f64();
    let mut by_enum = BTreeSet::new();
    enumerate(&g, (2.0 * bound).exp(), true, 10_000_000, |y, _, _| {
        let z: Vec<_> = y.iter().map(|&v| big(v)).collect();
        if gcd_vec(&z) == big(1) {
            by_enum.insert(y.to_vec());
        }
    });
    // Direct scan of a box of lattice coordinates using the adelic height.
    let mut by_scan = BTreeSet::new();
    let r = 60i64;
    for y0 in -r..=r {
        for y1 in -r..=r {
            if (y0, y1) == (0, 0) {
                continue;
            }
            let x = b.lattice().mul_vec(&q_vec(&[y0, y1])).unwrap();
            if height_vector(&b, &x).unwrap().value <= bound + 1e-12 {
                let g = num_integer::gcd(y0, y1);
                let mut v = vec![y0 / g, y1 / g];
                if v[0] < 0 || (v[0] == 0 && v[1] < 0) {
                    v = vec![-v[0], -v[1]];
                }
                by_scan.insert(v);
            }
        }
    }
    let norm_sign = |v: &Vec<i64>| {
        if v[0] < 0 || (v[0] == 0 && v[1] < 0) {
            vec![-v[0], -v[1]]
        } else {
            v.clone()
        }
    };
    let by_enum: BTreeSet<Vec<i64>> = by_enum.iter().map(norm_sign).collect();
    assert!(!by_enum.is_empty());
    assert_eq!(by_enum, by_scan);
}

#[test]
fn bundle_documents_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let bundles = vec![
        random_bundle(3, &mut rng),
        AdelicBundle::with_body(
            random_lattice(2, &mut rng),
            ConvexBody::lp_ball(2, 3.0).unwrap(),
        )
        .unwrap(),
        AdelicBundle::with_body(
            QMatrix::identity(2),
            ConvexBody::lp_ball(2, f64::INFINITY).unwrap(),
        )
        .unwrap(),
        AdelicBundle::with_body(
            QMatrix::identity(2),
            ConvexBody::hpoly_symmetric(vec![vec![q(1, 3), qi(0)], vec![qi(1), q(2, 7)]]).unwrap(),
        )
        .unwrap(),
        AdelicBundle::with_body(
            QMatrix::identity(2),
            ConvexBody::vpoly_symmetric(vec![q_vec(&[1, 2]), q_vec(&[3, -1])]).unwrap(),
        )
        .unwrap(),
    ];
    for b in bundles {
        let text = write_bundle(&b).unwrap();
        let back = parse_bundle(&text).unwrap();
        assert_eq!(back, b);
        assert_eq!(write_bundle(&back).unwrap(), text);
    }
    assert!(parse_bundle("{\"rank\": 2}").is_err());
    assert!(parse_bundle("not json").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_duality_is_exact(seed in 0u64..10_000, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_bundle(n, &mut rng);
        prop_assert!((degree(&b).unwrap() + degree(&b.dual().unwrap()).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn exterior_degrees_scale_binomially(seed in 0u64..10_000, n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_bundle(n, &mut rng);
        let d = degree(&b).unwrap();
        for r in 1..=n {
            // deg Λ^r E = binom(n-1, r-1) deg E.
            let c = adelic_core::rational::binomial((n - 1) as u64, (r - 1) as u64) as f64;
            prop_assert!((degree(&b.exterior(r).unwrap()).unwrap() - c * d).abs() < 1e-8);
        }
    }

    #[test]
    fn unimodular_invariance(seed in 0u64..10_000, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_bundle(n, &mut rng);
        let u = random_unimodular(n, &mut rng);
        let b2 = AdelicBundle::hermitian(b.lattice().mul(&u).unwrap(), b.gram().unwrap().clone()).unwrap();
        prop_assert!((degree(&b).unwrap() - degree(&b2).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn height_is_invariant_under_scaling(seed in 0u64..10_000, num in 1i64..50, den in 1i64..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_bundle(3, &mut rng);
        let x: Vec<Q> = (0..3).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=9))).collect();
        prop_assume!(x.iter().any(|v| !v.is_zero()));
        let lam = q(num, den);
        let y: Vec<Q> = x.iter().map(|v| v * &lam).collect();
        let h1 = height_vector(&b, &x).unwrap().value;
        let h2 = height_vector(&b, &y).unwrap().value;
        prop_assert!((h1 - h2).abs() < 1e-9);
    }
}

use adelic_core::lattice::{
    complete_to_basis, enumerate, hkz, integer_kernel, lll, saturate, shortest_vector,
    transformed_gram,
};
use adelic_core::rational::{q_vec, qi, QMatrix};
use nalgebra::DMatrix;
use num_traits::{One, ToPrimitive};

fn det_i(u: &adelic_core::lattice::IMatrix) -> i64 {
    let f = u.map(|x| x as f64);
    f.determinant().round() as i64
}

#[test]
fn lll_keeps_unimodularity_and_shrinks_basis() {
    let g = DMatrix::from_row_slice(3, 3, &[1.0, 10.0, 7.0, 10.0, 101.0, 72.0, 7.0, 72.0, 53.0]);
    let u = lll(&g, 0.99);
    assert_eq!(det_i(&u).abs(), 1);
    let gr = transformed_gram(&g, &u);
    let mx = (0..3).map(|i| gr[(i, i)]).fold(0.0, f64::max);
    assert!(mx < 10.0, "reduced diagonal {mx}");
}

#[test]
fn enumeration_counts_match_brute_force() {
    let g = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
    let mut found = 0;
    let out = enumerate(&g, 12.0, false, 1_000_000, |_, _, _| found += 1);
    assert!(out.complete);
    let mut brute = 0;
    for a in -10i64..=10 {
        for b in -10i64..=10 {
            if (a, b) == (0, 0) {
                continue;
            }
            let v = 2 * a * a + 2 * a * b + 3 * b * b;
            if v as f64 <= 12.0 {
                brute += 1;
            }
        }
    }
    assert_eq!(found, brute);
    let mut half = 0;
    enumerate(&g, 12.0, true, 1_000_000, |_, _, _| half += 1);
    assert_eq!(2 * half, brute);
}

#[test]
fn shortest_vector_of_scaled_lattice() {
    let g = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]);
    let (_, n) = shortest_vector(&g).unwrap();
    assert!((n - 4.0).abs() < 1e-12);
}

#[test]
fn completion_is_unimodular_with_prescribed_column() {
    let c = [6, 10, 15];
    let u = complete_to_basis(&c).unwrap();
    assert_eq!(det_i(&u).abs(), 1);
    for i in 0..3 {
        assert_eq!(u[(i, 0)], c[i]);
    }
}

#[test]
fn hkz_first_vector_is_shortest() {
    let g = DMatrix::from_row_slice(3, 3, &[5.0, 2.0, 1.0, 2.0, 6.0, 3.0, 1.0, 3.0, 7.0]);
    let u = hkz(&g).unwrap();
    assert_eq!(det_i(&u).abs(), 1);
    let (_, n) = shortest_vector(&g).unwrap();
    let gr = transformed_gram(&g, &u);
    assert!((gr[(0, 0)] - n).abs() < 1e-9);
}

#[test]
fn integer_kernel_is_saturated() {
    let b = QMatrix::from_i64(&[vec![2, 4, 6]]);
    let k = integer_kernel(&b);
    assert_eq!(k.len(), 2);
    let kq = adelic_core::lattice::zcols_to_q(&k);
    assert!(b.mul(&kq).unwrap().entries().iter().all(|x| x == &qi(0)));
    // Index one in the kernel lattice: the 2x2 minors have gcd one.
    let m = kq.compound(2);
    let g = adelic_core::lattice::gcd_vec(
        &m.entries()
            .iter()
            .map(|x| x.to_integer())
            .collect::<Vec<_>>(),
    );
    assert!(g.is_one());
    let s = saturate(&[q_vec(&[2, 2, 0])], 3);
    assert_eq!(s.len(), 1);
    let v: Vec<i64> = s[0].iter().map(|x| x.to_i64().unwrap()).collect();
    assert_eq!(v, vec![1, 1, 0]);
}

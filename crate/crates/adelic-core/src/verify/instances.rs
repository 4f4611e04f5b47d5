//! Deterministic generation of test instances.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bundle::AdelicBundle;
use crate::convexgeom::ConvexBody;
use crate::rational::{q, qi, QMatrix, Q};

/// Seeded generator used by every suite.
pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Positive definite integral Gram matrix `BᵀB + D` with entries bounded by `max_entry`.
///
/// `B` has entries in `{-1, 0, 1}` and `D` is diagonal with entries in `{1, 2}`.
pub fn random_integral_gram(rng: &mut ChaCha8Rng, n: usize, max_entry: i64) -> QMatrix {
    loop {
        let b: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1..=1)).collect())
            .collect();
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = (0..n).map(|k| b[k][i] * b[k][j]).sum();
            }
            g[i][i] += rng.gen_range(1..=2);
        }
        if g.iter().flatten().all(|x| x.abs() <= max_entry) {
            return QMatrix::from_i64(&g);
        }
    }
}

/// Invertible lattice basis with small rational entries.
pub fn random_lattice(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    loop {
        let entries: Vec<Q> = (0..n * n)
            .map(|_| q(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
            .collect();
        let a = QMatrix::from_vec(n, n, entries).expect("square");
        if a.rank() == n {
            return a;
        }
    }
}

/// Lower triangular basis with small positive diagonal and entries in `{-1, 0, 1}` below it.
pub fn random_triangular_lattice(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    let mut a = QMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = q(rng.gen_range(1..=3), rng.gen_range(1..=2));
        for j in 0..i {
            a[(i, j)] = qi(rng.gen_range(-1..=1));
        }
    }
    a
}

/// Hermitian bundle with a random lattice and an integral Gram matrix.
pub fn random_hermitian_bundle(rng: &mut ChaCha8Rng, n: usize, max_entry: i64) -> AdelicBundle {
    let g = random_integral_gram(rng, n, max_entry);
    let a = random_triangular_lattice(rng, n);
    AdelicBundle::hermitian(a, g).expect("valid bundle")
}

/// Hermitian bundle on the standard lattice.
pub fn random_gram_bundle(rng: &mut ChaCha8Rng, n: usize, max_entry: i64) -> AdelicBundle {
    AdelicBundle::hermitian(
        QMatrix::identity(n),
        random_integral_gram(rng, n, max_entry),
    )
    .expect("valid bundle")
}

/// Centrally symmetric polytope `conv(±v_j)` from random integral vertices.
pub fn random_polytope(rng: &mut ChaCha8Rng, n: usize) -> ConvexBody {
    loop {
        let k = rng.gen_range(n..=n + 3);
        let vs: Vec<Vec<Q>> = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| qi(rng.gen_range(-3..=3)))
                    .collect::<Vec<Q>>()
            })
            .filter(|v| v.iter().any(|x| x != &qi(0)))
            .collect();
        if let Ok(c) = ConvexBody::vpoly_symmetric(vs) {
            return c;
        }
    }
}

/// Body-metric bundle on a random polytope.
pub fn random_body_bundle(rng: &mut ChaCha8Rng, n: usize) -> AdelicBundle {
    let c = random_polytope(rng, n);
    let a = random_triangular_lattice(rng, n);
    AdelicBundle::with_body(a, c).expect("valid bundle")
}

/// Random integral matrix with entries in `[-bound, bound]`.
pub fn random_integer_matrix(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    bound: i64,
) -> QMatrix {
    let m: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    QMatrix::from_i64(&m)
}

/// Random invertible integral matrix with entries in `[-bound, bound]`.
pub fn random_invertible_matrix(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> QMatrix {
    loop {
        let m = random_integer_matrix(rng, n, n, bound);
        if m.rank() == n {
            return m;
        }
    }
}

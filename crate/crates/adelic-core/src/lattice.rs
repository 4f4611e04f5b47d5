//! Lattice reduction and enumeration on Gram matrices.
//!
//! Bases are described by integral transforms `U` acting on lattice coordinates: the
//! columns of `U` are the reduced basis vectors and `UᵀGU` is their Gram matrix.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{QMatrix, Q, Z};

/// Integral basis transform; columns are basis vectors in lattice coordinates.
pub type IMatrix = DMatrix<i64>;

/// Gram matrix `UᵀGU` of the columns of `u`.
pub fn transformed_gram(g: &DMatrix<f64>, u: &IMatrix) -> DMatrix<f64> {
    let uf = u.map(|x| x as f64);
    uf.transpose() * g * uf
}

/// Exact Gram matrix `UᵀGU` over the rationals.
pub fn transformed_gram_exact(g: &QMatrix, u: &IMatrix) -> QMatrix {
    let uq = imatrix_to_q(u);
    uq.transpose()
        .mul(g)
        .and_then(|m| m.mul(&uq))
        .expect("compatible shapes")
}

/// Converts an integral matrix to a rational one.
pub fn imatrix_to_q(u: &IMatrix) -> QMatrix {
    let mut m = QMatrix::zeros(u.nrows(), u.ncols());
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            m[(i, j)] = Q::from_integer(Z::from(u[(i, j)]));
        }
    }
    m
}

/// Exact squared norm `xᵀGx` of an integral vector.
pub fn norm_sq_exact(g: &QMatrix, x: &[i64]) -> Q {
    let mut s = Q::zero();
    for i in 0..x.len() {
        if x[i] == 0 {
            continue;
        }
        for j in 0..x.len() {
            if x[j] != 0 {
                s += &g[(i, j)] * Q::from_integer(Z::from(x[i] * x[j]));
            }
        }
    }
    s
}

/// Squared norm `xᵀGx` in floating point.
pub fn norm_sq(g: &DMatrix<f64>, x: &[i64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        if x[i] == 0 {
            continue;
        }
        for j in 0..x.len() {
            s += g[(i, j)] * (x[i] * x[j]) as f64;
        }
    }
    s
}

/// LLL reduction of the lattice with Gram matrix `g` (parameter `delta`, usually 0.99).
pub fn lll(g: &DMatrix<f64>, delta: f64) -> IMatrix {
    let n = g.nrows();
    let mut gc = g.clone();
    let mut u = IMatrix::identity(n, n);
    if n <= 1 {
        return u;
    }
    let mut mu = DMatrix::<f64>::zeros(n, n);
    let mut r = vec![0.0; n];
    let compute_row = |i: usize, gc: &DMatrix<f64>, mu: &mut DMatrix<f64>, r: &mut Vec<f64>| {
        for j in 0..i {
            let mut s = gc[(i, j)];
            for l in 0..j {
                s -= mu[(j, l)] * mu[(i, l)] * r[l];
            }
            mu[(i, j)] = s / r[j];
        }
        let mut s = gc[(i, i)];
        for l in 0..i {
            s -= mu[(i, l)] * mu[(i, l)] * r[l];
        }
        r[i] = s;
    };
    compute_row(0, &gc, &mut mu, &mut r);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        compute_row(k, &gc, &mut mu, &mut r);
        for _ in 0..8 {
            let mut changed = false;
            for j in (0..k).rev() {
                let qf = mu[(k, j)].round();
                if qf == 0.0 || !qf.is_finite() {
                    continue;
                }
                let qq = qf as i64;
                changed = true;
                sub_multiple(&mut gc, &mut u, k, j, qq);
                for l in 0..j {
                    mu[(k, l)] -= qf * mu[(j, l)];
                }
                mu[(k, j)] -= qf;
            }
            compute_row(k, &gc, &mut mu, &mut r);
            if !changed || (0..k).all(|j| mu[(k, j)].abs() <= 0.51) {
                break;
            }
        }
        let lhs = delta * r[k - 1];
        let rhs = r[k] + mu[(k, k - 1)] * mu[(k, k - 1)] * r[k - 1];
        if lhs > rhs {
            gc.swap_rows(k, k - 1);
            gc.swap_columns(k, k - 1);
            u.swap_columns(k, k - 1);
            compute_row(k - 1, &gc, &mut mu, &mut r);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    u
}

/// Replaces basis vector `k` by `b_k - q b_j`, updating Gram and transform.
fn sub_multiple(gc: &mut DMatrix<f64>, u: &mut IMatrix, k: usize, j: usize, q: i64) {
    let n = gc.nrows();
    let qf = q as f64;
    let gkk = gc[(k, k)] - 2.0 * qf * gc[(k, j)] + qf * qf * gc[(j, j)];
    for l in 0..n {
        if l != k {
            let v = gc[(k, l)] - qf * gc[(j, l)];
            gc[(k, l)] = v;
            gc[(l, k)] = v;
        }
    }
    gc[(k, k)] = gkk;
    for i in 0..n {
        u[(i, k)] -= q * u[(i, j)];
    }
}

/// Outcome of a bounded enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumOutcome {
    /// Whether every point within the radius was visited.
    pub complete: bool,
    /// Number of search-tree nodes visited.
    pub nodes: u64,
}

/// Fincke-Pohst enumeration of all nonzero `x` with `xᵀGx ≤ radius_sq`.
///
/// With `half` set only one vector of each `±x` pair is visited. The visitor receives
/// the vector in the input coordinates, its floating squared norm, and a mutable
/// radius that it may shrink. Enumeration stops early when `budget` nodes are spent.
pub fn enumerate<F>(
    g: &DMatrix<f64>,
    radius_sq: f64,
    half: bool,
    budget: u64,
    mut visit: F,
) -> EnumOutcome
where
    F: FnMut(&[i64], f64, &mut f64),
{
    let n = g.nrows();
    if n == 0 {
        return EnumOutcome {
            complete: true,
            nodes: 0,
        };
    }
    let u = lll(g, 0.99);
    let gr = transformed_gram(g, &u);
    let Some(chol) = gr.clone().cholesky() else {
        return EnumOutcome {
            complete: false,
            nodes: 0,
        };
    };
    let l = chol.l();
    // xᵀGx = Σ_i d_i (y_i + Σ_{j>i} m_ij y_j)² with d_i = l_ii², m_ij = l_ji / l_ii.
    let d: Vec<f64> = (0..n).map(|i| l[(i, i)] * l[(i, i)]).collect();
    let m = DMatrix::from_fn(n, n, |i, j| if j > i { l[(j, i)] / l[(i, i)] } else { 0.0 });
    let mut st = EnumState {
        n,
        d,
        m,
        u: &u,
        y: vec![0i64; n],
        partial: vec![0.0; n + 1],
        radius: radius_sq,
        half,
        budget,
        nodes: 0,
        aborted: false,
        out: vec![0i64; n],
    };
    st.recurse(n - 1, true, &mut visit);
    EnumOutcome {
        complete: !st.aborted,
        nodes: st.nodes,
    }
}

struct EnumState<'a> {
    n: usize,
    d: Vec<f64>,
    m: DMatrix<f64>,
    u: &'a IMatrix,
    y: Vec<i64>,
    partial: Vec<f64>,
    radius: f64,
    half: bool,
    budget: u64,
    nodes: u64,
    aborted: bool,
    out: Vec<i64>,
}

impl EnumState<'_> {
    fn recurse<F: FnMut(&[i64], f64, &mut f64)>(
        &mut self,
        i: usize,
        all_zero_above: bool,
        visit: &mut F,
    ) {
        let mut c = 0.0;
        for j in i + 1..self.n {
            c -= self.m[(i, j)] * self.y[j] as f64;
        }
        let base = self.partial[i + 1];
        let bound = self.radius * (1.0 + 1e-11);
        let rem = (bound - base) / self.d[i];
        if rem < 0.0 {
            return;
        }
        let w = rem.sqrt();
        let mut lo = (c - w - 1e-9).ceil() as i64;
        let hi_initial = (c + w + 1e-9).floor() as i64;
        if self.half && all_zero_above {
            lo = lo.max(if i == 0 { 1 } else { 0 });
        }
        let mut x = lo;
        while x <= hi_initial {
            if self.aborted {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.aborted = true;
                return;
            }
            let t = x as f64 - c;
            let val = base + self.d[i] * t * t;
            if val <= self.radius * (1.0 + 1e-11) {
                self.y[i] = x;
                self.partial[i] = val;
                if i == 0 {
                    if self.y.iter().any(|&v| v != 0) {
                        for r in 0..self.n {
                            let mut s = 0i64;
                            for k in 0..self.n {
                                s += self.u[(r, k)] * self.y[k];
                            }
                            self.out[r] = s;
                        }
                        let out = self.out.clone();
                        visit(&out, val, &mut self.radius);
                    }
                } else {
                    self.recurse(i - 1, all_zero_above && x == 0, visit);
                }
            } else if x as f64 > c {
                break;
            }
            x += 1;
        }
        self.y[i] = 0;
    }
}

/// Shortest nonzero vector and its squared norm.
pub fn shortest_vector(g: &DMatrix<f64>) -> Result<(Vec<i64>, f64)> {
    let n = g.nrows();
    let u = lll(g, 0.99);
    let gr = transformed_gram(g, &u);
    let mut best_i = 0;
    for i in 1..n {
        if gr[(i, i)] < gr[(best_i, best_i)] {
            best_i = i;
        }
    }
    let mut best: Vec<i64> = (0..n).map(|r| u[(r, best_i)]).collect();
    let mut best_norm = gr[(best_i, best_i)];
    let outcome = enumerate(
        g,
        best_norm * (1.0 + 1e-12),
        true,
        crate::tolerances::ENUM_NODE_BUDGET,
        |x, v, rad| {
            if v < best_norm {
                best_norm = v;
                best = x.to_vec();
                *rad = v * (1.0 + 1e-12);
            }
        },
    );
    if !outcome.complete {
        return Err(Error::Uncertified(
            "shortest vector search exhausted its budget".into(),
        ));
    }
    Ok((best, best_norm))
}

/// Unimodular matrix whose first column is the primitive integral vector `c`.
pub fn complete_to_basis(c: &[i64]) -> Result<IMatrix> {
    let n = c.len();
    // Column operations on `w` realize a unimodular V with cᵀV = (g, 0, ..., 0); the
    // inverse transpose then carries e_1 to c.
    let mut v: Vec<i64> = c.to_vec();
    let mut inv = IMatrix::identity(n, n);
    // Maintain inv such that inv * (current vector) = c, i.e. c = inv * v.
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| v[i] != 0).collect();
        if nz.is_empty() {
            return Err(Error::Domain("cannot complete the zero vector".into()));
        }
        if nz.len() == 1 {
            let i = nz[0];
            if v[i].abs() != 1 {
                return Err(Error::Domain("vector is not primitive".into()));
            }
            if v[i] == -1 {
                v[i] = 1;
                for r in 0..n {
                    inv[(r, i)] = -inv[(r, i)];
                }
            }
            if i != 0 {
                v.swap(0, i);
                inv.swap_columns(0, i);
            }
            return Ok(inv);
        }
        let (mut piv, mut other) = (nz[0], nz[1]);
        for &i in &nz {
            if v[i].abs() < v[piv].abs() {
                piv = i;
            }
        }
        for &i in &nz {
            if i != piv {
                other = i;
                break;
            }
        }
        let q = v[other].div_euclid(v[piv]);
        // v_other -= q v_piv ; to keep c = inv v, column piv of inv gains q * column other.
        v[other] -= q * v[piv];
        for r in 0..n {
            inv[(r, piv)] += q * inv[(r, other)];
        }
    }
}

/// Hermite-Korkine-Zolotarev reduction; returns a unimodular transform.
pub fn hkz(g: &DMatrix<f64>) -> Result<IMatrix> {
    let n = g.nrows();
    let mut u = lll(g, 0.99);
    for k in 0..n {
        let gc = transformed_gram(g, &u);
        // Gram of the projection of columns k.. orthogonally to columns ..k.
        let proj = projected_gram(&gc, k);
        let (c, _) = shortest_vector(&proj)?;
        let w = complete_to_basis(&c)?;
        let mut block = IMatrix::identity(n, n);
        for i in 0..n - k {
            for j in 0..n - k {
                block[(k + i, k + j)] = w[(i, j)];
            }
        }
        u = &u * block;
        let tail = transformed_gram(g, &u);
        let proj = projected_gram(&tail, k + 1);
        if n - k > 1 {
            let lu = lll(&proj, 0.99);
            let mut block = IMatrix::identity(n, n);
            for i in 0..n - k - 1 {
                for j in 0..n - k - 1 {
                    block[(k + 1 + i, k + 1 + j)] = lu[(i, j)];
                }
            }
            u = &u * block;
        }
    }
    size_reduce(g, &mut u);
    Ok(u)
}

/// Gram matrix of columns `k..` projected orthogonally to the span of columns `..k`.
pub fn projected_gram(g: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = g.nrows();
    if k == 0 {
        return g.clone();
    }
    let a = g.view((0, 0), (k, k)).into_owned();
    let b = g.view((0, k), (k, n - k)).into_owned();
    let c = g.view((k, k), (n - k, n - k)).into_owned();
    let ainv = a.try_inverse().expect("positive definite block");
    let s = c - b.transpose() * ainv * b;
    (s.clone() + s.transpose()) * 0.5
}

/// Size reduction of the basis `u` with respect to `g` (keeps the Gram-Schmidt vectors).
pub fn size_reduce(g: &DMatrix<f64>, u: &mut IMatrix) {
    let n = u.ncols();
    for k in 1..n {
        for j in (0..k).rev() {
            let gc = transformed_gram(g, u);
            let chol = match gc.cholesky() {
                Some(c) => c,
                None => return,
            };
            let l = chol.l();
            let mu = l[(k, j)] / l[(j, j)];
            let q = mu.round() as i64;
            if q != 0 {
                for i in 0..u.nrows() {
                    u[(i, k)] -= q * u[(i, j)];
                }
            }
        }
    }
}

/// Basis of the integral kernel `{x ∈ Zⁿ : B x = 0}` of a rational matrix.
pub fn integer_kernel(b: &QMatrix) -> Vec<Vec<Z>> {
    let n = b.cols();
    let k = b.rows();
    // Scale rows to integers.
    let mut rows: Vec<Vec<Z>> = Vec::with_capacity(k);
    for i in 0..k {
        let row = b.row(i);
        let l = row.iter().fold(Z::one(), |acc, x| acc.lcm(x.denom()));
        rows.push(
            row.iter()
                .map(|x| (x * Q::from_integer(l.clone())).to_integer())
                .collect(),
        );
    }
    let mut u: Vec<Vec<Z>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { Z::one() } else { Z::zero() })
                .collect()
        })
        .collect();
    // u[j] is column j of the transform; rows act on columns.
    let mut pivot_col = 0usize;
    for i in 0..k {
        if pivot_col >= n {
            break;
        }
        loop {
            let nz: Vec<usize> = (pivot_col..n).filter(|&j| !rows[i][j].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let mut p = nz[0];
            for &j in &nz {
                if rows[i][j].abs() < rows[i][p].abs() {
                    p = j;
                }
            }
            if nz.len() == 1 {
                swap_cols(&mut rows, &mut u, p, pivot_col);
                pivot_col += 1;
                break;
            }
            for &j in &nz {
                if j == p {
                    continue;
                }
                let q = rows[i][j].div_floor(&rows[i][p]);
                for row in rows.iter_mut() {
                    let v = &row[p] * &q;
                    row[j] -= v;
                }
                let up = u[p].clone();
                for (t, x) in u[j].iter_mut().enumerate() {
                    *x -= &up[t] * &q;
                }
            }
        }
    }
    let mut ker: Vec<Vec<Z>> = u[pivot_col..].to_vec();
    reduce_integer_basis(&mut ker);
    ker
}

fn swap_cols(rows: &mut [Vec<Z>], u: &mut [Vec<Z>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in rows.iter_mut() {
        row.swap(a, b);
    }
    u.swap(a, b);
}

/// LLL-reduces an integral basis with respect to the standard inner product when it fits in `f64`.
fn reduce_integer_basis(basis: &mut Vec<Vec<Z>>) {
    let r = basis.len();
    if r == 0 {
        return;
    }
    let limit = Z::from(1i64 << 40);
    if basis.iter().flatten().any(|x| x.abs() > limit) {
        return;
    }
    let f: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64().unwrap()).collect())
        .collect();
    let g = DMatrix::from_fn(r, r, |i, j| {
        f[i].iter().zip(&f[j]).map(|(a, b)| a * b).sum()
    });
    let u = lll(&g, 0.99);
    let old = basis.clone();
    for j in 0..r {
        let n = old[0].len();
        let mut v = vec![Z::zero(); n];
        for (i, ob) in old.iter().enumerate() {
            let c = u[(i, j)];
            if c != 0 {
                for t in 0..n {
                    v[t] += &ob[t] * Z::from(c);
                }
            }
        }
        normalize_sign(&mut v);
        basis[j] = v;
    }
}

/// Makes the first nonzero entry positive.
pub fn normalize_sign(v: &mut [Z]) {
    if let Some(x) = v.iter().find(|x| !x.is_zero()) {
        if x.is_negative() {
            for y in v.iter_mut() {
                *y = -y.clone();
            }
        }
    }
}

/// Integral basis of `Zⁿ ∩ span(cols)` for rational column vectors.
pub fn saturate(cols: &[Vec<Q>], n: usize) -> Vec<Vec<Z>> {
    if cols.is_empty() {
        return Vec::new();
    }
    let v = QMatrix::from_cols(cols).expect("equal lengths");
    let r = v.rank();
    if r == n {
        return (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { Z::one() } else { Z::zero() })
                    .collect()
            })
            .collect();
    }
    let perp = v.transpose().kernel();
    let b = QMatrix::from_rows(&perp).expect("equal lengths");
    integer_kernel(&b)
}

/// Converts an integral vector to `i64` coordinates when it fits.
pub fn to_i64_vec(v: &[Z]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::Guard("integer coordinate exceeds 64 bits".into()))
        })
        .collect()
}

/// Greatest common divisor of the entries.
pub fn gcd_vec(v: &[Z]) -> Z {
    v.iter().fold(Z::zero(), |acc, x| acc.gcd(x))
}

/// Converts rational integral columns to a matrix.
pub fn zcols_to_q(cols: &[Vec<Z>]) -> QMatrix {
    let qcols: Vec<Vec<Q>> = cols
        .iter()
        .map(|c| c.iter().map(|x| Q::from_integer(x.clone())).collect())
        .collect();
    QMatrix::from_cols(&qcols).expect("equal lengths")
}

/// Integer as a big integer.
pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

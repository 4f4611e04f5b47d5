//! Adelic vector bundles over Q and their algebraic operations.
//!
//! A bundle of rank `n` is `Qⁿ` with the lattice `L = A·Zⁿ`, which fixes every finite
//! norm `‖x‖_p = max_i |(A⁻¹x)_i|_p`, and one archimedean norm given either by a
//! hermitian Gram matrix `G` (`‖x‖² = xᵀGx`) or by a symmetric convex body `C`.

pub mod degree;
pub mod extension;
pub mod height;
pub mod io;

use num_traits::{One, Zero};

pub use degree::{
    degree, degree_lp_formula, degree_normalized, euler_characteristic, lp_degree_asymptotics,
    LpAsymptotics, LpDegree,
};
pub use extension::{kappa_bracket, scalar_extension, scalar_extension_check, ScalarExtension};
pub use height::{height_map, height_vector, HeightValue, MapHeight};

use crate::convexgeom::{john_ellipsoid, lowner_ellipsoid, ConvexBody};
use crate::error::{Error, Result};
use crate::lattice::{saturate, zcols_to_q};
use crate::places::{abs_value, Idele, Place};
use crate::rational::{binomial, from_f64, QMatrix, Q};
use crate::tolerances::ELLIPSOID_TOL;

/// Archimedean norm of a bundle.
#[derive(Debug, Clone, PartialEq)]
pub enum ArchMetric {
    /// `‖x‖² = xᵀGx` with `G` symmetric positive definite.
    Hermitian(QMatrix),
    /// Gauge of a symmetric convex body.
    Body(ConvexBody),
}

impl ArchMetric {
    /// The metric as a convex body (a hermitian metric becomes an ellipsoid).
    pub fn to_body(&self) -> Result<ConvexBody> {
        match self {
            ArchMetric::Hermitian(g) => ConvexBody::ellipsoid(g.clone()),
            ArchMetric::Body(c) => Ok(c.clone()),
        }
    }

    /// Floating point norm of a vector.
    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            ArchMetric::Hermitian(g) => {
                let gf = g.to_f64();
                let v = nalgebra::DVector::from_column_slice(x);
                (v.transpose() * gf * &v)[(0, 0)].max(0.0).sqrt()
            }
            ArchMetric::Body(c) => c.gauge(x),
        }
    }

    /// Exact squared norm of a rational vector when available (hermitian metrics and polytopes).
    pub fn norm_sq_exact(&self, x: &[Q]) -> Option<Q> {
        match self {
            ArchMetric::Hermitian(g) => {
                let gx = g.mul_vec(x).ok()?;
                Some(crate::rational::dot(x, &gx))
            }
            ArchMetric::Body(c) => c.gauge_sq_exact(x),
        }
    }
}

/// An adelic vector bundle over Q.
#[derive(Debug, Clone, PartialEq)]
pub struct AdelicBundle {
    finite: QMatrix,
    arch: ArchMetric,
}

impl AdelicBundle {
    /// Bundle with lattice `A·Zⁿ` and the given archimedean metric.
    pub fn new(a: QMatrix, arch: ArchMetric) -> Result<Self> {
        let n = a.rows();
        if n == 0 || !a.is_square() {
            return Err(Error::InvalidBundle(
                "lattice matrix must be square of size ≥ 1".into(),
            ));
        }
        if a.det()?.is_zero() {
            return Err(Error::InvalidBundle("lattice matrix is singular".into()));
        }
        match &arch {
            ArchMetric::Hermitian(g) => {
                if g.rows() != n || !g.is_square() {
                    return Err(Error::Dimension(
                        "Gram matrix does not match the rank".into(),
                    ));
                }
                if !g.is_symmetric() || !g.is_positive_definite() {
                    return Err(Error::InvalidBundle(
                        "Gram matrix must be symmetric positive definite".into(),
                    ));
                }
            }
            ArchMetric::Body(c) => {
                if c.dim() != n {
                    return Err(Error::Dimension(
                        "body dimension does not match the rank".into(),
                    ));
                }
            }
        }
        Ok(AdelicBundle { finite: a, arch })
    }

    /// Hermitian bundle `(A·Zⁿ, G)`.
    pub fn hermitian(a: QMatrix, g: QMatrix) -> Result<Self> {
        Self::new(a, ArchMetric::Hermitian(g))
    }

    /// Bundle `(A·Zⁿ, C)`.
    pub fn with_body(a: QMatrix, c: ConvexBody) -> Result<Self> {
        Self::new(a, ArchMetric::Body(c))
    }

    /// Standard bundle `(Zⁿ, |·|₂)`.
    pub fn trivial(n: usize) -> Self {
        Self::hermitian(QMatrix::identity(n), QMatrix::identity(n)).expect("identity data")
    }

    /// Rank.
    pub fn rank(&self) -> usize {
        self.finite.rows()
    }

    /// Lattice basis matrix `A`.
    pub fn lattice(&self) -> &QMatrix {
        &self.finite
    }

    /// Archimedean metric.
    pub fn arch(&self) -> &ArchMetric {
        &self.arch
    }

    /// Whether the archimedean metric is hermitian.
    pub fn is_hermitian(&self) -> bool {
        matches!(self.arch, ArchMetric::Hermitian(_))
    }

    /// Gram matrix of a hermitian bundle.
    pub fn gram(&self) -> Option<&QMatrix> {
        match &self.arch {
            ArchMetric::Hermitian(g) => Some(g),
            ArchMetric::Body(_) => None,
        }
    }

    fn require_gram(&self, what: &str) -> Result<&QMatrix> {
        self.gram()
            .ok_or_else(|| Error::UnsupportedMetric(format!("{what} needs a hermitian metric")))
    }

    /// Gram matrix `AᵀGA` of the lattice basis.
    pub fn coordinate_gram(&self) -> Result<QMatrix> {
        let g = self.require_gram("the coordinate Gram matrix")?;
        self.finite.transpose().mul(g)?.mul(&self.finite)
    }

    /// Archimedean body in lattice coordinates, `A⁻¹C`.
    pub fn coordinate_body(&self) -> Result<ConvexBody> {
        self.arch.to_body()?.linear_image(&self.finite.inverse()?)
    }

    /// Finite norm `‖x‖_p = max_i |(A⁻¹x)_i|_p`.
    pub fn finite_norm(&self, x: &[Q], p: u64) -> Result<Q> {
        if x.len() != self.rank() {
            return Err(Error::Dimension(
                "vector length does not match the rank".into(),
            ));
        }
        if x.iter().all(|v| v.is_zero()) {
            return Err(Error::Domain("finite norm of the zero vector".into()));
        }
        let place = Place::finite(p)?;
        let y = self.finite.solve(x)?;
        let mut best = Q::zero();
        for v in y.iter().filter(|v| !v.is_zero()) {
            let a = abs_value(v, place)?;
            if a > best {
                best = a;
            }
        }
        Ok(best)
    }

    /// Archimedean norm of a vector.
    pub fn arch_norm(&self, x: &[f64]) -> f64 {
        self.arch.norm(x)
    }

    /// Dual bundle: lattice `A⁻ᵀ·Zⁿ`, metric `G⁻¹` or the polar body.
    pub fn dual(&self) -> Result<Self> {
        let a = self.finite.inverse()?.transpose();
        let arch = match &self.arch {
            ArchMetric::Hermitian(g) => ArchMetric::Hermitian(g.inverse()?),
            ArchMetric::Body(c) => ArchMetric::Body(c.polar()?),
        };
        Self::new(a, arch)
    }

    /// Direct sum `E₁ ⊕_p E₂`; hermitian for two hermitian summands and `p = 2`.
    pub fn direct_sum(&self, other: &AdelicBundle, p: f64) -> Result<Self> {
        let a = self.finite.block_diag(&other.finite);
        if let (Some(g1), Some(g2), true) = (self.gram(), other.gram(), p == 2.0) {
            return Self::hermitian(a, g1.block_diag(g2));
        }
        let body = ConvexBody::sum(&self.arch.to_body()?, &other.arch.to_body()?, p)?;
        Self::with_body(a, body)
    }

    /// Hermitian tensor product (Kronecker lattice and Gram matrix).
    pub fn tensor(&self, other: &AdelicBundle) -> Result<Self> {
        let g1 = self.require_gram("tensor product")?;
        let g2 = other.require_gram("tensor product")?;
        Self::hermitian(self.finite.kron(&other.finite), g1.kron(g2))
    }

    /// Exterior power `Λ^r E` in the basis `e_I`, `I` running over lexicographic `r`-subsets.
    pub fn exterior(&self, r: usize) -> Result<Self> {
        let g = self.require_gram("exterior power")?;
        if r == 0 || r > self.rank() {
            return Err(Error::Domain(format!(
                "exterior power {r} of a rank {} bundle",
                self.rank()
            )));
        }
        Self::hermitian(self.finite.compound(r), g.compound(r))
    }

    /// Determinant line `Λ^n E`.
    pub fn determinant(&self) -> Result<Self> {
        self.exterior(self.rank())
    }

    /// Symmetric power `S^ℓ E` in the monomial basis of [`monomials`].
    ///
    /// The Gram matrix is `⟨x^i, x^j⟩ = perm(G[i, j])/ℓ!`, which gives the orthogonal
    /// monomials of an orthonormal basis the norms `(i!/ℓ!)^{1/2}`; the lattice is the image
    /// of the monomial lattice of `Zⁿ`.
    pub fn symmetric(&self, l: usize) -> Result<Self> {
        let g = self.require_gram("symmetric power")?;
        if l == 0 {
            return Err(Error::Domain("symmetric power of order 0".into()));
        }
        let n = self.rank();
        let size = binomial((l + n - 1) as u64, (n - 1) as u64);
        if size > crate::tolerances::GAMMA_SIZE_GUARD {
            return Err(Error::Guard(format!("symmetric power of rank {size}")));
        }
        Self::hermitian(sym_power_matrix(&self.finite, l)?, sym_power_gram(g, l)?)
    }

    /// Sub-bundle on `span(S)` in the coordinates of the columns of `S`.
    ///
    /// The lattice is `{y : Sy ∈ L}` and the metric is the restriction.
    pub fn sub(&self, s: &QMatrix) -> Result<Self> {
        let n = self.rank();
        if s.rows() != n || s.cols() == 0 || s.rank() != s.cols() {
            return Err(Error::Dimension(
                "subspace basis must have full column rank".into(),
            ));
        }
        let ainv = self.finite.inverse()?;
        let coords = ainv.mul(s)?;
        let sat = saturate(&coords.columns(), n);
        let y = zcols_to_q(&sat);
        // Solve S·A' = A·Y for the new lattice basis in S-coordinates.
        let ay = self.finite.mul(&y)?;
        let a_sub = solve_in_span(s, &ay)?;
        let arch = match &self.arch {
            ArchMetric::Hermitian(g) => ArchMetric::Hermitian(s.transpose().mul(g)?.mul(s)?),
            ArchMetric::Body(c) => ArchMetric::Body(c.section(s)?),
        };
        Self::new(a_sub, arch)
    }

    /// Quotient by `span(S)`, in the coordinates `z = Wᵀx` where `W` spans the annihilator.
    ///
    /// Computed as the dual of the sub-bundle `span(W)` of the dual bundle.
    pub fn quotient(&self, s: &QMatrix) -> Result<(Self, QMatrix)> {
        let n = self.rank();
        if s.rows() != n || s.rank() != s.cols() || s.cols() >= n {
            return Err(Error::Dimension(
                "quotient needs a proper subspace given by independent columns".into(),
            ));
        }
        let w = if s.cols() == 0 {
            QMatrix::identity(n)
        } else {
            QMatrix::from_cols(&s.transpose().kernel())?
        };
        let q = self.dual()?.sub(&w)?.dual()?;
        Ok((q, w.transpose()))
    }

    /// Rescaling `x ↦ ‖a·x‖`: finite part `F` acting at every prime, archimedean part `T`.
    ///
    /// The new lattice is `F⁻¹A`, the Gram matrix `TᵀGT` and the body `T⁻¹C`, so that
    /// `deg = deg E − log|det a|_A` with `log|det a|_A = log|det T| − log|det F|`.
    pub fn scale(&self, f: &QMatrix, t: &QMatrix) -> Result<Self> {
        let a = f.inverse()?.mul(&self.finite)?;
        let arch = match &self.arch {
            ArchMetric::Hermitian(g) => ArchMetric::Hermitian(t.transpose().mul(g)?.mul(t)?),
            ArchMetric::Body(c) => ArchMetric::Body(c.linear_image(&t.inverse()?)?),
        };
        Self::new(a, arch)
    }

    /// Rescaling by a scalar idele (real component rationalized exactly from its `f64`).
    pub fn scale_idele(&self, a: &Idele) -> Result<Self> {
        let n = self.rank();
        let f = QMatrix::identity(n).scale(&a.finite_scalar());
        let real = a
            .arch()
            .iter()
            .find(|(p, _)| *p == Place::Real)
            .map_or(1.0, |(_, x)| *x);
        let t = QMatrix::identity(n).scale(&from_f64(real));
        self.scale(&f, &t)
    }

    /// John bundle: the archimedean body replaced by its John ellipsoid.
    pub fn john(&self) -> Result<Self> {
        match &self.arch {
            ArchMetric::Hermitian(_) => Ok(self.clone()),
            ArchMetric::Body(c) => {
                let j = john_ellipsoid(c, ELLIPSOID_TOL)?;
                Self::hermitian(self.finite.clone(), rational_spd(&j.matrix())?)
            }
        }
    }

    /// Lowner bundle: the archimedean body replaced by its Lowner ellipsoid.
    pub fn lowner(&self) -> Result<Self> {
        match &self.arch {
            ArchMetric::Hermitian(_) => Ok(self.clone()),
            ArchMetric::Body(c) => {
                let l = lowner_ellipsoid(c, ELLIPSOID_TOL)?;
                Self::hermitian(self.finite.clone(), rational_spd(&l.matrix())?)
            }
        }
    }
}

/// John bundle of `B`.
pub fn john_bundle(b: &AdelicBundle) -> Result<AdelicBundle> {
    b.john()
}

/// Lowner bundle of `B`.
pub fn lowner_bundle(b: &AdelicBundle) -> Result<AdelicBundle> {
    b.lowner()
}

fn rational_spd(m: &nalgebra::DMatrix<f64>) -> Result<QMatrix> {
    let sym = (m + m.transpose()) * 0.5;
    let q = QMatrix::from_f64(&sym);
    if !q.is_positive_definite() {
        return Err(Error::Solver {
            message: "ellipsoid matrix lost positive definiteness".into(),
            gap: f64::NAN,
        });
    }
    Ok(q)
}

/// Solves `S·X = B` for `X` when the columns of `B` lie in `span(S)`.
fn solve_in_span(s: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    let st = s.transpose();
    let normal = st.mul(s)?;
    let x = normal.inverse()?.mul(&st.mul(b)?)?;
    if s.mul(&x)? != *b {
        return Err(Error::Dimension(
            "columns do not lie in the subspace".into(),
        ));
    }
    Ok(x)
}

/// Exponent vectors of degree `ℓ` in `n` variables, ordered by decreasing exponent of the
/// first variable (for `n = 2, ℓ = 2`: `e₁², e₁e₂, e₂²`).
pub fn monomials(n: usize, l: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, l, &mut Vec::with_capacity(n), &mut out);
    out
}

fn index_list(e: &[usize]) -> Vec<usize> {
    e.iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat(i).take(k))
        .collect()
}

fn permanent(m: &[Vec<Q>]) -> Q {
    let l = m.len();
    if l == 0 {
        return Q::one();
    }
    // Ryser's formula.
    let mut total = Q::zero();
    for mask in 1u64..(1u64 << l) {
        let mut prod = Q::one();
        for row in m {
            let s = (0..l)
                .filter(|j| mask >> j & 1 == 1)
                .fold(Q::zero(), |acc, j| acc + &row[j]);
            prod *= s;
        }
        if (l - mask.count_ones() as usize) % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    total
}

/// Gram matrix of `S^ℓ` in the monomial basis: `perm(G[i, j])/ℓ!`.
pub fn sym_power_gram(g: &QMatrix, l: usize) -> Result<QMatrix> {
    let mons = monomials(g.rows(), l);
    let lists: Vec<Vec<usize>> = mons.iter().map(|e| index_list(e)).collect();
    let fact = (1..=l as i64).fold(Q::one(), |acc, k| acc * Q::from_integer(k.into()));
    let k = mons.len();
    let mut out = QMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let sub: Vec<Vec<Q>> = lists[a]
                .iter()
                .map(|&i| lists[b].iter().map(|&j| g[(i, j)].clone()).collect())
                .collect();
            let v = permanent(&sub) / &fact;
            out[(a, b)] = v.clone();
            out[(b, a)] = v;
        }
    }
    Ok(out)
}

/// Matrix of `S^ℓ(M)` on monomials: column `j` expands `∏_k (M e_k)^{j_k}`.
pub fn sym_power_matrix(m: &QMatrix, l: usize) -> Result<QMatrix> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::Dimension(
            "symmetric power of a non-square matrix".into(),
        ));
    }
    let mons = monomials(n, l);
    let index: std::collections::HashMap<Vec<usize>, usize> = mons
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let k = mons.len();
    let mut out = QMatrix::zeros(k, k);
    for (col, e) in mons.iter().enumerate() {
        // Polynomial as a map from exponent vectors to coefficients.
        let mut poly: std::collections::HashMap<Vec<usize>, Q> = std::collections::HashMap::new();
        poly.insert(vec![0; n], Q::one());
        for var in index_list(e) {
            let mut next: std::collections::HashMap<Vec<usize>, Q> =
                std::collections::HashMap::new();
            for (mono, c) in &poly {
                for i in 0..n {
                    let coef = &m[(i, var)];
                    if coef.is_zero() {
                        continue;
                    }
                    let mut mm = mono.clone();
                    mm[i] += 1;
                    *next.entry(mm).or_insert_with(Q::zero) += c * coef;
                }
            }
            poly = next;
        }
        for (mono, c) in poly {
            out[(index[&mono], col)] = c;
        }
    }
    Ok(out)
}

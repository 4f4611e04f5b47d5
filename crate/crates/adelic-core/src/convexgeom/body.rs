//! Origin-symmetric convex bodies, gauges and polarity.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use super::polytope;
use crate::error::{Error, Result};
use crate::rational::{dot, f64_vec, from_f64, qi, QMatrix, Q};

/// Conjugate exponent `p'` with `1/p + 1/p' = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `ℓ^p` norm of a real vector.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let m = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x
            .iter()
            .map(|v| (v.abs() / m).powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// Representation of a symmetric convex body.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyRep {
    /// `{x : ⟨a_i, x⟩ ≤ b_i}` with facets in `±` pairs.
    HPoly {
        normals: Vec<Vec<Q>>,
        offsets: Vec<Q>,
    },
    /// Convex hull of vertices given in `±` pairs.
    VPoly { vertices: Vec<Vec<Q>> },
    /// Unit ball of the `ℓ^p` norm, `p ∈ [1, ∞]`.
    LpBall { p: f64 },
    /// `{x : xᵀQx ≤ 1}`.
    Ellipsoid { q: QMatrix },
    /// `{(x, y) : |(j_left(x), j_right(y))|_p ≤ 1}`.
    Sum {
        left: Box<ConvexBody>,
        right: Box<ConvexBody>,
        p: f64,
    },
    /// Image `T·C` of a body under an invertible rational map.
    Image { body: Box<ConvexBody>, map: QMatrix },
}

/// Half-lists of facets and vertices of a polytope (see [`polytope`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyData {
    /// One facet vector `u` per pair, `C = {x : |⟨u, x⟩| ≤ 1}`.
    pub facets: Vec<Vec<Q>>,
    /// One vertex per pair.
    pub vertices: Vec<Vec<Q>>,
}

/// An origin-symmetric convex body with nonempty interior in `Rⁿ`.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    rep: BodyRep,
    poly: OnceLock<std::result::Result<Arc<PolyData>, Error>>,
    compiled: OnceLock<Arc<Gauge>>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rep == other.rep
    }
}

impl ConvexBody {
    fn from_rep(dim: usize, rep: BodyRep) -> Self {
        ConvexBody {
            dim,
            rep,
            poly: OnceLock::new(),
            compiled: OnceLock::new(),
        }
    }

    /// Polytope `{x : ⟨a_i, x⟩ ≤ b_i}`; facets must come in `±` pairs with positive offsets.
    pub fn hpoly(normals: Vec<Vec<Q>>, offsets: Vec<Q>) -> Result<Self> {
        let n = normals.first().map_or(0, |a| a.len());
        if n == 0 || normals.len() != offsets.len() || normals.iter().any(|a| a.len() != n) {
            return Err(Error::InvalidBody("facet list is empty or ragged".into()));
        }
        if offsets.iter().any(|b| !b.is_positive()) {
            return Err(Error::InvalidBody("facet offsets must be positive".into()));
        }
        let us: Vec<Vec<Q>> = normals
            .iter()
            .zip(&offsets)
            .map(|(a, b)| a.iter().map(|x| x / b).collect())
            .collect();
        check_pairs(&us, "facet")?;
        if QMatrix::from_rows(&us)?.rank() != n {
            return Err(Error::InvalidBody(
                "facet normals do not span the space".into(),
            ));
        }
        Ok(Self::from_rep(n, BodyRep::HPoly { normals, offsets }))
    }

    /// Polytope `{x : |⟨u_i, x⟩| ≤ 1}` from one vector per facet pair.
    pub fn hpoly_symmetric(us: Vec<Vec<Q>>) -> Result<Self> {
        let full = polytope::full_list(&polytope::dedup_pairs(&us));
        let offsets = vec![Q::one(); full.len()];
        Self::hpoly(full, offsets)
    }

    /// Convex hull of vertices given in `±` pairs.
    pub fn vpoly(vertices: Vec<Vec<Q>>) -> Result<Self> {
        let n = vertices.first().map_or(0, |a| a.len());
        if n == 0 || vertices.iter().any(|a| a.len() != n) {
            return Err(Error::InvalidBody("vertex list is empty or ragged".into()));
        }
        check_pairs(&vertices, "vertex")?;
        if QMatrix::from_rows(&vertices)?.rank() != n {
            return Err(Error::InvalidBody("vertices do not span the space".into()));
        }
        Ok(Self::from_rep(n, BodyRep::VPoly { vertices }))
    }

    /// `conv(±v_j)` from one vertex per pair.
    pub fn vpoly_symmetric(vs: Vec<Vec<Q>>) -> Result<Self> {
        Self::vpoly(polytope::full_list(&polytope::dedup_pairs(&vs)))
    }

    /// Unit ball of `ℓ^p` in dimension `n`.
    pub fn lp_ball(n: usize, p: f64) -> Result<Self> {
        if n == 0 || !(p >= 1.0) {
            return Err(Error::InvalidBody(format!(
                "lp ball needs n ≥ 1 and p ≥ 1 (got n={n}, p={p})"
            )));
        }
        Ok(Self::from_rep(n, BodyRep::LpBall { p }))
    }

    /// The cube `[-1, 1]ⁿ`.
    pub fn cube(n: usize) -> Self {
        Self::lp_ball(n, f64::INFINITY).expect("valid")
    }

    /// The cross-polytope, unit ball of `ℓ¹`.
    pub fn cross_polytope(n: usize) -> Self {
        Self::lp_ball(n, 1.0).expect("valid")
    }

    /// Euclidean unit ball.
    pub fn euclidean_ball(n: usize) -> Self {
        Self::lp_ball(n, 2.0).expect("valid")
    }

    /// Ellipsoid `{x : xᵀQx ≤ 1}`; `Q` must be symmetric positive definite.
    pub fn ellipsoid(q: QMatrix) -> Result<Self> {
        if !q.is_positive_definite() {
            return Err(Error::InvalidBody(
                "ellipsoid matrix is not positive definite".into(),
            ));
        }
        Ok(Self::from_rep(q.rows(), BodyRep::Ellipsoid { q }))
    }

    /// The `p`-sum `{(x, y) : |(j_1(x), j_2(y))|_p ≤ 1}`, simplified when it has a closed form.
    pub fn sum(left: &ConvexBody, right: &ConvexBody, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidBody(format!(
                "sum exponent must be ≥ 1 (got {p})"
            )));
        }
        let n = left.dim + right.dim;
        if let (BodyRep::LpBall { p: a }, BodyRep::LpBall { p: b }) = (&left.rep, &right.rep) {
            if *a == p && *b == p {
                return Self::lp_ball(n, p);
            }
        }
        if p == 2.0 {
            if let (Some(a), Some(b)) = (left.as_ellipsoid_matrix(), right.as_ellipsoid_matrix()) {
                return Self::ellipsoid(a.block_diag(&b));
            }
        }
        if p == 1.0 || p.is_infinite() {
            if let (Ok(a), Ok(b)) = (left.polytope(), right.polytope()) {
                let pad_l = |v: &Vec<Q>| {
                    v.iter()
                        .cloned()
                        .chain(std::iter::repeat(Q::zero()).take(right.dim))
                        .collect::<Vec<Q>>()
                };
                let pad_r = |v: &Vec<Q>| {
                    std::iter::repeat(Q::zero())
                        .take(left.dim)
                        .chain(v.iter().cloned())
                        .collect::<Vec<Q>>()
                };
                if p == 1.0 {
                    let vs: Vec<Vec<Q>> = a
                        .vertices
                        .iter()
                        .map(pad_l)
                        .chain(b.vertices.iter().map(pad_r))
                        .collect();
                    return Self::vpoly_symmetric(vs);
                }
                let us: Vec<Vec<Q>> = a
                    .facets
                    .iter()
                    .map(pad_l)
                    .chain(b.facets.iter().map(pad_r))
                    .collect();
                return Self::hpoly_symmetric(us);
            }
        }
        Ok(Self::from_rep(
            n,
            BodyRep::Sum {
                left: Box::new(left.clone()),
                right: Box::new(right.clone()),
                p,
            },
        ))
    }

    /// Image `T·C` under an invertible rational matrix.
    pub fn linear_image(&self, t: &QMatrix) -> Result<Self> {
        if t.rows() != self.dim || t.cols() != self.dim {
            return Err(Error::Dimension(
                "map does not match the body dimension".into(),
            ));
        }
        let tinv = t.inverse()?;
        match &self.rep {
            BodyRep::HPoly { normals, offsets } => {
                let tit = tinv.transpose();
                let ns = normals
                    .iter()
                    .map(|a| tit.mul_vec(a))
                    .collect::<Result<Vec<_>>>()?;
                Self::hpoly(ns, offsets.clone())
            }
            BodyRep::VPoly { vertices } => Self::vpoly(
                vertices
                    .iter()
                    .map(|v| t.mul_vec(v))
                    .collect::<Result<Vec<_>>>()?,
            ),
            BodyRep::Ellipsoid { q } => Self::ellipsoid(tinv.transpose().mul(q)?.mul(&tinv)?),
            BodyRep::LpBall { p } if *p == 2.0 => Self::ellipsoid(tinv.transpose().mul(&tinv)?),
            BodyRep::LpBall { p } if *p == 1.0 || p.is_infinite() => {
                let poly = self.polytope()?;
                Self::vpoly_symmetric(
                    poly.vertices
                        .iter()
                        .map(|v| t.mul_vec(v))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            BodyRep::Image { body, map } => body.linear_image(&t.mul(map)?),
            _ => Ok(Self::from_rep(
                self.dim,
                BodyRep::Image {
                    body: Box::new(self.clone()),
                    map: t.clone(),
                },
            )),
        }
    }

    /// Section `{y : V y ∈ C}` by the span of the columns of `V` (full column rank).
    pub fn section(&self, v: &QMatrix) -> Result<Self> {
        if v.rows() != self.dim || v.rank() != v.cols() {
            return Err(Error::Dimension(
                "section basis must have full column rank".into(),
            ));
        }
        if let Some(q) = self.as_ellipsoid_matrix() {
            return Self::ellipsoid(v.transpose().mul(&q)?.mul(v)?);
        }
        if let Ok(poly) = self.polytope() {
            let vt = v.transpose();
            let us = poly
                .facets
                .iter()
                .map(|u| vt.mul_vec(u))
                .collect::<Result<Vec<_>>>()?;
            let us: Vec<Vec<Q>> = us
                .into_iter()
                .filter(|u| u.iter().any(|x| !x.is_zero()))
                .collect();
            return Self::hpoly_symmetric(us);
        }
        Err(Error::UnsupportedMetric(
            "sections are available for polytopes and ellipsoids".into(),
        ))
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Representation.
    pub fn rep(&self) -> &BodyRep {
        &self.rep
    }

    /// Matrix `Q` when the body is an ellipsoid (including the Euclidean ball).
    pub fn as_ellipsoid_matrix(&self) -> Option<QMatrix> {
        match &self.rep {
            BodyRep::Ellipsoid { q } => Some(q.clone()),
            BodyRep::LpBall { p } if *p == 2.0 => Some(QMatrix::identity(self.dim)),
            _ => None,
        }
    }

    /// Whether the body is an ellipsoid.
    pub fn is_ellipsoid(&self) -> bool {
        self.as_ellipsoid_matrix().is_some()
    }

    /// Facet and vertex half-lists when the body is a polytope.
    pub fn polytope(&self) -> Result<Arc<PolyData>> {
        self.poly
            .get_or_init(|| self.compute_polytope().map(Arc::new))
            .clone()
    }

    /// Whether the body is a polytope.
    pub fn is_polytope(&self) -> bool {
        match &self.rep {
            BodyRep::HPoly { .. } | BodyRep::VPoly { .. } => true,
            BodyRep::LpBall { p } => *p == 1.0 || p.is_infinite(),
            _ => false,
        }
    }

    fn compute_polytope(&self) -> Result<PolyData> {
        let n = self.dim;
        match &self.rep {
            BodyRep::HPoly { normals, offsets } => {
                let us: Vec<Vec<Q>> = normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, b)| a.iter().map(|x| x / b).collect())
                    .collect();
                let us = polytope::dedup_pairs(&us);
                let vertices = polytope::vertices_of(&us, n)?;
                let facets = polytope::irredundant_facets(&us, &vertices, n);
                Ok(PolyData { facets, vertices })
            }
            BodyRep::VPoly { vertices } => {
                let vs = polytope::dedup_pairs(vertices);
                let facets = polytope::vertices_of(&vs, n)?;
                let vertices = polytope::extreme_points(&vs, &facets, n);
                Ok(PolyData { facets, vertices })
            }
            BodyRep::LpBall { p } if p.is_infinite() => Ok(PolyData {
                facets: unit_vectors(n),
                vertices: sign_vectors(n),
            }),
            BodyRep::LpBall { p } if *p == 1.0 => Ok(PolyData {
                facets: sign_vectors(n),
                vertices: unit_vectors(n),
            }),
            _ => Err(Error::UnsupportedMetric("body is not a polytope".into())),
        }
    }

    /// Polar body `C° = {y : ⟨x, y⟩ ≤ 1 for all x ∈ C}`.
    pub fn polar(&self) -> Result<Self> {
        let n = self.dim;
        match &self.rep {
            BodyRep::HPoly { normals, offsets } => Self::vpoly(
                normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, b)| a.iter().map(|x| x / b).collect())
                    .collect(),
            ),
            BodyRep::VPoly { vertices } => {
                Self::hpoly(vertices.clone(), vec![Q::one(); vertices.len()])
            }
            BodyRep::LpBall { p } => Self::lp_ball(n, conjugate_exponent(*p)),
            BodyRep::Ellipsoid { q } => Self::ellipsoid(q.inverse()?),
            BodyRep::Sum { left, right, p } => {
                Self::sum(&left.polar()?, &right.polar()?, conjugate_exponent(*p))
            }
            BodyRep::Image { body, map } => body.polar()?.linear_image(&map.inverse()?.transpose()),
        }
    }

    /// Compiled floating point gauge.
    pub fn gauge_fn(&self) -> Arc<Gauge> {
        self.compiled
            .get_or_init(|| Arc::new(Gauge::compile(self)))
            .clone()
    }

    /// Gauge `j_C(x) = inf{λ > 0 : x ∈ λC}`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.gauge_fn().eval(x)
    }

    /// Facet half-list `u` with `C = {x : |⟨u, x⟩| ≤ 1}`, possibly redundant for H-polytopes.
    pub fn facet_vectors(&self) -> Result<Vec<Vec<Q>>> {
        match &self.rep {
            BodyRep::HPoly { normals, offsets } => Ok(polytope::dedup_pairs(
                &normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, b)| a.iter().map(|x| x / b).collect())
                    .collect::<Vec<_>>(),
            )),
            _ => Ok(self.polytope()?.facets.clone()),
        }
    }

    /// Exact gauge of a rational vector for polytopes.
    pub fn gauge_exact(&self, x: &[Q]) -> Option<Q> {
        let facets = self.facet_vectors().ok()?;
        Some(
            facets
                .iter()
                .map(|u| dot(u, x).abs())
                .fold(Q::zero(), |m, v| if v > m { v } else { m }),
        )
    }

    /// Exact squared gauge `xᵀQx` of a rational vector for ellipsoids.
    pub fn gauge_sq_exact(&self, x: &[Q]) -> Option<Q> {
        let q = self.as_ellipsoid_matrix()?;
        Some(dot(x, &q.mul_vec(x).ok()?))
    }

    /// Support function `h_C(y) = max_{x ∈ C} ⟨x, y⟩`, the gauge of the polar body.
    pub fn support(&self, y: &[f64]) -> Result<f64> {
        Ok(self.polar()?.gauge(y))
    }

    /// Half-widths of the smallest axis-parallel box containing the body.
    pub fn bounding_box(&self) -> Result<Vec<f64>> {
        let polar = self.polar()?;
        Ok((0..self.dim)
            .map(|i| {
                let mut e = vec![0.0; self.dim];
                e[i] = 1.0;
                polar.gauge(&e)
            })
            .collect())
    }
}

fn check_pairs(vs: &[Vec<Q>], what: &str) -> Result<()> {
    let set: std::collections::BTreeSet<&Vec<Q>> = vs.iter().collect();
    for v in vs {
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidBody(format!("zero {what}")));
        }
        let neg: Vec<Q> = v.iter().map(|x| -x).collect();
        if !set.contains(&neg) {
            return Err(Error::InvalidBody(format!(
                "{what} list is not symmetric: missing the negative of {v:?}"
            )));
        }
    }
    Ok(())
}

/// Standard basis vectors as rationals.
pub fn unit_vectors(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect()
}

/// Sign vectors with first entry `+1`.
pub fn sign_vectors(n: usize) -> Vec<Vec<Q>> {
    (0..1u64 << (n - 1))
        .map(|mask| {
            (0..n)
                .map(|k| {
                    if k > 0 && (mask >> (k - 1)) & 1 == 1 {
                        qi(-1)
                    } else {
                        qi(1)
                    }
                })
                .collect()
        })
        .collect()
}

/// Floating point gauge evaluator.
#[derive(Debug, Clone)]
pub enum Gauge {
    /// `max_i |⟨u_i, x⟩|`.
    Poly(Vec<Vec<f64>>),
    /// `|x|_p`.
    Lp(f64),
    /// `sqrt(xᵀQx)`.
    Quadratic(DMatrix<f64>),
    /// `|(j_1(x_1), j_2(x_2))|_p` with the split after `usize` coordinates.
    Sum(Box<Gauge>, Box<Gauge>, usize, f64),
    /// `j(T⁻¹ x)` with the stored inverse.
    Image(Box<Gauge>, DMatrix<f64>),
}

impl Gauge {
    fn compile(c: &ConvexBody) -> Gauge {
        match &c.rep {
            BodyRep::LpBall { p } => Gauge::Lp(*p),
            BodyRep::Ellipsoid { q } => Gauge::Quadratic(q.to_f64()),
            BodyRep::HPoly { .. } | BodyRep::VPoly { .. } => Gauge::Poly(
                c.facet_vectors()
                    .expect("facets of a validated polytope")
                    .iter()
                    .map(|u| f64_vec(u))
                    .collect(),
            ),
            BodyRep::Sum { left, right, p } => Gauge::Sum(
                Box::new(Gauge::compile(left)),
                Box::new(Gauge::compile(right)),
                left.dim,
                *p,
            ),
            BodyRep::Image { body, map } => Gauge::Image(
                Box::new(Gauge::compile(body)),
                map.inverse().expect("invertible").to_f64(),
            ),
        }
    }

    /// Evaluates the gauge.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Gauge::Poly(us) => us.iter().fold(0.0, |m, u| {
                m.max(u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs())
            }),
            Gauge::Lp(p) => lp_norm(x, *p),
            Gauge::Quadratic(q) => {
                let n = x.len();
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += q[(i, j)] * x[i] * x[j];
                    }
                }
                s.max(0.0).sqrt()
            }
            Gauge::Sum(a, b, k, p) => lp_norm(&[a.eval(&x[..*k]), b.eval(&x[*k..])], *p),
            Gauge::Image(g, tinv) => {
                let n = x.len();
                let y: Vec<f64> = (0..n)
                    .map(|i| (0..n).map(|j| tinv[(i, j)] * x[j]).sum())
                    .collect();
                g.eval(&y)
            }
        }
    }
}

/// Rational approximation of a float vector.
pub fn rationalize(x: &[f64]) -> Vec<Q> {
    x.iter().map(|v| from_f64(*v)).collect()
}

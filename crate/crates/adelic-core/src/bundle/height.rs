//! Heights of vectors and of linear maps.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{AdelicBundle, ArchMetric};
use crate::convexgeom::{john_ellipsoid, lowner_ellipsoid};
use crate::error::{Error, Result};
use crate::rational::{content, f64_vec, ln_q, QMatrix, Q};
use crate::tolerances::ELLIPSOID_TOL;

/// Height of a vector, split into finite and archimedean contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightValue {
    /// `h(x)`.
    pub value: f64,
    /// `∏_p ‖x‖_p`, exactly.
    pub finite_part: Q,
    /// `log ‖x‖_∞`.
    pub arch_part: f64,
}

/// `h(x) = Σ_v n_v log‖x‖_v = log‖x‖_∞ − log content(A⁻¹x)`.
pub fn height_vector(b: &AdelicBundle, x: &[Q]) -> Result<HeightValue> {
    if x.len() != b.rank() {
        return Err(Error::Dimension(
            "vector length does not match the rank".into(),
        ));
    }
    if x.iter().all(|v| v.is_zero()) {
        return Err(Error::Domain("height of the zero vector".into()));
    }
    let y = b.lattice().solve(x)?;
    let finite_part = content(&y)?.recip();
    let arch_part = match b.arch().norm_sq_exact(x) {
        Some(s) => 0.5 * ln_q(&s),
        None => b.arch_norm(&f64_vec(x)).ln(),
    };
    Ok(HeightValue {
        value: ln_q(&finite_part) + arch_part,
        finite_part,
        arch_part,
    })
}

/// Height of a linear map between two bundles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapHeight {
    /// `h(φ)`, or an upper bound when `exact` is false.
    pub value: f64,
    /// `Σ_p log‖φ‖_p = −log content(A₂⁻¹MA₁)`.
    pub finite_part: f64,
    /// `log‖φ‖_∞` (or an upper bound).
    pub arch_part: f64,
    /// Whether the archimedean operator norm is exact.
    pub exact: bool,
}

/// `h(φ)` for `φ(x) = Mx` from `B₁` to `B₂`.
///
/// The archimedean operator norm is exact between ellipsoids, from an ellipsoid to a
/// polytope, and from a polytope source; otherwise the bound through the Lowner
/// ellipsoid of the source and the John ellipsoid of the target is returned.
pub fn height_map(b1: &AdelicBundle, b2: &AdelicBundle, m: &QMatrix) -> Result<MapHeight> {
    if m.cols() != b1.rank() || m.rows() != b2.rank() {
        return Err(Error::Dimension(
            "map does not match the bundle ranks".into(),
        ));
    }
    let local = b2.lattice().inverse()?.mul(m)?.mul(b1.lattice())?;
    if local.entries().iter().all(|v| v.is_zero()) {
        return Err(Error::Domain("height of the zero map".into()));
    }
    let finite_part = -ln_q(&content(local.entries())?);
    let (norm, exact) = operator_norm(b1.arch(), b2.arch(), m)?;
    let arch_part = norm.ln();
    Ok(MapHeight {
        value: finite_part + arch_part,
        finite_part,
        arch_part,
        exact,
    })
}

fn spd_f64(arch: &ArchMetric) -> Option<DMatrix<f64>> {
    match arch {
        ArchMetric::Hermitian(g) => Some(g.to_f64()),
        ArchMetric::Body(c) => c.as_ellipsoid_matrix().map(|q| q.to_f64()),
    }
}

fn polytope_of(arch: &ArchMetric) -> Option<std::sync::Arc<crate::convexgeom::PolyData>> {
    match arch {
        ArchMetric::Body(c) if c.is_polytope() => c.polytope().ok(),
        _ => None,
    }
}

/// `sup_{xᵀG₁x ≤ 1} sqrt((Mx)ᵀG₂(Mx))`.
fn ellipsoid_norm(g1: &DMatrix<f64>, g2: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<f64> {
    let l = g1
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("source Gram matrix".into()))?
        .l();
    let linv = l
        .try_inverse()
        .ok_or_else(|| Error::Singular("Cholesky factor".into()))?;
    let k = linv.clone() * m.transpose() * g2 * m * linv.transpose();
    let k = (&k + k.transpose()) * 0.5;
    Ok(k.symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |a, &v| a.max(v))
        .sqrt())
}

fn operator_norm(src: &ArchMetric, dst: &ArchMetric, m: &QMatrix) -> Result<(f64, bool)> {
    let mf = m.to_f64();
    if let Some(poly) = polytope_of(src) {
        let target = dst.clone();
        let best = poly.vertices.iter().fold(0.0f64, |acc, v| {
            let y = &mf * DVector::from_vec(f64_vec(v));
            acc.max(target.norm(y.as_slice()))
        });
        return Ok((best, true));
    }
    if let Some(g1) = spd_f64(src) {
        if let Some(g2) = spd_f64(dst) {
            return Ok((ellipsoid_norm(&g1, &g2, &mf)?, true));
        }
        if let Some(poly) = polytope_of(dst) {
            let g1inv = g1
                .try_inverse()
                .ok_or_else(|| Error::Singular("source Gram matrix".into()))?;
            let best = poly.facets.iter().fold(0.0f64, |acc, u| {
                let w = mf.transpose() * DVector::from_vec(f64_vec(u));
                acc.max((w.transpose() * &g1inv * &w)[(0, 0)].max(0.0).sqrt())
            });
            return Ok((best, true));
        }
    }
    let outer = match src {
        ArchMetric::Body(c) => lowner_ellipsoid(c, ELLIPSOID_TOL)?.matrix(),
        ArchMetric::Hermitian(g) => g.to_f64(),
    };
    let inner = match dst {
        ArchMetric::Body(c) => john_ellipsoid(c, ELLIPSOID_TOL)?.matrix(),
        ArchMetric::Hermitian(g) => g.to_f64(),
    };
    Ok((ellipsoid_norm(&outer, &inner, &mf)?, false))
}

/// Whether `B₁ ⪯ B₂`: `L₂ ⊆ L₁` (finite norms of `B₁` are at most those of `B₂`) and
/// `‖·‖₁ ≤ ‖·‖₂` on the given sample directions.
pub fn dominated_on(b1: &AdelicBundle, b2: &AdelicBundle, directions: &[Vec<f64>]) -> Result<bool> {
    let inclusion = b1.lattice().inverse()?.mul(b2.lattice())?.is_integral();
    let arch = directions
        .iter()
        .all(|x| b1.arch_norm(x) <= b2.arch_norm(x) * (1.0 + 1e-12));
    Ok(inclusion && arch)
}

//! Minkowski geometry of symmetric convex bodies: gauges, polars, volumes, Mahler
//! products, John and Lowner ellipsoids, volume ratios and Banach-Mazur brackets.

pub mod body;
pub mod ellipsoid;
pub mod polytope;
pub mod volume;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

pub use body::{conjugate_exponent, lp_norm, BodyRep, ConvexBody, Gauge, PolyData};
pub use ellipsoid::{john_ellipsoid, lowner_ellipsoid, EllipsoidResult};
pub use volume::{
    ball_log_volume, complex_log_volume, log_volume, lp_ball_log_volume, polytope_volume_exact,
    volume, volume_mc, McEstimate,
};

use crate::error::Result;
use crate::rational::f64_vec;
use crate::report::CheckReport;
use crate::tolerances::{ELLIPSOID_TOL, SUITE_MC_SIGMAS};

/// `log(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Volume ratios of a body together with its John and Lowner ellipsoids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeRatios {
    /// `(vol C / vol J(C))^{1/n}`.
    pub vr: f64,
    /// `(vol L(C) / vol C)^{1/n}`.
    pub vr_tilde: f64,
    /// `log vol C`.
    pub log_volume: f64,
    /// John ellipsoid.
    pub john: EllipsoidResult,
    /// Lowner ellipsoid.
    pub lowner: EllipsoidResult,
}

/// Computes `vr(C)` and `vr~(C)`.
pub fn volume_ratios(c: &ConvexBody, tol: f64) -> Result<VolumeRatios> {
    let n = c.dim() as f64;
    let lv = log_volume(c)?;
    let john = john_ellipsoid(c, tol)?;
    let lowner = lowner_ellipsoid(c, tol)?;
    Ok(VolumeRatios {
        vr: ((lv - john.log_volume) / n).exp(),
        vr_tilde: ((lowner.log_volume - lv) / n).exp(),
        log_volume: lv,
        john,
        lowner,
    })
}

/// `vr(C)`.
pub fn volume_ratio(c: &ConvexBody) -> Result<f64> {
    Ok(volume_ratios(c, ELLIPSOID_TOL)?.vr)
}

/// `vr~(C)`.
pub fn vr_tilde(c: &ConvexBody) -> Result<f64> {
    Ok(volume_ratios(c, ELLIPSOID_TOL)?.vr_tilde)
}

/// Certified bracket on the Banach-Mazur distance to the Euclidean ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmBracket {
    /// Lower bound.
    pub lower: f64,
    /// Upper bound.
    pub upper: f64,
    /// Smallest `a` with `C ⊆ a·J(C)`.
    pub john_factor: f64,
    /// Smallest `b` with `L(C)/b ⊆ C`.
    pub lowner_factor: f64,
}

/// Bracket `lower ≤ d(C, b_n^2) ≤ upper`.
///
/// The lower bound is `max(vr(C)vr(C°), vr~(C), vr~(C°), 1)`; the product `vr~(C)vr~(C°)`
/// is not a lower bound (the square has product `π/2 > √2`). The upper bound is the
/// minimum of `√n` and the two sandwich factors of the John and Lowner ellipsoids.
pub fn bm_distance_bound(c: &ConvexBody) -> Result<BmBracket> {
    let n = c.dim();
    let base = match c.rep() {
        BodyRep::Image { body, .. } => body.as_ref(),
        _ => c,
    };
    let (a, b) = match base.rep() {
        BodyRep::Ellipsoid { .. } => (1.0, 1.0),
        BodyRep::LpBall { p } => {
            let f = (n as f64).powf((0.5 - 1.0 / p).abs());
            (f, f)
        }
        _ if base.is_polytope() => {
            let poly = base.polytope()?;
            let j = john_ellipsoid(base, ELLIPSOID_TOL)?;
            let a = poly
                .vertices
                .iter()
                .map(|v| j.norm(&f64_vec(v)))
                .fold(1.0, f64::max);
            let l = lowner_ellipsoid(base, ELLIPSOID_TOL)?;
            let pinv = l.polar()?;
            let b = poly
                .facets
                .iter()
                .map(|u| pinv.norm(&f64_vec(u)))
                .fold(1.0, f64::max);
            (a, b)
        }
        _ => ((n as f64).sqrt(), (n as f64).sqrt()),
    };
    let r = volume_ratios(base, ELLIPSOID_TOL)?;
    let rp = volume_ratios(&base.polar()?, ELLIPSOID_TOL)?;
    let lower = (r.vr * rp.vr).max(r.vr_tilde).max(rp.vr_tilde).max(1.0);
    let upper = (n as f64).sqrt().min(a).min(b).max(lower);
    Ok(BmBracket {
        lower,
        upper,
        john_factor: a,
        lowner_factor: b,
    })
}

/// Mahler product `vol(C)·vol(C°)`.
pub fn mahler_product(c: &ConvexBody) -> Result<f64> {
    Ok((log_volume(c)? + log_volume(&c.polar()?)?).exp())
}

/// Serializes a body description for reports.
pub fn describe(c: &ConvexBody) -> serde_json::Value {
    match c.rep() {
        BodyRep::HPoly { normals, offsets } => serde_json::json!({
            "kind": "hpoly",
            "normals": normals.iter().map(|a| a.iter().map(crate::rational::format_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "offsets": offsets.iter().map(crate::rational::format_q).collect::<Vec<_>>(),
        }),
        BodyRep::VPoly { vertices } => serde_json::json!({
            "kind": "vpoly",
            "vertices": vertices.iter().map(|a| a.iter().map(crate::rational::format_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        BodyRep::LpBall { p } => {
            serde_json::json!({"kind": "lp", "dim": c.dim(), "p": if p.is_infinite() { "inf".to_string() } else { p.to_string() }})
        }
        BodyRep::Ellipsoid { q } => serde_json::json!({"kind": "gram", "matrix": q.to_strings()}),
        BodyRep::Sum { left, right, p } => {
            serde_json::json!({"kind": "sum", "p": p.to_string(), "left": describe(left), "right": describe(right)})
        }
        BodyRep::Image { body, map } => {
            serde_json::json!({"kind": "image", "map": map.to_strings(), "body": describe(body)})
        }
    }
}

/// Checks `4ⁿ/(n!)² ≤ vol(C)vol(C°) ≤ vol(b_n^2)²` on the log scale; the stronger
/// lower bound `4ⁿ/n!` is reported without being asserted.
pub fn santalo_mahler_check(c: &ConvexBody) -> Result<CheckReport> {
    let n = c.dim();
    let lp = log_volume(c)? + log_volume(&c.polar()?)?;
    let weak = n as f64 * 4f64.ln() - 2.0 * ln_factorial(n);
    let strong = n as f64 * 4f64.ln() - ln_factorial(n);
    let upper = 2.0 * ball_log_volume(n);
    Ok(CheckReport::new("santalo_mahler", describe(c), 0, 1e-9)
        .le("log mahler lower bound", weak, lp)
        .le("log blaschke-santalo", lp, upper)
        .info("log strong mahler bound", strong, lp))
}

/// Checks `binom(n+m, n)⁻¹ ≤ vol(C₁ ⊕_p C₂)/(vol C₁ vol C₂) ≤ 1` and the Γ-ratio identity.
///
/// Sums without a closed-form representation are measured by Monte Carlo and compared
/// within `SUITE_MC_SIGMAS` standard errors.
pub fn direct_sum_volume_check(
    c1: &ConvexBody,
    c2: &ConvexBody,
    p: f64,
    seed: u64,
) -> Result<CheckReport> {
    let (n, m) = (c1.dim() as f64, c2.dim() as f64);
    let s = ConvexBody::sum(c1, c2, p)?;
    let l1 = log_volume(c1)?;
    let l2 = log_volume(c2)?;
    let gamma_ratio = if p.is_infinite() {
        0.0
    } else {
        ln_gamma(1.0 + n / p) + ln_gamma(1.0 + m / p) - ln_gamma(1.0 + (n + m) / p)
    };
    let inv_binom = -(ln_gamma(n + m + 1.0) - ln_gamma(n + 1.0) - ln_gamma(m + 1.0));
    let instance =
        serde_json::json!({"left": describe(c1), "right": describe(c2), "p": p.to_string()});
    let mut rep = CheckReport::new("direct_sum_volume", instance, seed, 1e-9);
    let log_ratio;
    if matches!(s.rep(), BodyRep::Sum { .. }) {
        let est = volume_mc(&s, 400_000, seed)?;
        let expected = (l1 + l2 + gamma_ratio).exp();
        log_ratio = est.estimate.ln() - l1 - l2;
        // Normalized so that agreement within SUITE_MC_SIGMAS standard errors has nonnegative slack.
        rep = rep.le(
            "monte carlo deviation in standard errors",
            (est.estimate - expected).abs() / est.stderr.max(1e-300),
            SUITE_MC_SIGMAS,
        );
        rep = rep.info("log volume ratio (monte carlo)", log_ratio, gamma_ratio);
    } else {
        log_ratio = log_volume(&s)? - l1 - l2;
        rep = rep.equals("log volume ratio vs gamma ratio", log_ratio, gamma_ratio);
    }
    let bounded = if matches!(s.rep(), BodyRep::Sum { .. }) {
        gamma_ratio
    } else {
        log_ratio
    };
    Ok(rep
        .le("lower bound 1/binom(n+m,n)", inv_binom, bounded)
        .le("upper bound 1", bounded, 0.0))
}

/// Floating point matrix of an exact rational matrix, symmetrized.
pub fn sym_f64(m: &crate::rational::QMatrix) -> DMatrix<f64> {
    let f = m.to_f64();
    (&f + f.transpose()) * 0.5
}

//! Successive minima, the second theorem of Minkowski and the slope-minima comparison.
//!
//! Minima are lattice minima: `λ_i` is the smallest `t` such that `{x ∈ L : ‖x‖_∞ ≤ t}`
//! contains `i` independent vectors. Over Q every idele is a rational number times a unit
//! and a positive real, so scaling the finite places never lowers these values; the
//! experimental [`adelic_refinement`] measures this on a finite family of rescalings.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bundle::{AdelicBundle, ArchMetric};
use crate::convexgeom::{
    ball_log_volume, ln_factorial, log_volume, lowner_ellipsoid, volume_ratio, BodyRep,
};
use crate::error::{Error, Result};
use crate::lattice::{enumerate, lll};
use crate::rational::{ln_abs_q, q_vec, to_f64, QMatrix, Q};
use crate::report::CheckReport;
use crate::slopes::{canonical_polygon, polygon_bracket};
use crate::tolerances::{ELLIPSOID_TOL, ENUM_NODE_BUDGET, RANK_GUARD, SLOPE_TOL};

/// Meaning of the reported minima.
pub const LATTICE_MINIMA_FLAG: &str = "lattice-minima upper bound for the adelic definition";

/// Slack on the Lowner containment of non-polytope bodies, whose ellipsoids are closed forms.
const CLOSED_FORM_CONTAINMENT: f64 = 1e-6;

/// Successive minima with independent witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaResult {
    /// `λ_1 ≤ … ≤ λ_n`.
    pub lambdas: Vec<f64>,
    /// Lattice coordinates of the witnesses; witness `i` has norm `λ_i`.
    pub witnesses: Vec<Vec<i64>>,
    /// Meaning of the values.
    pub semantics_flag: String,
}

impl MinimaResult {
    /// `Σ log λ_i`.
    pub fn log_product(&self) -> f64 {
        self.lambdas.iter().map(|l| l.ln()).sum()
    }
}

/// Candidate vector with its norm and an exact sort key when available.
struct Candidate {
    norm: f64,
    exact: Option<Q>,
    x: Vec<i64>,
}

/// Successive minima of the lattice under the archimedean norm.
///
/// Hermitian metrics are enumerated directly; for a body the enumeration runs inside a
/// scaled Lowner ellipsoid containing the gauge ball, then filters by the gauge.
pub fn successive_minima(b: &AdelicBundle) -> Result<MinimaResult> {
    let n = b.rank();
    if n > RANK_GUARD {
        return Err(Error::Guard(format!(
            "minima of rank {n} exceed the rank guard {RANK_GUARD}"
        )));
    }
    let a = b.lattice();
    let af = a.to_f64();
    // Ellipsoid `xᵀMx ≤ s²t²` containing `{‖x‖ ≤ t}` in ambient coordinates.
    let (m, s) = match b.arch() {
        ArchMetric::Hermitian(g) => (g.to_f64(), 1.0),
        ArchMetric::Body(c) => {
            let l = lowner_ellipsoid(c, ELLIPSOID_TOL)?;
            let s = match c.rep() {
                BodyRep::HPoly { .. } | BodyRep::VPoly { .. } => {
                    let poly = c.polytope()?;
                    poly.vertices
                        .iter()
                        .map(|v| l.norm(&crate::rational::f64_vec(v)))
                        .fold(1.0, f64::max)
                }
                _ => 1.0 + CLOSED_FORM_CONTAINMENT,
            };
            (l.matrix(), s)
        }
    };
    let h = af.transpose() * &m * &af;
    let h = (&h + h.transpose()) * 0.5;
    let u = lll(&h, 0.99);
    let norm_of = |x: &[i64]| {
        let v: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| af[(i, j)] * x[j] as f64).sum())
            .collect();
        b.arch_norm(&v)
    };
    let mut t_star = 0.0f64;
    for j in 0..n {
        let col: Vec<i64> = (0..n).map(|i| u[(i, j)]).collect();
        t_star = t_star.max(norm_of(&col));
    }
    let radius_sq = (s * t_star).powi(2) * (1.0 + 1e-9);
    let mut cands: Vec<Candidate> = Vec::new();
    let outcome = enumerate(&h, radius_sq, true, ENUM_NODE_BUDGET, |x, _, _| {
        let norm = norm_of(x);
        if norm <= t_star * (1.0 + 1e-12) {
            cands.push(Candidate {
                norm,
                exact: None,
                x: x.to_vec(),
            });
        }
    });
    if !outcome.complete {
        return Err(Error::Uncertified(
            "minima enumeration exhausted its budget".into(),
        ));
    }
    for c in cands.iter_mut() {
        let xq = a.mul_vec(&q_vec(&c.x))?;
        c.exact = exact_norm_sq(b.arch(), &xq);
    }
    cands.sort_by(|p, q| match (&p.exact, &q.exact) {
        (Some(a), Some(b)) => a.cmp(b).then_with(|| p.x.cmp(&q.x)),
        _ => p.norm.total_cmp(&q.norm).then_with(|| p.x.cmp(&q.x)),
    });
    let mut lambdas = Vec::with_capacity(n);
    let mut witnesses: Vec<Vec<i64>> = Vec::with_capacity(n);
    for c in &cands {
        let mut trial: Vec<Vec<Q>> = witnesses.iter().map(|w| q_vec(w)).collect();
        trial.push(q_vec(&c.x));
        if QMatrix::from_cols(&trial)?.rank() == trial.len() {
            lambdas.push(c.exact.as_ref().map_or(c.norm, |e| to_f64(e).sqrt()));
            witnesses.push(c.x.clone());
            if witnesses.len() == n {
                break;
            }
        }
    }
    if witnesses.len() != n {
        return Err(Error::Uncertified(
            "fewer than n independent vectors inside the search radius".into(),
        ));
    }
    Ok(MinimaResult {
        lambdas,
        witnesses,
        semantics_flag: LATTICE_MINIMA_FLAG.into(),
    })
}

fn exact_norm_sq(arch: &ArchMetric, x: &[Q]) -> Option<Q> {
    match arch {
        ArchMetric::Hermitian(_) => arch.norm_sq_exact(x),
        ArchMetric::Body(c) if c.is_polytope() => c.gauge_exact(x).map(|g| &g * &g),
        ArchMetric::Body(c) => c.gauge_sq_exact(x),
    }
}

/// `C(n, Q) = log(2ⁿ / vol b_n²)`.
pub fn borek_constant(n: usize) -> f64 {
    n as f64 * std::f64::consts::LN_2 - ball_log_volume(n)
}

/// `C(n, Q) / ((n/2) log n)`, which tends to 1.
pub fn borek_ratio(n: usize) -> f64 {
    borek_constant(n) / (0.5 * n as f64 * (n as f64).ln())
}

/// `log vol` of the archimedean ball and `log vr` of the bundle.
fn ball_data(b: &AdelicBundle) -> Result<(f64, f64)> {
    match b.arch() {
        ArchMetric::Hermitian(g) => Ok((
            ball_log_volume(b.rank()) - 0.5 * crate::rational::ln_q(&g.det()?),
            0.0,
        )),
        ArchMetric::Body(c) => Ok((log_volume(c)?, volume_ratio(c)?.ln())),
    }
}

/// Both bounds of the second theorem of Minkowski over Q:
/// `Πλ_i ≤ 2ⁿ (covol / vol B) vrⁿ` and `Πλ_i · vol B / covol ≥ 2ⁿ / n!`.
pub fn minkowski_second_check(b: &AdelicBundle) -> Result<CheckReport> {
    let n = b.rank();
    let mins = successive_minima(b)?;
    let log_prod = mins.log_product();
    let log_covol = ln_abs_q(&b.lattice().det()?);
    let (log_vol, log_vr) = ball_data(b)?;
    let ln2 = std::f64::consts::LN_2;
    let upper = n as f64 * ln2 + log_covol - log_vol + n as f64 * log_vr;
    let lower = n as f64 * ln2 - ln_factorial(n);
    Ok(
        CheckReport::new("minkowski_second", instance(b, &mins), 0, SLOPE_TOL)
            .le(
                "log prod lambda <= n log 2 + log covol - log vol + n log vr",
                log_prod,
                upper,
            )
            .le(
                "n log 2 - log n! <= log prod lambda + log vol - log covol",
                lower,
                log_prod + log_vol - log_covol,
            ),
    )
}

fn instance(b: &AdelicBundle, m: &MinimaResult) -> serde_json::Value {
    json!({
        "bundle": crate::bundle::io::bundle_to_json(b).unwrap_or(serde_json::Value::Null),
        "lambdas": m.lambdas,
    })
}

/// Slope-minima comparison `−i log Δ ≤ μ_i + log λ_i ≤ (i/n) C(n, Q) + i log Δ`.
///
/// Hermitian bundles use the exact polygon and `Δ = 1`. For a body the slopes are
/// bracketed by the John and Lowner polygons and `Δ` by its certified upper bound; the
/// lower inequality is asserted with the largest admissible `μ_i`, and the upper one
/// (which lattice minima, being upper bounds, cannot confirm) is reported only.
pub fn borek_check(b: &AdelicBundle) -> Result<CheckReport> {
    let n = b.rank();
    let mins = successive_minima(b)?;
    let c = borek_constant(n);
    let mut rep = CheckReport::new("borek", instance(b, &mins), 0, SLOPE_TOL);
    if b.is_hermitian() {
        let p = canonical_polygon(b, 1.0)?;
        if !p.certified {
            return Err(Error::Uncertified(
                "polygon search did not cover all candidates".into(),
            ));
        }
        for i in 1..=n {
            let mid = p.slopes[i - 1] + mins.lambdas[i - 1].ln();
            rep = rep
                .le(&format!("0 <= mu_{i} + log lambda_{i}"), 0.0, mid)
                .le(
                    &format!("mu_{i} + log lambda_{i} <= (i/n) C"),
                    mid,
                    i as f64 / n as f64 * c,
                );
        }
        return Ok(rep);
    }
    let br = polygon_bracket(b)?;
    let log_delta = br.delta_upper.ln();
    for i in 1..=n {
        let mu_hi = br.upper_at(i) - br.lower_at(i - 1);
        let mu_lo = br.lower_at(i) - br.upper_at(i - 1);
        let log_l = mins.lambdas[i - 1].ln();
        rep = rep
            .le(
                &format!("-i log Delta <= mu_{i} + log lambda_{i}"),
                -(i as f64) * log_delta,
                mu_hi + log_l,
            )
            .info(
                &format!("mu_{i} + log lambda_{i} <= (i/n) C + i log Delta"),
                mu_lo + log_l,
                i as f64 / n as f64 * c + i as f64 * log_delta,
            );
    }
    Ok(rep)
}

/// Outcome of the search over finite rescalings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    /// Lattice minima.
    pub lattice: Vec<f64>,
    /// Smallest value of `|a|_A`-normalized minima over the rescalings tried.
    pub best: Vec<f64>,
    /// Whether some rescaling lowered a minimum by more than the tolerance.
    pub improved: bool,
}

/// Scales the lattice at each prime `p ≤ 7` by `p^{-1}`, `1` or `p` and recomputes the
/// minima weighted by the adelic absolute value of the rescaling.
pub fn adelic_refinement(b: &AdelicBundle) -> Result<RefinementReport> {
    let base = successive_minima(b)?;
    let n = b.rank();
    let primes = [2i64, 3, 5, 7];
    let mut best = base.lambdas.clone();
    for code in 0..81u32 {
        let mut c = Q::from_integer(1.into());
        let mut k = code;
        for p in primes {
            let e = (k % 3) as i32 - 1;
            k /= 3;
            let pq = Q::from_integer(p.into());
            c *= num_traits::pow::Pow::pow(&pq, e);
        }
        // Allowing ‖x‖_p ≤ |c|_p^{-1} at every prime means the lattice c·L; |a|_A then
        // carries the finite factor Π_p |c|_p^{-1} = |c|.
        let f = QMatrix::identity(n).scale(&(Q::from_integer(1.into()) / &c));
        let scaled = b.scale(&f, &QMatrix::identity(n))?;
        let m = successive_minima(&scaled)?;
        let weight = 1.0 / to_f64(&c).abs();
        for i in 0..n {
            best[i] = best[i].min(m.lambdas[i] * weight);
        }
    }
    let improved = best
        .iter()
        .zip(&base.lambdas)
        .any(|(a, l)| *a < l * (1.0 - 1e-9));
    Ok(RefinementReport {
        lattice: base.lambdas,
        best,
        improved,
    })
}

/// `λ_i(B)` bracketed by the hermitian companions:
/// `λ_i(L) ≤ λ_i(B) ≤ b·λ_i(L)` and `λ_i(B) ≤ λ_i(J) ≤ a·λ_i(B)` with the sandwich factors.
pub fn minima_bracket_check(b: &AdelicBundle) -> Result<CheckReport> {
    let ArchMetric::Body(c) = b.arch() else {
        return Err(Error::UnsupportedMetric(
            "minima bracket needs a body".into(),
        ));
    };
    let mins = successive_minima(b)?;
    let lj = successive_minima(&b.john()?)?;
    let ll = successive_minima(&b.lowner()?)?;
    let bm = crate::convexgeom::bm_distance_bound(c)?;
    let mut rep = CheckReport::new("minima_bracket", instance(b, &mins), 0, 1e-6);
    for i in 0..b.rank() {
        let (lb, lj, ll) = (mins.lambdas[i].ln(), lj.lambdas[i].ln(), ll.lambdas[i].ln());
        rep = rep
            .le(&format!("lambda_{} lowner <= lambda", i + 1), ll, lb)
            .le(
                &format!("lambda_{} <= b lambda lowner", i + 1),
                lb,
                ll + bm.lowner_factor.ln(),
            )
            .le(&format!("lambda_{} <= lambda john", i + 1), lb, lj)
            .le(
                &format!("lambda_{} john <= a lambda", i + 1),
                lj,
                lb + bm.john_factor.ln(),
            );
    }
    Ok(rep)
}

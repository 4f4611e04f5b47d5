//! Named, reproducible checks over generated instances.
//!
//! The slope inequalities for linear maps are checked exactly on hermitian bundles. For
//! body metrics every slope is replaced by the side of its John/Lowner bracket that keeps
//! the inequality sound, and `Δ` by its certified upper bound on the side it weakens.

pub mod instances;
mod suites;

use serde_json::json;

use crate::bundle::io::bundle_to_json;
use crate::bundle::{degree, height_map, AdelicBundle, ArchMetric};
use crate::convexgeom::{ball_log_volume, bm_distance_bound, ln_factorial, volume_ratio};
use crate::error::{Error, Result};
use crate::rational::QMatrix;
use crate::report::CheckReport;
use crate::slopes::{
    canonical_polygon, mu_max_bracket, mu_min_bracket, polygon_bracket, slope, PolygonBracket,
};
use crate::tolerances::IDENTITY_TOL;

pub use suites::{
    gamma_asymptotics_check, run_case, run_suite, suite_kinds, summarize, SuiteSummary, SUITES,
};

/// Tolerance of checks that involve numerically solved ellipsoids.
pub const BRACKET_TOL: f64 = 1e-6;

fn describe(b: &AdelicBundle) -> serde_json::Value {
    bundle_to_json(b).unwrap_or(serde_json::Value::Null)
}

fn tolerance_for(bundles: &[&AdelicBundle]) -> f64 {
    if bundles.iter().all(|b| b.is_hermitian()) {
        IDENTITY_TOL
    } else {
        BRACKET_TOL
    }
}

/// Certified upper bound on `Δ(B)`; 1 for hermitian metrics.
pub fn delta_upper(b: &AdelicBundle) -> Result<f64> {
    match b.arch() {
        ArchMetric::Hermitian(_) => Ok(1.0),
        ArchMetric::Body(c) => Ok(bm_distance_bound(c)?.upper),
    }
}

/// `log vr(B)`; 0 for hermitian metrics.
pub fn log_vr(b: &AdelicBundle) -> Result<f64> {
    match b.arch() {
        ArchMetric::Hermitian(_) => Ok(0.0),
        ArchMetric::Body(c) => Ok(volume_ratio(c)?.ln()),
    }
}

/// Bracket `(lower, upper)` on `μ_i` from a polygon bracket.
pub fn mu_i_bracket(br: &PolygonBracket, i: usize) -> (f64, f64) {
    (
        br.lower_at(i) - br.upper_at(i - 1),
        br.upper_at(i) - br.lower_at(i - 1),
    )
}

fn slopes_bracket(b: &AdelicBundle) -> Result<PolygonBracket> {
    if b.is_hermitian() {
        let p = canonical_polygon(b, 1.0)?;
        if !p.certified {
            return Err(Error::Uncertified(
                "polygon search exhausted its budget".into(),
            ));
        }
        return Ok(PolygonBracket {
            lower: p.clone(),
            upper: p,
            delta_upper: 1.0,
            john_factor: 1.0,
        });
    }
    polygon_bracket(b)
}

fn map_height_upper(b1: &AdelicBundle, b2: &AdelicBundle, m: &QMatrix) -> Result<(f64, bool)> {
    let h = height_map(b1, b2, m)?;
    Ok((h.value, h.exact))
}

/// `deg B + deg B^∨ = 0` for a hermitian metric. For a body metric the sum equals
/// `log(vol C · vol C°) − 2 log vol b_n`, which lies in `[n log 4 − 2 log n! − 2 log vol b_n, 0]`.
pub fn check_degree_duality(b: &AdelicBundle) -> Result<CheckReport> {
    let sum = degree(b)? + degree(&b.dual()?)?;
    let report = CheckReport::new(
        "degree_duality",
        json!({ "bundle": describe(b) }),
        0,
        tolerance_for(&[b]),
    );
    if b.is_hermitian() {
        return Ok(report.equals("deg B + deg dual B = 0", sum, 0.0));
    }
    let n = b.rank();
    let lower = n as f64 * 4f64.ln() - 2.0 * ln_factorial(n) - 2.0 * ball_log_volume(n);
    Ok(report
        .le("mahler lower bound <= deg B + deg dual B", lower, sum)
        .le("deg B + deg dual B <= 0", sum, 0.0))
}

/// `deg B = deg F + deg B/F` for a hermitian bundle and the subspace `F = span(S)`.
pub fn check_quotient_additivity(b: &AdelicBundle, s: &QMatrix) -> Result<CheckReport> {
    if !b.is_hermitian() {
        return Err(Error::UnsupportedMetric("quotient additivity".into()));
    }
    let sub = b.sub(s)?;
    let (quot, _) = b.quotient(s)?;
    let instance = json!({ "bundle": describe(b), "subspace": s.to_strings() });
    Ok(
        CheckReport::new("quotient_additivity", instance, 0, IDENTITY_TOL).equals(
            "deg B = deg F + deg B/F",
            degree(b)?,
            degree(&sub)? + degree(&quot)?,
        ),
    )
}

/// `deg(B₁ ⊕₂ B₂) = deg B₁ + deg B₂` for hermitian summands.
pub fn check_direct_sum_degree(b1: &AdelicBundle, b2: &AdelicBundle) -> Result<CheckReport> {
    if !b1.is_hermitian() || !b2.is_hermitian() {
        return Err(Error::UnsupportedMetric("orthogonal direct sum".into()));
    }
    let s = b1.direct_sum(b2, 2.0)?;
    let instance = json!({ "left": describe(b1), "right": describe(b2) });
    Ok(
        CheckReport::new("direct_sum_degree", instance, 0, IDENTITY_TOL).equals(
            "deg (B1 + B2) = deg B1 + deg B2",
            degree(&s)?,
            degree(b1)? + degree(b2)?,
        ),
    )
}

/// `deg B₁ = deg B₂ + h(φ)` for an isomorphism `φ` of lines.
pub fn check_line_isomorphism(
    b1: &AdelicBundle,
    b2: &AdelicBundle,
    m: &QMatrix,
) -> Result<CheckReport> {
    if b1.rank() != 1 || b2.rank() != 1 {
        return Err(Error::Domain("both bundles must have rank 1".into()));
    }
    let h = height_map(b1, b2, m)?;
    let instance = json!({ "source": describe(b1), "target": describe(b2), "map": m.to_strings() });
    Ok(
        CheckReport::new("line_isomorphism", instance, 0, tolerance_for(&[b1, b2])).equals(
            "deg B1 = deg B2 + h(phi)",
            degree(b1)?,
            degree(b2)? + h.value,
        ),
    )
}

/// `deg B₁ = deg B₂ + h(det φ)` on the determinant lines of hermitian bundles.
pub fn check_iso_determinant(
    b1: &AdelicBundle,
    b2: &AdelicBundle,
    m: &QMatrix,
) -> Result<CheckReport> {
    if !b1.is_hermitian() || !b2.is_hermitian() {
        return Err(Error::UnsupportedMetric(
            "determinant of a non-hermitian bundle".into(),
        ));
    }
    let d = m.det()?;
    if b1.rank() != b2.rank() || num_traits::Zero::is_zero(&d) {
        return Err(Error::Singular("the map must be an isomorphism".into()));
    }
    let h = height_map(&b1.determinant()?, &b2.determinant()?, &QMatrix::diag(&[d]))?;
    let instance = json!({ "source": describe(b1), "target": describe(b2), "map": m.to_strings() });
    Ok(
        CheckReport::new("iso_determinant", instance, 0, IDENTITY_TOL).equals(
            "deg B1 = deg B2 + h(det phi)",
            degree(b1)?,
            degree(b2)? + h.value,
        ),
    )
}

/// `μ_max(B₁) ≤ μ_max(B₂) + h(φ)` for an injective `φ`.
pub fn check_slope_injective(
    b1: &AdelicBundle,
    b2: &AdelicBundle,
    m: &QMatrix,
) -> Result<CheckReport> {
    if m.rank() != b1.rank() {
        return Err(Error::Domain("the map is not injective".into()));
    }
    let (lhs, _) = mu_max_bracket(b1)?;
    let (_, mu2) = mu_max_bracket(b2)?;
    let (h, _) = map_height_upper(b1, b2, m)?;
    let instance = json!({ "source": describe(b1), "target": describe(b2), "map": m.to_strings() });
    Ok(
        CheckReport::new("slope_injective", instance, 0, tolerance_for(&[b1, b2])).le(
            "mu_max(B1) <= mu_max(B2) + h(phi)",
            lhs,
            mu2 + h,
        ),
    )
}

/// One step of a coordinate filtration of the target space.
#[derive(Debug, Clone)]
pub struct SlopeStep {
    /// Target coordinates spanning `F_{i−1}/F_i`.
    pub rows: Vec<usize>,
    /// Bundle structure on the quotient `G_i`.
    pub target: AdelicBundle,
}

/// Slope inequality for an injective evaluation map `φ = M` and a filtration of `Q^m`
/// given by consecutive blocks of target coordinates:
/// `μ(B) ≤ Σ dim(E_i/E_{i+1})/n (μ_max(G_i) + h(φ_i)) + log vr(B)`.
pub fn check_slope_method(
    b: &AdelicBundle,
    m: &QMatrix,
    steps: &[SlopeStep],
) -> Result<CheckReport> {
    let n = b.rank();
    if m.cols() != n || m.rank() != n {
        return Err(Error::Domain("the evaluation map must be injective".into()));
    }
    let mut covered: Vec<usize> = steps.iter().flat_map(|s| s.rows.iter().copied()).collect();
    covered.sort_unstable();
    if covered != (0..m.rows()).collect::<Vec<_>>() {
        return Err(Error::Domain(
            "the steps must partition the target coordinates".into(),
        ));
    }
    let mut rhs = log_vr(b)?;
    let mut exact = true;
    let mut killed: Vec<usize> = Vec::new();
    let mut terms = Vec::new();
    // Basis of E_i = φ⁻¹(F_{i−1}) in the coordinates of B.
    let mut basis = QMatrix::identity(n);
    for step in steps {
        if step.target.rank() != step.rows.len() {
            return Err(Error::Dimension(
                "quotient bundle rank does not match its block".into(),
            ));
        }
        let dim_i = basis.cols();
        killed.extend(step.rows.iter().copied());
        let next = kernel_basis(&m.select(&killed, &(0..n).collect::<Vec<_>>()), n);
        let dim_next = next.as_ref().map_or(0, |q| q.cols());
        let d = dim_i - dim_next;
        if d > 0 {
            let e_i = b.sub(&basis)?;
            let phi = m
                .select(&step.rows, &(0..n).collect::<Vec<_>>())
                .mul(&basis)?;
            let (_, mu_g) = mu_max_bracket(&step.target)?;
            let h = height_map(&e_i, &step.target, &phi)?;
            exact &= h.exact;
            rhs += d as f64 / n as f64 * (mu_g + h.value);
            terms.push(json!({ "dim": d, "mu_max": mu_g, "height": h.value }));
        }
        match next {
            Some(q) => basis = q,
            None => break,
        }
    }
    let instance = json!({
        "bundle": describe(b),
        "map": m.to_strings(),
        "blocks": steps.iter().map(|s| s.rows.clone()).collect::<Vec<_>>(),
        "targets": steps.iter().map(|s| describe(&s.target)).collect::<Vec<_>>(),
        "terms": terms,
        "exact_heights": exact,
    });
    let lhs = slope(b)?;
    Ok(
        CheckReport::new("slope_method", instance, 0, tolerance_for(&[b])).le(
            "mu(B) <= sum dim/n (mu_max(G_i) + h(phi_i)) + log vr(B)",
            lhs,
            rhs,
        ),
    )
}

/// Columns spanning the kernel of `rows`, or `None` when the kernel is zero.
fn kernel_basis(rows: &QMatrix, n: usize) -> Option<QMatrix> {
    let k = if rows.rows() == 0 {
        QMatrix::identity(n).columns()
    } else {
        rows.kernel()
    };
    if k.is_empty() {
        None
    } else {
        QMatrix::from_cols(&k).ok()
    }
}

/// `μ_{i+dim ker φ}(B₁) ≤ μ_i(B₂) + i log Δ(B₂) + (i + dim ker φ) log Δ(B₁) + h(φ)`.
pub fn check_map_slope_bound(
    b1: &AdelicBundle,
    b2: &AdelicBundle,
    m: &QMatrix,
    i: usize,
) -> Result<CheckReport> {
    let rho = m.rank();
    if i == 0 || i > rho {
        return Err(Error::Domain(format!("index {i} outside 1..={rho}")));
    }
    let k = b1.rank() - rho;
    let br1 = slopes_bracket(b1)?;
    let br2 = slopes_bracket(b2)?;
    let (lhs, _) = mu_i_bracket(&br1, i + k);
    let (_, mu2) = mu_i_bracket(&br2, i);
    let (h, _) = map_height_upper(b1, b2, m)?;
    let rhs = mu2 + i as f64 * delta_upper(b2)?.ln() + (i + k) as f64 * delta_upper(b1)?.ln() + h;
    let instance =
        json!({ "source": describe(b1), "target": describe(b2), "map": m.to_strings(), "i": i });
    Ok(
        CheckReport::new("map_slope_bound", instance, 0, tolerance_for(&[b1, b2])).le(
            "mu_{i+k}(B1) <= mu_i(B2) + i log D(B2) + (i+k) log D(B1) + h(phi)",
            lhs,
            rhs,
        ),
    )
}

/// For a surjective `φ : B₁ → B₂` with `m = dim B₂`:
/// `μ_max(B₂) ≤ deg B₂ − (m−1)μ_min(B₁) + (m−1)h(φ) + m log(Δ(B₁)Δ(B₂))`.
pub fn check_surjective_slope_bound(
    b1: &AdelicBundle,
    b2: &AdelicBundle,
    m: &QMatrix,
) -> Result<CheckReport> {
    let dim = b2.rank();
    if m.rank() != dim {
        return Err(Error::Domain("the map is not surjective".into()));
    }
    let (lhs, _) = mu_max_bracket(b2)?;
    let (mu_min_lo, _) = mu_min_bracket(b1)?;
    let (h, _) = map_height_upper(b1, b2, m)?;
    let k = (dim - 1) as f64;
    let rhs = degree(b2)? - k * mu_min_lo
        + k * h
        + dim as f64 * (delta_upper(b1)? * delta_upper(b2)?).ln();
    let instance = json!({ "source": describe(b1), "target": describe(b2), "map": m.to_strings() });
    Ok(CheckReport::new(
        "surjective_slope_bound",
        instance,
        0,
        tolerance_for(&[b1, b2]),
    )
    .le(
        "mu_max(B2) <= deg B2 - (m-1) mu_min(B1) + (m-1) h(phi) + m log(D(B1) D(B2))",
        lhs,
        rhs,
    ))
}

/// `μ(B₁ ⊗ … ⊗ B_ℓ) = Σ μ(B_i)` for hermitian bundles.
pub fn check_tensor_slope(bs: &[AdelicBundle]) -> Result<CheckReport> {
    let (first, rest) = bs
        .split_first()
        .ok_or_else(|| Error::Domain("empty tensor product".into()))?;
    let mut t = first.clone();
    for b in rest {
        t = t.tensor(b)?;
    }
    let sum: f64 = bs.iter().map(slope).sum::<Result<f64>>()?;
    let instance = json!({ "factors": bs.iter().map(describe).collect::<Vec<_>>() });
    Ok(
        CheckReport::new("tensor_slope", instance, 0, IDENTITY_TOL).equals(
            "mu(tensor) = sum mu(B_i)",
            slope(&t)?,
            sum,
        ),
    )
}

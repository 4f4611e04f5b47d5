//! Slopes, the canonical polygon and the Harder-Narasimhan filtration.
//!
//! For a hermitian bundle with coordinate Gram matrix `H`, a saturated rank-`r`
//! sublattice spanned by the columns of an integral matrix `Y` has degree
//! `−½ log det(YᵀHY)`. Its Plücker vector is a primitive decomposable vector of
//! `Λ^r Zⁿ` whose squared norm for the compound Gram matrix `Λ^r H` is `det(YᵀHY)`, so
//! the largest degree in rank `r` is found by a shortest decomposable vector search.
//! Sublattices are reported in lattice coordinates (integral columns relative to the
//! basis `A` of the bundle).

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bundle::{degree, AdelicBundle, ArchMetric};
use crate::convexgeom::bm_distance_bound;
use crate::error::{Error, Result};
use crate::lattice::{enumerate, gcd_vec, hkz, integer_kernel, norm_sq_exact, to_i64_vec};
use crate::rational::{ln_q, subsets, QMatrix, Q, Z};
use crate::report::CheckReport;
use crate::tolerances::{
    ENUM_NODE_BUDGET, ENUM_RADIUS_SLACK, RADIUS_ESCALATION_FACTOR, RADIUS_ESCALATION_ROUNDS,
    RANK_GUARD, SEMISTABLE_TOL, SLOPE_TOL,
};

/// Slope of the empty bundle.
pub const EMPTY_SLOPE: f64 = f64::NEG_INFINITY;

/// Integral basis of a sublattice, as columns in lattice coordinates.
pub type SublatticeBasis = Vec<Vec<i64>>;

/// Slope `deg B / rank B`.
pub fn slope(b: &AdelicBundle) -> Result<f64> {
    Ok(degree(b)? / b.rank() as f64)
}

/// Slope from a degree and a rank, with [`EMPTY_SLOPE`] for rank 0.
pub fn slope_of(degree: f64, rank: usize) -> f64 {
    if rank == 0 {
        EMPTY_SLOPE
    } else {
        degree / rank as f64
    }
}

/// Canonical polygon of a hermitian bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPolygon {
    /// Rank of the bundle.
    pub n: usize,
    /// `P(r)` for `r = 0..=n`.
    pub vertices: Vec<f64>,
    /// `μ_1 ≥ … ≥ μ_n`.
    pub slopes: Vec<f64>,
    /// Largest degree of a rank-`r` sublattice, `r = 0..=n`.
    pub maxima: Vec<f64>,
    /// Ranks where `P` is not differentiable, with `0` and `n`.
    pub breakpoints: Vec<usize>,
    /// For each `r`, the saturated sublattices of degree `P(r)` (empty below the polygon).
    pub achievers: Vec<Vec<SublatticeBasis>>,
    /// Whether every rank search covered all improving candidates.
    pub certified: bool,
    /// Exact `det(YᵀHY)` of the best sublattice in each rank.
    #[serde(skip)]
    pub covolumes_sq: Vec<Q>,
}

impl CanonicalPolygon {
    /// `μ_max = μ_1`.
    pub fn mu_max(&self) -> f64 {
        self.slopes[0]
    }

    /// `μ_n`, the last slope.
    pub fn mu_last(&self) -> f64 {
        self.slopes[self.n - 1]
    }

    /// Polygon value at a real abscissa in `[0, n]`.
    pub fn value_at(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.n as f64);
        let k = (x.floor() as usize).min(self.n.saturating_sub(1));
        self.vertices[k] + (x - k as f64) * self.slopes[k]
    }

    /// Ordered `(rank, value)` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,value\n");
        for (r, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "{r},{}", crate::report::format_sig(*v));
        }
        s
    }

    /// SVG plot of the polygon with axes `(rank, P(rank))`.
    pub fn to_svg(&self) -> String {
        svg_plot(self.n, &[(&self.vertices, &self.breakpoints, "steelblue")])
    }
}

/// Plots polylines over ranks `0..=n` with marked breakpoints.
fn svg_plot(n: usize, lines: &[(&[f64], &[usize], &str)]) -> String {
    let (w, h, m) = (480.0, 320.0, 40.0);
    let all = lines.iter().flat_map(|(v, _, _)| v.iter().copied());
    let lo = all.clone().fold(f64::INFINITY, f64::min).min(0.0);
    let hi = all.fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let span = if hi - lo > 1e-12 { hi - lo } else { 1.0 };
    let px = |r: usize| m + (w - 2.0 * m) * r as f64 / n.max(1) as f64;
    let py = |v: f64| h - m - (h - 2.0 * m) * (v - lo) / span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
        py(0.0),
        w - m,
        py(0.0)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{:.3}" stroke="black"/>"#,
        h - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" font-size="12">rank</text>"#,
        w - m,
        h - m / 4.0
    );
    let _ = writeln!(
        s,
        r#"<text x="4" y="{:.3}" font-size="12">P(rank)</text>"#,
        m / 2.0
    );
    for (vertices, breakpoints, color) in lines {
        let points: Vec<String> = vertices
            .iter()
            .enumerate()
            .map(|(r, v)| format!("{:.3},{:.3}", px(r), py(*v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for &r in breakpoints.iter() {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{color}"/>"#,
                px(r),
                py(vertices[r])
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Options of the polygon search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Enumeration radius as a multiple of the incumbent norm.
    pub radius_factor: f64,
    /// Node budget of each enumeration.
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            radius_factor: 1.0,
            budget: ENUM_NODE_BUDGET,
        }
    }
}

/// Best sublattices of one rank.
#[derive(Debug, Clone)]
struct RankSearch {
    covolume_sq: Q,
    achievers: Vec<SublatticeBasis>,
    certified: bool,
}

/// Canonical polygon of a hermitian bundle.
pub fn canonical_polygon(b: &AdelicBundle, radius_factor: f64) -> Result<CanonicalPolygon> {
    canonical_polygon_with(
        b,
        SearchOptions {
            radius_factor,
            ..SearchOptions::default()
        },
    )
}

/// Canonical polygon with explicit search options.
pub fn canonical_polygon_with(b: &AdelicBundle, opts: SearchOptions) -> Result<CanonicalPolygon> {
    if !b.is_hermitian() {
        return Err(Error::UnsupportedMetric(
            "the exact canonical polygon".into(),
        ));
    }
    if !(opts.radius_factor > 0.0) {
        return Err(Error::Domain("radius factor must be positive".into()));
    }
    polygon_of_gram(&b.coordinate_gram()?, opts)
}

/// Canonical polygon of the lattice `Zⁿ` with Gram matrix `h`.
pub fn polygon_of_gram(h: &QMatrix, opts: SearchOptions) -> Result<CanonicalPolygon> {
    let n = h.rows();
    if n == 0 {
        return Err(Error::Domain("polygon of a rank 0 bundle".into()));
    }
    if n > RANK_GUARD {
        return Err(Error::Guard(format!(
            "polygon of rank {n} exceeds the rank guard {RANK_GUARD}"
        )));
    }
    let det = h.det()?;
    let hinv = h.inverse()?;
    let mut searches: Vec<RankSearch> = Vec::with_capacity(n + 1);
    searches.push(RankSearch {
        covolume_sq: Q::one(),
        achievers: vec![Vec::new()],
        certified: true,
    });
    for r in 1..=n {
        let s = if r == n {
            RankSearch {
                covolume_sq: det.clone(),
                achievers: vec![identity_columns(n)],
                certified: true,
            }
        } else if 2 * r > n {
            let dual = best_sublattices(&hinv, n - r, opts)?;
            RankSearch {
                covolume_sq: &det * &dual.covolume_sq,
                achievers: dual
                    .achievers
                    .iter()
                    .map(|z| orthogonal_complement(z, n))
                    .collect::<Result<_>>()?,
                certified: dual.certified,
            }
        } else {
            best_sublattices(h, r, opts)?
        };
        searches.push(s);
    }
    Ok(assemble(n, searches))
}

fn identity_columns(n: usize) -> SublatticeBasis {
    (0..n)
        .map(|j| (0..n).map(|i| (i == j) as i64).collect())
        .collect()
}

/// Saturated basis of `{y : zᵀy = 0 for every column z}`.
fn orthogonal_complement(z: &SublatticeBasis, n: usize) -> Result<SublatticeBasis> {
    let rows: Vec<Vec<i64>> = z.clone();
    let m = QMatrix::from_i64(&rows);
    let mut ker = integer_kernel(&m);
    sort_basis(&mut ker);
    ker.iter()
        .map(|v| to_i64_vec(v))
        .collect::<Result<Vec<_>>>()
        .map(|cols| {
            debug_assert!(cols.iter().all(|c| c.len() == n));
            cols
        })
}

fn sort_basis(cols: &mut [Vec<Z>]) {
    for c in cols.iter_mut() {
        crate::lattice::normalize_sign(c);
    }
}

/// Upper concave hull and per-rank values, all comparisons exact.
fn assemble(n: usize, searches: Vec<RankSearch>) -> CanonicalPolygon {
    let covs: Vec<Q> = searches.iter().map(|s| s.covolume_sq.clone()).collect();
    let maxima: Vec<f64> = covs.iter().map(|c| -0.5 * ln_q(c)).collect();
    // b lies on or below the chord from a to c iff N_b^(c-a) ≥ N_a^(c-b) N_c^(b-a).
    let below_or_on = |a: usize, b: usize, c: usize| -> bool {
        let lhs = num_traits::pow(covs[b].clone(), c - a);
        let rhs = num_traits::pow(covs[a].clone(), c - b) * num_traits::pow(covs[c].clone(), b - a);
        lhs >= rhs
    };
    let on_chord = |a: usize, b: usize, c: usize| -> bool {
        let lhs = num_traits::pow(covs[b].clone(), c - a);
        let rhs = num_traits::pow(covs[a].clone(), c - b) * num_traits::pow(covs[c].clone(), b - a);
        lhs == rhs
    };
    let mut hull: Vec<usize> = Vec::new();
    for r in 0..=n {
        while hull.len() >= 2 && below_or_on(hull[hull.len() - 2], hull[hull.len() - 1], r) {
            hull.pop();
        }
        hull.push(r);
    }
    let mut vertices = vec![0.0; n + 1];
    let mut achievers: Vec<Vec<SublatticeBasis>> = vec![Vec::new(); n + 1];
    for w in hull.windows(2) {
        let (a, c) = (w[0], w[1]);
        let mu = (maxima[c] - maxima[a]) / (c - a) as f64;
        for r in a..=c {
            vertices[r] = maxima[a] + (r - a) as f64 * mu;
        }
        for r in a + 1..c {
            if on_chord(a, r, c) {
                achievers[r] = searches[r].achievers.clone();
            }
        }
    }
    for &r in &hull {
        vertices[r] = maxima[r];
        achievers[r] = searches[r].achievers.clone();
    }
    let slopes = (1..=n).map(|i| vertices[i] - vertices[i - 1]).collect();
    CanonicalPolygon {
        n,
        vertices,
        slopes,
        maxima,
        breakpoints: hull,
        achievers,
        certified: searches.iter().all(|s| s.certified),
        covolumes_sq: covs,
    }
}

/// Smallest `det(YᵀHY)` over saturated rank-`r` sublattices, with all minimizers.
fn best_sublattices(h: &QMatrix, r: usize, opts: SearchOptions) -> Result<RankSearch> {
    let n = h.rows();
    let hf = h.to_f64();
    let u = hkz(&hf)?;
    let cols: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|i| u[(i, j)]).collect())
        .collect();
    let mut incumbent: Option<Q> = None;
    for subset in subsets(n, r) {
        let y: Vec<Vec<i64>> = subset.iter().map(|&j| cols[j].clone()).collect();
        let d = sub_gram(h, &y).det()?;
        if incumbent.as_ref().map_or(true, |b| &d < b) {
            incumbent = Some(d);
        }
    }
    let incumbent = incumbent.expect("at least one subset");
    let compound = h.compound(r);
    let cf = compound.to_f64();
    let mut factor = opts.radius_factor;
    let mut last = None;
    for _round in 0..=RADIUS_ESCALATION_ROUNDS {
        let res = search_compound(&compound, &cf, n, r, &incumbent, factor, opts.budget);
        let exhausted = !res.1;
        let done = res.0.certified || exhausted;
        last = Some(res.0);
        if done {
            break;
        }
        factor *= RADIUS_ESCALATION_FACTOR;
    }
    Ok(last.expect("one round"))
}

/// One enumeration round; returns the search and whether the budget sufficed.
fn search_compound(
    compound: &QMatrix,
    cf: &DMatrix<f64>,
    n: usize,
    r: usize,
    incumbent: &Q,
    factor: f64,
    budget: u64,
) -> (RankSearch, bool) {
    let inc_f = crate::rational::to_f64(incumbent);
    let mut best: Option<Q> = None;
    let mut best_f = f64::INFINITY;
    let mut found: Vec<Vec<i64>> = Vec::new();
    let radius = factor * factor * inc_f * (1.0 + ENUM_RADIUS_SLACK);
    let outcome = enumerate(cf, radius, true, budget, |x, v, rad| {
        if v > best_f * (1.0 + 1e-9) {
            return;
        }
        if gcd_small(x) != 1 || !is_decomposable(x, n, r) {
            return;
        }
        let exact = norm_sq_exact(compound, x);
        match best.as_ref().map(|b| exact.cmp(b)) {
            None | Some(std::cmp::Ordering::Less) => {
                best_f = crate::rational::to_f64(&exact);
                best = Some(exact);
                found.clear();
                found.push(x.to_vec());
                *rad = rad.min(best_f * (1.0 + ENUM_RADIUS_SLACK));
            }
            Some(std::cmp::Ordering::Equal) => found.push(x.to_vec()),
            Some(std::cmp::Ordering::Greater) => {}
        }
    });
    // The radius covers the incumbent when factor ≥ 1, so the minimum cannot be missed.
    let covers = factor >= 1.0
        || best
            .as_ref()
            .is_some_and(|b| crate::rational::to_f64(b) <= radius);
    let certified = outcome.complete && covers;
    let (covolume_sq, vectors) = match best {
        Some(b) if &b <= incumbent => (b, found),
        _ => (incumbent.clone(), Vec::new()),
    };
    let mut achievers: Vec<SublatticeBasis> = vectors
        .iter()
        .filter_map(|w| plucker_to_basis(w, n, r))
        .collect();
    achievers.sort();
    achievers.dedup();
    if achievers.is_empty() {
        // Only reachable when the search radius did not reach the incumbent.
        return (
            RankSearch {
                covolume_sq,
                achievers,
                certified: false,
            },
            outcome.complete,
        );
    }
    (
        RankSearch {
            covolume_sq,
            achievers,
            certified,
        },
        outcome.complete,
    )
}

fn sub_gram(h: &QMatrix, y: &[Vec<i64>]) -> QMatrix {
    let yq = QMatrix::from_cols(
        &y.iter()
            .map(|c| crate::rational::q_vec(c))
            .collect::<Vec<_>>(),
    )
    .expect("columns");
    yq.transpose()
        .mul(h)
        .and_then(|m| m.mul(&yq))
        .expect("shapes")
}

fn gcd_small(x: &[i64]) -> i64 {
    x.iter().fold(0i64, |g, &v| num_integer::gcd(g, v))
}

/// Matrix of `v ↦ v ∧ w` from `Zⁿ` to `Λ^{r+1} Zⁿ`.
fn wedge_matrix(w: &[i64], n: usize, r: usize) -> Vec<Vec<i64>> {
    let rs = subsets(n, r);
    let targets = subsets(n, r + 1);
    let mut m = vec![vec![0i64; n]; targets.len()];
    for (k, subset) in rs.iter().enumerate() {
        if w[k] == 0 {
            continue;
        }
        for j in 0..n {
            if subset.contains(&j) {
                continue;
            }
            let before = subset.iter().filter(|&&i| i < j).count();
            let sign = if before % 2 == 0 { 1 } else { -1 };
            let mut t = subset.clone();
            t.push(j);
            t.sort_unstable();
            let row = targets.binary_search(&t).expect("subset present");
            m[row][j] += sign * w[k];
        }
    }
    m
}

/// Whether `w ∈ Λ^r Zⁿ` is a pure wedge `v₁ ∧ … ∧ v_r`.
pub fn is_decomposable(w: &[i64], n: usize, r: usize) -> bool {
    if r <= 1 || r + 1 >= n {
        // Every vector of Λ^1, Λ^{n-1} and Λ^n is decomposable.
        return true;
    }
    let m = wedge_matrix(w, n, r);
    integer_rank(&m) == n - r
}

/// Rank of an integral matrix by fraction-free elimination, falling back to rationals.
fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if let Some(rank) = bareiss_rank(&mut a) {
        return rank;
    }
    QMatrix::from_i64(rows).rank()
}

fn bareiss_rank(a: &mut [Vec<i128>]) -> Option<usize> {
    let m = a.len();
    if m == 0 {
        return Some(0);
    }
    let n = a[0].len();
    let mut rank = 0usize;
    let mut prev: i128 = 1;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..m {
            for j in col + 1..n {
                let v = a[i][j]
                    .checked_mul(a[rank][col])?
                    .checked_sub(a[i][col].checked_mul(a[rank][j])?)?;
                a[i][j] = v / prev;
            }
            a[i][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    Some(rank)
}

/// Saturated basis of the subspace whose Plücker vector is `w`, when `w` is decomposable.
fn plucker_to_basis(w: &[i64], n: usize, r: usize) -> Option<SublatticeBasis> {
    let mut ker = integer_kernel(&QMatrix::from_i64(&wedge_matrix(w, n, r)));
    if ker.len() != r {
        return None;
    }
    sort_basis(&mut ker);
    if ker.iter().any(|c| gcd_vec(c).is_zero()) {
        return None;
    }
    ker.iter()
        .map(|v| v.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect()
}

/// Columns of `y` as an ambient basis `A·Y` of the corresponding subspace.
pub fn ambient_basis(b: &AdelicBundle, y: &SublatticeBasis) -> Result<QMatrix> {
    let yq = QMatrix::from_cols(
        &y.iter()
            .map(|c| crate::rational::q_vec(c))
            .collect::<Vec<_>>(),
    )?;
    b.lattice().mul(&yq)
}

/// Whether the span of `small` is contained in the span of `large`.
pub fn span_contains(large: &SublatticeBasis, small: &SublatticeBasis) -> bool {
    if small.is_empty() {
        return true;
    }
    if large.is_empty() {
        return false;
    }
    let both: Vec<Vec<i64>> = large.iter().chain(small.iter()).cloned().collect();
    rank_of_columns(&both) == rank_of_columns(large)
}

fn rank_of_columns(cols: &[Vec<i64>]) -> usize {
    let n = cols[0].len();
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    integer_rank(&rows)
}

/// Polygons of the John (lower) and Lowner (upper) bundles of a body-metric bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonBracket {
    /// Polygon of the John bundle: `P_J ≤ P_B`.
    pub lower: CanonicalPolygon,
    /// Polygon of the Lowner bundle: `P_B ≤ P_L`.
    pub upper: CanonicalPolygon,
    /// Certified upper bound on the Banach-Mazur distance `Δ`.
    pub delta_upper: f64,
    /// Factor `a ≤ √n` with `J ⊆ C ⊆ a·J` for the John ellipsoid `J`.
    pub john_factor: f64,
}

impl PolygonBracket {
    /// SVG plot of the lower (John) and upper (Lowner) polygons.
    pub fn to_svg(&self) -> String {
        let n = self.lower.n;
        let upper: Vec<f64> = (0..=n).map(|r| self.upper_at(r)).collect();
        svg_plot(
            n,
            &[
                (&self.lower.vertices, &self.lower.breakpoints, "steelblue"),
                (&upper, &[], "darkorange"),
            ],
        )
    }

    /// Lower bound on `P_B(r)`.
    pub fn lower_at(&self, r: usize) -> f64 {
        self.lower.vertices[r]
    }

    /// Upper bound on `P_B(r)`: `min(P_L(r), P_J(r) + r log a)`.
    pub fn upper_at(&self, r: usize) -> f64 {
        self.upper.vertices[r].min(self.lower.vertices[r] + r as f64 * self.john_factor.ln())
    }

    /// Bracket on `μ_max`.
    pub fn mu_max_bracket(&self) -> (f64, f64) {
        (
            self.lower.mu_max(),
            self.upper
                .mu_max()
                .min(self.lower.mu_max() + self.john_factor.ln()),
        )
    }
}

/// Bracket on the canonical polygon of any bundle (tight for hermitian metrics).
pub fn polygon_bracket(b: &AdelicBundle) -> Result<PolygonBracket> {
    match b.arch() {
        ArchMetric::Hermitian(_) => {
            let p = canonical_polygon(b, 1.0)?;
            Ok(PolygonBracket {
                lower: p.clone(),
                upper: p,
                delta_upper: 1.0,
                john_factor: 1.0,
            })
        }
        ArchMetric::Body(c) => {
            let bm = bm_distance_bound(c)?;
            let (delta_upper, john_factor) =
                (bm.upper, bm.john_factor.min((b.rank() as f64).sqrt()));
            let lower = canonical_polygon(&b.john()?, 1.0)?;
            let upper = canonical_polygon(&b.lowner()?, 1.0)?;
            Ok(PolygonBracket {
                lower,
                upper,
                delta_upper,
                john_factor,
            })
        }
    }
}

/// `μ_max` of a hermitian bundle.
pub fn mu_max(b: &AdelicBundle) -> Result<f64> {
    let p = certified_polygon(b)?;
    Ok(p.mu_max())
}

/// `μ_min = −μ_max(B^∨)` of a hermitian bundle.
pub fn mu_min(b: &AdelicBundle) -> Result<f64> {
    Ok(-mu_max(&b.dual()?)?)
}

/// Bracket `(lower, upper)` on `μ_max` for any metric.
pub fn mu_max_bracket(b: &AdelicBundle) -> Result<(f64, f64)> {
    Ok(polygon_bracket(b)?.mu_max_bracket())
}

/// Bracket on `μ_min` for any metric, through the dual bundle.
pub fn mu_min_bracket(b: &AdelicBundle) -> Result<(f64, f64)> {
    let (lo, hi) = mu_max_bracket(&b.dual()?)?;
    Ok((-hi, -lo))
}

fn certified_polygon(b: &AdelicBundle) -> Result<CanonicalPolygon> {
    let p = canonical_polygon(b, 1.0)?;
    if !p.certified {
        return Err(Error::Uncertified(
            "polygon search did not cover all candidates".into(),
        ));
    }
    Ok(p)
}

/// One member of the Harder-Narasimhan filtration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HnMember {
    /// Rank.
    pub rank: usize,
    /// Normalized degree.
    pub degree: f64,
    /// Saturated basis in lattice coordinates.
    pub basis: SublatticeBasis,
}

/// Harder-Narasimhan filtration `0 = E_0 ⊂ E_1 ⊂ … ⊂ E_g = E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HnFiltration {
    /// The chain, starting with the zero sublattice and ending with `E`.
    pub members: Vec<HnMember>,
}

impl HnFiltration {
    /// Number of steps `g`.
    pub fn length(&self) -> usize {
        self.members.len() - 1
    }
}

/// Harder-Narasimhan filtration of a hermitian bundle.
///
/// Fails with [`Error::Invariant`] if a breakpoint has several achievers or the chain
/// is not nested.
pub fn hn_filtration(b: &AdelicBundle) -> Result<HnFiltration> {
    hn_from_polygon(&certified_polygon(b)?)
}

/// Harder-Narasimhan filtration read off a certified polygon.
pub fn hn_from_polygon(p: &CanonicalPolygon) -> Result<HnFiltration> {
    if !p.certified {
        return Err(Error::Uncertified(
            "filtration needs a certified polygon".into(),
        ));
    }
    let mut members = Vec::with_capacity(p.breakpoints.len());
    for &r in &p.breakpoints {
        let ach = &p.achievers[r];
        if ach.len() != 1 {
            return Err(Error::Invariant(format!(
                "{} sublattices attain the breakpoint at rank {r}",
                ach.len()
            )));
        }
        members.push(HnMember {
            rank: r,
            degree: p.vertices[r],
            basis: ach[0].clone(),
        });
    }
    for w in members.windows(2) {
        if !span_contains(&w[1].basis, &w[0].basis) {
            return Err(Error::Invariant(format!(
                "rank {} member not inside rank {} member",
                w[0].rank, w[1].rank
            )));
        }
    }
    Ok(HnFiltration { members })
}

/// Whether all slopes agree within the semistability tolerance.
pub fn is_semistable(b: &AdelicBundle) -> Result<bool> {
    Ok(polygon_is_semistable(&certified_polygon(b)?))
}

/// Semistability read off a polygon.
pub fn polygon_is_semistable(p: &CanonicalPolygon) -> bool {
    let hi = p.slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = p.slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo <= SEMISTABLE_TOL
}

fn instance_of(b: &AdelicBundle) -> serde_json::Value {
    crate::bundle::io::bundle_to_json(b).unwrap_or(serde_json::Value::Null)
}

/// `μ_i(B^∨) = −μ_{n−i+1}(B)` for every `i`, plus `P_B(m) = P_{B^∨}(n−m) + deg B`.
pub fn mu_i_duality_check(b: &AdelicBundle) -> Result<CheckReport> {
    let p = certified_polygon(b)?;
    let pd = certified_polygon(&b.dual()?)?;
    let n = p.n;
    let deg = degree(b)?;
    let mut rep = CheckReport::new(
        "mu_i_duality",
        json!({"bundle": instance_of(b)}),
        0,
        SLOPE_TOL,
    );
    for i in 1..=n {
        rep = rep.equals(
            &format!("mu_{i}(dual) = -mu_{}(B)", n - i + 1),
            pd.slopes[i - 1],
            -p.slopes[n - i],
        );
    }
    for m in 0..=n {
        rep = rep.equals(
            &format!("P({m}) = P_dual({}) + deg", n - m),
            p.vertices[m],
            pd.vertices[n - m] + deg,
        );
    }
    rep = rep.equals("mu_min = mu_n", -pd.mu_max(), p.mu_last());
    Ok(rep)
}

/// Minimax formula `μ_i = min_{E₂} max_{E₁} μ(E₁/E₂)` over `E₂ ⊆ E₁`, `dim E₂ < i ≤ dim E₁`.
///
/// `E₂` runs over the Harder-Narasimhan members and `E₁` over every polygon achiever;
/// quotient slopes use the exact hermitian additivity `deg E₁/E₂ = deg E₁ − deg E₂`.
pub fn minimax_check(b: &AdelicBundle, i: usize) -> Result<CheckReport> {
    let p = certified_polygon(b)?;
    let n = p.n;
    if i == 0 || i > n {
        return Err(Error::Domain(format!("slope index {i} outside 1..={n}")));
    }
    let hn = hn_from_polygon(&p)?;
    let mut candidates: Vec<(usize, f64, &SublatticeBasis)> = Vec::new();
    for (r, list) in p.achievers.iter().enumerate() {
        for y in list {
            candidates.push((r, p.maxima[r], y));
        }
    }
    let mut alpha = f64::INFINITY;
    for e2 in hn.members.iter().filter(|m| m.rank < i) {
        let mut best = f64::NEG_INFINITY;
        for (r1, d1, y1) in &candidates {
            if *r1 >= i && span_contains(y1, &e2.basis) {
                best = best.max((d1 - e2.degree) / (r1 - e2.rank) as f64);
            }
        }
        alpha = alpha.min(best);
    }
    Ok(CheckReport::new(
        "minimax",
        json!({"bundle": instance_of(b), "i": i}),
        0,
        SLOPE_TOL,
    )
    .equals(&format!("minimax = mu_{i}"), alpha, p.slopes[i - 1]))
}

/// `P_{B⊗L}(r) = P_B(r) + r·deg L` for a line bundle `L`.
pub fn tensor_line_shift_check(b: &AdelicBundle, l: &AdelicBundle) -> Result<CheckReport> {
    if l.rank() != 1 {
        return Err(Error::Domain("the twisting bundle must have rank 1".into()));
    }
    let p = certified_polygon(b)?;
    let pt = certified_polygon(&b.tensor(l)?)?;
    let dl = degree(l)?;
    let mut rep = CheckReport::new(
        "tensor_line_shift",
        json!({"bundle": instance_of(b), "line": instance_of(l)}),
        0,
        SLOPE_TOL,
    );
    for r in 0..=p.n {
        rep = rep.equals(
            &format!("P_twisted({r})"),
            pt.vertices[r],
            p.vertices[r] + r as f64 * dl,
        );
    }
    rep = rep.holds("same breakpoints", pt.breakpoints == p.breakpoints);
    Ok(rep)
}

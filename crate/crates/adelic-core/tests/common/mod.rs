//! Exhaustive sublattice enumeration used as an oracle for certified polygons.
#![allow(dead_code)]

use std::collections::HashMap;

use adelic_core::rational::{q_vec, subsets, to_f64, QMatrix, Q};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

/// Integral vectors with `xᵀHx ≤ bound`, by scanning the box `|x_i|² ≤ bound·(H⁻¹)_ii`.
pub fn box_vectors(h: &QMatrix, bound: f64) -> Vec<(Q, Vec<i64>)> {
    let n = h.rows();
    let hinv = h.inverse().unwrap();
    let widths: Vec<i64> = (0..n)
        .map(|i| (bound * to_f64(&hinv[(i, i)])).sqrt().floor() as i64)
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = widths.iter().map(|w| -w).collect();
    loop {
        if x.iter().any(|&v| v != 0) && x.iter().find(|&&v| v != 0).unwrap() > &0 {
            let xq = q_vec(&x);
            let v = adelic_core::rational::dot(&xq, &h.mul_vec(&xq).unwrap());
            if to_f64(&v) <= bound * (1.0 + 1e-12) {
                out.push((v, x.clone()));
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                out.sort();
                return out;
            }
            if x[k] < widths[k] {
                x[k] += 1;
                break;
            }
            x[k] = -widths[k];
            k += 1;
        }
    }
}

/// Largest successive minimum `λ_n²` from a box scan.
pub fn last_minimum_sq(h: &QMatrix) -> Q {
    let n = h.rows();
    let mut bound = (0..n).map(|i| to_f64(&h[(i, i)])).fold(0.0, f64::max);
    loop {
        let vs = box_vectors(h, bound);
        let mut basis: Vec<Vec<Q>> = Vec::new();
        for (v, x) in &vs {
            let mut trial = basis.clone();
            trial.push(q_vec(x));
            if QMatrix::from_cols(&trial).unwrap().rank() == trial.len() {
                basis = trial;
                if basis.len() == n {
                    return v.clone();
                }
            }
        }
        bound *= 2.0;
    }
}

/// Smallest covolume² per rank over sublattices spanned by `vectors`, via `det(VᵀHV)/index²`.
pub fn oracle(h: &QMatrix, vectors: &[Vec<i64>]) -> Vec<Q> {
    let n = h.rows();
    let mut best = vec![Q::one(); n + 1];
    best[n] = h.det().unwrap();
    for r in 1..n {
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut min: Option<Q> = None;
        for subset in subsets(vectors.len(), r) {
            let v = QMatrix::from_cols(
                &subset
                    .iter()
                    .map(|&k| q_vec(&vectors[k]))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let minors: Vec<i64> = subsets(n, r)
                .iter()
                .map(|rows| {
                    v.select(rows, &(0..r).collect::<Vec<_>>())
                        .det()
                        .unwrap()
                        .to_integer()
                        .to_i64()
                        .unwrap()
                })
                .collect();
            let g = minors.iter().fold(0i64, |a, &b| a.gcd(&b));
            if g == 0 {
                continue;
            }
            let mut key: Vec<i64> = minors.iter().map(|m| m / g).collect();
            if key.iter().find(|&&x| x != 0).unwrap() < &0 {
                key.iter_mut().for_each(|x| *x = -*x);
            }
            if seen.insert(key, ()).is_some() {
                continue;
            }
            let d = v
                .transpose()
                .mul(h)
                .unwrap()
                .mul(&v)
                .unwrap()
                .det()
                .unwrap()
                / Q::from_integer((g * g).into());
            if min.as_ref().map_or(true, |m| &d < m) {
                min = Some(d);
            }
        }
        best[r] = min.unwrap();
    }
    best
}

pub fn hull_breakpoints(values: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for r in 0..values.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let chord = values[a] + (values[r] - values[a]) * (b - a) as f64 / (r - a) as f64;
            if values[b] <= chord + 1e-12 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(r);
    }
    hull
}

//! John (maximal inscribed) and Lowner (minimal circumscribed) ellipsoids.
//!
//! Both reduce to `maximize log det X subject to uᵢᵀXuᵢ ≤ 1`: for the John ellipsoid of
//! `{x : |⟨uᵢ, x⟩| ≤ 1}` the ellipsoid is `{x : xᵀX⁻¹x ≤ 1}`; for the Lowner ellipsoid
//! of `conv(±uᵢ)` it is `{x : xᵀXx ≤ 1}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::body::{BodyRep, ConvexBody};
use super::volume::ball_log_volume;
use crate::error::{Error, Result};
use crate::rational::{f64_vec, Q};
use crate::tolerances::{KHACHIYAN_ITERATION_CAP, NEWTON_ITERATION_CAP};

/// An origin-centred ellipsoid `{x : xᵀQx ≤ 1}` produced by a solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidResult {
    /// Symmetric positive definite matrix, row-major.
    pub q: Vec<Vec<f64>>,
    /// Natural log of the volume.
    pub log_volume: f64,
    /// Certified optimality gap in `log det` (zero for closed forms).
    pub certificate_gap: f64,
}

impl EllipsoidResult {
    /// Builds a result from a matrix, computing the log-volume.
    pub fn from_matrix(q: &DMatrix<f64>, gap: f64) -> Self {
        let n = q.nrows();
        let sym = (q + q.transpose()) * 0.5;
        let logdet = sym
            .clone()
            .cholesky()
            .map(|c| 2.0 * c.l().diagonal().map(|x| x.ln()).sum())
            .unwrap_or(f64::NAN);
        EllipsoidResult {
            q: (0..n)
                .map(|i| (0..n).map(|j| sym[(i, j)]).collect())
                .collect(),
            log_volume: ball_log_volume(n) - 0.5 * logdet,
            certificate_gap: gap,
        }
    }

    /// Matrix `Q`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.q.len();
        DMatrix::from_fn(n, n, |i, j| self.q[i][j])
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Norm `sqrt(xᵀQx)` of the ellipsoid.
    pub fn norm(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.q[i][j] * x[i] * x[j];
            }
        }
        s.max(0.0).sqrt()
    }

    /// Polar ellipsoid `{x : xᵀQ⁻¹x ≤ 1}`.
    pub fn polar(&self) -> Result<Self> {
        let inv = self
            .matrix()
            .try_inverse()
            .ok_or_else(|| Error::Singular("ellipsoid matrix".into()))?;
        Ok(Self::from_matrix(&inv, self.certificate_gap))
    }

    /// The ellipsoid `t·E`.
    pub fn scaled(&self, t: f64) -> Self {
        Self::from_matrix(&(self.matrix() / (t * t)), self.certificate_gap)
    }
}

/// Maximal-volume ellipsoid `{x : xᵀX⁻¹x ≤ 1}` inside `{x : |⟨uᵢ, x⟩| ≤ 1}` by a damped
/// Newton method on the log-barrier over symmetric matrices.
///
/// Returns `X` and the duality gap `U(λ) − log det X` with the dual certificate
/// `U(λ) = −log det(Σλᵢuᵢuᵢᵀ) − n + Σλᵢ`, `λᵢ = 1/(t sᵢ)`.
pub fn max_logdet_barrier(us: &[DVector<f64>], tol: f64) -> Result<(DMatrix<f64>, f64)> {
    let n = us.first().map_or(0, |u| u.len());
    let m = us.len();
    let basis: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let k = basis.len();
    let coord = |u: &DVector<f64>, (a, b): (usize, usize)| {
        if a == b {
            u[a] * u[a]
        } else {
            2.0 * u[a] * u[b]
        }
    };
    let to_matrix = |v: &DVector<f64>| {
        let mut x = DMatrix::zeros(n, n);
        for (idx, &(a, b)) in basis.iter().enumerate() {
            x[(a, b)] = v[idx];
            x[(b, a)] = v[idx];
        }
        x
    };
    let umax = us.iter().map(|u| u.norm_squared()).fold(0.0, f64::max);
    let mut xv = DVector::zeros(k);
    for (idx, &(a, b)) in basis.iter().enumerate() {
        if a == b {
            xv[idx] = 0.5 / umax;
        }
    }
    let a_rows: Vec<DVector<f64>> = us
        .iter()
        .map(|u| DVector::from_fn(k, |i, _| coord(u, basis[i])))
        .collect();
    let slacks =
        |xv: &DVector<f64>| -> Vec<f64> { a_rows.iter().map(|a| 1.0 - a.dot(xv)).collect() };
    let objective = |xv: &DVector<f64>, t: f64| -> Option<f64> {
        let s = slacks(xv);
        if s.iter().any(|&v| v <= 0.0) {
            return None;
        }
        let chol = to_matrix(xv).cholesky()?;
        let logdet = 2.0 * chol.l().diagonal().map(|x| x.ln()).sum();
        Some(-t * logdet - s.iter().map(|v| v.ln()).sum::<f64>())
    };
    let gap_at = |xv: &DVector<f64>, t: f64| -> f64 {
        let s = slacks(xv);
        let mut sm = DMatrix::zeros(n, n);
        let mut lsum = 0.0;
        for (u, si) in us.iter().zip(&s) {
            let l = 1.0 / (t * si);
            sm += u * u.transpose() * l;
            lsum += l;
        }
        let upper = match sm.cholesky() {
            Some(c) => -2.0 * c.l().diagonal().map(|x| x.ln()).sum() - n as f64 + lsum,
            None => f64::INFINITY,
        };
        let logdet = to_matrix(xv)
            .cholesky()
            .map(|c| 2.0 * c.l().diagonal().map(|x| x.ln()).sum())
            .unwrap_or(f64::NAN);
        upper - logdet
    };
    let mut t = 1.0;
    let mut best_gap = f64::INFINITY;
    let mut stages = 0;
    loop {
        let mut iterations = 0;
        // Centering by damped Newton steps.
        loop {
            iterations += 1;
            if iterations > NEWTON_ITERATION_CAP {
                return Err(Error::Solver {
                    message: "log-det barrier reached its iteration cap".into(),
                    gap: best_gap,
                });
            }
            let x = to_matrix(&xv);
            let xinv = x
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Singular("barrier iterate".into()))?;
            let s = slacks(&xv);
            let mut grad = DVector::zeros(k);
            let mut hess = DMatrix::zeros(k, k);
            let e: Vec<DMatrix<f64>> = basis
                .iter()
                .map(|&(a, b)| {
                    let mut m = DMatrix::zeros(n, n);
                    m[(a, b)] = 1.0;
                    m[(b, a)] = 1.0;
                    m
                })
                .collect();
            let xe: Vec<DMatrix<f64>> = e.iter().map(|m| &xinv * m).collect();
            for i in 0..k {
                grad[i] = -t * xe[i].trace();
                for j in i..k {
                    let h = t * (&xe[i] * &xe[j]).trace();
                    hess[(i, j)] = h;
                    hess[(j, i)] = h;
                }
            }
            for (a, si) in a_rows.iter().zip(&s) {
                grad += a / *si;
                hess += a * a.transpose() / (si * si);
            }
            let chol = hess.clone().cholesky().ok_or_else(|| Error::Solver {
                message: "barrier Hessian is not positive definite".into(),
                gap: best_gap,
            })?;
            let step = -chol.solve(&grad);
            let decrement = -grad.dot(&step);
            if decrement / 2.0 <= 1e-10 {
                break;
            }
            if decrement < 0.0625 {
                // Inside the Dikin region the full step is feasible and the barrier is
                // self-concordant, so no line search is needed.
                let cand = &xv + &step;
                if objective(&cand, t).is_some() {
                    xv = cand;
                    continue;
                }
            }
            let f0 = objective(&xv, t).expect("feasible iterate");
            let mut alpha = 1.0;
            loop {
                let cand = &xv + &step * alpha;
                if let Some(f1) = objective(&cand, t) {
                    if f1 <= f0 - 0.25 * alpha * decrement {
                        xv = cand;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-14 {
                    break;
                }
            }
            if alpha < 1e-14 {
                break;
            }
        }
        let gap = gap_at(&xv, t);
        best_gap = best_gap.min(gap);
        if gap <= tol {
            return Ok((to_matrix(&xv), gap.max(0.0)));
        }
        stages += 1;
        if stages > NEWTON_ITERATION_CAP {
            return Err(Error::Solver {
                message: "log-det barrier did not reach the requested gap".into(),
                gap: best_gap,
            });
        }
        t *= if (m as f64) / t > 100.0 * tol {
            8.0
        } else {
            2.0
        };
    }
}

/// Same problem by Khachiyan coordinate ascent with Todd-Yildirim away steps.
///
/// Returns `P = M(λ)⁻¹/κ_max` (feasible) and the gap `n log(κ_max/n)`.
pub fn max_logdet_khachiyan(us: &[DVector<f64>], tol: f64) -> Result<(DMatrix<f64>, f64)> {
    let n = us.first().map_or(0, |u| u.len());
    let m = us.len();
    let nf = n as f64;
    let mut lambda = vec![1.0 / m as f64; m];
    let mut gap = f64::INFINITY;
    for _ in 0..KHACHIYAN_ITERATION_CAP {
        let mut mm = DMatrix::zeros(n, n);
        for (u, l) in us.iter().zip(&lambda) {
            mm += u * u.transpose() * *l;
        }
        let minv = mm
            .try_inverse()
            .ok_or_else(|| Error::Singular("moment matrix".into()))?;
        let kappa: Vec<f64> = us
            .iter()
            .map(|u| (u.transpose() * &minv * u)[(0, 0)])
            .collect();
        let (jmax, kmax) =
            kappa
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        gap = nf * (kmax / nf).ln();
        if gap <= tol {
            return Ok((&minv / kmax, gap.max(0.0)));
        }
        let (jmin, kmin) = kappa
            .iter()
            .enumerate()
            .filter(|(i, _)| lambda[*i] > 0.0)
            .fold((0, f64::MAX), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        if kmax - nf >= nf - kmin || kmin <= 1.0 {
            let beta = (kmax - nf) / (nf * (kmax - 1.0));
            for l in lambda.iter_mut() {
                *l *= 1.0 - beta;
            }
            lambda[jmax] += beta;
        } else {
            let raw = (kmin - nf) / (nf * (kmin - 1.0));
            let lj = lambda[jmin];
            let beta = raw.max(-lj / (1.0 - lj));
            for l in lambda.iter_mut() {
                *l *= 1.0 - beta;
            }
            lambda[jmin] += beta;
            if lambda[jmin] < 1e-300 {
                lambda[jmin] = 0.0;
            }
        }
    }
    Err(Error::Solver {
        message: "coordinate ascent reached its iteration cap".into(),
        gap,
    })
}

fn f64_rows(vs: &[Vec<Q>]) -> Vec<DVector<f64>> {
    vs.iter().map(|v| DVector::from_vec(f64_vec(v))).collect()
}

fn lp_radius_factor(n: usize, p: f64) -> f64 {
    (n as f64).powf(0.5 - 1.0 / p)
}

/// John ellipsoid `J(C)`, the maximal-volume ellipsoid contained in `C`.
pub fn john_ellipsoid(c: &ConvexBody, tol: f64) -> Result<EllipsoidResult> {
    let n = c.dim();
    match c.rep() {
        BodyRep::Ellipsoid { q } => Ok(EllipsoidResult::from_matrix(&q.to_f64(), 0.0)),
        BodyRep::LpBall { p } => {
            // Inscribed ball: the unit ball for p ≥ 2, radius n^{1/2-1/p} below.
            let r = if *p >= 2.0 {
                1.0
            } else {
                lp_radius_factor(n, *p)
            };
            Ok(EllipsoidResult::from_matrix(
                &(DMatrix::identity(n, n) / (r * r)),
                0.0,
            ))
        }
        BodyRep::HPoly { .. } => {
            let us = f64_rows(&c.facet_vectors()?);
            let (x, gap) = max_logdet_barrier(&us, tol)?;
            let q = x
                .try_inverse()
                .ok_or_else(|| Error::Singular("John matrix".into()))?;
            Ok(EllipsoidResult::from_matrix(&q, gap))
        }
        BodyRep::VPoly { .. } => lowner_ellipsoid(&c.polar()?, tol)?.polar(),
        BodyRep::Image { body, map } => {
            let inner = john_ellipsoid(body, tol)?;
            let tinv = map.inverse()?.to_f64();
            Ok(EllipsoidResult::from_matrix(
                &(tinv.transpose() * inner.matrix() * &tinv),
                inner.certificate_gap,
            ))
        }
        BodyRep::Sum { .. } => Err(Error::UnsupportedMetric(
            "John ellipsoid of a general p-sum".into(),
        )),
    }
}

/// Lowner ellipsoid `L(C)`, the minimal-volume ellipsoid containing `C`.
pub fn lowner_ellipsoid(c: &ConvexBody, tol: f64) -> Result<EllipsoidResult> {
    let n = c.dim();
    match c.rep() {
        BodyRep::Ellipsoid { q } => Ok(EllipsoidResult::from_matrix(&q.to_f64(), 0.0)),
        BodyRep::LpBall { p } => {
            let r = if *p >= 2.0 {
                lp_radius_factor(n, *p)
            } else {
                1.0
            };
            Ok(EllipsoidResult::from_matrix(
                &(DMatrix::identity(n, n) / (r * r)),
                0.0,
            ))
        }
        BodyRep::HPoly { .. } | BodyRep::VPoly { .. } => {
            let vs = f64_rows(&c.polytope()?.vertices);
            let (p, gap) = max_logdet_barrier(&vs, tol)?;
            Ok(EllipsoidResult::from_matrix(&p, gap))
        }
        BodyRep::Image { body, map } => {
            let inner = lowner_ellipsoid(body, tol)?;
            let tinv = map.inverse()?.to_f64();
            Ok(EllipsoidResult::from_matrix(
                &(tinv.transpose() * inner.matrix() * &tinv),
                inner.certificate_gap,
            ))
        }
        BodyRep::Sum { .. } => Err(Error::UnsupportedMetric(
            "Lowner ellipsoid of a general p-sum".into(),
        )),
    }
}

//! Volumes: closed forms, exact polytope volumes and Monte Carlo estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::body::{BodyRep, ConvexBody, Gauge};
use super::polytope;
use crate::error::{Error, Result};
use crate::rational::{ln_q, Q};

/// `log vol(b_n^p)` for the real `ℓ^p` unit ball: `n log(2Γ(1+1/p)) − log Γ(1+n/p)`.
pub fn lp_ball_log_volume(n: usize, p: f64) -> f64 {
    let n = n as f64;
    if p.is_infinite() {
        return n * std::f64::consts::LN_2;
    }
    n * (2.0f64.ln() + ln_gamma(1.0 + 1.0 / p)) - ln_gamma(1.0 + n / p)
}

/// `log vol(b_n^2)`.
pub fn ball_log_volume(n: usize) -> f64 {
    lp_ball_log_volume(n, 2.0)
}

/// `log` of the Lebesgue volume of the complex `ℓ^p` unit ball of `Cⁿ ≅ R^{2n}`:
/// `n log(πΓ(1+2/p)) − log Γ(1+2n/p)`.
pub fn complex_lp_ball_log_volume(n: usize, p: f64) -> f64 {
    let n = n as f64;
    let pi = std::f64::consts::PI;
    if p.is_infinite() {
        return n * pi.ln();
    }
    n * (pi.ln() + ln_gamma(1.0 + 2.0 / p)) - ln_gamma(1.0 + 2.0 * n / p)
}

/// Exact volume of a polytope body.
pub fn polytope_volume_exact(c: &ConvexBody) -> Result<Q> {
    let poly = c.polytope()?;
    polytope::volume_exact(&poly.facets, &poly.vertices, c.dim())
}

/// Natural logarithm of the Lebesgue volume.
pub fn log_volume(c: &ConvexBody) -> Result<f64> {
    let n = c.dim();
    match c.rep() {
        BodyRep::LpBall { p } => Ok(lp_ball_log_volume(n, *p)),
        BodyRep::Ellipsoid { q } => {
            let d = q.det()?;
            Ok(ball_log_volume(n) - 0.5 * ln_q(&d))
        }
        BodyRep::HPoly { .. } | BodyRep::VPoly { .. } => {
            let v = polytope_volume_exact(c)?;
            if v <= Q::from_integer(0.into()) {
                return Err(Error::InvalidBody("polytope has zero volume".into()));
            }
            Ok(ln_q(&v))
        }
        BodyRep::Sum { left, right, p } => {
            let (a, b) = (left.dim() as f64, right.dim() as f64);
            let ratio = if p.is_infinite() {
                0.0
            } else {
                ln_gamma(1.0 + a / p) + ln_gamma(1.0 + b / p) - ln_gamma(1.0 + (a + b) / p)
            };
            Ok(log_volume(left)? + log_volume(right)? + ratio)
        }
        BodyRep::Image { body, map } => {
            Ok(log_volume(body)? + ln_q(&num_traits::Signed::abs(&map.det()?)))
        }
    }
}

/// Lebesgue volume.
pub fn volume(c: &ConvexBody) -> Result<f64> {
    Ok(log_volume(c)?.exp())
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Estimated value.
    pub estimate: f64,
    /// Standard error of the estimate.
    pub stderr: f64,
    /// Number of samples.
    pub samples: u64,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors (plus a relative floor of `1e-12`).
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr + 1e-12 * value.abs()
    }
}

fn hit_or_miss<F: FnMut(&mut ChaCha8Rng) -> bool>(
    box_volume: f64,
    samples: u64,
    seed: u64,
    mut hit: F,
) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        if hit(&mut rng) {
            hits += 1;
        }
    }
    let f = hits as f64 / samples as f64;
    McEstimate {
        estimate: box_volume * f,
        stderr: box_volume * (f * (1.0 - f) / samples as f64).sqrt(),
        samples,
    }
}

/// Hit-or-miss volume estimate inside the tight bounding box; deterministic in `seed`.
pub fn volume_mc(c: &ConvexBody, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples < 1000 {
        return Err(Error::Domain("at least 1000 samples are required".into()));
    }
    let w = c.bounding_box()?;
    let gauge: std::sync::Arc<Gauge> = c.gauge_fn();
    let box_volume: f64 = w.iter().map(|x| 2.0 * x).product();
    let n = c.dim();
    let mut x = vec![0.0; n];
    Ok(hit_or_miss(box_volume, samples, seed, |rng| {
        for i in 0..n {
            x[i] = w[i] * (2.0 * rng.gen::<f64>() - 1.0);
        }
        gauge.eval(&x) <= 1.0
    }))
}

/// Gauge of the complexified body evaluated at `z = x + i y`.
///
/// Polytopes use `max_i |⟨u_i, z⟩|` (the smallest rotation-invariant extension),
/// `ℓ^p` balls use `(Σ|z_j|^p)^{1/p}`, and ellipsoids the hermitian form `z*Qz`.
pub fn complex_gauge(c: &ConvexBody, g: &Gauge, x: &[f64], y: &[f64]) -> f64 {
    match (c.rep(), g) {
        (BodyRep::LpBall { p }, _) => {
            let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| a.hypot(*b)).collect();
            super::body::lp_norm(&m, *p)
        }
        (_, Gauge::Quadratic(_)) => (g.eval(x).powi(2) + g.eval(y).powi(2)).sqrt(),
        (_, Gauge::Poly(us)) => us.iter().fold(0.0, |m, u| {
            let re: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
            let im: f64 = u.iter().zip(y).map(|(a, b)| a * b).sum();
            m.max(re.hypot(im))
        }),
        _ => f64::NAN,
    }
}

/// Log-volume of the complexified body in `Cⁿ ≅ R^{2n}`, exact for `ℓ^p` balls and
/// ellipsoids and by Monte Carlo for polytopes (box = real bounding box squared).
///
/// Returns the log-volume and its standard error on the log scale (zero when exact).
pub fn complex_log_volume(c: &ConvexBody, samples: u64, seed: u64) -> Result<(f64, f64)> {
    let n = c.dim();
    match c.rep() {
        BodyRep::LpBall { p } => return Ok((complex_lp_ball_log_volume(n, *p), 0.0)),
        BodyRep::Ellipsoid { q } => {
            return Ok((complex_lp_ball_log_volume(n, 2.0) - ln_q(&q.det()?), 0.0))
        }
        BodyRep::HPoly { .. } | BodyRep::VPoly { .. } => {}
        _ => {
            return Err(Error::UnsupportedMetric(
                "complexified volume needs a polytope, ball or ellipsoid".into(),
            ))
        }
    }
    let w = c.bounding_box()?;
    let g = c.gauge_fn();
    let box_volume: f64 = w.iter().map(|x| 4.0 * x * x).product();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let est = hit_or_miss(box_volume, samples, seed, |rng| {
        for i in 0..n {
            x[i] = w[i] * (2.0 * rng.gen::<f64>() - 1.0);
            y[i] = w[i] * (2.0 * rng.gen::<f64>() - 1.0);
        }
        complex_gauge(c, &g, &x, &y) <= 1.0
    });
    if est.estimate <= 0.0 {
        return Err(Error::Solver {
            message: "no Monte Carlo sample hit the complexified body".into(),
            gap: 1.0,
        });
    }
    Ok((est.estimate.ln(), est.stderr / est.estimate))
}

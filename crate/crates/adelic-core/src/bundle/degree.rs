//! Adelic degree, Euler characteristic and the degree of `(Qⁿ, |·|_p)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{AdelicBundle, ArchMetric};
use crate::convexgeom::{ball_log_volume, complex_log_volume, log_volume, ConvexBody};
use crate::error::Result;
use crate::rational::{ln_abs_q, ln_q};

/// Adelic degree `−log covol(L) + log(vol C / vol b_n²)`.
///
/// For a hermitian metric this is `−log|det A| − ½ log det G`, evaluated from exact
/// rational determinants.
pub fn degree(b: &AdelicBundle) -> Result<f64> {
    let finite = -ln_abs_q(&b.lattice().det()?);
    match b.arch() {
        ArchMetric::Hermitian(g) => Ok(finite - 0.5 * ln_q(&g.det()?)),
        ArchMetric::Body(c) => Ok(finite + log_volume(c)? - ball_log_volume(b.rank())),
    }
}

/// Normalized degree (`D = [Q:Q] = 1`, so equal to [`degree`]).
pub fn degree_normalized(b: &AdelicBundle) -> Result<f64> {
    degree(b)
}

/// Euler characteristic `deg E + log vol(b_n²)`: the log-volume of the archimedean ball
/// measured against a fundamental domain of the lattice.
pub fn euler_characteristic(b: &AdelicBundle) -> Result<f64> {
    Ok(degree(b)? + ball_log_volume(b.rank()))
}

/// Degree of `(Kⁿ, |·|_p)` for `r₁` real and `r₂` complex places.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpDegree {
    /// The closed form as printed in the literature.
    pub printed: f64,
    /// The value from the definition, `r₁ log(vol b_p/vol b_2) + r₂ log(vol_C b_p/vol_C b_2)`.
    pub definitional: f64,
    /// `definitional − printed`; equals `n·log 2` per real place.
    pub discrepancy: f64,
}

/// Both the printed closed form and the definitional value of `deg(Kⁿ, |·|_p)`.
pub fn degree_lp_formula(n: usize, p: f64, r1: u32, r2: u32) -> LpDegree {
    let nf = n as f64;
    let inv = |k: f64| if p.is_infinite() { 0.0 } else { k / p };
    let real_printed = nf * ln_gamma(1.0 + inv(1.0)) + ln_gamma(1.0 + nf / 2.0)
        - ln_gamma(1.0 + inv(nf))
        - nf / 2.0 * std::f64::consts::PI.ln();
    let complex =
        nf * ln_gamma(1.0 + inv(2.0)) + ln_gamma(1.0 + nf) - ln_gamma(1.0 + inv(2.0 * nf));
    let printed = r1 as f64 * real_printed + r2 as f64 * complex;
    let real_def = crate::convexgeom::lp_ball_log_volume(n, p) - ball_log_volume(n);
    let complex_def = crate::convexgeom::volume::complex_lp_ball_log_volume(n, p)
        - crate::convexgeom::volume::complex_lp_ball_log_volume(n, 2.0);
    let definitional = r1 as f64 * real_def + r2 as f64 * complex_def;
    LpDegree {
        printed,
        definitional,
        discrepancy: definitional - printed,
    }
}

/// Coefficients of `deg(Kⁿ, |·|_p) = a·n log n + b·n + c + o(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpAsymptotics {
    /// `(1/2 − 1/p)[K:Q]`.
    pub a: f64,
    /// Linear coefficient of the printed closed form.
    pub b_printed: f64,
    /// Linear coefficient of the definitional value (`b_printed + r₁ log 2`).
    pub b_definitional: f64,
    /// Constant term `(r₁ + r₂)/2 · log(p/2)`.
    pub c: f64,
}

/// Asymptotic coefficients for finite `p ≥ 1`.
pub fn lp_degree_asymptotics(p: f64, r1: u32, r2: u32) -> LpAsymptotics {
    let (r1f, r2f) = (r1 as f64, r2 as f64);
    let e = std::f64::consts::E;
    let pi = std::f64::consts::PI;
    let a = (0.5 - 1.0 / p) * (r1f + 2.0 * r2f);
    let b_real = ln_gamma(1.0 + 1.0 / p) + (p * e).ln() / p - 0.5 * (2.0 * e * pi).ln();
    let b_complex = ln_gamma(1.0 + 2.0 / p) + 2.0 / p * (p / 2.0).ln() - (1.0 - 2.0 / p);
    let b_printed = r1f * b_real + r2f * b_complex;
    LpAsymptotics {
        a,
        b_printed,
        b_definitional: b_printed + r1f * 2f64.ln(),
        c: (r1f + r2f) / 2.0 * (p / 2.0).ln(),
    }
}

impl LpAsymptotics {
    /// `a·n log n + b·n + c` with the definitional linear coefficient.
    pub fn evaluate(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.a * nf * nf.ln() + self.b_definitional * nf + self.c
    }
}

/// Log-volume of the archimedean ball of a metric.
pub(crate) fn arch_log_volume(arch: &ArchMetric, n: usize) -> Result<f64> {
    match arch {
        ArchMetric::Hermitian(g) => Ok(ball_log_volume(n) - 0.5 * ln_q(&g.det()?)),
        ArchMetric::Body(c) => log_volume(c),
    }
}

/// Log-volume of the complexified archimedean ball and its standard error.
pub(crate) fn arch_complex_log_volume(
    arch: &ArchMetric,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    match arch {
        ArchMetric::Hermitian(g) => {
            complex_log_volume(&ConvexBody::ellipsoid(g.clone())?, samples, seed)
        }
        ArchMetric::Body(c) => complex_log_volume(c, samples, seed),
    }
}

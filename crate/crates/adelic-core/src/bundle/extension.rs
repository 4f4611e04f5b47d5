//! Extension of scalars from Q to Q(i).

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::degree::{arch_complex_log_volume, arch_log_volume};
use super::AdelicBundle;
use crate::convexgeom::volume::complex_lp_ball_log_volume;
use crate::error::Result;
use crate::rational::ln_abs_q;
use crate::report::CheckReport;
use crate::tolerances::MC_SIGMAS;

/// Degrees of a bundle and of its extension to Q(i).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarExtension {
    /// `deg_n(E)`.
    pub degree: f64,
    /// `deg_n(E ⊗ Q(i))`.
    pub extended_degree: f64,
    /// Standard error of `extended_degree` (zero when exact).
    pub stderr: f64,
    /// `log κ` with `κ = vol_C(B)/vol(C)² · n!/Γ(1+n/2)²`.
    pub log_kappa: f64,
}

/// `log` of the bracket `[4^{-n}, 1]·n!/Γ(1+n/2)²` for `κ`.
pub fn kappa_bracket(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let top = ln_gamma(nf + 1.0) - 2.0 * ln_gamma(1.0 + nf / 2.0);
    (top - nf * 4f64.ln(), top)
}

/// Normalized degree over Q(i): `−log|det A| + ½ log(vol_C(B)/vol_C(b_n²))`.
///
/// Polytope bodies are complexified by `max_i |⟨u_i, z⟩|` and measured by Monte Carlo.
pub fn scalar_extension(b: &AdelicBundle, samples: u64, seed: u64) -> Result<ScalarExtension> {
    let n = b.rank();
    let finite = -ln_abs_q(&b.lattice().det()?);
    let real_lv = arch_log_volume(b.arch(), n)?;
    let (clv, clv_err) = arch_complex_log_volume(b.arch(), samples, seed)?;
    let degree = finite + real_lv - crate::convexgeom::ball_log_volume(n);
    let extended_degree = finite + 0.5 * (clv - complex_lp_ball_log_volume(n, 2.0));
    let nf = n as f64;
    let log_kappa = clv - 2.0 * real_lv + ln_gamma(nf + 1.0) - 2.0 * ln_gamma(1.0 + nf / 2.0);
    Ok(ScalarExtension {
        degree,
        extended_degree,
        stderr: 0.5 * clv_err,
        log_kappa,
    })
}

/// Checks `|deg_n(E ⊗ Q(i)) − deg_n(E)| ≤ n log 4`, equality for hermitian bundles, and
/// the bracket on `κ`; Monte Carlo values are widened by `MC_SIGMAS` standard errors.
pub fn scalar_extension_check(b: &AdelicBundle, samples: u64, seed: u64) -> Result<CheckReport> {
    let n = b.rank();
    let ext = scalar_extension(b, samples, seed)?;
    let diff = ext.extended_degree - ext.degree;
    let slack = MC_SIGMAS * ext.stderr;
    let (klo, khi) = kappa_bracket(n);
    let instance = super::io::bundle_to_json(b).unwrap_or(serde_json::Value::Null);
    let mut rep = CheckReport::new("scalar_extension", instance, seed, 1e-9)
        .le(
            "|deg_n(E_Q(i)) - deg_n(E)| vs n log 4",
            diff.abs() - slack,
            n as f64 * 4f64.ln(),
        )
        .le("log kappa lower bound", klo, ext.log_kappa + 2.0 * slack)
        .le("log kappa upper bound", ext.log_kappa - 2.0 * slack, khi);
    if b.is_hermitian() {
        rep = rep.equals(
            "hermitian extension preserves the degree",
            ext.extended_degree,
            ext.degree,
        );
    }
    Ok(rep)
}

//! Symmetric powers: the constants `γ_{n,ℓ}`, the determinant of `S^ℓ(u)`, and slope
//! statements for hermitian symmetric powers.
//!
//! `log γ_{n,ℓ} = binom(ℓ+n−1, n−1)^{-1} Σ_{|i|=ℓ} log(ℓ!/i!)`, the mean log multinomial
//! coefficient over the multi-indices of degree `ℓ` in `n` variables.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bundle::{degree, sym_power_matrix, AdelicBundle};
use crate::convexgeom::ln_factorial;
use crate::error::{Error, Result};
use crate::lattice::hkz;
use crate::places::{abs_value, prime_support, Place};
use crate::rational::{binomial, ln_q, q_vec, QMatrix, Q};
use crate::report::CheckReport;
use crate::slopes::{mu_max, slope};
use crate::tolerances::{GAMMA_SIZE_GUARD, IDENTITY_TOL, RANK_GUARD, SLOPE_TOL};

/// Largest `ℓ` for which multinomial coefficients are formed from exact integer factorials.
const EXACT_FACTORIAL_LIMIT: usize = 20;

/// `log γ_{n,ℓ}` together with the sum it averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaValue {
    /// Number of variables.
    pub n: usize,
    /// Degree.
    pub l: usize,
    /// `log γ_{n,ℓ}`.
    pub log_value: f64,
    /// `Σ_{|i|=ℓ} log(ℓ!/i!)`, accumulated with compensated summation.
    pub exact_log_numerator: f64,
    /// Number of multi-indices, `binom(ℓ+n−1, n−1)`.
    pub count: u64,
}

/// Harmonic number `H_n`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Neumaier compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn factorial_u128(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Partitions of `l` into at most `parts` positive parts, in non-increasing order.
fn partitions(l: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() == parts {
            return;
        }
        for k in (1..=left.min(max)).rev() {
            cur.push(k);
            rec(left - k, k, parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(l, l, parts, &mut Vec::new(), &mut out);
    out
}

/// Number of distinct arrangements of a partition padded with zeros to `n` entries.
fn arrangements(partition: &[usize], n: usize) -> u64 {
    let mut mult: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < partition.len() {
        let j = partition[i..]
            .iter()
            .take_while(|&&x| x == partition[i])
            .count();
        mult.push(j);
        i += j;
    }
    mult.push(n - partition.len());
    let mut left = n as u64;
    let mut acc = 1u64;
    for m in mult {
        acc = acc.saturating_mul(binomial(left, m as u64));
        left -= m as u64;
    }
    acc
}

/// `γ_{n,ℓ}`; multi-indices are grouped by their sorted parts, so the cost is the number of
/// partitions of `ℓ` into at most `n` parts.
pub fn gamma_nl(n: usize, l: usize) -> Result<GammaValue> {
    if n == 0 {
        return Err(Error::Domain("gamma needs n ≥ 1".into()));
    }
    let count = binomial((l + n - 1) as u64, (n - 1) as u64);
    if count > GAMMA_SIZE_GUARD {
        return Err(Error::Guard(format!(
            "{count} multi-indices exceed the guard {GAMMA_SIZE_GUARD}"
        )));
    }
    let mut acc = CompensatedSum::default();
    for part in partitions(l, n) {
        let log_multinomial = if l <= EXACT_FACTORIAL_LIMIT {
            let den: u128 = part.iter().map(|&k| factorial_u128(k)).product();
            ((factorial_u128(l) / den) as f64).ln()
        } else {
            ln_factorial(l) - part.iter().map(|&k| ln_factorial(k)).sum::<f64>()
        };
        acc.add(arrangements(&part, n) as f64 * log_multinomial);
    }
    let numerator = acc.value();
    Ok(GammaValue {
        n,
        l,
        log_value: numerator / count as f64,
        exact_log_numerator: numerator,
        count,
    })
}

/// `det S^ℓ(M) = (det M)^{binom(ℓ+n−1, n)}`, compared exactly.
pub fn det_sympow_identity_check(m: &QMatrix, l: usize) -> Result<CheckReport> {
    if !m.is_square() {
        return Err(Error::Dimension(
            "determinant of a non-square matrix".into(),
        ));
    }
    let n = m.rows();
    let d = m.det()?;
    if d.is_zero() {
        return Err(Error::Singular(
            "det S^l identity needs an invertible matrix".into(),
        ));
    }
    let size = binomial((l + n - 1) as u64, (n - 1) as u64);
    if size as usize > 4 * RANK_GUARD * RANK_GUARD {
        return Err(Error::Guard(format!("symmetric power of rank {size}")));
    }
    let lhs = sym_power_matrix(m, l)?.det()?;
    let e = binomial((l + n - 1) as u64, n as u64);
    let rhs = num_traits::pow(d, e as usize);
    let instance = json!({ "matrix": m.to_strings(), "l": l });
    Ok(CheckReport::new("det_sympow_identity", instance, 0, 0.0)
        .holds("det S^l(M) = det(M)^binom(l+n-1,n)", lhs == rhs))
}

fn frobenius_sq(m: &QMatrix) -> Q {
    m.entries().iter().fold(Q::zero(), |acc, x| acc + x * x)
}

fn max_abs_at(m: &QMatrix, p: u64) -> Result<Q> {
    let mut best = Q::zero();
    for x in m.entries().iter().filter(|x| !x.is_zero()) {
        let a = abs_value(x, Place::Finite(p))?;
        if a > best {
            best = a;
        }
    }
    Ok(best)
}

/// `‖M⁻¹‖ ≤ ‖M‖^{n−1} / |det M|` with the Hilbert-Schmidt norm at the real place and the
/// max-entry norm at every prime dividing an entry of `M`, `M⁻¹` or `det M` (and at 2).
pub fn inverse_norm_bound_check(m: &QMatrix) -> Result<CheckReport> {
    if !m.is_square() {
        return Err(Error::Dimension("inverse of a non-square matrix".into()));
    }
    let n = m.rows();
    let d = m.det()?;
    if d.is_zero() {
        return Err(Error::Singular(
            "inverse norm bound needs an invertible matrix".into(),
        ));
    }
    let inv = m.inverse()?;
    let k = (n - 1) as f64;
    let instance = json!({ "matrix": m.to_strings() });
    let mut report = CheckReport::new("inverse_norm_bound", instance, 0, SLOPE_TOL).le(
        "real: log ||M^-1||_HS <= (n-1) log ||M||_HS - log |det M|",
        0.5 * ln_q(&frobenius_sq(&inv)),
        0.5 * k * ln_q(&frobenius_sq(m)) - ln_q(&d.abs()),
    );
    let mut primes = vec![2u64];
    for x in m
        .entries()
        .iter()
        .chain(inv.entries())
        .chain(std::iter::once(&d))
        .filter(|x| !x.is_zero())
    {
        primes.extend(prime_support(x));
    }
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        let lhs = max_abs_at(&inv, p)? * abs_value(&d, Place::Finite(p))?;
        let rhs = num_traits::pow(max_abs_at(m, p)?, n - 1);
        report = report.le(
            &format!("{p}-adic: log ||M^-1|| + log |det M| <= (n-1) log ||M||"),
            ln_q(&lhs),
            ln_q(&rhs),
        );
    }
    Ok(report)
}

/// `μ(S^ℓ E) = ℓ·μ(E) + ½ log γ_{n,ℓ}` for a hermitian bundle.
pub fn sympow_slope_check(b: &AdelicBundle, l: usize) -> Result<CheckReport> {
    let n = b.rank();
    let s = b.symmetric(l)?;
    let g = gamma_nl(n, l)?;
    let lhs = slope(&s)?;
    let rhs = l as f64 * slope(b)? + 0.5 * g.log_value;
    let instance = json!({ "rank": n, "l": l, "degree": degree(b)? });
    Ok(
        CheckReport::new("sympow_slope", instance, 0, IDENTITY_TOL).equals(
            "mu(S^l E) = l mu(E) + (1/2) log gamma_{n,l}",
            lhs,
            rhs,
        ),
    )
}

/// `0 ≤ μ_max(S^ℓ E) − ℓ·μ_max(E) ≤ 2ℓ n log n` for a hermitian bundle.
pub fn sympow_mumax_check(b: &AdelicBundle, l: usize) -> Result<CheckReport> {
    let n = b.rank();
    let s = b.symmetric(l)?;
    if s.rank() > RANK_GUARD {
        return Err(Error::Guard(format!(
            "symmetric power of rank {} exceeds the rank guard {RANK_GUARD}",
            s.rank()
        )));
    }
    let gap = mu_max(&s)? - l as f64 * mu_max(b)?;
    let bound = 2.0 * l as f64 * n as f64 * (n as f64).ln();
    let instance = json!({ "rank": n, "l": l });
    Ok(CheckReport::new("sympow_mumax", instance, 0, SLOPE_TOL)
        .le("0 <= mu_max(S^l E) - l mu_max(E)", 0.0, gap)
        .le("mu_max(S^l E) - l mu_max(E) <= 2 l n log n", gap, bound))
}

/// Absolute Siegel lemma over Q with a rational witness: for an HKZ-reduced basis,
/// `Σ h(e_i) + deg E ≤ (n/2) log n`.
pub fn siegel_check(b: &AdelicBundle) -> Result<CheckReport> {
    let n = b.rank();
    if n > RANK_GUARD {
        return Err(Error::Guard(format!(
            "Siegel witness of rank {n} exceeds the rank guard {RANK_GUARD}"
        )));
    }
    let h = b.coordinate_gram()?;
    let u = hkz(&h.to_f64())?;
    let mut heights = 0.0;
    let mut witness = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<i64> = (0..n).map(|i| u[(i, j)]).collect();
        let e = b.lattice().mul_vec(&q_vec(&col))?;
        heights += crate::bundle::height_vector(b, &e)?.value;
        witness.push(col);
    }
    let lhs = heights + degree(b)?;
    let rhs = 0.5 * n as f64 * (n as f64).ln();
    let instance = json!({ "rank": n, "witness": witness });
    Ok(CheckReport::new("siegel", instance, 0, 1e-9).le(
        "sum h(e_i) + deg E <= (n/2) log n",
        lhs,
        rhs,
    ))
}

/// `log γ_{n,ℓ} / ℓ`, which tends to `H_n − 1` as `ℓ → ∞`.
pub fn gamma_rate(n: usize, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain("rate at l = 0".into()));
    }
    Ok(gamma_nl(n, l)?.log_value / l as f64)
}

//! Places of Q, normalized absolute values, product formula and ideles.

use std::collections::BTreeMap;

use num_bigint::{BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ln_q, Q, Z};

/// A place of Q, or the complex place of Q(i) used by scalar extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    /// The `p`-adic place.
    Finite(u64),
    /// The real place.
    Real,
    /// A complex place.
    Complex,
}

impl Place {
    /// Validated finite place.
    pub fn finite(p: u64) -> Result<Self> {
        if !num_prime::nt_funcs::is_prime64(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Ok(Place::Finite(p))
    }

    /// Local degree `n_v`.
    pub fn local_degree(&self) -> u32 {
        match self {
            Place::Complex => 2,
            _ => 1,
        }
    }

    /// Whether the place is archimedean.
    pub fn is_archimedean(&self) -> bool {
        !matches!(self, Place::Finite(_))
    }
}

/// Factorization of a positive integer as `prime -> exponent`.
pub fn factor(n: &Z) -> BTreeMap<Z, u32> {
    assert!(n.is_positive(), "factor of a non-positive integer");
    let mut out = BTreeMap::new();
    if n.is_one() {
        return out;
    }
    if let Some(v) = n.to_u128() {
        for (p, e) in num_prime::nt_funcs::factorize128(v) {
            out.insert(Z::from(p), e as u32);
        }
        return out;
    }
    let (_, mag) = n.clone().into_parts();
    let big: BigUint = mag;
    for (p, e) in num_prime::nt_funcs::factorize(big) {
        out.insert(Z::from_biguint(Sign::Plus, p), e as u32);
    }
    out
}

/// Exponent of `p` in the nonzero integer `n`.
pub fn valuation_z(n: &Z, p: u64) -> u32 {
    let p = Z::from(p);
    let mut m = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// `p`-adic valuation of a nonzero rational.
pub fn valuation(x: &Q, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::Domain("valuation of zero".into()));
    }
    Ok(valuation_z(x.numer(), p) as i64 - valuation_z(x.denom(), p) as i64)
}

/// Integer power `p^e` as a rational, `e` of any sign.
pub fn prime_power(p: u64, e: i64) -> Q {
    let b = num_traits::pow(Z::from(p), e.unsigned_abs() as usize);
    if e >= 0 {
        Q::from_integer(b)
    } else {
        Q::new(Z::one(), b)
    }
}

/// Normalized absolute value `|x|_v` with `|p|_p = 1/p`, returned exactly.
///
/// At the complex place the usual modulus is returned; the product formula weighs it by `n_v = 2`.
pub fn abs_value(x: &Q, v: Place) -> Result<Q> {
    if x.is_zero() {
        return Err(Error::Domain("absolute value of zero".into()));
    }
    match v {
        Place::Finite(p) => Ok(prime_power(p, -valuation(x, p)?)),
        Place::Real | Place::Complex => Ok(x.abs()),
    }
}

/// Prime support of a nonzero rational.
pub fn prime_support(x: &Q) -> Vec<u64> {
    let mut s: Vec<Z> = factor(&x.numer().abs()).into_keys().collect();
    s.extend(factor(x.denom()).into_keys());
    let mut out: Vec<u64> = s
        .into_iter()
        .map(|p| p.to_u64().expect("prime fits in 64 bits"))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Verifies `∏_v |x|_v = 1` over the real place and the prime support of `x`, exactly.
pub fn product_formula_check(x: &Q) -> Result<()> {
    let mut prod = abs_value(x, Place::Real)?;
    for p in prime_support(x) {
        prod *= abs_value(x, Place::Finite(p))?;
    }
    if prod.is_one() {
        Ok(())
    } else {
        Err(Error::Invariant(format!(
            "product formula fails for {x}: {prod}"
        )))
    }
}

/// An idele of Q with finite support, plus archimedean components.
#[derive(Debug, Clone, PartialEq)]
pub struct Idele {
    finite: BTreeMap<u64, Q>,
    arch: Vec<(Place, f64)>,
}

impl Idele {
    /// Builds an idele from local absolute values `|a_p|_p` and archimedean values.
    ///
    /// Each finite component must be an integral power of its prime; components equal
    /// to one are dropped.
    pub fn new(finite: BTreeMap<u64, Q>, arch: Vec<(Place, f64)>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (p, v) in finite {
            Place::finite(p)?;
            if !v.is_positive() {
                return Err(Error::Domain(format!("component at {p} must be positive")));
            }
            let e = valuation(&v, p)?;
            if prime_power(p, e) != v {
                return Err(Error::Domain(format!(
                    "component {v} at {p} is not a power of {p}"
                )));
            }
            if !v.is_one() {
                clean.insert(p, v);
            }
        }
        for (v, a) in &arch {
            if !v.is_archimedean() || !(a.is_finite() && *a > 0.0) {
                return Err(Error::Domain(
                    "archimedean components must be positive reals".into(),
                ));
            }
        }
        Ok(Idele {
            finite: clean,
            arch,
        })
    }

    /// Principal idele of a nonzero rational (diagonal embedding).
    pub fn principal(x: &Q) -> Result<Self> {
        let mut finite = BTreeMap::new();
        for p in prime_support(x) {
            finite.insert(p, abs_value(x, Place::Finite(p))?);
        }
        Idele::new(
            finite,
            vec![(Place::Real, crate::rational::to_f64(&x.abs()))],
        )
    }

    /// Finite components.
    pub fn finite(&self) -> &BTreeMap<u64, Q> {
        &self.finite
    }

    /// Archimedean components.
    pub fn arch(&self) -> &[(Place, f64)] {
        &self.arch
    }

    /// Product of the finite components, exactly.
    pub fn finite_abs(&self) -> Q {
        self.finite.values().fold(Q::one(), |acc, v| acc * v)
    }

    /// Component-wise product.
    pub fn mul(&self, other: &Idele) -> Result<Idele> {
        let mut f = self.finite.clone();
        for (p, v) in &other.finite {
            let e = f.entry(*p).or_insert_with(Q::one);
            *e = &*e * v;
        }
        let mut arch = self.arch.clone();
        for (pl, a) in &other.arch {
            match arch.iter_mut().find(|(q, _)| q == pl) {
                Some(slot) => slot.1 *= a,
                None => arch.push((*pl, *a)),
            }
        }
        Idele::new(f, arch)
    }

    /// Integral scalar `∏ p^{e_p}` with `|·|_p` equal to the finite components.
    pub fn finite_scalar(&self) -> Q {
        self.finite.iter().fold(Q::one(), |acc, (p, v)| {
            acc * prime_power(*p, -valuation(v, *p).unwrap())
        })
    }
}

/// Adelic absolute value `∏_v |a_v|_v^{n_v}`.
pub fn adelic_abs(a: &Idele) -> f64 {
    log_adelic_abs(a).exp()
}

/// Logarithm of the adelic absolute value.
pub fn log_adelic_abs(a: &Idele) -> f64 {
    let mut log = ln_q(&a.finite_abs());
    for (v, x) in &a.arch {
        log += v.local_degree() as f64 * x.ln();
    }
    log
}

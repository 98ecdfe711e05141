//! Exact rational scalars and a few numeric helpers shared across modules.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator (`num_rational` maintains both invariants).
pub type Rational = num_rational::BigRational;

/// Shorthand for a small integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^exp` for a nonnegative integer exponent.
pub fn pow_u(base: u64, exp: u32) -> Rational {
    Rational::from_integer(BigInt::from(base).pow(exp))
}

/// `base^(-exp)` as an exact rational.
pub fn pow_neg(base: u64, exp: u32) -> Rational {
    pow_u(base, exp).recip()
}

/// Squared Euclidean norm of a rational vector.
pub fn norm_sq(v: &[Rational]) -> Rational {
    v.iter().map(|x| x * x).sum()
}

/// Exact square root of a nonnegative rational, when it is rational itself.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rational::zero());
    }
    let ns = r.numer().sqrt();
    let ds = r.denom().sqrt();
    if &(&ns * &ns) == r.numer() && &(&ds * &ds) == r.denom() {
        Some(Rational::new(ns, ds))
    } else {
        None
    }
}

/// Rounds to the nearest `f64`. Falls back to a quotient of scaled parts for
/// values whose numerator or denominator exceeds the `f64` range.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let bits = r.numer().bits().max(r.denom().bits());
        let shift = bits.saturating_sub(500) as u32;
        let n = r.numer() >> shift;
        let d = r.denom() >> shift;
        n.to_f64().unwrap_or(f64::MAX) / d.to_f64().unwrap_or(1.0)
    })
}

/// Euclidean norm of a rational vector as `f64`.
pub fn norm_f64(v: &[Rational]) -> f64 {
    to_f64(&norm_sq(v)).sqrt()
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// Renders in the `"p/q"` form accepted by [`parse_rational`]; integers are
/// rendered without the denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

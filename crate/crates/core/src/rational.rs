//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational number used throughout the crate.
pub type Q = num_rational::BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `p`, `p/q` or `-p/q`. Decimal points are rejected on purpose: inputs are exact.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let bad = || Error::Validation(format!("malformed rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Canonical text: `p` for integers, `p/q` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of the denominators; 1 for an empty iterator.
pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn in_unit(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

/// Decimal approximation for human-facing reports only.
pub fn approx(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

//! Arbitrary-precision rational scalars and small helpers.
//!
//! All geometry in this crate is exact: `Rat` is a reduced fraction with
//! positive denominator, as maintained by `num_rational::BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Fraction n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "3", "-5/7" style strings.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad rational component {t:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(n)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Renders as "3" or "-5/7".
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fractional part in [0, 1).
pub fn fract(r: &Rat) -> Rat {
    r - r.floor()
}

/// Least common multiple of the denominators, always positive.
pub fn lcm_denoms<'a, I: IntoIterator<Item = &'a Rat>>(iter: I) -> BigInt {
    let mut l = BigInt::one();
    for r in iter {
        l = l.lcm(r.denom());
    }
    l.abs()
}

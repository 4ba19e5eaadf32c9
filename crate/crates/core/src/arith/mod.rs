//! Exact scalars: big integers, reduced rationals, primality and factorization.
//!
//! `BigInt` and `BigRational` come from the `num` family; everything else in
//! the crate works in terms of these two types. The wire form of a rational
//! is `"p/q"`, or just `"p"` when the denominator is one.

mod factor;
mod prime;

use std::str::FromStr;

pub use num_bigint::{BigInt, BigUint, Sign};
pub use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use factor::{
    factor, factor_with_budget, Factorization, DEFAULT_FACTOR_BUDGET, TRIAL_DIVISION_LIMIT,
};
pub use prime::{is_probable_prime, DETERMINISTIC_LIMIT};

use crate::error::{Error, Result};

/// Reduce `num/den` to canonical form (positive denominator, coprime parts).
pub fn normalize(num: BigInt, den: BigInt) -> Result<BigRational> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(num, den))
}

/// Parse `"p/q"` or `"p"`. Decimal notation is rejected.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    let bad = || Error::Parse {
        input: input.to_string(),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    normalize(num, den)
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Small-integer rational constructor. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn from_usize(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn factorial(n: usize) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn pow(base: &BigRational, exp: usize) -> BigRational {
    num_traits::pow(base.clone(), exp)
}

/// `(-1)^e` as a rational.
pub fn sign_power(e: usize) -> BigRational {
    if e.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

/// λ(λ−1)···(λ−n+1)/n!, which is 1 for n = 0.
pub fn generalized_binomial(lambda: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..n {
        acc *= (lambda - from_usize(i)) / from_usize(i + 1);
    }
    acc
}

/// True when `r` is an integer `<= 0`.
pub fn is_nonpositive_integer(r: &BigRational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// True when `r` is an integer `>= 0`.
pub fn is_nonnegative_integer(r: &BigRational) -> bool {
    r.is_integer() && !r.is_negative()
}

/// Serde adapter storing a rational as its `"p/q"` string.
pub mod serde_rational {
    use super::{format_rational, parse_rational, BigRational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<BigRational>` as an array of strings.
pub mod serde_rational_vec {
    use super::{format_rational, parse_rational, BigRational};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter for a big integer as a decimal string.
pub mod serde_bigint {
    use super::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(s.trim()).map_err(D::Error::custom)
    }
}

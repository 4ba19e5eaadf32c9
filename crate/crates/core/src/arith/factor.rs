//! Integer factorization: trial division below 10^6, then Pollard rho
//! (Brent's variant) on whatever cofactors remain, certifying each piece
//! with Miller-Rabin.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::prime::{is_prime_u64, is_probable_prime_unsigned};
use crate::error::{Error, Result};

pub const TRIAL_DIVISION_LIMIT: u32 = 1_000_000;

/// Pollard-rho iterations allowed per composite cofactor.
pub const DEFAULT_FACTOR_BUDGET: u64 = 10_000_000;

/// Prime factorization of a positive integer.
///
/// `unfactored` is empty for a complete factorization. When the work budget
/// runs out it holds the composite cofactors that could not be split, and
/// `value = ∏ p^e · ∏ unfactored` still holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "super::serde_bigint")]
    pub value: BigInt,
    #[serde(with = "factor_list")]
    pub factors: Vec<(BigInt, u32)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "bigint_list")]
    pub unfactored: Vec<BigInt>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }

    pub fn largest_prime(&self) -> Option<&BigInt> {
        self.factors.last().map(|(p, _)| p)
    }

    /// Multiply everything back together.
    pub fn product(&self) -> BigInt {
        let primes = self.factors.iter().fold(BigInt::one(), |acc, (p, e)| {
            acc * num_traits::pow(p.clone(), *e as usize)
        });
        self.unfactored.iter().fold(primes, |acc, c| acc * c)
    }
}

mod factor_list {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[(BigInt, u32)], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<(String, u32)> = v.iter().map(|(p, e)| (p.to_string(), *e)).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigInt, u32)>, D::Error> {
        let raw = Vec::<(String, u32)>::deserialize(d)?;
        raw.into_iter()
            .map(|(p, e)| Ok((BigInt::from_str(&p).map_err(D::Error::custom)?, e)))
            .collect()
    }
}

mod bigint_list {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| BigInt::from_str(s).map_err(D::Error::custom))
            .collect()
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_DIVISION_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::with_capacity(78_498);
        for i in 2..limit {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

fn rem_u32(x: &BigUint, p: u32) -> u32 {
    let p = p as u64;
    x.iter_u32_digits()
        .rev()
        .fold(0u64, |r, d| ((r << 32) | d as u64) % p) as u32
}

/// Factor with the default Pollard-rho budget.
pub fn factor(x: &BigInt) -> Result<Factorization> {
    factor_with_budget(x, DEFAULT_FACTOR_BUDGET)
}

/// Factor `x >= 1`. On budget exhaustion returns [`Error::FactorTimeout`]
/// carrying the partial factorization.
pub fn factor_with_budget(x: &BigInt, budget: u64) -> Result<Factorization> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "factor expects a positive integer, got {x}"
        )));
    }
    let mut rest = x.magnitude().clone();
    let mut primes: Vec<(BigUint, u32)> = Vec::new();

    for &p in small_primes() {
        let pp = p as u64 * p as u64;
        if rest.to_u64().is_some_and(|r| r < pp) {
            break;
        }
        if rem_u32(&rest, p) == 0 {
            let mut e = 0;
            while rem_u32(&rest, p) == 0 {
                rest /= p;
                e += 1;
            }
            primes.push((BigUint::from(p), e));
        }
    }

    let mut unfactored = Vec::new();
    if !rest.is_one() {
        // Everything left has no prime factor below the trial-division limit,
        // so anything under limit^2 is itself prime.
        let limit_sq = BigUint::from(TRIAL_DIVISION_LIMIT as u64 * TRIAL_DIVISION_LIMIT as u64);
        let mut stack = vec![rest];
        while let Some(c) = stack.pop() {
            if c < limit_sq || is_probable_prime_unsigned(&c) {
                primes.push((c, 1));
                continue;
            }
            match pollard_brent(&c, budget) {
                Some(d) => {
                    let other = &c / &d;
                    stack.push(d);
                    stack.push(other);
                }
                None => unfactored.push(c),
            }
        }
    }

    primes.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for (p, e) in primes {
        let p = BigInt::from(p);
        match factors.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => factors.push((p, e)),
        }
    }
    unfactored.sort();
    let result = Factorization {
        value: x.clone(),
        factors,
        unfactored: unfactored.into_iter().map(BigInt::from).collect(),
    };
    if result.is_complete() {
        Ok(result)
    } else {
        Err(Error::FactorTimeout {
            partial: Box::new(result),
        })
    }
}

/// Find a nontrivial factor of the odd composite `n`, or give up after
/// `budget` iterations summed over all restarts.
fn pollard_brent(n: &BigUint, budget: u64) -> Option<BigUint> {
    if let Some(small) = n.to_u64() {
        return pollard_brent_u64(small, budget).map(BigUint::from);
    }
    let one = BigUint::one();
    let mut spent = 0u64;
    let mut c = BigUint::one();
    while spent < budget {
        let f = |y: &BigUint| (y * y + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g.is_one() && spent < budget {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += BATCH;
                spent += BATCH.min(r);
            }
            r *= 2;
        }
        if g == *n {
            // Batched product overshot; replay one step at a time.
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
        c += &one;
    }
    None
}

fn pollard_brent_u64(n: u64, budget: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    if is_prime_u64(n) {
        return None;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let mut spent = 0u64;
    let mut c = 1u64;
    while spent < budget {
        let f = |y: u64| (mul(y, y) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let (mut q, mut g, mut r) = (1u64, 1u64, 1u64);
        const BATCH: u64 = 128;
        while g == 1 && spent < budget {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul(q, x.abs_diff(y));
                }
                g = q.gcd(&n);
                k += BATCH;
                spent += BATCH.min(r);
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != 1 && g != n {
            return Some(g);
        }
        c += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_probable_prime;
    use proptest::prelude::*;
    use std::str::FromStr;

    fn big(s: &str) -> BigInt {
        BigInt::from_str(s).unwrap()
    }

    fn pairs(f: &Factorization) -> Vec<(String, u32)> {
        f.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect()
    }

    #[test]
    fn small_values() {
        assert_eq!(
            pairs(&factor(&big("12")).unwrap()),
            vec![("2".into(), 2), ("3".into(), 1)]
        );
        assert!(factor(&big("1")).unwrap().factors.is_empty());
        assert!(factor(&big("0")).is_err());
        assert!(factor(&big("-4")).is_err());
    }

    #[test]
    fn inverse_square_numerators() {
        assert_eq!(
            pairs(&factor(&big("32104903")).unwrap()),
            vec![("179".into(), 1), ("179357".into(), 1)]
        );
        let x = big("23") * big("1280587616051046200369");
        assert_eq!(
            pairs(&factor(&x).unwrap()),
            vec![("23".into(), 1), ("1280587616051046200369".into(), 1)]
        );
    }

    #[test]
    fn rho_splits_products_of_large_primes() {
        // Two primes above the trial-division limit; the product fits in u64.
        let a = big("1000003");
        let b = big("1000033");
        let f = factor(&(&a * &b)).unwrap();
        assert_eq!(f.factors, vec![(a.clone(), 1), (b.clone(), 1)]);
        // Product beyond u64: exercises the BigUint path.
        let p = big("4294967311"); // prime > 2^32
        let q = big("1099511627791"); // prime > 2^40
        let f = factor(&(&p * &q * &p)).unwrap();
        assert_eq!(f.factors, vec![(p.clone(), 2), (q.clone(), 1)]);
    }

    #[test]
    fn budget_exhaustion_reports_partial() {
        let p = big("1000000000039"); // prime ~ 10^12
        let q = big("1000000000061");
        let x = big("6") * &p * &q;
        match factor_with_budget(&x, 10) {
            Err(Error::FactorTimeout { partial }) => {
                assert_eq!(partial.product(), x);
                assert_eq!(partial.unfactored, vec![&p * &q]);
                assert_eq!(pairs(&partial), vec![("2".into(), 1), ("3".into(), 1)]);
            }
            other => panic!("expected timeout, got {other:?}"),
        }
        assert_eq!(factor(&x).unwrap().factors.len(), 4);
    }

    proptest! {
        #[test]
        fn reconstructs_and_primes_certify(x in 1u64..u64::MAX / 4) {
            let x = BigInt::from(x);
            let f = factor(&x).unwrap();
            prop_assert_eq!(f.product(), x);
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for (p, e) in &f.factors {
                prop_assert!(is_probable_prime(p));
                prop_assert!(*e >= 1);
            }
        }
    }
}

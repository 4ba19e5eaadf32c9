//! Miller-Rabin primality testing.
//!
//! Below [`DETERMINISTIC_LIMIT`] the witness set {2, 3, ..., 41} gives an exact
//! answer. Above it, 64 pseudo-random witnesses are used, for an error
//! probability below 4^-64 = 2^-128. The witness stream is seeded from the
//! candidate itself so the test is a pure function.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL_PRIMES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const RANDOM_ROUNDS: usize = 64;

/// 3 317 044 064 679 887 385 961 981: the witnesses 2..=41 are exact below it.
pub const DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

pub fn is_probable_prime(x: &BigInt) -> bool {
    match x.to_biguint() {
        Some(u) => is_probable_prime_unsigned(&u),
        None => false,
    }
}

pub(crate) fn is_probable_prime_unsigned(x: &BigUint) -> bool {
    if let Some(small) = x.to_u64() {
        return is_prime_u64(small);
    }
    for p in SMALL_PRIMES {
        if (x % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let x_minus_one = x - &one;
    let s = x_minus_one.trailing_zeros().unwrap_or(0);
    let d = &x_minus_one >> s;

    let strong_probable_prime = |a: &BigUint| -> bool {
        let mut y = a.modpow(&d, x);
        if y == one || y == x_minus_one {
            return true;
        }
        for _ in 1..s {
            y = &y * &y % x;
            if y == x_minus_one {
                return true;
            }
            if y == one {
                return false;
            }
        }
        false
    };

    let below_limit = x.to_u128().is_some_and(|v| v < DETERMINISTIC_LIMIT);
    if below_limit {
        return SMALL_PRIMES
            .iter()
            .all(|&p| strong_probable_prime(&BigUint::from(p)));
    }

    let mut seed = [0u8; 32];
    for (slot, byte) in seed.iter_mut().zip(x.to_bytes_le()) {
        *slot = byte;
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    let span = x - BigUint::from(3u32);
    let width = x.to_bytes_le().len() + 8;
    let mut buf = vec![0u8; width];
    (0..RANDOM_ROUNDS).all(|_| {
        rng.fill_bytes(&mut buf);
        let a = BigUint::from_bytes_le(&buf) % &span + 2u32;
        strong_probable_prime(&a)
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL_PRIMES {
        let mut y = pow_mod(a as u64, d, n);
        if y == 1 || y == n - 1 {
            continue;
        }
        for _ in 1..s {
            y = mul_mod(y, y, n);
            if y == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

//! Exact integer and rational arithmetic: `Z[1/k]`, prime valuations,
//! factorization, multiplicative orders and supernatural numbers.

mod factor;
mod kpower;
mod supernatural;

pub use factor::{factorize, is_prime, multiplicative_order, FactorBudget, Factorization};
pub use kpower::KPowerRational;
pub use supernatural::{divides_supernatural, ConstrainedRational, Multiplicity, SupernaturalNumber};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact multiplicity of the prime `p` in the nonzero integer `n`.
pub fn valuation(n: &BigInt, p: &BigInt) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if *p < BigInt::from(2) {
        return Err(Error::InvalidInput(format!("{p} is not a prime")));
    }
    let mut rest = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return Ok(v);
        }
        rest = q;
        v += 1;
    }
}

/// `base^exp - 1`.
pub fn pow_minus_one(base: u64, exp: u64) -> BigInt {
    big_pow(base, exp) - 1
}

pub fn big_pow(base: u64, exp: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut sq = BigInt::from(base);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Inverse of `a` modulo `m` (`m >= 1`). Modulus 1 yields 0.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    if m.is_one() {
        return Ok(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return Err(Error::NonUnit {
            value: a.to_string(),
            modulus: m.to_string(),
        });
    }
    Ok(e.x.mod_floor(m))
}

/// Part of `m` built from primes dividing `d`, found by repeated gcds.
pub(crate) fn smooth_part(m: &BigInt, d: &BigInt) -> BigInt {
    let mut rest = m.abs();
    let mut acc = BigInt::one();
    loop {
        let g = rest.gcd(d);
        if g.is_one() || g.is_zero() {
            return acc;
        }
        rest /= &g;
        acc *= g;
    }
}

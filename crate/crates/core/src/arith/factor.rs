use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prime -> multiplicity.
pub type Factorization = BTreeMap<BigInt, u32>;

const TRIAL_LIMIT: u64 = 1_000_000;

/// Size guard for factorization. Inputs wider than `max_bits` are refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBudget {
    pub max_bits: u32,
}

impl FactorBudget {
    /// The internal arithmetic is 128-bit; wider guards are clamped.
    pub fn new(max_bits: u32) -> Self {
        FactorBudget {
            max_bits: max_bits.min(128),
        }
    }

    pub fn check(&self, n: &BigInt) -> Result<()> {
        let bits = n.bits();
        if bits > self.max_bits as u64 {
            return Err(Error::FactorBudget {
                bits,
                max_bits: self.max_bits,
            });
        }
        Ok(())
    }
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { max_bits: 96 }
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

/// Full 256-bit product of two `u128` values as `(hi, lo)`.
fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery arithmetic modulo an odd `n`, with `R = 2^128`.
struct Montgomery {
    n: u128,
    n_neg_inv: u128,
    r2: u128,
}

impl Montgomery {
    fn new(n: u128) -> Self {
        debug_assert!(n & 1 == 1 && n > 1);
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r = n.wrapping_neg() % n;
        let mut r2 = r;
        for _ in 0..128 {
            r2 = Self::add_mod(r2, r2, n);
        }
        Montgomery {
            n,
            n_neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    fn add_mod(a: u128, b: u128, n: u128) -> u128 {
        if a >= n - b {
            a - (n - b)
        } else {
            a + b
        }
    }

    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.n_neg_inv);
        let (mh, ml) = widening_mul(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let (t, of1) = hi.overflowing_add(mh);
        let (t, of2) = t.overflowing_add(carry as u128);
        if of1 || of2 || t >= self.n {
            t.wrapping_sub(self.n)
        } else {
            t
        }
    }

    fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = widening_mul(a, b);
        self.redc(hi, lo)
    }

    fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    fn pow(&self, base: u128, mut e: u128) -> u128 {
        let mut acc = self.to_mont(1);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }
}

const MR_BASES: [u128; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Miller–Rabin with fixed bases. The first 13 bases are a proof for
/// `n < 3.3 * 10^24`; beyond that the 20 bases make a strong probable-prime test.
fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mont = Montgomery::new(n);
    let one = mont.to_mont(1);
    let minus_one = mont.to_mont(n - 1);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primality of `n`; inputs wider than 128 bits are rejected as not prime-tested.
pub fn is_prime(n: &BigInt) -> bool {
    match n.to_u128() {
        Some(v) => is_prime_u128(v),
        None => false,
    }
}

/// Brent's variant of Pollard rho on an odd composite `n`.
fn rho_factor(n: u128, seed: u64) -> Option<u128> {
    let mont = Montgomery::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64));
    for _attempt in 0..64 {
        let c = mont.to_mont(rng.gen_range(1..n));
        let f = |x: u128| {
            let sq = mont.mul(x, x);
            Montgomery::add_mod(sq, c, n)
        };
        let mut y = mont.to_mont(rng.gen_range(0..n));
        let batch = 128u64;
        let mut r = 1u64;
        let mut q = mont.to_mont(1);
        let mut g = 1u128;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..batch.min(r - k) {
                    y = f(y);
                    let diff = x.abs_diff(y);
                    q = mont.mul(q, diff);
                }
                g = q.gcd(&n);
                k += batch;
            }
            r *= 2;
            if r > 1 << 40 {
                break;
            }
        }
        if g == n {
            // Batch overshot; step one at a time from the saved point.
            loop {
                ys = f(ys);
                let diff = x.abs_diff(ys);
                g = diff.gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g > 1 && g < n {
            return Some(g);
        }
    }
    None
}

fn split_into(n: u128, out: &mut BTreeMap<u128, u32>, seed: u64) {
    if n == 1 {
        return;
    }
    // No prime factors below the trial limit remain, so n < limit^2 is prime.
    let limit = TRIAL_LIMIT as u128;
    if n < limit * limit || is_prime_u128(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    if let Some(r) = isqrt_exact(n) {
        split_into(r, out, seed);
        split_into(r, out, seed);
        return;
    }
    let d = rho_factor(n, seed).expect("rho failed on a composite within budget");
    split_into(d, out, seed.wrapping_add(1));
    split_into(n / d, out, seed.wrapping_add(2));
}

fn isqrt_exact(n: u128) -> Option<u128> {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Prime factorization of a positive integer: trial division up to 10^6, then
/// Pollard–Brent rho with deterministic seeding.
pub fn factorize(n: &BigInt, budget: &FactorBudget) -> Result<Factorization> {
    if !n.is_positive() {
        return Err(Error::InvalidInput(format!("cannot factorize {n}")));
    }
    budget.check(n)?;
    let mut rest = n.to_u128().expect("budget keeps inputs within 128 bits");
    let mut found: BTreeMap<u128, u32> = BTreeMap::new();
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        while rest.is_multiple_of(p) {
            rest /= p;
            *found.entry(p).or_insert(0) += 1;
        }
    }
    split_into(rest, &mut found, 0x006b_6361_6c63);
    Ok(found
        .into_iter()
        .map(|(p, e)| (BigInt::from(p), e))
        .collect())
}

/// Least `t >= 1` with `k^t = 1 (mod modulus)`. Modulus 1 gives 1.
pub fn multiplicative_order(k: &BigInt, modulus: &BigInt, budget: &FactorBudget) -> Result<BigInt> {
    if !modulus.is_positive() {
        return Err(Error::InvalidInput(format!("modulus {modulus} must be positive")));
    }
    if modulus.is_one() {
        return Ok(BigInt::one());
    }
    if !k.gcd(modulus).is_one() {
        return Err(Error::NonUnit {
            value: k.to_string(),
            modulus: modulus.to_string(),
        });
    }
    let base = k.mod_floor(modulus);
    let mut phi = BigInt::one();
    let mut phi_primes: BTreeMap<BigInt, ()> = BTreeMap::new();
    for (p, e) in factorize(modulus, budget)? {
        let pm1: BigInt = &p - 1;
        phi *= num_traits::pow(p.clone(), (e - 1) as usize) * &pm1;
        if e > 1 {
            phi_primes.insert(p.clone(), ());
        }
        if !pm1.is_one() {
            for q in factorize(&pm1, budget)?.into_keys() {
                phi_primes.insert(q, ());
            }
        }
    }
    let mut order = phi;
    for q in phi_primes.into_keys() {
        while order.is_multiple_of(&q) {
            let cand = &order / &q;
            if base.modpow(&cand, modulus).is_one() {
                order = cand;
            } else {
                break;
            }
        }
    }
    debug_assert!(!order.is_zero());
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u128) -> BigInt {
        BigInt::from(n)
    }

    fn fac(n: u128) -> Vec<(u128, u32)> {
        factorize(&b(n), &FactorBudget::default())
            .unwrap()
            .into_iter()
            .map(|(p, e)| (p.to_u128().unwrap(), e))
            .collect()
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(fac(15), vec![(3, 1), (5, 1)]);
        assert_eq!(fac(1), vec![]);
        assert_eq!(fac(255), vec![(3, 1), (5, 1), (17, 1)]);
        assert_eq!(fac(19682), vec![(2, 1), (13, 1), (757, 1)]);
    }

    #[test]
    fn factorize_large_semiprimes() {
        // Two primes above the trial-division limit.
        let p: u128 = 1_000_000_007;
        let q: u128 = 998_244_353;
        assert_eq!(fac(p * q), vec![(q, 1), (p, 1)]);
        // 2^64 - 1 = 3 * 5 * 17 * 257 * 641 * 65537 * 6700417
        assert_eq!(fac(u64::MAX as u128).len(), 7);
        // Crosses 64 bits: (2^61 - 1) * 1000003
        let m61: u128 = (1 << 61) - 1;
        assert_eq!(fac(m61 * 1_000_003), vec![(1_000_003, 1), (m61, 1)]);
        let big_sq = 4_294_967_311u128 * 4_294_967_311u128;
        assert_eq!(fac(big_sq), vec![(4_294_967_311, 2)]);
    }

    #[test]
    fn budget_guard() {
        let huge = BigInt::one() << 100;
        assert!(matches!(
            factorize(&huge, &FactorBudget::default()),
            Err(Error::FactorBudget { bits: 101, max_bits: 96 })
        ));
        assert!(factorize(&b(0), &FactorBudget::default()).is_err());
    }

    #[test]
    fn order_examples() {
        let budget = FactorBudget::default();
        assert_eq!(multiplicative_order(&b(2), &b(5), &budget).unwrap(), b(4));
        assert_eq!(multiplicative_order(&b(2), &b(7), &budget).unwrap(), b(3));
        assert_eq!(multiplicative_order(&b(9), &b(1), &budget).unwrap(), b(1));
        assert_eq!(multiplicative_order(&b(3), &b(4), &budget).unwrap(), b(2));
        assert!(matches!(
            multiplicative_order(&b(2), &b(6), &budget),
            Err(Error::NonUnit { .. })
        ));
    }

    #[test]
    fn primality() {
        assert!(is_prime(&b(2)));
        assert!(!is_prime(&b(1)));
        assert!(is_prime(&b((1 << 61) - 1)));
        assert!(!is_prime(&b(3215031751))); // strong pseudoprime to 2, 3, 5, 7
        assert!(is_prime(&b(170141183460469231731687303715884105727))); // 2^127 - 1
    }
}

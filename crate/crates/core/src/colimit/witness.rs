use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{prefix_valuation, valuation_of_power_minus_one, CyclicColimit};
use crate::arith::{factorize, is_prime, FactorBudget};
use crate::error::{Error, Result};
use crate::odometer::{k0_odometer, GeometricRule, OdometerSpec};

/// A prime power `q^r` with `ord_{q^r}(k) = p^s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerWitness {
    pub k: u64,
    pub p: u64,
    pub s: u32,
    pub q: u64,
    pub r: u32,
    /// `ord_{q^r}(k)`, checked to equal `p^s`.
    pub order: u64,
}

impl PrimePowerWitness {
    pub fn prime_power(&self) -> BigInt {
        Pow::pow(BigInt::from(self.q), self.r)
    }

    pub fn exponent(&self) -> u64 {
        self.p.pow(self.s)
    }

    /// Whether `q^r | k^b - 1`, by a modular power.
    pub fn divides_power_minus_one(&self, b: u64) -> bool {
        let qr = self.prime_power();
        if qr.is_one() {
            return true;
        }
        BigInt::from(self.k).modpow(&BigInt::from(b), &qr).is_one()
    }

    /// Recheck `q^r | k^{p^s} - 1` and `q^r ∤ k^{p^{s-1}} - 1`; together
    /// these pin the order to exactly `p^s`.
    pub fn verify(&self) -> bool {
        let e = self.exponent();
        self.order == e
            && self.r >= 1
            && self.divides_power_minus_one(e)
            && !self.divides_power_minus_one(e / self.p)
    }
}

/// Smallest prime `q` whose valuation in `k^{p^s} - 1` exceeds that in
/// `k^{p^{s-1}} - 1`, with `r` one more than the latter.
pub fn prime_power_witness(k: u64, p: u64, s: u32, budget: &FactorBudget) -> Result<PrimePowerWitness> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    if s == 0 || !is_prime(&BigInt::from(p)) {
        return Err(Error::Precondition(format!("{p}^{s} is not a prime power with s >= 1")));
    }
    let exponent = p
        .checked_pow(s)
        .ok_or_else(|| Error::Precondition(format!("{p}^{s} overflows")))?;
    let bits = (exponent as u128) * (64 - k.leading_zeros()) as u128;
    if bits > budget.max_bits as u128 + 1 {
        return Err(Error::FactorBudget {
            bits: bits.min(u64::MAX as u128) as u64,
            max_bits: budget.max_bits,
        });
    }
    let top = Pow::pow(BigInt::from(k), exponent) - 1u32;
    let lower = exponent / p;
    for (q, e) in factorize(&top, budget)? {
        let qv = q.to_u64().expect("prime factor below 2^64");
        let below = valuation_of_power_minus_one(k, lower, &q);
        if e > below {
            let w = PrimePowerWitness {
                k,
                p,
                s,
                q: qv,
                r: below + 1,
                order: exponent,
            };
            if !w.verify() {
                return Err(Error::Verification(format!(
                    "order certificate failed for {}^{} with k = {k}",
                    w.q, w.r
                )));
            }
            return Ok(w);
        }
    }
    Err(Error::Verification(format!(
        "no prime power of order {p}^{s} found in {k}^{exponent} - 1"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ColimitVerdict {
    /// Limit `a` contains an element of order `q^r`, limit `b` none.
    Distinct {
        /// Which argument plays the role of `a` ("A" or "B").
        larger: String,
        witness: PrimePowerWitness,
        /// First 1-based stage of `a` whose level is divisible by `p^s`.
        stage: usize,
        /// Multiplicity of `q` in the prefixes up to `stage`.
        prefix_valuation_a: u32,
        prefix_valuation_b: u32,
    },
    Inconclusive { reason: String },
}

impl ColimitVerdict {
    pub fn is_distinct(&self) -> bool {
        matches!(self, ColimitVerdict::Distinct { .. })
    }
}

fn p_valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest `s` such that `p^s` divides some level of `a` and no level of `b`,
/// with the first stage of `a` where it happens.
fn qualifying_power(a: &GeometricRule, b: &GeometricRule, p: u64) -> Option<(u32, usize)> {
    if p_valuation(b.r, p) > 0 {
        return None;
    }
    let s = p_valuation(b.c, p) + 1;
    let (vc, vr) = (p_valuation(a.c, p), p_valuation(a.r, p));
    if vc >= s {
        return Some((s, 1));
    }
    if vr == 0 {
        return None;
    }
    let steps = (s - vc).div_ceil(vr);
    Some((s, steps as usize + 1))
}

/// Separate the limits for `n_i = c r^{i-1}` by the order of their elements.
pub fn distinguish_colimits(
    k: u64,
    rule_a: GeometricRule,
    rule_b: GeometricRule,
    budget: &FactorBudget,
) -> Result<ColimitVerdict> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    let mut candidates = Vec::new();
    for (label, a, b) in [("A", rule_a, rule_b), ("B", rule_b, rule_a)] {
        let mut primes = prime_divisors(a.c);
        primes.extend(prime_divisors(a.r));
        primes.sort_unstable();
        primes.dedup();
        for p in primes {
            if let Some((s, stage)) = qualifying_power(&a, &b, p) {
                let size = p.checked_pow(s).unwrap_or(u64::MAX);
                candidates.push((size, label, a, b, p, s, stage));
            }
        }
    }
    candidates.sort_by_key(|c| (c.0, c.1));
    let Some(&(_, label, a, b, p, s, stage)) = candidates.first() else {
        return Ok(ColimitVerdict::Inconclusive {
            reason: "no prime power divides a level of one rule and no level of the other".into(),
        });
    };
    let witness = prime_power_witness(k, p, s, budget)?;

    let q = BigInt::from(witness.q);
    let last = [a.level(stage)?, b.level(stage)?];
    let prefix = |rule: GeometricRule| -> Result<CyclicColimit> {
        Ok(k0_odometer(&OdometerSpec::from_rule(k, rule, stage)?)?.colimit)
    };
    let (va, vb) = if guard_levels(k, &last).is_ok() {
        (prefix_valuation(&prefix(a)?, &q)?, prefix_valuation(&prefix(b)?, &q)?)
    } else {
        // Prefix moduli too large to form; compare valuations directly.
        let v = |rule: GeometricRule| -> Result<u32> {
            rule.prefix(stage)?
                .into_iter()
                .map(|n| Ok(valuation_of_power_minus_one(k, n, &q)))
                .try_fold(0, |acc, v: Result<u32>| v.map(|v| acc.max(v)))
        };
        (v(a)?, v(b)?)
    };
    if va < witness.r || vb >= witness.r {
        return Err(Error::Verification(format!(
            "prefix valuations of {} ({va}, {vb}) do not separate at {}^{}",
            witness.q, witness.q, witness.r
        )));
    }
    Ok(ColimitVerdict::Distinct {
        larger: label.to_string(),
        witness,
        stage,
        prefix_valuation_a: va,
        prefix_valuation_b: vb,
    })
}

/// Widest stage modulus `k^n - 1` that is ever formed explicitly.
pub const MAX_STAGE_BITS: u128 = 1 << 14;

/// Refuse prefixes whose moduli would be wider than [`MAX_STAGE_BITS`].
pub fn guard_levels(k: u64, levels: &[u64]) -> Result<()> {
    let per = (64 - k.leading_zeros()) as u128;
    for &n in levels {
        let bits = per * n as u128;
        if bits > MAX_STAGE_BITS {
            return Err(Error::Budget(format!(
                "stage modulus {k}^{n} - 1 has about {bits} bits"
            )));
        }
    }
    Ok(())
}

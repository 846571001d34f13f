use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{factorize, is_prime, smooth_part, FactorBudget};
use crate::error::{Error, Result};

/// Multiplicity of a prime in a supernatural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Multiplicity {
    Finite(u32),
    Infinite,
}

impl Multiplicity {
    pub fn is_zero(self) -> bool {
        self == Multiplicity::Finite(0)
    }

    pub fn is_infinite(self) -> bool {
        self == Multiplicity::Infinite
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}

/// A supernatural number, i.e. a formal product of primes with multiplicities
/// in `N ∪ {∞}`.
///
/// `Finite` lists the primes with nonzero multiplicity explicitly.
/// `CoprimeComplement(d)` gives every prime not dividing `d` multiplicity `∞`
/// and every prime dividing `d` multiplicity 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupernaturalNumber {
    Finite(BTreeMap<u64, Multiplicity>),
    CoprimeComplement(#[serde(with = "crate::serde_big")] BigInt),
}

impl SupernaturalNumber {
    pub fn finite<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Multiplicity)>,
    {
        let mut map = BTreeMap::new();
        for (p, m) in entries {
            if !is_prime(&BigInt::from(p)) {
                return Err(Error::InvalidInput(format!("{p} is not a prime")));
            }
            if !m.is_zero() {
                map.insert(p, m);
            }
        }
        Ok(SupernaturalNumber::Finite(map))
    }

    /// `∏ p^∞` over the given primes.
    pub fn infinite_at(primes: &[u64]) -> Result<Self> {
        Self::finite(primes.iter().map(|&p| (p, Multiplicity::Infinite)))
    }

    /// `k^∞`, i.e. every prime factor of `k` with infinite multiplicity.
    pub fn of_base(k: u64) -> Self {
        let primes: Vec<u64> = factorize(&BigInt::from(k), &FactorBudget::default())
            .expect("u64 is within the default budget")
            .into_keys()
            .map(|p| p.to_u64().unwrap())
            .collect();
        Self::infinite_at(&primes).expect("factors are prime")
    }

    pub fn coprime_complement(d: impl Into<BigInt>) -> Result<Self> {
        let d = d.into();
        if !d.is_positive() {
            return Err(Error::InvalidInput(format!("coprime complement of {d}")));
        }
        Ok(SupernaturalNumber::CoprimeComplement(d))
    }

    /// `v_p(self)`; total for every prime `p`.
    pub fn multiplicity(&self, p: &BigInt) -> Multiplicity {
        match self {
            SupernaturalNumber::Finite(map) => p
                .to_u64()
                .and_then(|p| map.get(&p).copied())
                .unwrap_or(Multiplicity::Finite(0)),
            SupernaturalNumber::CoprimeComplement(d) => {
                if d.is_multiple_of(p) {
                    Multiplicity::Finite(0)
                } else {
                    Multiplicity::Infinite
                }
            }
        }
    }

    /// Whether `m | self`, i.e. `v_p(m) <= v_p(self)` for all primes `p`.
    pub fn divides(&self, m: &BigInt) -> bool {
        if m.is_zero() {
            return false;
        }
        let mut rest = m.abs();
        match self {
            SupernaturalNumber::Finite(map) => {
                for (&p, &mult) in map {
                    let p = BigInt::from(p);
                    let mut v = 0u32;
                    while rest.is_multiple_of(&p) {
                        rest /= &p;
                        v += 1;
                    }
                    if let Multiplicity::Finite(cap) = mult {
                        if v > cap {
                            return false;
                        }
                    }
                }
                rest.is_one()
            }
            SupernaturalNumber::CoprimeComplement(d) => rest.gcd(d).is_one(),
        }
    }

    /// Whether no prime factor of `m` occurs in `self`.
    pub fn is_coprime_to(&self, m: &BigInt) -> bool {
        match self {
            SupernaturalNumber::Finite(map) => map
                .keys()
                .all(|&p| !m.is_multiple_of(&BigInt::from(p))),
            SupernaturalNumber::CoprimeComplement(d) => smooth_part(m, d) == m.abs(),
        }
    }

    /// The part of `m` made of primes with finite multiplicity in `self`.
    /// Primes of infinite multiplicity are invertible in `K_0(M_s)` and drop out.
    pub fn non_divisible_part(&self, m: &BigInt) -> BigInt {
        match self {
            SupernaturalNumber::Finite(map) => {
                let mut rest = m.abs();
                for (&p, &mult) in map {
                    if mult.is_infinite() {
                        let p = BigInt::from(p);
                        while rest.is_multiple_of(&p) {
                            rest /= &p;
                        }
                    }
                }
                rest
            }
            SupernaturalNumber::CoprimeComplement(d) => smooth_part(m, d),
        }
    }

    /// Product of the finite prime powers of `self`; `K_0(M_s)` is
    /// `(1/scale) · Z[1/p : v_p(s) = ∞]`.
    pub fn finite_scale(&self) -> BigInt {
        match self {
            SupernaturalNumber::Finite(map) => map
                .iter()
                .filter_map(|(&p, &m)| match m {
                    Multiplicity::Finite(e) => Some(num_traits::pow(BigInt::from(p), e as usize)),
                    Multiplicity::Infinite => None,
                })
                .product(),
            SupernaturalNumber::CoprimeComplement(_) => BigInt::one(),
        }
    }

    /// Parses `"2^inf,5^3"`, `"1"` (the empty product) or `"coprime:6"`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidInput(format!("malformed supernatural number {text:?}"));
        if let Some(d) = text.strip_prefix("coprime:") {
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Self::coprime_complement(d);
        }
        if text.is_empty() || text == "1" {
            return Ok(SupernaturalNumber::Finite(BTreeMap::new()));
        }
        let mut entries = Vec::new();
        for part in text.split(',') {
            let (p, e) = part.trim().split_once('^').ok_or_else(bad)?;
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let m = match e.trim() {
                "inf" | "∞" => Multiplicity::Infinite,
                e => Multiplicity::Finite(e.parse().map_err(|_| bad())?),
            };
            entries.push((p, m));
        }
        Self::finite(entries)
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupernaturalNumber::Finite(map) if map.is_empty() => f.write_str("1"),
            SupernaturalNumber::Finite(map) => {
                let parts: Vec<String> = map.iter().map(|(p, m)| format!("{p}^{m}")).collect();
                f.write_str(&parts.join(","))
            }
            SupernaturalNumber::CoprimeComplement(d) => write!(f, "coprime:{d}"),
        }
    }
}

/// Whether the positive integer `m` divides the supernatural number `s`.
pub fn divides_supernatural(m: &BigInt, s: &SupernaturalNumber) -> bool {
    m.is_positive() && s.divides(m)
}

/// A rational `numer/denom` in lowest terms whose denominator divides a
/// supernatural number; an element of `K_0(M_s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrainedRational {
    numer: BigInt,
    denom: BigInt,
    constraint: SupernaturalNumber,
}

impl ConstrainedRational {
    pub fn new(numer: BigInt, denom: BigInt, constraint: SupernaturalNumber) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let g = numer.gcd(&denom);
        let (mut numer, mut denom) = (numer / &g, denom / &g);
        if denom.is_negative() {
            numer = -numer;
            denom = -denom;
        }
        if !constraint.divides(&denom) {
            return Err(Error::InvalidInput(format!(
                "denominator {denom} does not divide {constraint}"
            )));
        }
        Ok(ConstrainedRational {
            numer,
            denom,
            constraint,
        })
    }

    pub fn integer(n: impl Into<BigInt>, constraint: SupernaturalNumber) -> Self {
        ConstrainedRational {
            numer: n.into(),
            denom: BigInt::one(),
            constraint,
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn constraint(&self) -> &SupernaturalNumber {
        &self.constraint
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.numer.is_negative()
    }

    fn same_constraint(&self, other: &Self) {
        assert_eq!(
            self.constraint, other.constraint,
            "constrained rationals over different supernatural numbers"
        );
    }

    fn rebuild(&self, numer: BigInt, denom: BigInt) -> Self {
        Self::new(numer, denom, self.constraint.clone())
            .expect("closed under ring operations")
    }
}

impl Add for &ConstrainedRational {
    type Output = ConstrainedRational;
    fn add(self, rhs: &ConstrainedRational) -> ConstrainedRational {
        self.same_constraint(rhs);
        self.rebuild(
            &self.numer * &rhs.denom + &rhs.numer * &self.denom,
            &self.denom * &rhs.denom,
        )
    }
}

impl Sub for &ConstrainedRational {
    type Output = ConstrainedRational;
    fn sub(self, rhs: &ConstrainedRational) -> ConstrainedRational {
        self + &(-rhs)
    }
}

impl Mul for &ConstrainedRational {
    type Output = ConstrainedRational;
    fn mul(self, rhs: &ConstrainedRational) -> ConstrainedRational {
        self.same_constraint(rhs);
        // Products of denominators dividing s can exceed finite multiplicities,
        // so multiplication is only closed when those are infinite.
        ConstrainedRational::new(
            &self.numer * &rhs.numer,
            &self.denom * &rhs.denom,
            self.constraint.clone(),
        )
        .expect("product denominator exceeds a finite multiplicity")
    }
}

impl Neg for &ConstrainedRational {
    type Output = ConstrainedRational;
    fn neg(self) -> ConstrainedRational {
        ConstrainedRational {
            numer: -&self.numer,
            denom: self.denom.clone(),
            constraint: self.constraint.clone(),
        }
    }
}

impl PartialOrd for ConstrainedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((&self.numer * &other.denom).cmp(&(&other.numer * &self.denom)))
    }
}

impl fmt::Display for ConstrainedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

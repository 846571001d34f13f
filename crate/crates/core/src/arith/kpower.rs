use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::big_pow;
use crate::error::{Error, Result};

/// An element `numer / base^expo` of the ring `Z[1/base]`.
///
/// Always normalized: either `expo == 0` or `base` does not divide `numer`.
/// Arithmetic between values of different bases panics.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KPowerRational {
    base: u64,
    #[serde(with = "crate::serde_big")]
    numer: BigInt,
    expo: u32,
}

impl KPowerRational {
    pub fn normalize(numer: BigInt, expo: u32, base: u64) -> Self {
        assert!(base >= 2, "Z[1/k] needs k >= 2");
        let k = BigInt::from(base);
        let mut numer = numer;
        let mut expo = expo;
        if numer.is_zero() {
            expo = 0;
        }
        while expo > 0 {
            let (q, r) = numer.div_rem(&k);
            if !r.is_zero() {
                break;
            }
            numer = q;
            expo -= 1;
        }
        KPowerRational { base, numer, expo }
    }

    pub fn zero(base: u64) -> Self {
        Self::normalize(BigInt::zero(), 0, base)
    }

    pub fn from_integer(n: impl Into<BigInt>, base: u64) -> Self {
        Self::normalize(n.into(), 0, base)
    }

    /// `a / b` as an element of `Z[1/base]`; fails when `b` is not a divisor
    /// of some power of `base`.
    pub fn from_ratio(a: &BigInt, b: &BigInt, base: u64) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let g = a.gcd(b);
        let (mut a, mut b) = (a / &g, b / &g);
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        let k = BigInt::from(base);
        // Find e with b | k^e.
        let mut rest = b.clone();
        let mut expo = 0u32;
        let mut scale = BigInt::one();
        while !rest.is_one() {
            let g = rest.gcd(&k);
            if g.is_one() {
                return Err(Error::InvalidInput(format!(
                    "{a}/{b} is not in Z[1/{base}]"
                )));
            }
            rest /= g;
            expo += 1;
            scale *= &k;
        }
        let numer = a * (scale / b);
        Ok(Self::normalize(numer, expo, base))
    }

    /// Parses `"a"` or `"a/b"`.
    pub fn parse(text: &str, base: u64) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidInput(format!("malformed rational {text:?}"));
        match text.split_once('/') {
            Some((a, b)) => {
                let a: BigInt = a.trim().parse().map_err(|_| bad())?;
                let b: BigInt = b.trim().parse().map_err(|_| bad())?;
                Self::from_ratio(&a, &b, base)
            }
            None => Ok(Self::from_integer(
                text.parse::<BigInt>().map_err(|_| bad())?,
                base,
            )),
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn expo(&self) -> u32 {
        self.expo
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// Multiplication by `1/base`.
    pub fn div_base(&self) -> Self {
        Self::normalize(self.numer.clone(), self.expo + 1, self.base)
    }

    /// Multiplication by an integer.
    pub fn scale(&self, c: &BigInt) -> Self {
        Self::normalize(&self.numer * c, self.expo, self.base)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numer.clone(), big_pow(self.base, self.expo as u64))
    }

    fn check_base(&self, other: &Self) {
        assert_eq!(
            self.base, other.base,
            "mixed bases in Z[1/k] arithmetic"
        );
    }

    /// Numerators of `self` and `other` over the common denominator
    /// `base^max(expo)`.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let e = self.expo.max(other.expo);
        let a = &self.numer * big_pow(self.base, (e - self.expo) as u64);
        let b = &other.numer * big_pow(self.base, (e - other.expo) as u64);
        (a, b, e)
    }
}

impl Add for &KPowerRational {
    type Output = KPowerRational;
    fn add(self, rhs: &KPowerRational) -> KPowerRational {
        self.check_base(rhs);
        let (a, b, e) = self.aligned(rhs);
        KPowerRational::normalize(a + b, e, self.base)
    }
}

impl Sub for &KPowerRational {
    type Output = KPowerRational;
    fn sub(self, rhs: &KPowerRational) -> KPowerRational {
        self.check_base(rhs);
        let (a, b, e) = self.aligned(rhs);
        KPowerRational::normalize(a - b, e, self.base)
    }
}

impl Mul for &KPowerRational {
    type Output = KPowerRational;
    fn mul(self, rhs: &KPowerRational) -> KPowerRational {
        self.check_base(rhs);
        KPowerRational::normalize(&self.numer * &rhs.numer, self.expo + rhs.expo, self.base)
    }
}

impl Neg for &KPowerRational {
    type Output = KPowerRational;
    fn neg(self) -> KPowerRational {
        KPowerRational {
            base: self.base,
            numer: -&self.numer,
            expo: self.expo,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for KPowerRational {
            type Output = KPowerRational;
            fn $m(self, rhs: KPowerRational) -> KPowerRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for KPowerRational {
    type Output = KPowerRational;
    fn neg(self) -> KPowerRational {
        -&self
    }
}

impl PartialOrd for KPowerRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KPowerRational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.base == other.base {
            let (a, b, _) = self.aligned(other);
            a.cmp(&b)
        } else {
            self.to_rational().cmp(&other.to_rational())
        }
    }
}

impl fmt::Display for KPowerRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expo == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, big_pow(self.base, self.expo as u64))
        }
    }
}

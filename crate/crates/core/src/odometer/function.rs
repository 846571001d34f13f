use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::KPowerRational;
use crate::error::{Error, Result};

/// A function `Z_n -> Z[1/k]`, i.e. a level-`n` locally constant function on
/// the odometer. Index `j` holds the value at `j ∈ Z_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocallyConstantFn {
    k: u64,
    values: Vec<KPowerRational>,
}

impl LocallyConstantFn {
    pub fn new(k: u64, values: Vec<KPowerRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("level must be at least 1".into()));
        }
        if let Some(v) = values.iter().find(|v| v.base() != k) {
            return Err(Error::InvalidInput(format!(
                "value {v} lives in Z[1/{}], expected Z[1/{k}]",
                v.base()
            )));
        }
        Ok(LocallyConstantFn { k, values })
    }

    pub fn zero(k: u64, n: usize) -> Self {
        LocallyConstantFn {
            k,
            values: vec![KPowerRational::zero(k); n],
        }
    }

    /// `δ_j`, the indicator of `{j}`.
    pub fn delta(k: u64, n: usize, j: usize) -> Self {
        let mut f = Self::zero(k, n);
        f.values[j % n] = KPowerRational::from_integer(1, k);
        f
    }

    pub fn constant(k: u64, n: usize, c: KPowerRational) -> Result<Self> {
        Self::new(k, vec![c; n])
    }

    /// `χ_Y` for `Y ⊆ Z_n`.
    pub fn indicator(k: u64, n: usize, set: &BTreeSet<usize>) -> Self {
        let values = (0..n)
            .map(|j| KPowerRational::from_integer(i32::from(set.contains(&j)), k))
            .collect();
        LocallyConstantFn { k, values }
    }

    /// Parses comma-separated entries such as `"1,-1/2"`.
    pub fn parse(k: u64, text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .map(|t| KPowerRational::parse(t, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, values)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn level(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[KPowerRational] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &KPowerRational {
        &self.values[x % self.level()]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(KPowerRational::is_zero)
    }

    /// `T f = f ∘ α⁻¹`, so `(T f)(x) = f(x - 1)`.
    pub fn translate(&self) -> Self {
        let n = self.level();
        LocallyConstantFn {
            k: self.k,
            values: (0..n).map(|x| self.values[(x + n - 1) % n].clone()).collect(),
        }
    }

    /// `(1/k) T f`, the action of the trace-scaled odometer on `K_0`.
    pub fn pv_endomorphism(&self) -> Self {
        let t = self.translate();
        LocallyConstantFn {
            k: self.k,
            values: t.values.iter().map(KPowerRational::div_base).collect(),
        }
    }

    /// `(id - (1/k) T) f`.
    pub fn id_minus_pv(&self) -> Self {
        self.sub(&self.pv_endomorphism())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        LocallyConstantFn {
            k: self.k,
            values: self.values.iter().map(|v| v.scale(c)).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&KPowerRational, &KPowerRational) -> KPowerRational,
    ) -> Self {
        assert_eq!(self.k, other.k, "functions into different Z[1/k]");
        assert_eq!(self.level(), other.level(), "functions at different levels");
        LocallyConstantFn {
            k: self.k,
            values: self.values.iter().zip(&other.values).map(|(a, b)| op(a, b)).collect(),
        }
    }

    /// Pullback along `Z_{n'} -> Z_n`.
    pub fn refine(&self, new_level: usize) -> Result<Self> {
        let n = self.level();
        if new_level == 0 || !new_level.is_multiple_of(n) {
            return Err(Error::Precondition(format!(
                "level {n} does not divide {new_level}"
            )));
        }
        Ok(LocallyConstantFn {
            k: self.k,
            values: (0..new_level).map(|x| self.values[x % n].clone()).collect(),
        })
    }
}

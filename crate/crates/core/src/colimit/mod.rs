//! Inductive limits `Z_{m_1} -> Z_{m_2} -> ...` of cyclic groups along
//! injective multiplication maps.

mod pipeline;
mod witness;

pub use pipeline::{ok_pipeline, InducedStageMap, OkPipelineReport, TensoredStage};
pub use witness::{distinguish_colimits, guard_levels, MAX_STAGE_BITS, prime_power_witness, ColimitVerdict, PrimePowerWitness};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{CyclicElement, CyclicHom};
use crate::arith::{factorize, multiplicative_order, valuation, FactorBudget, Multiplicity};
use crate::error::{Error, Result};
use crate::odometer::GeometricRule;

/// Stage rule `m_i = k^{c r^{i-1}} - 1` describing every stage, not only the
/// stored prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRule {
    pub k: u64,
    pub rule: GeometricRule,
}

/// A finite prefix of an inductive sequence of cyclic groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicColimit {
    moduli: Vec<BigInt>,
    maps: Vec<CyclicHom>,
    unit_thread: Option<Vec<CyclicElement>>,
    rule: Option<StageRule>,
}

/// An element of the limit, represented at a given (0-based) stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimitElement {
    pub stage: usize,
    pub value: CyclicElement,
}

impl CyclicColimit {
    pub fn new(
        moduli: Vec<BigInt>,
        maps: Vec<CyclicHom>,
        unit_thread: Option<Vec<CyclicElement>>,
        rule: Option<StageRule>,
    ) -> Result<Self> {
        if moduli.is_empty() || maps.len() + 1 != moduli.len() {
            return Err(Error::InvalidInput(format!(
                "{} moduli need {} maps, got {}",
                moduli.len(),
                moduli.len().saturating_sub(1),
                maps.len()
            )));
        }
        for (i, map) in maps.iter().enumerate() {
            if map.source_modulus() != &moduli[i] || map.target_modulus() != &moduli[i + 1] {
                return Err(Error::InvalidInput(format!("map {i} does not match the moduli")));
            }
            if !map.is_injective() {
                return Err(Error::InvalidInput(format!("map {i} ({map}) is not injective")));
            }
        }
        if let Some(units) = &unit_thread {
            if units.len() != moduli.len() {
                return Err(Error::InvalidInput("unit thread length mismatch".into()));
            }
            for (i, map) in maps.iter().enumerate() {
                if map.apply(&units[i])? != units[i + 1] {
                    return Err(Error::InvalidInput(format!(
                        "unit thread is not compatible at stage {i}"
                    )));
                }
            }
        }
        Ok(CyclicColimit {
            moduli,
            maps,
            unit_thread,
            rule,
        })
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn maps(&self) -> &[CyclicHom] {
        &self.maps
    }

    pub fn unit_thread(&self) -> Option<&[CyclicElement]> {
        self.unit_thread.as_deref()
    }

    pub fn rule(&self) -> Option<StageRule> {
        self.rule
    }

    pub fn stages(&self) -> usize {
        self.moduli.len()
    }

    pub fn element(&self, stage: usize, residue: &BigInt) -> Result<ColimitElement> {
        let modulus = self
            .moduli
            .get(stage)
            .ok_or_else(|| Error::InvalidInput(format!("stage {stage} outside the prefix")))?;
        Ok(ColimitElement {
            stage,
            value: CyclicElement::new(modulus.clone(), residue)?,
        })
    }

    /// Image of `e` at the later stage `to`.
    pub fn push(&self, e: &ColimitElement, to: usize) -> Result<ColimitElement> {
        if to < e.stage || to >= self.stages() {
            return Err(Error::InvalidInput(format!(
                "cannot push stage {} to stage {to} in a {}-stage prefix",
                e.stage,
                self.stages()
            )));
        }
        let mut value = e.value.clone();
        for map in &self.maps[e.stage..to] {
            value = map.apply(&value)?;
        }
        Ok(ColimitElement { stage: to, value })
    }

    /// Equality in the limit: compare at the later of the two stages.
    pub fn same_element(&self, a: &ColimitElement, b: &ColimitElement) -> Result<bool> {
        let stage = a.stage.max(b.stage);
        Ok(self.push(a, stage)?.value == self.push(b, stage)?.value)
    }

    /// For each prime dividing a stored modulus, the largest multiplicity seen.
    ///
    /// With a stage rule the supremum over all stages is certified
    /// (`exact = true`); otherwise the prefix maximum is a lower bound.
    pub fn order_spectrum(&self, budget: &FactorBudget) -> Result<BTreeMap<BigInt, SpectrumEntry>> {
        let mut prefix: BTreeMap<BigInt, u32> = BTreeMap::new();
        for m in &self.moduli {
            for (p, e) in factorize(m, budget)? {
                let slot = prefix.entry(p).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
        prefix
            .into_iter()
            .map(|(p, prefix_max)| {
                let entry = match self.rule {
                    Some(rule) => SpectrumEntry {
                        multiplicity: stage_supremum(&rule, &p, budget)?,
                        exact: true,
                    },
                    None => SpectrumEntry {
                        multiplicity: Multiplicity::Finite(prefix_max),
                        exact: false,
                    },
                };
                Ok((p, entry))
            })
            .collect()
    }
}

/// Additive order of the element.
pub fn element_order(e: &ColimitElement) -> BigInt {
    e.value.order()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub multiplicity: Multiplicity,
    pub exact: bool,
}

/// `v_q(k^n - 1)` via modular powers, without forming `k^n`.
pub(crate) fn valuation_of_power_minus_one(k: u64, n: u64, q: &BigInt) -> u32 {
    let kb = BigInt::from(k);
    let nb = BigInt::from(n);
    let mut e = 0;
    let mut qe = q.clone();
    while kb.modpow(&nb, &qe).is_one() {
        e += 1;
        qe *= q;
    }
    e
}

/// `sup_i v_q(k^{n_i} - 1)` for `n_i = c r^{i-1}`.
///
/// With `t = ord_q(k)`, `q` divides `k^n - 1` iff `t | n`, and once that holds
/// lifting the exponent gives a value depending only on `v_q(n)` (and, for
/// `q = 2`, the parity of `n`). The valuations increase along the chain, so
/// the supremum is infinite when `q | r`, and otherwise is the value at the
/// first stage with `t | n_i`.
fn stage_supremum(rule: &StageRule, q: &BigInt, budget: &FactorBudget) -> Result<Multiplicity> {
    let k = BigInt::from(rule.k);
    if (&k % q).is_zero() {
        return Ok(Multiplicity::Finite(0));
    }
    let t = multiplicative_order(&k, q, budget)?;
    let r = BigInt::from(rule.rule.r);
    // Every prime exponent of t is below its bit length, so t | c r^{i-1} for
    // some i iff it holds for i - 1 = bits(t).
    let mut level = BigInt::from(rule.rule.c);
    let mut first = None;
    for i in 0..=t.bits() {
        if (&level % &t).is_zero() {
            first = Some(i);
            break;
        }
        level *= &r;
    }
    let Some(i) = first else {
        return Ok(Multiplicity::Finite(0));
    };
    if (&r % q).is_zero() {
        return Ok(Multiplicity::Infinite);
    }
    let n = rule
        .rule
        .level(i as usize + 1)?
        .to_u64()
        .expect("level fits u64");
    Ok(Multiplicity::Finite(valuation_of_power_minus_one(rule.k, n, q)))
}

/// Largest multiplicity of `q` among the stored moduli.
pub(crate) fn prefix_valuation(c: &CyclicColimit, q: &BigInt) -> Result<u32> {
    c.moduli
        .iter()
        .filter(|m| !m.is_one())
        .map(|m| valuation(m, q))
        .try_fold(0, |acc, v| v.map(|v| acc.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odometer::{connecting_map, k0_odometer, OdometerSpec};

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn chain(k: u64, levels: &str) -> CyclicColimit {
        k0_odometer(&OdometerSpec::parse_levels(k, levels).unwrap())
            .unwrap()
            .colimit
    }

    #[test]
    fn push_examples() {
        let c = chain(2, "2,4");
        let e = c.element(0, &b(1)).unwrap();
        assert_eq!(c.push(&e, 0).unwrap(), e);
        let pushed = c.push(&e, 1).unwrap();
        assert_eq!(pushed.value.residue(), &b(5));
        assert_eq!(element_order(&pushed), element_order(&e));
        assert!(c.push(&e, 2).is_err());
        assert!(c.same_element(&e, &pushed).unwrap());
    }

    #[test]
    fn order_examples() {
        let c = chain(2, "2,4");
        assert_eq!(element_order(&c.element(1, &b(0)).unwrap()), b(1));
        assert_eq!(element_order(&c.element(1, &b(5)).unwrap()), b(3));
        assert_eq!(element_order(&c.element(1, &b(1)).unwrap()), b(15));
    }

    #[test]
    fn rejects_non_injective_maps() {
        let m = CyclicHom::new(b(3), b(15), &b(0)).unwrap();
        assert!(CyclicColimit::new(vec![b(3), b(15)], vec![m], None, None).is_err());
        let good = connecting_map(2, 2, 4).unwrap();
        let bad_units = Some(vec![CyclicElement::one(b(3)).unwrap(), CyclicElement::one(b(15)).unwrap()]);
        assert!(CyclicColimit::new(vec![b(3), b(15)], vec![good], bad_units, None).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let budget = FactorBudget::default();
        let spec = chain(2, "2,4").order_spectrum(&budget).unwrap();
        assert_eq!(spec.len(), 2);
        assert_eq!(spec[&b(3)], SpectrumEntry { multiplicity: Multiplicity::Finite(1), exact: false });
        assert_eq!(spec[&b(5)], SpectrumEntry { multiplicity: Multiplicity::Finite(1), exact: false });
        assert!(chain(2, "1").order_spectrum(&budget).unwrap().is_empty());
    }

    #[test]
    fn rule_certifies_suprema() {
        let budget = FactorBudget::default();
        let rule = GeometricRule::new(1, 2).unwrap();
        let c = k0_odometer(&OdometerSpec::from_rule(2, rule, 4).unwrap()).unwrap().colimit;
        let spec = c.order_spectrum(&budget).unwrap();
        // 9 | 2^n - 1 needs 6 | n, never true for powers of 2.
        assert_eq!(spec[&b(3)], SpectrumEntry { multiplicity: Multiplicity::Finite(1), exact: true });
        // 2 | r = 2 but the primes here are odd; 17 | 2^8 - 1 from stage 4 on.
        assert_eq!(spec[&b(17)].multiplicity, Multiplicity::Finite(1));

        // k = 3, n_i = 2^{i-1}: v_2(3^n - 1) grows with v_2(n).
        let c3 = k0_odometer(&OdometerSpec::from_rule(3, rule, 3).unwrap()).unwrap().colimit;
        let spec3 = c3.order_spectrum(&budget).unwrap();
        assert_eq!(spec3[&b(2)], SpectrumEntry { multiplicity: Multiplicity::Infinite, exact: true });
        assert_eq!(prefix_valuation(&c3, &b(2)).unwrap(), 4);
    }

    #[test]
    fn valuation_of_powers() {
        assert_eq!(valuation_of_power_minus_one(2, 6, &b(3)), 2);
        assert_eq!(valuation_of_power_minus_one(3, 4, &b(2)), 4);
        assert_eq!(valuation_of_power_minus_one(2, 5, &b(3)), 0);
    }
}

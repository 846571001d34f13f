use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::abelian::{tensor_cyclic_with_localized, CyclicElement};
use crate::arith::{factorize, FactorBudget, SupernaturalNumber};
use crate::error::{Error, Result};
use crate::odometer::{k0_odometer, GeometricRule, KernelCertificate, OdometerSpec};

/// One stage `Z_{m_i} ⊗ K_0(M_s)` with `s` the primes not dividing `k - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensoredStage {
    pub level: u64,
    #[serde(with = "crate::serde_big")]
    pub modulus: BigInt,
    /// The part of `m_i` made of primes dividing `k - 1`.
    #[serde(with = "crate::serde_big")]
    pub tensored_order: BigInt,
    /// `m_i / (k - 1)` reduced modulo each prime `p | k - 1`.
    pub cofactor_residues: Vec<(u64, u64)>,
    /// Image of the unit class `m_i/(k-1) + m_i Z`.
    pub unit_image: CyclicElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedStageMap {
    pub from_level: u64,
    pub to_level: u64,
    #[serde(with = "crate::serde_big")]
    pub multiplier: BigInt,
    /// `multiplier mod (k - 1)`.
    #[serde(with = "crate::serde_big")]
    pub induced: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OkPipelineReport {
    pub k: u64,
    pub depth: usize,
    pub levels: Vec<u64>,
    pub constraint: String,
    pub stages: Vec<TensoredStage>,
    pub maps: Vec<InducedStageMap>,
    pub kernel_certificates: Vec<KernelCertificate>,
    /// `K_0 ≅ Z_{k0_order}`.
    pub k0_order: u64,
    pub unit_image: u64,
    pub k1_zero: bool,
    pub conclusion: String,
}

/// `K_*` of the odometer algebra with `n_i = k^{i-1}`, tensored with the UHF
/// algebra of all primes not dividing `k - 1`, checked stage by stage against
/// `K_0(O_k) = Z_{k-1}`.
pub fn ok_pipeline(k: u64, depth: usize) -> Result<OkPipelineReport> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    if depth < 2 {
        return Err(Error::Precondition(format!("depth {depth} must be at least 2")));
    }
    let rule = GeometricRule::new(1, k)?;
    let levels = rule.prefix(depth).map_err(|_| Error::Budget(format!("k^{} overflows", depth - 1)))?;
    let spec = OdometerSpec::from_rule(k, rule, depth)?;
    let k0 = k0_odometer(&spec)?;

    let km1 = BigInt::from(k - 1);
    let primes: Vec<u64> = factorize(&km1, &FactorBudget::default())?
        .into_keys()
        .map(|p| p.to_u64().expect("divides a u64"))
        .collect();
    let s = SupernaturalNumber::coprime_complement(km1.clone())?;

    let fail = |what: String| Err(Error::Verification(what));
    let mut stages = Vec::with_capacity(depth);
    let mut tensors = Vec::with_capacity(depth);
    for (stage, &level) in k0.stages.iter().zip(&levels) {
        let t = tensor_cyclic_with_localized(&stage.modulus, &s)?;
        if t.order() != &km1 {
            return fail(format!(
                "stage n = {level}: tensored order {} differs from k - 1 = {km1}",
                t.order()
            ));
        }
        let cofactor = &stage.modulus / &km1;
        let cofactor_residues: Vec<(u64, u64)> = primes
            .iter()
            .map(|&p| (p, (&cofactor % p).to_u64().expect("below p")))
            .collect();
        if let Some((p, r)) = cofactor_residues.iter().find(|(_, r)| *r != 1) {
            return fail(format!("stage n = {level}: m_i/(k-1) ≡ {r} mod {p}, expected 1"));
        }
        let unit_image = t.image_of_unit_tensor(&stage.unit_class)?;
        if !(unit_image.residue() - 1u32).is_multiple_of(&km1) {
            return fail(format!("stage n = {level}: unit lands on {unit_image}, expected 1"));
        }
        stages.push(TensoredStage {
            level,
            modulus: stage.modulus.clone(),
            tensored_order: t.order().clone(),
            cofactor_residues,
            unit_image,
        });
        tensors.push(t);
    }

    let mut maps = Vec::with_capacity(depth - 1);
    for (i, hom) in k0.colimit.maps().iter().enumerate() {
        let induced = tensors[i].induced(hom, &tensors[i + 1])?;
        let raw = hom.target_modulus() / hom.source_modulus();
        if !(induced.multiplier() - 1u32).is_multiple_of(&km1) {
            return fail(format!(
                "map n = {} -> {}: induced multiplier {} is not 1 mod {km1}",
                levels[i],
                levels[i + 1],
                induced.multiplier()
            ));
        }
        maps.push(InducedStageMap {
            from_level: levels[i],
            to_level: levels[i + 1],
            multiplier: raw,
            induced: induced.multiplier().clone(),
        });
    }

    if !k0.k1_vanishes() {
        return fail("a level has a nontrivial kernel of id - (1/k)T".into());
    }
    let conclusion = if k == 2 {
        "K_0 = 0, [1] = 0, K_1 = 0; matches K_0(O_2) = 0".to_string()
    } else {
        format!("K_0 ≅ Z_{}, [1] ↦ 1, K_1 = 0; matches K_0(O_{k}) ≅ Z_{}", k - 1, k - 1)
    };
    Ok(OkPipelineReport {
        k,
        depth,
        levels,
        constraint: s.to_string(),
        stages,
        maps,
        kernel_certificates: k0.kernel_certificates,
        k0_order: k - 1,
        unit_image: 1 % (k - 1),
        k1_zero: true,
        conclusion,
    })
}

impl OkPipelineReport {
    pub fn is_one(&self) -> bool {
        self.unit_image == 1 || (self.k0_order == 1 && self.unit_image == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn k2_collapses() {
        let r = ok_pipeline(2, 4).unwrap();
        assert_eq!(r.levels, vec![1, 2, 4, 8]);
        assert!(r.stages.iter().all(|s| s.tensored_order.is_one()));
        assert_eq!(r.k0_order, 1);
        assert!(r.conclusion.starts_with("K_0 = 0"));
        assert!(r.is_one());
    }

    #[test]
    fn k3_depth3() {
        let r = ok_pipeline(3, 3).unwrap();
        let moduli: Vec<_> = r.stages.iter().map(|s| s.modulus.clone()).collect();
        assert_eq!(moduli, vec![b(2), b(26), b(19682)]);
        assert!(r.stages.iter().all(|s| s.tensored_order == b(2)));
        assert_eq!(r.maps[0].multiplier, b(13));
        assert_eq!(r.maps[1].multiplier, b(757));
        assert!(r.maps.iter().all(|m| m.induced == b(1)));
        assert!(r.stages.iter().all(|s| s.unit_image.residue() == &b(1)));
    }

    #[test]
    fn k4_depth3() {
        let r = ok_pipeline(4, 3).unwrap();
        assert_eq!(r.stages[2].modulus, crate::arith::pow_minus_one(4, 16));
        assert!(r.stages.iter().all(|s| s.tensored_order == b(3)));
        assert_eq!(r.k0_order, 3);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(ok_pipeline(1, 3), Err(Error::Precondition(_))));
        assert!(matches!(ok_pipeline(3, 1), Err(Error::Precondition(_))));
        assert!(matches!(ok_pipeline(7, 9), Err(Error::Budget(_))));
    }
}

//! Cyclic groups, their homomorphisms, and the localized groups `K_0(M_s)`.
//!
//! Groups are carried by their invariants (a modulus, a supernatural number);
//! no element sets are materialized.

mod localized;
mod projection;

pub use localized::{
    quotient_localized_by_m, tensor_cyclic_with_localized, LocalizedQuotient, TensorQuotient,
};
pub use projection::{
    compare_projection_classes, refine_level, ClassOrdering, LocallyConstantProjectionClass,
};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `Z_m = Z/mZ`, residue kept in `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicElement {
    #[serde(with = "crate::serde_big")]
    modulus: BigInt,
    #[serde(with = "crate::serde_big")]
    residue: BigInt,
}

fn check_modulus(m: &BigInt) -> Result<()> {
    if m.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("modulus {m} must be positive")))
    }
}

impl CyclicElement {
    pub fn new(modulus: BigInt, residue: &BigInt) -> Result<Self> {
        check_modulus(&modulus)?;
        let residue = residue.mod_floor(&modulus);
        Ok(CyclicElement { modulus, residue })
    }

    pub fn zero(modulus: BigInt) -> Result<Self> {
        Self::new(modulus, &BigInt::zero())
    }

    /// `1 mod m`, which is 0 in the trivial group.
    pub fn one(modulus: BigInt) -> Result<Self> {
        Self::new(modulus, &BigInt::one())
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Additive order `m / gcd(residue, m)`.
    pub fn order(&self) -> BigInt {
        &self.modulus / self.residue.gcd(&self.modulus)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::InvalidInput(format!(
                "adding elements of Z_{} and Z_{}",
                self.modulus, other.modulus
            )));
        }
        Self::new(self.modulus.clone(), &(&self.residue + &other.residue))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.modulus.clone(), &-&self.residue).expect("modulus already checked")
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.modulus.clone(), &(&self.residue * c)).expect("modulus already checked")
    }
}

impl fmt::Display for CyclicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// The homomorphism `Z_m -> Z_m'`, `x ↦ multiplier · x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicHom {
    #[serde(with = "crate::serde_big")]
    source_modulus: BigInt,
    #[serde(with = "crate::serde_big")]
    target_modulus: BigInt,
    #[serde(with = "crate::serde_big")]
    multiplier: BigInt,
}

impl CyclicHom {
    /// Fails unless `source_modulus · multiplier ≡ 0 (mod target_modulus)`.
    pub fn new(source_modulus: BigInt, target_modulus: BigInt, multiplier: &BigInt) -> Result<Self> {
        check_modulus(&source_modulus)?;
        check_modulus(&target_modulus)?;
        let multiplier = multiplier.mod_floor(&target_modulus);
        if !(&source_modulus * &multiplier).is_multiple_of(&target_modulus) {
            return Err(Error::InvalidInput(format!(
                "x ↦ {multiplier}x is not well defined from Z_{source_modulus} to Z_{target_modulus}"
            )));
        }
        Ok(CyclicHom {
            source_modulus,
            target_modulus,
            multiplier,
        })
    }

    pub fn identity(modulus: BigInt) -> Result<Self> {
        Self::new(modulus.clone(), modulus, &BigInt::one())
    }

    pub fn source_modulus(&self) -> &BigInt {
        &self.source_modulus
    }

    pub fn target_modulus(&self) -> &BigInt {
        &self.target_modulus
    }

    pub fn multiplier(&self) -> &BigInt {
        &self.multiplier
    }

    pub fn apply(&self, x: &CyclicElement) -> Result<CyclicElement> {
        if x.modulus() != &self.source_modulus {
            return Err(Error::InvalidInput(format!(
                "element of Z_{} fed to a map from Z_{}",
                x.modulus(),
                self.source_modulus
            )));
        }
        CyclicElement::new(self.target_modulus.clone(), &(x.residue() * &self.multiplier))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CyclicHom) -> Result<CyclicHom> {
        if self.target_modulus != next.source_modulus {
            return Err(Error::InvalidInput(format!(
                "cannot compose Z_{} -> Z_{} with Z_{} -> Z_{}",
                self.source_modulus, self.target_modulus, next.source_modulus, next.target_modulus
            )));
        }
        CyclicHom::new(
            self.source_modulus.clone(),
            next.target_modulus.clone(),
            &(&self.multiplier * &next.multiplier),
        )
    }

    /// `|ker| = m · gcd(a, m') / m'`.
    pub fn kernel_size(&self) -> BigInt {
        &self.source_modulus * self.multiplier.gcd(&self.target_modulus) / &self.target_modulus
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_size().is_one()
    }
}

impl fmt::Display for CyclicHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Z_{} -> Z_{}, x ↦ {}x",
            self.source_modulus, self.target_modulus, self.multiplier
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn element_reduction_and_order() {
        let x = CyclicElement::new(b(15), &b(-10)).unwrap();
        assert_eq!(x.residue(), &b(5));
        assert_eq!(x.order(), b(3));
        assert_eq!(CyclicElement::zero(b(15)).unwrap().order(), b(1));
        assert_eq!(CyclicElement::one(b(1)).unwrap().residue(), &b(0));
        assert!(CyclicElement::new(b(0), &b(1)).is_err());
    }

    #[test]
    fn hom_well_definedness() {
        assert!(CyclicHom::new(b(3), b(15), &b(5)).is_ok());
        assert!(CyclicHom::new(b(3), b(15), &b(2)).is_err());
        let h = CyclicHom::new(b(3), b(15), &b(5)).unwrap();
        assert!(h.is_injective());
        let zero = CyclicHom::new(b(3), b(15), &b(0)).unwrap();
        assert_eq!(zero.kernel_size(), b(3));
        let g = CyclicHom::new(b(15), b(255), &b(17)).unwrap();
        let gh = h.then(&g).unwrap();
        assert_eq!(gh.multiplier(), &b(85));
        assert!(g.then(&h).is_err());
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::{CyclicElement, CyclicHom};
use crate::arith::{mod_inverse, ConstrainedRational, SupernaturalNumber};
use crate::error::{Error, Result};

/// The isomorphism `K_0(M_s) / m·K_0(M_s) -> Z_m`, `a/b ↦ a·b⁻¹`, for `m`
/// coprime to `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizedQuotient {
    constraint: SupernaturalNumber,
    modulus: BigInt,
}

pub fn quotient_localized_by_m(s: &SupernaturalNumber, m: &BigInt) -> Result<LocalizedQuotient> {
    if !m.is_positive() {
        return Err(Error::InvalidInput(format!("modulus {m} must be positive")));
    }
    if !s.is_coprime_to(m) {
        return Err(Error::Precondition(format!("{m} shares a prime with {s}")));
    }
    Ok(LocalizedQuotient {
        constraint: s.clone(),
        modulus: m.clone(),
    })
}

impl LocalizedQuotient {
    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn constraint(&self) -> &SupernaturalNumber {
        &self.constraint
    }

    pub fn reduce(&self, x: &ConstrainedRational) -> Result<CyclicElement> {
        if x.constraint() != &self.constraint {
            return Err(Error::InvalidInput(format!(
                "element of K_0(M_{}) reduced in K_0(M_{})",
                x.constraint(),
                self.constraint
            )));
        }
        let inv = mod_inverse(x.denom(), &self.modulus)?;
        CyclicElement::new(self.modulus.clone(), &(x.numer() * inv))
    }
}

/// `Z_m ⊗ K_0(M_s)` presented as `Z_{m̄}`, where `m̄` is the part of `m` built
/// from primes of finite multiplicity in `s`.
///
/// The identification sends `x ⊗ g` to `x · θ(scale · g)`, where `scale` is the
/// product of the finite prime powers of `s` and `θ(a/b) = a·b⁻¹ mod m̄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorQuotient {
    constraint: SupernaturalNumber,
    source_modulus: BigInt,
    order: BigInt,
    scale: BigInt,
    generator_image: CyclicElement,
}

pub fn tensor_cyclic_with_localized(m: &BigInt, s: &SupernaturalNumber) -> Result<TensorQuotient> {
    if !m.is_positive() {
        return Err(Error::InvalidInput(format!("modulus {m} must be positive")));
    }
    let order = s.non_divisible_part(m);
    let scale = s.finite_scale();
    let generator_image = CyclicElement::new(order.clone(), &scale)?;
    Ok(TensorQuotient {
        constraint: s.clone(),
        source_modulus: m.clone(),
        order,
        scale,
        generator_image,
    })
}

impl TensorQuotient {
    /// `m̄`.
    pub fn order(&self) -> &BigInt {
        &self.order
    }

    pub fn source_modulus(&self) -> &BigInt {
        &self.source_modulus
    }

    /// Image of `1 ⊗ [1]`.
    pub fn generator_image(&self) -> &CyclicElement {
        &self.generator_image
    }

    pub fn image(&self, x: &CyclicElement, g: &ConstrainedRational) -> Result<CyclicElement> {
        if x.modulus() != &self.source_modulus {
            return Err(Error::InvalidInput(format!(
                "element of Z_{} tensored in Z_{}",
                x.modulus(),
                self.source_modulus
            )));
        }
        if g.constraint() != &self.constraint {
            return Err(Error::InvalidInput("supernatural number mismatch".into()));
        }
        // scale·(a/b): the finite-prime part of b divides scale.
        let common = self.scale.gcd(g.denom());
        let scaled_numer = g.numer() * (&self.scale / &common);
        let inv = mod_inverse(&(g.denom() / &common), &self.order)?;
        CyclicElement::new(self.order.clone(), &(x.residue() * scaled_numer * inv))
    }

    /// `hom ⊗ id`, read through the identifications of `self` and `target`.
    pub fn induced(&self, hom: &CyclicHom, target: &TensorQuotient) -> Result<CyclicHom> {
        if hom.source_modulus() != &self.source_modulus
            || hom.target_modulus() != &target.source_modulus
            || self.constraint != target.constraint
        {
            return Err(Error::InvalidInput("induced map between unrelated tensors".into()));
        }
        CyclicHom::new(self.order.clone(), target.order.clone(), hom.multiplier())
    }

    /// The canonical surjection `Z_m -> Z_{m̄}` applied to `x ⊗ [1]`.
    pub fn image_of_unit_tensor(&self, x: &CyclicElement) -> Result<CyclicElement> {
        self.image(x, &ConstrainedRational::integer(BigInt::one(), self.constraint.clone()))
    }
}

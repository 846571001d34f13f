use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::linsolve::{rational_rank, SparseRow};
use super::{LocallyConstantFn, OdometerSpec};
use crate::abelian::{quotient_localized_by_m, CyclicElement, CyclicHom};
use crate::arith::{big_pow, pow_minus_one, ConstrainedRational, KPowerRational, SupernaturalNumber};
use crate::colimit::{guard_levels, CyclicColimit, StageRule};
use crate::error::{Error, Result};

/// `ψ(f) = Σ_j k^j f(j)`, reduced modulo `(k^n - 1) Z[1/k]` and read in
/// `Z_{k^n - 1}` by inverting the powers of `k`.
pub fn psi(f: &LocallyConstantFn) -> CyclicElement {
    let k = f.k();
    let n = f.level();
    let mut total = KPowerRational::zero(k);
    let mut weight = BigInt::one();
    for v in f.values() {
        total = &total + &v.scale(&weight);
        weight *= k;
    }
    let modulus = pow_minus_one(k, n as u64);
    let s = SupernaturalNumber::of_base(k);
    let value = ConstrainedRational::new(
        total.numer().clone(),
        big_pow(k, total.expo() as u64),
        s.clone(),
    )
    .expect("powers of k divide k^∞");
    quotient_localized_by_m(&s, &modulus)
        .and_then(|q| q.reduce(&value))
        .expect("k is coprime to k^n - 1")
}

/// `f ∈ Im(id - (1/k)T)` decided through `ψ`.
pub fn membership_psi(f: &LocallyConstantFn) -> bool {
    psi(f).is_zero()
}

/// Result of evaluating `g = Σ_i k^{-i} T^i f` in closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMembership {
    pub member: bool,
    /// `g(x)` for each `x ∈ Z_n`, as exact rationals.
    pub series_values: Vec<BigRational>,
    /// `g` itself when every value lies in `Z[1/k]`.
    pub witness: Option<LocallyConstantFn>,
}

fn in_z_inv_k(q: &BigRational, k: &BigInt) -> bool {
    let mut d = q.denom().clone();
    loop {
        let g = d.gcd(k);
        if g.is_one() {
            return d.is_one();
        }
        d /= g;
    }
}

/// Decides membership in `Im(id - (1/k)T)` through the Neumann series.
///
/// `j ↦ f(x - j)` is `n`-periodic, so the series sums to
/// `g(x) = k^n/(k^n - 1) · Σ_{j<n} k^{-j} f(x - j)`.
pub fn membership_series(f: &LocallyConstantFn) -> Result<SeriesMembership> {
    let k = f.k();
    let n = f.level();
    let kb = BigInt::from(k);
    let k_n = big_pow(k, n as u64);
    let factor = BigRational::new(k_n.clone(), &k_n - 1);
    let inv_k = BigRational::new(BigInt::one(), kb.clone());
    let series_values: Vec<BigRational> = (0..n)
        .map(|x| {
            let mut acc = BigRational::zero();
            let mut w = BigRational::one();
            for j in 0..n {
                acc += &w * f.value(x + n - j).to_rational();
                w *= &inv_k;
            }
            acc * &factor
        })
        .collect();
    let member = series_values.iter().all(|g| in_z_inv_k(g, &kb));
    let witness = if member {
        let values = series_values
            .iter()
            .map(|g| KPowerRational::from_ratio(g.numer(), g.denom(), k))
            .collect::<Result<Vec<_>>>()?;
        let g = LocallyConstantFn::new(k, values)?;
        if &g.id_minus_pv() != f {
            return Err(Error::Verification(
                "series witness g does not satisfy (id - T/k) g = f".into(),
            ));
        }
        Some(g)
    } else {
        None
    };
    Ok(SeriesMembership {
        member,
        series_values,
        witness,
    })
}

/// Outcome of the exact solve of `(id - (1/k)T) f = 0` at level `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCertificate {
    pub k: u64,
    pub n: u64,
    pub rank: u64,
    pub trivial: bool,
}

pub fn kernel_is_trivial(k: u64, n: u64) -> KernelCertificate {
    let n_us = n as usize;
    let minus_inv_k = -BigRational::new(BigInt::one(), BigInt::from(k));
    let rows = (0..n_us).map(|x| {
        let mut row = SparseRow::new();
        row.insert(x, BigRational::one());
        let prev = (x + n_us - 1) % n_us;
        let e = row.entry(prev).or_insert_with(BigRational::zero);
        *e += &minus_inv_k;
        row
    });
    let rank = rational_rank(rows) as u64;
    KernelCertificate {
        k,
        n,
        rank,
        trivial: rank == n,
    }
}

/// `K_0` of the level-`n` crossed product, `Z_{k^n - 1}`, generated by the
/// class of `δ_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteStageK0 {
    pub k: u64,
    pub n: u64,
    #[serde(with = "crate::serde_big")]
    pub modulus: BigInt,
    pub unit_class: CyclicElement,
    pub psi_generator: CyclicElement,
}

pub fn finite_stage_k0(k: u64, n: u64) -> Result<FiniteStageK0> {
    if k < 2 || n == 0 {
        return Err(Error::InvalidInput(format!("need k >= 2 and n >= 1, got k={k}, n={n}")));
    }
    let modulus = pow_minus_one(k, n);
    debug_assert!(modulus.gcd(&BigInt::from(k)).is_one());
    let unit = &modulus / BigInt::from(k - 1);
    Ok(FiniteStageK0 {
        k,
        n,
        unit_class: CyclicElement::new(modulus.clone(), &unit)?,
        psi_generator: CyclicElement::one(modulus.clone())?,
        modulus,
    })
}

/// `η: Z_{k^{n_i}-1} -> Z_{k^{n_j}-1}`, multiplication by
/// `(k^{n_j} - 1)/(k^{n_i} - 1)`.
pub fn connecting_map(k: u64, from_level: u64, to_level: u64) -> Result<CyclicHom> {
    if k < 2 || from_level == 0 || !to_level.is_multiple_of(from_level) {
        return Err(Error::Precondition(format!(
            "invalid stage pair {from_level} -> {to_level}"
        )));
    }
    let source = pow_minus_one(k, from_level);
    let target = pow_minus_one(k, to_level);
    let multiplier = &target / &source;
    CyclicHom::new(source, target, &multiplier)
}

/// `K_*` of the crossed product by the trace-scaled odometer, over the
/// certified prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdometerK0 {
    pub spec: OdometerSpec,
    pub stages: Vec<FiniteStageK0>,
    pub colimit: CyclicColimit,
    /// One per level; `K_1 = 0` needs all of them trivial.
    pub kernel_certificates: Vec<KernelCertificate>,
}

impl OdometerK0 {
    pub fn k1_vanishes(&self) -> bool {
        self.kernel_certificates.iter().all(|c| c.trivial)
    }
}

pub fn k0_odometer(spec: &OdometerSpec) -> Result<OdometerK0> {
    let k = spec.k();
    guard_levels(k, spec.levels())?;
    let stages = spec
        .levels()
        .iter()
        .map(|&n| finite_stage_k0(k, n))
        .collect::<Result<Vec<_>>>()?;
    let maps = spec
        .levels()
        .windows(2)
        .map(|w| connecting_map(k, w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    let colimit = CyclicColimit::new(
        stages.iter().map(|s| s.modulus.clone()).collect(),
        maps,
        Some(stages.iter().map(|s| s.unit_class.clone()).collect()),
        spec.rule().map(|rule| StageRule { k, rule }),
    )?;
    let kernel_certificates = spec.levels().iter().map(|&n| kernel_is_trivial(k, n)).collect();
    Ok(OdometerK0 {
        spec: spec.clone(),
        stages,
        colimit,
        kernel_certificates,
    })
}

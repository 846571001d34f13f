use serde::{Deserialize, Serialize};

use crate::arith::{ConstrainedRational, SupernaturalNumber};
use crate::error::{Error, Result};

/// The class of a locally constant projection `p: Z_n -> K M_s` in
/// `C(Z_n, K_0(M_s))_+`, recorded by its pointwise traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocallyConstantProjectionClass {
    constraint: SupernaturalNumber,
    traces: Vec<ConstrainedRational>,
}

impl LocallyConstantProjectionClass {
    pub fn new(traces: Vec<ConstrainedRational>) -> Result<Self> {
        let first = traces
            .first()
            .ok_or_else(|| Error::InvalidInput("level must be at least 1".into()))?;
        let constraint = first.constraint().clone();
        for t in &traces {
            if t.constraint() != &constraint {
                return Err(Error::InvalidInput("traces over different UHF algebras".into()));
            }
            if !t.is_nonnegative() {
                return Err(Error::InvalidInput(format!("negative trace {t}")));
            }
        }
        Ok(LocallyConstantProjectionClass { constraint, traces })
    }

    pub fn level(&self) -> usize {
        self.traces.len()
    }

    pub fn traces(&self) -> &[ConstrainedRational] {
        &self.traces
    }

    pub fn constraint(&self) -> &SupernaturalNumber {
        &self.constraint
    }
}

/// Outcome of the pointwise order comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassOrdering {
    Equal,
    /// `f ≤ g` and `f ≠ g`.
    Less,
    Greater,
    Incomparable,
}

pub fn compare_projection_classes(
    f: &LocallyConstantProjectionClass,
    g: &LocallyConstantProjectionClass,
) -> Result<ClassOrdering> {
    if f.level() != g.level() {
        return Err(Error::LevelMismatch(f.level(), g.level()));
    }
    if f.constraint != g.constraint {
        return Err(Error::InvalidInput("classes over different UHF algebras".into()));
    }
    let (mut some_less, mut some_greater) = (false, false);
    for (a, b) in f.traces.iter().zip(&g.traces) {
        match a.partial_cmp(b) {
            Some(std::cmp::Ordering::Less) => some_less = true,
            Some(std::cmp::Ordering::Greater) => some_greater = true,
            _ => {}
        }
    }
    Ok(match (some_less, some_greater) {
        (false, false) => ClassOrdering::Equal,
        (true, false) => ClassOrdering::Less,
        (false, true) => ClassOrdering::Greater,
        (true, true) => ClassOrdering::Incomparable,
    })
}

/// Pulls `f` back along `Z_{n'} -> Z_n`; entry `x` of the result is `f(x mod n)`.
pub fn refine_level(
    f: &LocallyConstantProjectionClass,
    new_level: usize,
) -> Result<LocallyConstantProjectionClass> {
    let n = f.level();
    if new_level == 0 || !new_level.is_multiple_of(n) {
        return Err(Error::Precondition(format!(
            "level {n} does not divide {new_level}"
        )));
    }
    Ok(LocallyConstantProjectionClass {
        constraint: f.constraint.clone(),
        traces: (0..new_level).map(|x| f.traces[x % n].clone()).collect(),
    })
}

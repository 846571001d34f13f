//! Level-`n` odometer dynamics and the K-theory of the trace-scaled crossed
//! products `C(Z_n, K M_{k^∞}) ⋊ Z`.
//!
//! Every statement about the Cantor odometer is certified at finite levels;
//! the inductive limit is assembled from the certified prefix.

mod correspondence;
mod function;
mod k0;
mod linsolve;

pub use correspondence::{verify_correspondence_identities, CorrespondenceReport};
pub use function::LocallyConstantFn;
pub use k0::{
    connecting_map, finite_stage_k0, k0_odometer, kernel_is_trivial, membership_psi,
    membership_series, psi, FiniteStageK0, KernelCertificate, OdometerK0, SeriesMembership,
};
pub use linsolve::rational_rank;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Level rule `n_i = c · r^(i-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometricRule {
    pub c: u64,
    pub r: u64,
}

impl GeometricRule {
    pub fn new(c: u64, r: u64) -> Result<Self> {
        if c == 0 || r < 2 {
            return Err(Error::InvalidInput(format!(
                "geometric rule needs c >= 1 and r >= 2, got c={c}, r={r}"
            )));
        }
        Ok(GeometricRule { c, r })
    }

    /// `n_i` for the 1-based stage index `i`.
    pub fn level(&self, i: usize) -> Result<u64> {
        let exp = u32::try_from(i.saturating_sub(1))
            .map_err(|_| Error::InvalidInput("stage index too large".into()))?;
        self.r
            .checked_pow(exp)
            .and_then(|p| p.checked_mul(self.c))
            .ok_or_else(|| Error::InvalidInput(format!("level {i} of {self} overflows u64")))
    }

    pub fn prefix(&self, len: usize) -> Result<Vec<u64>> {
        (1..=len).map(|i| self.level(i)).collect()
    }

    /// Parses `"c,r"`, optionally prefixed by `geometric:`.
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.trim().strip_prefix("geometric:").unwrap_or(text.trim());
        let bad = || Error::InvalidInput(format!("malformed geometric rule {text:?}"));
        let (c, r) = body.split_once(',').ok_or_else(bad)?;
        Self::new(
            c.trim().parse().map_err(|_| bad())?,
            r.trim().parse().map_err(|_| bad())?,
        )
    }
}

impl fmt::Display for GeometricRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "geometric:{},{}", self.c, self.r)
    }
}

/// An odometer `Z_{n_1} <- Z_{n_2} <- ...` given by a finite prefix of its
/// divisibility chain, together with the trace-scaling base `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdometerSpec {
    k: u64,
    levels: Vec<u64>,
    rule: Option<GeometricRule>,
}

impl OdometerSpec {
    pub fn new(k: u64, levels: Vec<u64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
        }
        if levels.is_empty() {
            return Err(Error::InvalidInput("empty level list".into()));
        }
        if levels[0] == 0 {
            return Err(Error::InvalidInput("levels must be positive".into()));
        }
        for w in levels.windows(2) {
            if w[1] <= w[0] || w[1] % w[0] != 0 {
                return Err(Error::Precondition(format!(
                    "levels must strictly increase along divisibility, but {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(OdometerSpec {
            k,
            levels,
            rule: None,
        })
    }

    pub fn from_rule(k: u64, rule: GeometricRule, len: usize) -> Result<Self> {
        let mut spec = Self::new(k, rule.prefix(len)?)?;
        spec.rule = Some(rule);
        Ok(spec)
    }

    /// Parses a comma-separated level list such as `"1,2,4"`.
    pub fn parse_levels(k: u64, text: &str) -> Result<Self> {
        let levels = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidInput(format!("malformed level {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, levels)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn rule(&self) -> Option<GeometricRule> {
        self.rule
    }
}

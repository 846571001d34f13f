//! Finite truncations of the path-space groupoid of the graph
//! `E^0 = Z_N`, `E^1 = Z_N × {1..k}`.
//!
//! An infinite path is a pair `(x, w)` with `x` in the odometer and `w` an
//! infinite word; the shift is `(x, w) ↦ (x + 1, tail w)`. At vertex level `N`
//! and depth `L` the computable proxies are cylinders `(x mod N, w[..L])`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odometer::OdometerSpec;

/// Enumerations larger than this are refused.
pub const MAX_ENUMERATION: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphLevel {
    pub k: u32,
    pub n: u64,
}

impl GraphLevel {
    pub fn new(k: u32, n: u64) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidInput(format!("graph needs k, N >= 1, got k={k}, N={n}")));
        }
        Ok(GraphLevel { k, n })
    }

    pub fn edge_count(&self) -> u64 {
        self.n * self.k as u64
    }

    /// `d(x, i) = x`.
    pub fn source(&self, edge: (u64, u32)) -> u64 {
        edge.0
    }

    /// `r(x, i) = x + 1`.
    pub fn range(&self, edge: (u64, u32)) -> u64 {
        (edge.0 + 1) % self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        (0..self.n).flat_map(move |x| (1..=self.k).map(move |i| (x, i)))
    }
}

/// Paths with base residue `base` mod `n` whose word starts with `word`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cylinder {
    pub n: u64,
    pub base: u64,
    pub word: Vec<u32>,
}

impl Cylinder {
    pub fn new(n: u64, base: u64, word: Vec<u32>, k: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("vertex level must be positive".into()));
        }
        if let Some(bad) = word.iter().find(|&&a| a == 0 || a > k) {
            return Err(Error::InvalidInput(format!("letter {bad} outside 1..={k}")));
        }
        Ok(Cylinder {
            n,
            base: base % n,
            word,
        })
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    /// Drop the last `by` letters.
    pub fn truncate(&self, by: usize) -> Cylinder {
        let keep = self.word.len().saturating_sub(by);
        Cylinder {
            n: self.n,
            base: self.base,
            word: self.word[..keep].to_vec(),
        }
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.word.iter().any(|&a| a > 9) { "," } else { "" };
        let word: Vec<String> = self.word.iter().map(|a| a.to_string()).collect();
        write!(f, "({} mod {}, \"{}\")", self.base, self.n, word.join(sep))
    }
}

pub fn shift(c: &Cylinder) -> Result<Cylinder> {
    if c.word.is_empty() {
        return Err(Error::ResolutionExhausted);
    }
    Ok(Cylinder {
        n: c.n,
        base: (c.base + 1) % c.n,
        word: c.word[1..].to_vec(),
    })
}

/// The arrows `(x, m - n, y)` with `σ^m(x) = σ^n(y)`, `x` in `source`, `y` in
/// `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArrowClass {
    pub source: Cylinder,
    pub target: Cylinder,
    pub m: usize,
    pub n: usize,
}

impl ArrowClass {
    pub fn displacement(&self) -> i64 {
        self.m as i64 - self.n as i64
    }

    /// Whether some `x` in `source` and `y` in `target` satisfy
    /// `σ^m(x) = σ^n(y)`: the bases must agree after shifting and the
    /// shifted words must agree where both are known.
    pub fn holds(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        if s.n != t.n {
            return false;
        }
        if (s.base + self.m as u64 % s.n) % s.n != (t.base + self.n as u64 % t.n) % t.n {
            return false;
        }
        let a = s.word.get(self.m..).unwrap_or(&[]);
        let b = t.word.get(self.n..).unwrap_or(&[]);
        a.iter().zip(b).all(|(x, y)| x == y)
    }

    pub fn is_minimal(&self) -> bool {
        self.m == 0 || self.n == 0
    }

    /// `(x, d, y)(y, d', z) = (x, d + d', z)`; requires matching cylinders.
    ///
    /// The letters of `x` and `z` are linked through those of `y`, which
    /// run out `n + next.m` letters in. When that is the binding constraint
    /// the composite is returned at the coarser depth it is known at.
    pub fn compose(&self, next: &ArrowClass) -> Result<ArrowClass> {
        if self.target != next.source {
            return Err(Error::InvalidInput(format!(
                "target {} does not match source {}",
                self.target, next.source
            )));
        }
        let (m, n) = (self.m + next.m, self.n + next.n);
        let lost = (self.n + next.m).saturating_sub(m.max(n));
        Ok(ArrowClass {
            source: self.source.truncate(lost),
            target: next.target.truncate(lost),
            m,
            n,
        })
    }

    pub fn inverse(&self) -> ArrowClass {
        ArrowClass {
            source: self.target.clone(),
            target: self.source.clone(),
            m: self.n,
            n: self.m,
        }
    }

    /// Same displacement with the common part of `m` and `n` cancelled.
    pub fn normalized(&self) -> ArrowClass {
        let c = self.m.min(self.n);
        ArrowClass {
            source: self.source.clone(),
            target: self.target.clone(),
            m: self.m - c,
            n: self.n - c,
        }
    }

    /// Drop the last `by` letters of both cylinders.
    pub fn truncate(&self, by: usize) -> ArrowClass {
        ArrowClass {
            source: self.source.truncate(by),
            target: self.target.truncate(by),
            m: self.m,
            n: self.n,
        }
    }
}

impl fmt::Display for ArrowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -[{:+}; m={}, n={}]-> {}",
            self.source,
            self.displacement(),
            self.m,
            self.n,
            self.target
        )
    }
}

fn words(k: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (k as u128).pow(len as u32);
    (0..total).map(move |mut idx| {
        let mut w = vec![1; len];
        for slot in w.iter_mut().rev() {
            *slot = (idx % k as u128) as u32 + 1;
            idx /= k as u128;
        }
        w
    })
}

/// All cylinders of the given depth, in lexicographic order.
pub fn cylinders(k: u32, n: u64, depth: usize) -> Result<Vec<Cylinder>> {
    let count = n as u128 * (k as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    if count > MAX_ENUMERATION {
        return Err(Error::Budget(format!("{count} cylinders at depth {depth}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    for base in 0..n {
        for word in words(k, depth) {
            out.push(Cylinder { n, base, word });
        }
    }
    Ok(out)
}

/// `N k^L Σ_{|d| <= D} k^{|d|}`.
pub fn arrow_count_closed_form(k: u32, n: u64, depth: usize, max_disp: usize) -> u128 {
    let k = k as u128;
    let per_source: u128 = (0..=max_disp as u32).map(|d| k.pow(d)).sum::<u128>() * 2 - 1;
    n as u128 * k.pow(depth as u32) * per_source
}

fn check_resolution(depth: usize, max_disp: usize) -> Result<()> {
    if max_disp > depth {
        return Err(Error::Precondition(format!(
            "displacement bound {max_disp} exceeds depth {depth}: insufficient resolution"
        )));
    }
    Ok(())
}

/// Every minimal arrow class between depth-`depth` cylinders with
/// `|displacement| <= max_disp`, sorted.
pub fn enumerate_arrows(k: u32, n: u64, depth: usize, max_disp: usize) -> Result<Vec<ArrowClass>> {
    GraphLevel::new(k, n)?;
    check_resolution(depth, max_disp)?;
    let total = arrow_count_closed_form(k, n, depth, max_disp);
    if total > MAX_ENUMERATION {
        return Err(Error::Budget(format!("{total} arrow classes")));
    }
    let mut out = Vec::with_capacity(total as usize);
    for source in cylinders(k, n, depth)? {
        for d in -(max_disp as i64)..=max_disp as i64 {
            let (m, nn) = (d.max(0) as usize, (-d).max(0) as usize);
            // σ^m(x) = σ^n(y): y's word is a free n-letter prefix followed by
            // x's word after m letters, then m free letters.
            let base = (source.base + (m as u64 % n) + n - (nn as u64 % n)) % n;
            let fixed = &source.word[m..depth - nn];
            for head in words(k, nn) {
                for tail in words(k, m) {
                    let mut word = head.clone();
                    word.extend_from_slice(fixed);
                    word.extend_from_slice(&tail);
                    out.push(ArrowClass {
                        source: source.clone(),
                        target: Cylinder { n, base, word },
                        m,
                        n: nn,
                    });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The first level of `spec` beyond `max_disp`, where `x + d ≠ x` has been
/// checked for all residues and all `0 < |d| <= max_disp`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoIsotropyCertificate {
    /// 1-based.
    pub stage: usize,
    pub level: u64,
    pub max_disp: u64,
    pub checked: u64,
}

pub fn certify_no_isotropy(spec: &OdometerSpec, max_disp: u64) -> Result<NoIsotropyCertificate> {
    let (idx, &level) = spec
        .levels()
        .iter()
        .enumerate()
        .find(|(_, &n)| n > max_disp)
        .ok_or_else(|| {
            Error::Precondition(format!("no level in the prefix exceeds {max_disp}"))
        })?;
    if level as u128 * 2 * max_disp as u128 > MAX_ENUMERATION {
        return Err(Error::Budget(format!("{level} residues times {max_disp} displacements")));
    }
    let mut checked = 0;
    for x in 0..level {
        for d in 1..=max_disp {
            for shifted in [(x + d) % level, (x + level - d % level) % level] {
                if shifted == x {
                    return Err(Error::Verification(format!(
                        "x = {x} is fixed by ±{d} at level {level}"
                    )));
                }
                checked += 1;
            }
        }
    }
    Ok(NoIsotropyCertificate {
        stage: idx + 1,
        level,
        max_disp,
        checked,
    })
}

/// An arrow of the product with the full relation on `{0..d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductArrow {
    pub arrow: ArrowClass,
    pub from: u64,
    pub to: u64,
}

impl ProductArrow {
    pub fn compose(&self, next: &ProductArrow) -> Result<ProductArrow> {
        if self.to != next.from {
            return Err(Error::InvalidInput(format!(
                "block index {} does not match {}",
                self.to, next.from
            )));
        }
        Ok(ProductArrow {
            arrow: self.arrow.compose(&next.arrow)?,
            from: self.from,
            to: next.to,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSummary {
    pub block: u64,
    pub count: u128,
    pub samples: Vec<ProductArrow>,
}

/// `arrows × (block × block)`, counted, with the first `sample_limit` arrows.
pub fn product_with_af(arrows: &[ArrowClass], block: u64, sample_limit: usize) -> Result<ProductSummary> {
    if block == 0 {
        return Err(Error::InvalidInput("block size must be positive".into()));
    }
    let count = arrows.len() as u128 * block as u128 * block as u128;
    let samples = arrows
        .iter()
        .flat_map(|g| {
            (0..block).flat_map(move |a| {
                (0..block).map(move |b| ProductArrow {
                    arrow: g.clone(),
                    from: a,
                    to: b,
                })
            })
        })
        .take(sample_limit)
        .collect();
    Ok(ProductSummary {
        block,
        count,
        samples,
    })
}

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A sparse row: column index -> nonzero coefficient.
pub type SparseRow = BTreeMap<usize, BigRational>;

/// Exact rank of a rational matrix given by sparse rows.
///
/// Each row is scaled to integers, then reduced fraction-free: eliminating a
/// leading coefficient `a` against a pivot with leading coefficient `p` uses
/// `(p/g)·row - (a/g)·pivot`, `g = gcd(a, p)`. No rational normalization
/// happens inside the loop.
pub fn rational_rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for row in rows {
        let denom = row
            .values()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let mut row: BTreeMap<usize, BigInt> = row
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.numer() * (&denom / v.denom())))
            .collect();
        while let Some((&lead, a)) = row.iter().next() {
            let Some(pivot) = pivots.get(&lead) else {
                pivots.insert(lead, row);
                break;
            };
            let p = &pivot[&lead];
            let g = a.gcd(p);
            let (scale_row, scale_pivot) = (p / &g, a / &g);
            if !scale_row.is_one() {
                for v in row.values_mut() {
                    *v *= &scale_row;
                }
            }
            for (&c, pv) in pivot {
                let entry = row.entry(c).or_insert_with(BigInt::zero);
                *entry -= &scale_pivot * pv;
                if entry.is_zero() {
                    row.remove(&c);
                }
            }
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries
            .iter()
            .map(|&(c, v)| (c, BigRational::from_integer(BigInt::from(v))))
            .collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rational_rank(vec![row(&[(0, 1), (1, 2)]), row(&[(0, 2), (1, 4)])]), 1);
        assert_eq!(rational_rank(vec![row(&[(0, 1), (1, 2)]), row(&[(0, 2), (1, 3)])]), 2);
        assert_eq!(rational_rank(vec![row(&[]), row(&[(2, 0)])]), 0);
        // id - T on Z_3 has the constants as kernel.
        let cyc = (0..3).map(|x| row(&[(x, 1), ((x + 2) % 3, -1)]));
        assert_eq!(rational_rank(cyc), 2);
    }
}

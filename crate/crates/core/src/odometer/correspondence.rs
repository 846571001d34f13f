//! The correspondence `C(E^1)` over `C(E^0)` for the graph `E^0 = Z_N`,
//! `E^1 = Z_N × {1..k}`, `d(x,i) = x`, `r(x,i) = x + 1`, checked on exact
//! rational samples.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Vertices = Vec<BigRational>;
type Edges = Vec<BigRational>;

struct Graph {
    k: usize,
    n: usize,
}

impl Graph {
    fn edge(&self, x: usize, label: usize) -> usize {
        x * self.k + label
    }

    fn source(&self, e: usize) -> usize {
        e / self.k
    }

    fn range(&self, e: usize) -> usize {
        (e / self.k + 1) % self.n
    }

    fn edge_count(&self) -> usize {
        self.n * self.k
    }

    /// `⟨ξ, η⟩(x) = Σ_{d(e) = x} ξ(e) η(e)`.
    fn inner(&self, xi: &Edges, eta: &Edges) -> Vertices {
        let mut out = vec![BigRational::zero(); self.n];
        for e in 0..self.edge_count() {
            out[self.source(e)] += &xi[e] * &eta[e];
        }
        out
    }

    /// `(ξ g)(e) = ξ(e) g(d(e))`.
    fn right(&self, xi: &Edges, g: &Vertices) -> Edges {
        (0..self.edge_count()).map(|e| &xi[e] * &g[self.source(e)]).collect()
    }

    /// `(f ξ)(e) = f(r(e)) ξ(e)`.
    fn left(&self, f: &Vertices, xi: &Edges) -> Edges {
        (0..self.edge_count()).map(|e| &f[self.range(e)] * &xi[e]).collect()
    }

    /// `θ_{ξ,η}(ζ) = ξ ⟨η, ζ⟩`.
    fn rank_one(&self, xi: &Edges, eta: &Edges, zeta: &Edges) -> Edges {
        self.right(xi, &self.inner(eta, zeta))
    }

    /// `e^i`, the constant 1 on the edges labelled `i`.
    fn label_basis(&self, label: usize) -> Edges {
        let mut out = vec![BigRational::zero(); self.edge_count()];
        for x in 0..self.n {
            out[self.edge(x, label)] = BigRational::one();
        }
        out
    }

    /// `f^i = (f ∘ α) e^i`.
    fn shifted_basis(&self, f: &Vertices, label: usize) -> Edges {
        let mut out = vec![BigRational::zero(); self.edge_count()];
        for x in 0..self.n {
            out[self.edge(x, label)] = f[(x + 1) % self.n].clone();
        }
        out
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=6);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
    (0..len).map(|_| random_rational(rng)).collect()
}

fn add_all(parts: impl Iterator<Item = Edges>, len: usize) -> Edges {
    parts.fold(vec![BigRational::zero(); len], |mut acc, p| {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
        acc
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub k: u64,
    pub n: u64,
    pub trials: u64,
    /// Identity instances evaluated, all of which held.
    pub checks: u64,
}

fn check(ok: bool, what: &str, checks: &mut u64) -> Result<()> {
    if !ok {
        return Err(Error::Verification(format!("correspondence identity failed: {what}")));
    }
    *checks += 1;
    Ok(())
}

/// Checks, exactly, the inner-product positivity, the right-module and
/// adjointness identities, and the decomposition `π_r(f) = Σ_i θ_{f^i, e^i}`
/// on `trials` seeded random samples, plus the basis-vector cases.
pub fn verify_correspondence_identities(
    k: u64,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<CorrespondenceReport> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput(format!("need k >= 1 and N >= 1, got k={k}, N={n}")));
    }
    let g = Graph {
        k: k as usize,
        n: n as usize,
    };
    let edges = g.edge_count();
    let mut checks = 0;

    for e in 0..edges {
        let mut basis = vec![BigRational::zero(); edges];
        basis[e] = BigRational::one();
        let ip = g.inner(&basis, &basis);
        let expected: Vertices = (0..g.n)
            .map(|x| if x == g.source(e) { BigRational::one() } else { BigRational::zero() })
            .collect();
        check(ip == expected, "basis vector norm is the indicator of d(e)", &mut checks)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ones = vec![BigRational::one(); g.n];
    for _ in 0..trials {
        let xi = random_vec(&mut rng, edges);
        let eta = random_vec(&mut rng, edges);
        let zeta = random_vec(&mut rng, edges);
        let f = random_vec(&mut rng, g.n);
        let h = random_vec(&mut rng, g.n);

        check(
            g.inner(&xi, &xi).iter().all(|v| !v.is_negative()),
            "<xi, xi> >= 0",
            &mut checks,
        )?;

        let lhs = g.inner(&xi, &g.right(&eta, &h));
        let rhs: Vertices = g.inner(&xi, &eta).iter().zip(&h).map(|(a, b)| a * b).collect();
        check(lhs == rhs, "<xi, eta h> = <xi, eta> h", &mut checks)?;

        check(
            g.inner(&g.left(&f, &xi), &eta) == g.inner(&xi, &g.left(&f, &eta)),
            "left action is self-adjoint for real f",
            &mut checks,
        )?;

        let fh: Vertices = f.iter().zip(&h).map(|(a, b)| a * b).collect();
        check(
            g.left(&fh, &zeta) == g.left(&f, &g.left(&h, &zeta)),
            "left action is multiplicative",
            &mut checks,
        )?;

        let decomposed = add_all(
            (0..g.k).map(|i| g.rank_one(&g.shifted_basis(&f, i), &g.label_basis(i), &zeta)),
            edges,
        );
        check(
            g.left(&f, &zeta) == decomposed,
            "pi_r(f) = sum_i theta(f^i, e^i)",
            &mut checks,
        )?;

        check(g.left(&ones, &zeta) == zeta, "pi_r(1) = id", &mut checks)?;
    }

    Ok(CorrespondenceReport {
        k,
        n,
        trials,
        checks,
    })
}

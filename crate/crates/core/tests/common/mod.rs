//! Brute-force reference implementations, written without the library's
//! number theory so that agreement means something.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use kcalc::groupoid::Cylinder;
use kcalc::odometer::LocallyConstantFn;

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `k^e` by repeated multiplication.
pub fn power(k: u64, e: u64) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..e {
        acc *= k;
    }
    acc
}

pub fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime_slow(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Smallest `j >= 1` with `k^j ≡ 1 (mod m)`, by iteration.
pub fn order_by_iteration(k: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    let (k, m) = (k as u128 % m as u128, m as u128);
    let mut x = k;
    for j in 1..=m as u64 {
        if x == 1 {
            return Some(j);
        }
        x = x * k % m;
    }
    None
}

/// `k^b mod m` by iteration.
pub fn pow_mod_slow(k: u64, b: u64, m: u64) -> u64 {
    let mut x = 1u128 % m as u128;
    for _ in 0..b {
        x = x * k as u128 % m as u128;
    }
    x as u64
}

/// `ψ(f) = Σ_j k^j f(j) mod k^n - 1`, using `k^{-e} ≡ k^{(-e) mod n}`.
pub fn psi_oracle(f: &LocallyConstantFn) -> BigInt {
    let k = f.k();
    let n = f.level() as u64;
    let m = power(k, n) - 1u32;
    if m.is_one() {
        return BigInt::zero();
    }
    let mut acc = BigInt::zero();
    for (j, v) in f.values().iter().enumerate() {
        let e = v.expo() as u64 % n;
        let shift = (j as u64 + n - e) % n;
        acc += v.numer() * power(k, shift);
    }
    acc.mod_floor(&m)
}

/// `(g - (1/k) g(· - 1))` as rationals.
pub fn apply_id_minus_pv(k: u64, g: &[BigRational]) -> Vec<BigRational> {
    let n = g.len();
    let inv = BigRational::new(BigInt::one(), BigInt::from(k));
    (0..n).map(|x| &g[x] - &inv * &g[(x + n - 1) % n]).collect()
}

pub fn values_as_rationals(f: &LocallyConstantFn) -> Vec<BigRational> {
    f.values().iter().map(|v| v.to_rational()).collect()
}

/// Whether some nonzero integer vector with entries in `[-bound, bound]`
/// solves `g(x) = g(x-1)/k`.
pub fn small_kernel_vector(k: u64, n: usize, bound: i64) -> bool {
    let width = (2 * bound + 1) as usize;
    let total = width.pow(n as u32);
    (1..total).any(|mut idx| {
        let g: Vec<BigRational> = (0..n)
            .map(|_| {
                let v = (idx % width) as i64 - bound;
                idx /= width;
                BigRational::from_integer(BigInt::from(v))
            })
            .collect();
        g.iter().any(|v| !v.is_zero()) && apply_id_minus_pv(k, &g).iter().all(Zero::is_zero)
    })
}

/// The truncated group `(1/D)Z` with `D = P^e`, `P` the product of `primes`.
pub struct TruncatedUhf {
    pub denom: BigInt,
}

impl TruncatedUhf {
    pub fn new(primes: &[u64], exponent: u32) -> Self {
        let p: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
        TruncatedUhf {
            denom: num_traits::pow(p, exponent as usize),
        }
    }

    /// `a/b` as an element `c/D`, if `b | D`.
    pub fn numerator_over_d(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        (&self.denom % b).is_zero().then(|| a * (&self.denom / b))
    }

    /// Class of `a/b` in `(1/D)Z / m(1/D)Z`, identified with `Z_m` by
    /// sending `1` to `1`: search for `t` with `t·D ≡ c (mod m)`.
    pub fn quotient_class(&self, a: &BigInt, b: &BigInt, m: u64) -> Option<u64> {
        let c = self.numerator_over_d(a, b)?;
        let mb = BigInt::from(m);
        let d = self.denom.mod_floor(&mb);
        let c = c.mod_floor(&mb);
        (0..m).find(|&t| (BigInt::from(t) * &d).mod_floor(&mb) == c)
    }

    /// Order of `Z_m ⊗ (1/D)Z` after passing to the limit: the size of the
    /// image of `Z_m` under multiplication by `D`.
    pub fn tensor_order(&self, m: u64) -> u64 {
        let mb = BigInt::from(m);
        let d = self.denom.mod_floor(&mb);
        let killed = (0..m).filter(|&x| (BigInt::from(x) * &d).mod_floor(&mb).is_zero()).count() as u64;
        m / killed
    }

    /// Image of `x ⊗ a/b` in `Z_order`: `x·a·(D/b)` read at stage `D`, then
    /// `t` with `t·D ≡ that (mod order)`.
    pub fn tensor_image(&self, x: u64, a: &BigInt, b: &BigInt, order: u64) -> Option<u64> {
        let c = self.numerator_over_d(a, b)? * x;
        let ob = BigInt::from(order);
        let d = self.denom.mod_floor(&ob);
        let c = c.mod_floor(&ob);
        (0..order).find(|&t| (BigInt::from(t) * &d).mod_floor(&ob) == c)
    }
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime_slow(p)).collect()
}

/// Whether `σ^m(source) ∩ σ^n(target)` is nonempty, by letter constraints.
pub fn arrow_exists(source: &Cylinder, target: &Cylinder, m: usize, n: usize) -> bool {
    let modulus = source.n;
    if (source.base + m as u64) % modulus != (target.base + n as u64) % modulus {
        return false;
    }
    let mut constraint: HashMap<usize, u32> = HashMap::new();
    for (i, &a) in source.word.iter().enumerate().skip(m) {
        constraint.insert(i - m, a);
    }
    target
        .word
        .iter()
        .enumerate()
        .skip(n)
        .all(|(i, &b)| constraint.get(&(i - n)).is_none_or(|&a| a == b))
}

/// All `(source, target, d)` with `|d| <= max_disp` connected by minimal
/// exponents, by scanning every pair of cylinders.
pub fn pair_scan(k: u32, n: u64, depth: usize, max_disp: usize) -> BTreeSet<(Cylinder, Cylinder, i64)> {
    let mut cyls = Vec::new();
    for base in 0..n {
        let mut word = vec![1u32; depth];
        loop {
            cyls.push(Cylinder::new(n, base, word.clone(), k).unwrap());
            // Odometer-style increment over {1..k}^depth.
            let mut i = depth;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if word[i] < k {
                    word[i] += 1;
                    break;
                }
                word[i] = 1;
            }
            if word.iter().all(|&a| a == 1) {
                break;
            }
        }
    }
    let mut out = BTreeSet::new();
    for s in &cyls {
        for t in &cyls {
            for d in -(max_disp as i64)..=max_disp as i64 {
                let (m, nn) = (d.max(0) as usize, (-d).max(0) as usize);
                if arrow_exists(s, t, m, nn) {
                    out.insert((s.clone(), t.clone(), d));
                }
            }
        }
    }
    out
}

pub fn to_u64(n: &BigInt) -> u64 {
    n.to_u64().expect("fits u64")
}

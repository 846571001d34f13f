//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;
use kcalc::abelian::{quotient_localized_by_m, tensor_cyclic_with_localized, CyclicElement};
use kcalc::arith::{ConstrainedRational, FactorBudget, KPowerRational, SupernaturalNumber};
use kcalc::colimit::{distinguish_colimits, prime_power_witness, ok_pipeline, ColimitVerdict};
use kcalc::groupoid::{
    arrow_count_closed_form, certify_no_isotropy, enumerate_arrows, product_with_af,
};
use kcalc::odometer::{
    kernel_is_trivial, membership_psi, membership_series, psi, verify_correspondence_identities,
    GeometricRule, LocallyConstantFn, OdometerSpec,
};
use kcalc::selftest::random_function;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn stages_and_maps() -> Outcome {
    let mut runs = 0;
    for k in 2..=6u64 {
        for r in [k, 2] {
            for len in 1..=5usize {
                let levels: Vec<u64> = (0..len as u32).map(|i| r.pow(i)).collect();
                let text: Vec<String> = levels.iter().map(u64::to_string).collect();
                let report = kcalc::cli::run_args([
                    "kcalc", "k0", "--k", &k.to_string(), "--levels", &text.join(","),
                ])
                .map_err(|e| e.to_string())?;
                let res = &report.results;
                for (i, &n) in levels.iter().enumerate() {
                    let m = power(k, n) - 1u32;
                    ensure!(res["moduli"][i] == Value::String(m.to_string()), "k={k} n={n}: modulus");
                    let unit = (&m / (k - 1)).mod_floor(&m);
                    ensure!(res["unit_thread"][i] == Value::String(unit.to_string()), "k={k} n={n}: unit");
                    if i + 1 < levels.len() {
                        let next = power(k, levels[i + 1]) - 1u32;
                        let (q, rem) = next.div_rem(&m);
                        ensure!(rem.is_zero(), "k={k}: {m} does not divide {next}");
                        ensure!(
                            res["maps"][i]["multiplier"] == Value::String(q.to_string()),
                            "k={k} {n} -> {}: multiplier",
                            levels[i + 1]
                        );
                    }
                }
                ensure!(res["k1_zero"] == Value::Bool(true), "k={k}: K_1 certificate");
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} level prefixes"))
}

fn o_k_pipeline() -> Outcome {
    for k in 2..=7u64 {
        let r = ok_pipeline(k, 4).map_err(|e| format!("k={k}: {e}"))?;
        let km1 = k - 1;
        let primes: Vec<u64> = trial_factor(km1).into_iter().map(|(p, _)| p).collect();
        for (i, stage) in r.stages.iter().enumerate() {
            let n = power(k, i as u64).try_into().map_err(|_| "level overflow".to_string())?;
            let m = power(k, n) - 1u32;
            ensure!(stage.modulus == m, "k={k} stage {i}: modulus");
            // Part of m made of primes dividing k - 1.
            let mut rest = m.clone();
            let mut part = BigInt::one();
            for &p in &primes {
                while (&rest % p).is_zero() {
                    rest /= p;
                    part *= p;
                }
            }
            ensure!(part == BigInt::from(km1), "k={k} stage {i}: coprime part {part}");
            ensure!(stage.tensored_order == part, "k={k} stage {i}: tensored order");
            let cofactor = &m / km1;
            ensure!(
                (&cofactor - 1u32).is_multiple_of(&BigInt::from(km1)) || km1 == 1,
                "k={k} stage {i}: cofactor"
            );
            ensure!(
                (stage.unit_image.residue() - 1u32).is_multiple_of(&BigInt::from(km1)),
                "k={k} stage {i}: unit image"
            );
        }
        for map in &r.maps {
            let raw = (power(k, map.to_level) - 1u32) / (power(k, map.from_level) - 1u32);
            ensure!(map.multiplier == raw, "k={k}: raw multiplier");
            ensure!((&raw - 1u32).is_multiple_of(&BigInt::from(km1)), "k={k}: multiplier not 1 mod k-1");
        }
        ensure!(r.k1_zero && r.k0_order == km1 && r.is_one(), "k={k}: verdict");
        if k == 2 {
            ensure!(r.conclusion.starts_with("K_0 = 0"), "k=2 verdict {}", r.conclusion);
        } else {
            ensure!(r.conclusion.contains(&format!("Z_{km1}")), "k={k} verdict {}", r.conclusion);
        }
    }
    Ok("k = 2..7, depth 4".into())
}

fn psi_well_defined() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    for k in 2..=6u64 {
        for n in 1..=12usize {
            for _ in 0..1000 {
                let f = random_function(&mut rng, k, n);
                let image = f.id_minus_pv();
                ensure!(psi(&image).is_zero(), "k={k} n={n}: psi(f - Tf/k) != 0 for {:?}", f.values());
                ensure!(psi_oracle(&image).is_zero(), "oracle disagrees at k={k} n={n}");
                cases += 1;
            }
            let f = random_function(&mut rng, k, n);
            ensure!(psi(&f).residue() == &psi_oracle(&f), "psi differs from the oracle at k={k} n={n}");
        }
    }
    Ok(format!("{cases} random functions"))
}

fn check_membership(f: &LocallyConstantFn) -> Result<bool, String> {
    let by_psi = membership_psi(f);
    let series = membership_series(f).map_err(|e| e.to_string())?;
    ensure!(by_psi == series.member, "criteria disagree on {:?}", f.values());
    if let Some(g) = &series.witness {
        let back = apply_id_minus_pv(f.k(), &values_as_rationals(g));
        ensure!(back == values_as_rationals(f), "witness does not reproduce {:?}", f.values());
    }
    ensure!(by_psi == series.witness.is_some(), "member without witness");
    Ok(by_psi)
}

fn membership_cross_oracle() -> Outcome {
    let mut grid = 0;
    let mut members = 0;
    for k in 2..=3u64 {
        let entries = [
            KPowerRational::zero(k),
            KPowerRational::from_integer(1, k),
            KPowerRational::from_integer(-1, k),
            KPowerRational::normalize(BigInt::one(), 1, k),
            KPowerRational::normalize(-BigInt::one(), 1, k),
        ];
        for n in 1..=4u32 {
            for mut idx in 0..5usize.pow(n) {
                let values = (0..n)
                    .map(|_| {
                        let v = entries[idx % 5].clone();
                        idx /= 5;
                        v
                    })
                    .collect();
                let f = LocallyConstantFn::new(k, values).unwrap();
                members += check_membership(&f)? as usize;
                grid += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..1000 {
        let k = rng.gen_range(2..=6);
        let n = rng.gen_range(5..=12);
        let f = if i % 2 == 0 {
            random_function(&mut rng, k, n).id_minus_pv()
        } else {
            random_function(&mut rng, k, n)
        };
        members += check_membership(&f)? as usize;
    }
    Ok(format!("{grid} grid + 1000 random, {members} members"))
}

fn nonzero_classes() -> Outcome {
    let mut cases = 0;
    for k in 2..=3u64 {
        for n in 1..=6usize {
            for mask in 1..(1u32 << n) - 1 {
                let set: BTreeSet<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
                let f = LocallyConstantFn::indicator(k, n, &set);
                ensure!(!membership_psi(&f), "k={k} Y={set:?} reported a member");
                ensure!(!membership_series(&f).map_err(|e| e.to_string())?.member, "series: k={k} Y={set:?}");
                let expected: BigInt = set.iter().map(|&j| power(k, j as u64)).sum();
                let m = power(k, n as u64) - 1u32;
                ensure!(expected > BigInt::zero() && expected < m, "k={k} Y={set:?}: sum out of range");
                ensure!(psi(&f).residue() == &expected, "k={k} Y={set:?}: psi");
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} proper subsets"))
}

fn trivial_kernels() -> Outcome {
    let mut cases = 0;
    for k in 2..=6u64 {
        for n in 1..=12u64 {
            let cert = kernel_is_trivial(k, n);
            ensure!(cert.trivial && cert.rank == n, "k={k} n={n}: rank {}", cert.rank);
            cases += 1;
        }
        for n in 1..=4usize {
            ensure!(!small_kernel_vector(k, n, 2), "k={k} n={n}: enumeration found a kernel vector");
        }
    }
    Ok(format!("{cases} levels, enumeration to n = 4"))
}

fn prime_power_witnesses() -> Outcome {
    let budget = FactorBudget::default();
    let powers: Vec<(u64, u32)> = vec![(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)];
    let mut produced = 0;
    for k in 2..=6u64 {
        for &(p, s) in &powers {
            let ps = p.pow(s);
            let w = prime_power_witness(k, p, s, &budget).map_err(|e| format!("k={k} {p}^{s}: {e}"))?;
            // Minimal witness by brute force over the factors of k^{p^s} - 1.
            let top = to_u64(&(power(k, ps) - 1u32));
            let lower = to_u64(&(power(k, ps / p) - 1u32));
            let expect = trial_factor(top).into_iter().find_map(|(q, _)| {
                let mut r = 1;
                while lower.is_multiple_of(q.pow(r)) {
                    r += 1;
                }
                top.is_multiple_of(q.pow(r)).then_some((q, r))
            });
            ensure!(expect == Some((w.q, w.r)), "k={k} {p}^{s}: got {}^{}, brute force {expect:?}", w.q, w.r);
            let qr = w.q.pow(w.r);
            ensure!(order_by_iteration(k, qr) == Some(ps), "k={k}: order of k mod {qr}");
            for b in 1..=200u64 {
                let divides = pow_mod_slow(k, b, qr) == 1 % qr;
                ensure!(divides == (b % ps == 0), "k={k} {qr}: biconditional fails at b={b}");
                ensure!(w.divides_power_minus_one(b) == divides, "k={k} {qr}: library check at b={b}");
            }
            produced += 1;
        }
    }
    Ok(format!("{produced} witnesses"))
}

fn non_isomorphism() -> Outcome {
    let budget = FactorBudget::default();
    let g = |c, r| GeometricRule::new(c, r).unwrap();
    match distinguish_colimits(2, g(1, 2), g(1, 3), &budget).map_err(|e| e.to_string())? {
        ColimitVerdict::Distinct { witness, .. } => {
            ensure!(witness.q == 3 && witness.r == 1, "witness {}^{}", witness.q, witness.r);
            ensure!(witness.order == 2 && order_by_iteration(2, 3) == Some(2), "certificate");
        }
        other => return Err(format!("expected distinct, got {other:?}")),
    }
    // Same prime content: every prime power dividing a level of one rule
    // divides a level of the other.
    for (a, b) in [(g(1, 2), g(1, 4)), (g(1, 2), g(2, 2)), (g(1, 6), g(6, 6)), (g(1, 3), g(3, 9))] {
        for (x, y) in [(a, b), (b, a)] {
            let v = distinguish_colimits(2, x, y, &budget).map_err(|e| e.to_string())?;
            ensure!(!v.is_distinct(), "{x} vs {y} should be inconclusive");
        }
    }
    for r in [g(1, 2), g(1, 3), g(2, 5)] {
        ensure!(!distinguish_colimits(2, r, r, &budget).map_err(|e| e.to_string())?.is_distinct(), "{r} vs itself");
    }
    Ok("distinct via 3, inconclusive on 11 same-content pairs".into())
}

fn uhf_oracles() -> Outcome {
    let constraints: Vec<(SupernaturalNumber, Vec<u64>)> = vec![
        (SupernaturalNumber::infinite_at(&[2]).unwrap(), vec![2]),
        (SupernaturalNumber::infinite_at(&[3]).unwrap(), vec![3]),
        (SupernaturalNumber::infinite_at(&[2, 5]).unwrap(), vec![2, 5]),
        (SupernaturalNumber::coprime_complement(2).unwrap(), primes_up_to(41).into_iter().filter(|p| p % 2 != 0).collect()),
        (SupernaturalNumber::coprime_complement(6).unwrap(), primes_up_to(41).into_iter().filter(|p| p % 2 != 0 && p % 3 != 0).collect()),
    ];
    let mut compared = 0;
    for (s, primes) in &constraints {
        let t5 = TruncatedUhf::new(primes, 5);
        let t6 = TruncatedUhf::new(primes, 6);
        // Denominators: products of two allowed primes, or one, or none.
        let mut denoms = vec![BigInt::one()];
        for (i, &p) in primes.iter().enumerate().take(4) {
            denoms.push(BigInt::from(p));
            for &q in &primes[i..primes.len().min(4)] {
                denoms.push(BigInt::from(p * q));
            }
        }
        for m in 1..=40u64 {
            let mb = BigInt::from(m);
            let coprime = primes.iter().all(|&p| m % p != 0);
            let quotient = quotient_localized_by_m(s, &mb);
            ensure!(quotient.is_ok() == coprime, "{s}, m={m}: quotient defined = {}", quotient.is_ok());
            if let Ok(q) = quotient {
                for b in &denoms {
                    for a in -5..=5i64 {
                        let x = ConstrainedRational::new(big(a), b.clone(), s.clone()).unwrap();
                        let got = to_u64(q.reduce(&x).map_err(|e| e.to_string())?.residue());
                        let o5 = t5.quotient_class(&big(a), b, m);
                        let o6 = t6.quotient_class(&big(a), b, m);
                        ensure!(o5 == o6, "{s}, m={m}: truncation not stable for {a}/{b}");
                        ensure!(o6 == Some(got), "{s}, m={m}: {a}/{b} ↦ {got}, oracle {o6:?}");
                        compared += 1;
                    }
                }
            }

            let t = tensor_cyclic_with_localized(&mb, s).map_err(|e| e.to_string())?;
            let (o5, o6) = (t5.tensor_order(m), t6.tensor_order(m));
            ensure!(o5 == o6, "{s}, m={m}: tensor order not stable");
            ensure!(t.order() == &BigInt::from(o6), "{s}, m={m}: order {} vs oracle {o6}", t.order());
            for x in 0..m.min(6) {
                let xe = CyclicElement::new(mb.clone(), &BigInt::from(x)).unwrap();
                for b in denoms.iter().take(5) {
                    for a in [-3i64, 1, 2] {
                        let g = ConstrainedRational::new(big(a), b.clone(), s.clone()).unwrap();
                        let got = to_u64(t.image(&xe, &g).map_err(|e| e.to_string())?.residue());
                        let o5 = t5.tensor_image(x, &big(a), b, o6);
                        let o6i = t6.tensor_image(x, &big(a), b, o6);
                        ensure!(o5 == o6i, "{s}, m={m}: tensor image not stable");
                        ensure!(o6i == Some(got), "{s}, m={m}: {x} ⊗ {a}/{b} ↦ {got}, oracle {o6i:?}");
                        compared += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{compared} comparisons"))
}

fn groupoid_truncations() -> Outcome {
    let mut configs = 0;
    for k in 1..=3u32 {
        for n in 1..=4u64 {
            for depth in 0..=4usize {
                for d in 0..=2usize.min(depth) {
                    let arrows = enumerate_arrows(k, n, depth, d).map_err(|e| e.to_string())?;
                    let got: BTreeSet<_> = arrows
                        .iter()
                        .map(|a| (a.source.clone(), a.target.clone(), a.displacement()))
                        .collect();
                    ensure!(got.len() == arrows.len(), "duplicates at k={k} N={n} L={depth} D={d}");
                    let oracle = pair_scan(k, n, depth, d);
                    ensure!(got == oracle, "k={k} N={n} L={depth} D={d}: {} vs oracle {}", got.len(), oracle.len());
                    ensure!(
                        arrows.len() as u128 == arrow_count_closed_form(k, n, depth, d),
                        "closed form at k={k} N={n} L={depth} D={d}"
                    );
                    for block in 1..=3u64 {
                        let p = product_with_af(&arrows, block, usize::MAX).map_err(|e| e.to_string())?;
                        ensure!(p.count == arrows.len() as u128 * (block * block) as u128, "product count");
                        ensure!(p.samples.len() as u128 == p.count, "product enumeration");
                    }
                    configs += 1;
                }
            }
        }
    }
    // Certified levels have no isotropy; uncertified small levels do.
    let spec = OdometerSpec::parse_levels(2, "1,2,4,8").unwrap();
    for d in 0..=4u64 {
        let cert = certify_no_isotropy(&spec, d).map_err(|e| e.to_string())?;
        ensure!(cert.level > d, "certificate level {} for D={d}", cert.level);
        for depth in d as usize..=(d as usize + 1) {
            let iso = enumerate_arrows(2, cert.level, depth, d as usize)
                .map_err(|e| e.to_string())?
                .into_iter()
                .filter(|a| a.source == a.target && a.displacement() != 0)
                .count();
            ensure!(iso == 0, "D={d}: {iso} isotropy arrows at level {}", cert.level);
        }
        for &lower in spec.levels().iter().filter(|&&n| n <= d && d > 0) {
            let iso = enumerate_arrows(2, lower, d as usize, d as usize)
                .map_err(|e| e.to_string())?
                .into_iter()
                .any(|a| a.source == a.target && a.displacement() != 0);
            ensure!(iso, "level {lower} <= D={d} should carry isotropy");
        }
    }
    Ok(format!("{configs} configurations"))
}

fn correspondence() -> Outcome {
    let mut checks = 0;
    for k in 1..=3u64 {
        for n in 1..=4u64 {
            let r = verify_correspondence_identities(k, n, 100, 11 * k + n).map_err(|e| format!("k={k} N={n}: {e}"))?;
            checks += r.checks;
        }
    }
    Ok(format!("{checks} identity instances"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 stage moduli, connecting maps and unit thread", stages_and_maps, Duration::from_secs(1)),
        ("2 tensor with the UHF algebra gives K_0(O_k)", o_k_pipeline, Duration::from_secs(5)),
        ("3 psi vanishes on the image of id - T/k", psi_well_defined, Duration::from_secs(10)),
        ("4 psi and series membership criteria agree", membership_cross_oracle, Duration::from_secs(60)),
        ("5 indicator functions are non-members", nonzero_classes, Duration::from_secs(5)),
        ("6 trivial kernel of id - T/k", trivial_kernels, Duration::from_secs(5)),
        ("7 prime power order witnesses", prime_power_witnesses, Duration::from_secs(30)),
        ("8 distinguishing geometric level rules", non_isomorphism, Duration::from_secs(1)),
        ("9 UHF quotient and tensor against coset oracles", uhf_oracles, Duration::from_secs(30)),
        ("10 groupoid truncations against pair scan", groupoid_truncations, Duration::from_secs(60)),
        ("11 correspondence identities", correspondence, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!(
            "{} criterion {name}: {detail} ({elapsed:.2?})",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

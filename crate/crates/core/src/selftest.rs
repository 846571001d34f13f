//! A quick seeded battery over all modules, for `kcalc selftest`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{pow_minus_one, FactorBudget, KPowerRational};
use crate::colimit::{distinguish_colimits, prime_power_witness, ok_pipeline};
use crate::error::Result;
use crate::groupoid::{arrow_count_closed_form, enumerate_arrows};
use crate::odometer::{
    k0_odometer, kernel_is_trivial, membership_psi, membership_series, psi, verify_correspondence_identities,
    GeometricRule, LocallyConstantFn, OdometerSpec,
};
use crate::report::{Report, Verdict};

/// A level-`n` function with numerators in `[-9, 9]` and denominators `k^e`,
/// `e <= 2`.
pub fn random_function(rng: &mut impl Rng, k: u64, n: usize) -> LocallyConstantFn {
    let values = (0..n)
        .map(|_| KPowerRational::normalize(BigInt::from(rng.gen_range(-9i64..=9)), rng.gen_range(0..=2), k))
        .collect();
    LocallyConstantFn::new(k, values).expect("n >= 1")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub cases: u64,
    pub passed: bool,
    pub detail: Option<String>,
}

fn check(name: &str, f: impl FnOnce() -> Result<(u64, Option<String>)>) -> Check {
    match f() {
        Ok((cases, None)) => Check {
            name: name.into(),
            cases,
            passed: true,
            detail: None,
        },
        Ok((cases, Some(detail))) => Check {
            name: name.into(),
            cases,
            passed: false,
            detail: Some(detail),
        },
        Err(e) => Check {
            name: name.into(),
            cases: 0,
            passed: false,
            detail: Some(e.to_string()),
        },
    }
}

pub fn checks(seed: u64) -> Vec<Check> {
    let budget = FactorBudget::default();
    let mut out = Vec::new();

    out.push(check("stage moduli and connecting maps", || {
        let mut cases = 0;
        for k in 2..=6u64 {
            let spec = OdometerSpec::parse_levels(k, "1,2,4")?;
            let k0 = k0_odometer(&spec)?;
            for (i, m) in k0.colimit.moduli().iter().enumerate() {
                cases += 1;
                if *m != pow_minus_one(k, spec.levels()[i]) {
                    return Ok((cases, Some(format!("k={k} stage {i}: {m}"))));
                }
            }
        }
        Ok((cases, None))
    }));

    out.push(check("O_k pipeline", || {
        for k in 2..=7 {
            ok_pipeline(k, 3)?;
        }
        Ok((6, None))
    }));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.push(check("psi vanishes on the image of id - T/k", || {
        let mut cases = 0;
        for k in 2..=4 {
            for n in 1..=6 {
                for _ in 0..50 {
                    let f = random_function(&mut rng, k, n);
                    cases += 1;
                    if !psi(&f.id_minus_pv()).is_zero() {
                        return Ok((cases, Some(format!("k={k} n={n}"))));
                    }
                }
            }
        }
        Ok((cases, None))
    }));

    out.push(check("psi and series criteria agree", || {
        let mut cases = 0;
        for k in 2..=4 {
            for n in 1..=5 {
                for _ in 0..30 {
                    let f = random_function(&mut rng, k, n);
                    cases += 1;
                    if membership_psi(&f) != membership_series(&f)?.member {
                        return Ok((cases, Some(format!("k={k} n={n}"))));
                    }
                }
            }
        }
        Ok((cases, None))
    }));

    out.push(check("trivial kernels", || {
        let mut cases = 0;
        for k in 2..=6 {
            for n in 1..=8 {
                cases += 1;
                if !kernel_is_trivial(k, n).trivial {
                    return Ok((cases, Some(format!("k={k} n={n}"))));
                }
            }
        }
        Ok((cases, None))
    }));

    out.push(check("prime power witnesses", || {
        let mut cases = 0;
        for k in 2..=6u64 {
            for (p, s) in [(2, 1), (2, 2), (2, 3), (3, 1), (5, 1), (7, 1)] {
                let w = prime_power_witness(k, p, s, &budget)?;
                for b in 1..=60 {
                    cases += 1;
                    if w.divides_power_minus_one(b) != (b % w.exponent() == 0) {
                        return Ok((cases, Some(format!("k={k} p^s={p}^{s} b={b}"))));
                    }
                }
            }
        }
        Ok((cases, None))
    }));

    out.push(check("distinguish geometric rules", || {
        let a = GeometricRule::new(1, 2)?;
        let b = GeometricRule::new(1, 3)?;
        let distinct = distinguish_colimits(2, a, b, &budget)?.is_distinct();
        let same = distinguish_colimits(2, a, a, &budget)?.is_distinct();
        Ok((2, (!distinct || same).then(|| "unexpected verdict".to_string())))
    }));

    out.push(check("arrow counts", || {
        let mut cases = 0;
        for k in 1..=3 {
            for n in 1..=3 {
                for d in 0..=2 {
                    cases += 1;
                    let got = enumerate_arrows(k, n, 3, d)?.len() as u128;
                    if got != arrow_count_closed_form(k, n, 3, d) {
                        return Ok((cases, Some(format!("k={k} N={n} D={d}"))));
                    }
                }
            }
        }
        Ok((cases, None))
    }));

    out.push(check("correspondence identities", || {
        let mut cases = 0;
        for k in 1..=3 {
            for n in 1..=4 {
                cases += verify_correspondence_identities(k, n, 10, seed)?.checks;
            }
        }
        Ok((cases, None))
    }));

    out
}

pub fn run(seed: u64, report: &mut Report) -> Result<()> {
    report.input("seed", seed);
    let checks = checks(seed);
    let all = checks.iter().all(|c| c.passed);
    report.result("checks", &checks).result("all_passed", all);
    report.verdict(Verdict::computed(
        if all { "all self-checks passed" } else { "some self-checks failed" },
        &["seeded internal consistency checks"],
    ));
    Ok(())
}

//! Self-audit: reruns the worked examples and sweeps the structural
//! identities over an exhaustive range, reporting per-check counts and the
//! smallest counterexample.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, is_prime, pow_mod, primes_below};
use crate::classify::{
    classify, is_fermat_psp, is_over_psp_char, is_over_psp_def, is_strong_psp, is_super_psp, Witness,
};
use crate::error::{Error, Result};
use crate::order::{coset_count, coset_partition, mult_order};
use crate::repunit::{divisor_difference_check, make_repunit, stepwise_factor};
use crate::wieferich::{over_psp_power, scan_wieferich, wieferich_order};

/// Largest `limit` accepted by the theorems suite.
pub const THEOREM_LIMIT_CEILING: u128 = 1_000_000;

/// Checks that enumerate coset partitions stop at this modulus.
pub const PARTITION_CHECK_CEILING: u128 = 10_000;

pub const CHECK_BASES: [u128; 5] = [2, 3, 5, 7, 11];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Examples,
    Theorems,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.ok() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {} passed, {} failed", self.name, self.passed, self.failed)?;
        if let Some(c) = &self.counterexample {
            write!(f, " (first counterexample: {c})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub limit: Option<u128>,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(CheckOutcome::ok)
    }
}

/// Runs `test` on every item in parallel. `test` returns `Some(description)`
/// on failure; the reported counterexample is the first failing item in
/// input order.
fn sweep<T, F>(name: &str, items: Vec<T>, test: F) -> Result<CheckOutcome>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<String>> + Sync,
{
    let results: Vec<Option<String>> = items.par_iter().map(&test).collect::<Result<_>>()?;
    let failed = results.iter().filter(|r| r.is_some()).count() as u64;
    Ok(CheckOutcome {
        name: name.to_string(),
        passed: results.len() as u64 - failed,
        failed,
        counterexample: results.into_iter().flatten().next(),
    })
}

fn single(name: &str, test: impl FnOnce() -> Result<Option<String>>) -> Result<CheckOutcome> {
    let failure = test()?;
    Ok(CheckOutcome {
        name: name.to_string(),
        passed: u64::from(failure.is_none()),
        failed: u64::from(failure.is_some()),
        counterexample: failure,
    })
}

fn expect<T: PartialEq + fmt::Debug>(what: &str, got: T, want: T) -> Option<String> {
    (got != want).then(|| format!("{what}: got {got:?}, expected {want:?}"))
}

fn first<I: IntoIterator<Item = Option<String>>>(it: I) -> Option<String> {
    it.into_iter().flatten().next()
}

pub fn run(suite: Suite, limit: Option<u128>) -> Result<VerifyReport> {
    let checks = match suite {
        Suite::Examples => examples()?,
        Suite::Theorems => {
            let limit = limit.ok_or_else(|| Error::InvalidInput("the theorems suite needs --limit".into()))?;
            theorems(limit)?
        }
    };
    Ok(VerifyReport { suite, limit, checks })
}

/// Worked examples with known exact answers.
pub fn examples() -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        single("cosets of 2 modulo 15", || {
            let p = coset_partition(2, 15)?;
            let want: Vec<Vec<u64>> = vec![vec![1, 2, 4, 8], vec![3, 6, 12, 9], vec![5, 10], vec![7, 14, 13, 11]];
            Ok(expect("cosets", p.cosets, want))
        })?,
        single("314821 is strong but not an overpseudoprime", || {
            let rep = classify(314_821, 2)?;
            let orders = [13u128, 61, 397].map(|q| mult_order(2, q)).into_iter().collect::<Result<Vec<_>>>()?;
            Ok(first([
                expect("h(13), h(61), h(397)", orders, vec![12, 60, 44]),
                expect("over_psp", rep.over_psp, Some(false)),
                expect("strong_psp", rep.strong_psp, Some(true)),
                (!rep.witnesses.iter().any(|w| matches!(w, Witness::OrderMismatch { .. })))
                    .then(|| "no order-mismatch witness".to_string()),
            ]))
        })?,
        single("13421773 = 53 * 157 * 1613 is an overpseudoprime", || {
            let rep = classify(13_421_773, 2)?;
            let orders = [53u128, 157, 1613].map(|q| mult_order(2, q)).into_iter().collect::<Result<Vec<_>>>()?;
            Ok(first([
                expect("orders", orders, vec![52, 52, 52]),
                expect("over_psp", rep.over_psp, Some(true)),
                expect("strong_psp", rep.strong_psp, Some(true)),
                expect("super_psp", rep.super_psp, Some(true)),
                expect("r", rep.r, 258_111),
            ]))
        })?,
        single("repunit 133 in base 11", || {
            let r = make_repunit(11, 3)?;
            Ok(first([
                expect("value", r.value, BigUint::from(133u32)),
                expect("h_11(7), h_11(19)", (mult_order(11, 7)?, mult_order(11, 19)?), (3, 3)),
                expect("over_psp(133, 11)", is_over_psp_def(133, 11)?, true),
            ]))
        })?,
        single("5 is a base-7 Wieferich prime", || {
            Ok(first([
                expect("order", wieferich_order(5, 7)?.order_w, 1),
                expect("over_psp(25, 7)", over_psp_power(5, 7, 1)?, true),
            ]))
        })?,
        single("2^29 - 1 = 233 * 1103 * 2089", || {
            let s = stepwise_factor(2, 29, 1 << 15)?;
            let f = factorize(536_870_911)?;
            Ok(first([
                expect("primes", s.primes_u128(), vec![233, 1103, 2089]),
                expect("complete", s.is_complete(), true),
                expect("divisor differences", divisor_difference_check(536_870_911, 2, &f)?, true),
            ]))
        })?,
        single("base-2 Wieferich primes below 4000", || {
            let found: Vec<u128> = scan_wieferich(2, 4000)?.iter().map(|r| r.p).collect();
            let composite = [1093u128, 3511]
                .into_iter()
                .map(|p| mult_order(2, p).map(|h| !is_prime(h)))
                .collect::<Result<Vec<_>>>()?;
            Ok(first([expect("primes", found, vec![1093, 3511]), expect("orders composite", composite, vec![true, true])]))
        })?,
    ])
}

fn odd_composite_pairs(limit: u128) -> Vec<(u128, u128)> {
    (9..limit)
        .step_by(2)
        .filter(|&n| !is_prime(n))
        .flat_map(|n| CHECK_BASES.into_iter().filter(move |&a| gcd(a, n) == 1).map(move |a| (n, a)))
        .collect()
}

/// Exhaustive sweeps below `limit`.
pub fn theorems(limit: u128) -> Result<Vec<CheckOutcome>> {
    if limit == 0 {
        return Err(Error::InvalidInput("limit must be at least 1".into()));
    }
    if limit > THEOREM_LIMIT_CEILING {
        return Err(Error::Capacity(format!(
            "limit {limit} exceeds the ceiling {THEOREM_LIMIT_CEILING}"
        )));
    }
    let pairs = odd_composite_pairs(limit);
    let small = limit.min(PARTITION_CHECK_CEILING);
    let mut out = Vec::new();

    out.push(sweep("definition agrees with order invariance", pairs.clone(), |&(n, a)| {
        let f = factorize(n)?;
        let def = is_over_psp_def(n, a)?;
        let char = is_over_psp_char(n, a, &f)?;
        Ok((def != char).then(|| format!("n={n} a={a}: definition {def}, invariance {char}")))
    })?);

    out.push(sweep("overpseudoprime => strong and super => Fermat", pairs, |&(n, a)| {
        let f = factorize(n)?;
        let over = is_over_psp_char(n, a, &f)?;
        let strong = is_strong_psp(n, a)?;
        let sup = is_super_psp(n, a, &f)?;
        let fermat = is_fermat_psp(n, a)?;
        Ok(((over && !(strong && sup)) || (sup && !fermat))
            .then(|| format!("n={n} a={a}: over={over} strong={strong} super={sup} fermat={fermat}")))
    })?);

    let coprime: Vec<(u128, u128)> = (3..=small)
        .flat_map(|n| CHECK_BASES.into_iter().filter(move |&a| gcd(a, n) == 1).map(move |a| (n, a)))
        .collect();
    out.push(sweep("lcm of coset sizes equals the order", coprime.clone(), |&(n, a)| {
        let p = coset_partition(a, n)?;
        let h = mult_order(a, n)?;
        Ok((p.lcm_of_sizes() != h).then(|| format!("n={n} a={a}: lcm {} vs h {h}", p.lcm_of_sizes())))
    })?);

    out.push(sweep("coset count formula equals enumeration", coprime, |&(n, a)| {
        let p = coset_partition(a, n)?;
        let r = coset_count(a, n, &factorize(n)?)?;
        Ok((p.count() as u128 != r).then(|| format!("n={n} a={a}: enumerated {} vs formula {r}", p.count())))
    })?);

    let primes: Vec<(u128, u128)> = primes_below(small as u64)
        .into_iter()
        .map(|p| p as u128)
        .filter(|&p| p > 2)
        .flat_map(|p| CHECK_BASES.into_iter().filter(move |&a| a % p != 0).map(move |a| (p, a)))
        .collect();
    out.push(sweep("primes satisfy p = r h + 1", primes, |&(p, a)| {
        let part = coset_partition(a, p)?;
        let rh = part.count() as u128 * mult_order(a, p)?;
        Ok((rh + 1 != p).then(|| format!("p={p} a={a}: r h + 1 = {}", rh + 1)))
    })?);

    out.push(sweep("sum of phi over divisors equals n", (2..=limit).collect(), |&n| {
        let f = factorize(n)?;
        let phi = |d: u128| if d == 1 { Ok(1) } else { factorize(d).map(|g| g.euler_phi()) };
        let s: u128 = f.divisors().into_iter().map(phi).sum::<Result<u128>>()?;
        Ok((s != n).then(|| format!("n={n}: sum {s}")))
    })?);

    let repunit_cases: Vec<(u128, u128, u128)> = [2u128, 3, 11]
        .into_iter()
        .flat_map(|a| {
            [3u128, 5, 7, 11, 13, 29].into_iter().flat_map(move |p| {
                (3..=limit)
                    .step_by(2)
                    .filter(move |&d| gcd(d, a * (a - 1)) == 1)
                    .map(move |d| (a, p, d))
            })
        })
        .collect();
    out.push(sweep("d divides the repunit iff h(d) = p", repunit_cases, |&(a, p, d)| {
        let value = make_repunit(a, p)?.value;
        let divides = (value % BigUint::from(d)).is_zero();
        let order_is_p = mult_order(a, d)? == p;
        Ok((divides != order_is_p).then(|| format!("a={a} p={p} d={d}: divides={divides} h==p {order_is_p}")))
    })?);

    let wief_primes: Vec<(u128, u128)> = primes_below(small as u64)
        .into_iter()
        .map(|p| p as u128)
        .filter(|&p| p > 2)
        .flat_map(|p| CHECK_BASES.into_iter().filter(move |&a| a % p != 0).map(move |a| (p, a)))
        .collect();
    out.push(sweep("p^2 is an overpseudoprime iff p is Wieferich", wief_primes, |&(p, a)| {
        let w = wieferich_order(p, a)?.is_wieferich();
        let def = is_over_psp_def(p * p, a)?;
        let fermat = pow_mod(a, p - 1, p * p)? == 1;
        Ok((w != def || w != fermat).then(|| format!("p={p} a={a}: wieferich={w} over_psp={def}")))
    })?);

    Ok(out)
}

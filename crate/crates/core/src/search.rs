//! Range enumeration of overpseudoprimes, order tables, and construction of
//! overpseudoprimes from primes sharing one order.

use std::io::{self, Write};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize_with, gcd, is_prime, FactorBudget, Factorization, Modulus};
use crate::classify::order_mismatches;
use crate::error::{Error, Result};
use crate::order::{mult_order, order_profile_factored};
use crate::wieferich::wieferich_order;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverPspHit {
    pub n: u128,
    pub h: u128,
    pub r: u128,
    pub factorization: Factorization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub base: u128,
    pub limit: u128,
    /// Every overpseudoprime below `limit`, ascending.
    pub hits: Vec<OverPspHit>,
    /// Fermat pseudoprimes the factorization budget could not split.
    pub unresolved: Vec<u128>,
}

/// Largest `limit` accepted by [`enumerate_over_psp`].
pub const ENUMERATION_LIMIT: u128 = 1 << 40;

pub fn enumerate_over_psp(a: u128, limit: u128) -> Result<SearchResult> {
    enumerate_over_psp_with(a, limit, FactorBudget::default())
}

/// Overpseudoprimes below `limit`: a Fermat test prunes the odd composites,
/// then the survivors are factored and tested for order invariance.
pub fn enumerate_over_psp_with(a: u128, limit: u128, budget: FactorBudget) -> Result<SearchResult> {
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if limit < 9 {
        return Err(Error::InvalidInput("limit must be at least 9".into()));
    }
    if limit > ENUMERATION_LIMIT {
        return Err(Error::Capacity(format!(
            "limit {limit} exceeds the enumeration ceiling {ENUMERATION_LIMIT}"
        )));
    }
    enum Outcome {
        Hit(OverPspHit),
        Unresolved(u128),
    }
    let count = ((limit - 9) / 2) as u64 + u64::from(limit % 2 == 0);
    let outcomes: Result<Vec<Option<Outcome>>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let n = 9 + 2 * k as u128;
            if gcd(a, n) != 1 || Modulus::new(n)?.pow(a, n - 1) != 1 || is_prime(n) {
                return Ok(None);
            }
            let f = match factorize_with(n, budget) {
                Ok(f) => f,
                Err(Error::IncompleteFactorization { .. }) => return Ok(Some(Outcome::Unresolved(n))),
                Err(e) => return Err(e),
            };
            if !order_mismatches(a, &f, budget)?.is_empty() {
                return Ok(None);
            }
            let profile = order_profile_factored(a, f, budget)?;
            Ok(Some(Outcome::Hit(OverPspHit {
                n,
                h: profile.h,
                r: profile.r,
                factorization: profile.factorization,
            })))
        })
        .collect();
    let mut hits = Vec::new();
    let mut unresolved = Vec::new();
    for o in outcomes?.into_iter().flatten() {
        match o {
            Outcome::Hit(h) => hits.push(h),
            Outcome::Unresolved(n) => unresolved.push(n),
        }
    }
    Ok(SearchResult {
        base: a,
        limit,
        hits,
        unresolved,
    })
}

/// One entry of [`order_table`]: `h_a(modulus)` for `modulus = 2 index - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderEntry {
    /// 1-based position.
    pub index: u64,
    pub modulus: u128,
    /// `None` when `gcd(a, modulus) > 1`.
    pub order: Option<u128>,
}

/// `h_a(2k + 1)` for `k = 0 .. count - 1`. The order modulo 1 is 1.
pub fn order_table(a: u128, count: u64) -> Result<Vec<OrderEntry>> {
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    (0..count)
        .into_par_iter()
        .map(|k| {
            let modulus = 2 * k as u128 + 1;
            let order = if modulus == 1 {
                Some(1)
            } else if gcd(a, modulus) != 1 {
                None
            } else {
                Some(mult_order(a, modulus)?)
            };
            Ok(OrderEntry {
                index: k + 1,
                modulus,
                order,
            })
        })
        .collect()
}

/// A line of an OEIS-style b-file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BFileLine {
    Term { index: u64, value: u128 },
    Comment(String),
}

impl std::fmt::Display for BFileLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BFileLine::Term { index, value } => write!(f, "{index} {value}"),
            BFileLine::Comment(text) => write!(f, "# {text}"),
        }
    }
}

/// Newline-terminated b-file lines, no trailing whitespace.
pub fn write_bfile<W: Write>(out: &mut W, lines: impl IntoIterator<Item = BFileLine>) -> io::Result<()> {
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// B-file lines for an order table; undefined entries become comments.
pub fn order_table_bfile(entries: &[OrderEntry]) -> Vec<BFileLine> {
    entries
        .iter()
        .map(|e| match e.order {
            Some(value) => BFileLine::Term {
                index: e.index,
                value,
            },
            None => BFileLine::Comment(format!("n={} skipped (gcd>1)", e.modulus)),
        })
        .collect()
}

/// B-file lines listing the hits of a search, indexed from 1.
pub fn search_bfile(result: &SearchResult) -> Vec<BFileLine> {
    result
        .hits
        .iter()
        .enumerate()
        .map(|(i, h)| BFileLine::Term {
            index: i as u64 + 1,
            value: h.n,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComposeOptions {
    /// Also raise Wieferich pool primes to every power `p^j` with
    /// `j <= w + 1`, which keeps the order unchanged.
    pub with_powers: bool,
    /// Refuse pools larger than this; the product count is exponential.
    pub max_pool: usize,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions {
            with_powers: false,
            max_pool: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedOverPsp {
    pub value: BigUint,
    pub factors: Vec<(u128, u32)>,
    /// The value fits in `u128`.
    pub native: bool,
    /// Native values: the identity `n = r h + 1` holds. Wider values: every
    /// prime-power order equals the target.
    pub verified: bool,
}

/// Odd primes `p <= bound` with `h_a(p) = h_target`, ascending.
pub fn order_pool(a: u128, bound: u128, h_target: u128) -> Result<Vec<u128>> {
    if h_target == 0 {
        return Err(Error::InvalidInput("h_target must be at least 1".into()));
    }
    // h_a(p) divides p - 1.
    let step = h_target;
    let count = u64::try_from(bound / step).map_err(|_| Error::Capacity("pool bound too large".into()))?;
    (1..=count)
        .into_par_iter()
        .map(|k| -> Result<Option<u128>> {
            let p = 1 + k as u128 * step;
            if p > bound || p == 2 || !is_prime(p) || a % p == 0 {
                return Ok(None);
            }
            Ok((mult_order(a, p)? == h_target).then_some(p))
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

pub fn compose_over_psp(a: u128, prime_pool_bound: u128, h_target: u128) -> Result<Vec<ComposedOverPsp>> {
    compose_over_psp_with(a, prime_pool_bound, h_target, ComposeOptions::default())
}

/// Products of two or more distinct primes of order `h_target`, each
/// verified as an overpseudoprime, sorted by value.
pub fn compose_over_psp_with(
    a: u128,
    prime_pool_bound: u128,
    h_target: u128,
    options: ComposeOptions,
) -> Result<Vec<ComposedOverPsp>> {
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    let pool = order_pool(a, prime_pool_bound, h_target)?;
    if pool.len() > options.max_pool {
        return Err(Error::Capacity(format!(
            "pool of {} primes exceeds the limit of {}",
            pool.len(),
            options.max_pool
        )));
    }
    let max_exp: Vec<u32> = pool
        .iter()
        .map(|&p| -> Result<u32> {
            Ok(if options.with_powers {
                wieferich_order(p, a)?.order_w + 1
            } else {
                1
            })
        })
        .collect::<Result<_>>()?;

    let budget = FactorBudget::default();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << pool.len()) {
        if mask.count_ones() < 2 {
            continue;
        }
        let members: Vec<usize> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).collect();
        // Every exponent vector with 1 <= e_i <= max_exp[i].
        let mut exps = vec![1u32; members.len()];
        loop {
            let factors: Vec<(u128, u32)> = members.iter().zip(&exps).map(|(&i, &e)| (pool[i], e)).collect();
            out.push(build_composed(a, h_target, factors, budget)?);
            let mut j = 0;
            while j < exps.len() {
                if exps[j] < max_exp[members[j]] {
                    exps[j] += 1;
                    break;
                }
                exps[j] = 1;
                j += 1;
            }
            if j == exps.len() {
                break;
            }
        }
    }
    out.sort_by(|x, y| x.value.cmp(&y.value));
    Ok(out)
}

fn build_composed(
    a: u128,
    h_target: u128,
    factors: Vec<(u128, u32)>,
    budget: FactorBudget,
) -> Result<ComposedOverPsp> {
    let value = factors
        .iter()
        .fold(BigUint::from(1u32), |acc, &(p, e)| acc * BigUint::from(p).pow(e));
    let (native, verified) = match value.to_u128() {
        Some(n) => {
            let f = Factorization::from_factors(n, factors.clone())?;
            (true, order_profile_factored(a, f, budget)?.satisfies_rh_identity())
        }
        None => {
            let mut ok = true;
            for &(p, e) in &factors {
                for j in 1..=e {
                    let pj = p.checked_pow(j).ok_or_else(|| Error::Capacity(format!("{p}^{j} overflows")))?;
                    ok &= mult_order(a, pj)? == h_target;
                }
            }
            (false, ok)
        }
    };
    Ok(ComposedOverPsp {
        value,
        factors,
        native,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;
    use crate::order::coset_partition;

    /// Definition applied to every odd composite, with `r` and `h` read
    /// off the enumerated coset partition.
    fn oracle(a: u128, limit: u128) -> Vec<u128> {
        (9..limit)
            .step_by(2)
            .filter(|&n| !is_prime(n) && gcd(a, n) == 1)
            .filter(|&n| {
                let part = coset_partition(a, n).unwrap();
                part.count() as u128 * part.lcm_of_sizes() + 1 == n
            })
            .collect()
    }

    fn ns(r: &SearchResult) -> Vec<u128> {
        r.hits.iter().map(|h| h.n).collect()
    }

    #[test]
    fn first_hits() {
        assert!(enumerate_over_psp(2, 2000).unwrap().hits.is_empty());
        let r = enumerate_over_psp(2, 3000).unwrap();
        assert_eq!(ns(&r), vec![2047]);
        assert_eq!((r.hits[0].h, r.hits[0].r), (11, 186));
        assert!(enumerate_over_psp(2, 8).is_err());
    }

    #[test]
    fn matches_oracle_to_1e4() {
        for a in [2u128, 3, 5, 7] {
            assert_eq!(ns(&enumerate_over_psp(a, 10_000).unwrap()), oracle(a, 10_000), "a={a}");
        }
    }

    #[test]
    fn limit_is_exclusive() {
        assert_eq!(ns(&enumerate_over_psp(2, 2047).unwrap()), Vec::<u128>::new());
        assert_eq!(ns(&enumerate_over_psp(2, 2048).unwrap()), vec![2047]);
        assert_eq!(ns(&enumerate_over_psp(7, 26).unwrap()), vec![25]);
    }

    #[test]
    fn tiny_budget_reports_unresolved() {
        // Every Fermat pseudoprime below 10^4 factors by trial division, so
        // even a zero rho budget leaves nothing unresolved.
        let r = enumerate_over_psp_with(2, 10_000, FactorBudget::new(0)).unwrap();
        assert!(r.unresolved.is_empty());
    }

    #[test]
    fn order_table_entries() {
        let t = order_table(2, 30).unwrap();
        assert_eq!(t[0], OrderEntry { index: 1, modulus: 1, order: Some(1) });
        assert_eq!(t[6].modulus, 13);
        assert_eq!(t[6].order, Some(12));
        assert_eq!(t[26].modulus, 53);
        assert_eq!(t[26].order, Some(52));
        let t3 = order_table(3, 5).unwrap();
        assert_eq!(t3[1].order, None);
    }

    #[test]
    fn bfile_format() {
        let t = order_table(3, 4).unwrap();
        let mut buf = Vec::new();
        write_bfile(&mut buf, order_table_bfile(&t)).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 1\n# n=3 skipped (gcd>1)\n3 4\n4 6\n");

        let r = enumerate_over_psp(2, 5000).unwrap();
        let mut buf = Vec::new();
        write_bfile(&mut buf, search_bfile(&r)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("1 2047\n"));
        assert!(text.lines().all(|l| !l.ends_with(' ')));
    }

    #[test]
    fn compose_example_two() {
        assert_eq!(order_pool(2, 2000, 52).unwrap(), vec![53, 157, 1613]);
        let c = compose_over_psp(2, 2000, 52).unwrap();
        let vals: Vec<u128> = c.iter().map(|x| x.value.to_u128().unwrap()).collect();
        assert_eq!(vals, vec![53 * 157, 53 * 1613, 157 * 1613, 13_421_773]);
        assert!(c.iter().all(|x| x.verified && x.native));
    }

    #[test]
    fn compose_small_cases() {
        let c = compose_over_psp(2, 100, 11).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].value, BigUint::from(2047u32));
        assert!(order_pool(2, 100, 6).unwrap().is_empty());
        assert!(compose_over_psp(2, 100, 6).unwrap().is_empty());
    }

    #[test]
    fn compose_with_wieferich_powers() {
        // h_2(1093) = 364; other primes of order 364 below 10^5 combine with
        // 1093 and 1093^2.
        let pool = order_pool(2, 100_000, 364).unwrap();
        assert!(pool.contains(&1093));
        let opts = ComposeOptions { with_powers: true, max_pool: 20 };
        let c = compose_over_psp_with(2, 100_000, 364, opts).unwrap();
        assert!(c.iter().all(|x| x.verified));
        assert!(c.iter().any(|x| x.factors.contains(&(1093, 2))));
    }

    #[test]
    fn compose_outputs_pass_definition() {
        for h in [3u128, 5, 11, 12, 20, 23, 28, 36] {
            for x in compose_over_psp(2, 20_000, h).unwrap() {
                if let Some(n) = x.value.to_u128() {
                    assert!(crate::classify::is_over_psp_def(n, 2).unwrap(), "{n}");
                }
            }
        }
    }

    #[test]
    fn outputs_for_different_orders_are_coprime() {
        let mut all: Vec<(u128, u128)> = Vec::new();
        for h in [11u128, 12, 20, 23, 28, 36, 52] {
            for x in compose_over_psp(2, 20_000, h).unwrap() {
                if let Some(n) = x.value.to_u128() {
                    all.push((n, h));
                }
            }
        }
        for (i, &(n1, h1)) in all.iter().enumerate() {
            for &(n2, h2) in &all[i + 1..] {
                if h1 != h2 {
                    assert_eq!(gcd(n1, n2), 1, "{n1} {n2}");
                }
            }
        }
    }

    #[test]
    fn hits_carry_factorizations() {
        let r = enumerate_over_psp(2, 100_000).unwrap();
        for h in &r.hits {
            assert_eq!(h.factorization, factorize(h.n).unwrap());
            assert_eq!(h.r * h.h + 1, h.n);
        }
    }
}

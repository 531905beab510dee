//! Multiplicative orders and cyclotomic cosets.
//!
//! The coset count `r_a(n)` is available two ways: by walking every orbit of
//! `x -> a x mod n` ([`coset_partition`]), which is bounded by memory, and by
//! the divisor sum [`coset_count`], which only needs the factorization of
//! `n`. A residue whose gcd with `n` is `n / d` lives in an orbit of length
//! `h_a(d)`, and there are `phi(d)` such residues, so
//! `r_a(n) = sum over d | n, d > 1 of phi(d) / h_a(d)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize_with, gcd, lcm, FactorBudget, Factorization, Modulus};
use crate::error::{Error, Result};

/// Default ceiling on the modulus accepted by [`coset_partition`].
pub const DEFAULT_PARTITION_BOUND: u128 = 1 << 24;

pub(crate) fn require_coprime(a: u128, n: u128) -> Result<()> {
    let g = gcd(a, n);
    if g != 1 {
        return Err(Error::NotCoprime {
            base: a,
            modulus: n,
            gcd: g,
        });
    }
    Ok(())
}

/// Factorization of the group exponent `lambda(n)` of `(Z/nZ)^*`.
///
/// Built from the factorizations of `p - 1` for each prime `p | n`, so
/// `lambda(n)` itself is never factored from scratch.
pub fn carmichael_lambda(f: &Factorization, budget: FactorBudget) -> Result<Factorization> {
    let mut exps: BTreeMap<u128, u32> = BTreeMap::new();
    let mut raise = |q: u128, e: u32| {
        let slot = exps.entry(q).or_insert(0);
        *slot = (*slot).max(e);
    };
    for &(p, e) in f.factors() {
        if p == 2 {
            match e {
                1 => {}
                2 => raise(2, 1),
                _ => raise(2, e - 2),
            }
            continue;
        }
        if e > 1 {
            raise(p, e - 1);
        }
        for &(q, k) in factorize_with(p - 1, budget)?.factors() {
            raise(q, k);
        }
    }
    let value = exps.iter().map(|(&q, &k)| q.pow(k)).product();
    Factorization::from_factors(value, exps.into_iter().collect())
}

/// `h_a(n)`: least `h >= 1` with `a^h = 1 (mod n)`.
pub fn mult_order(a: u128, n: u128) -> Result<u128> {
    mult_order_with(a, n, FactorBudget::default())
}

pub fn mult_order_with(a: u128, n: u128, budget: FactorBudget) -> Result<u128> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("modulus must be >= 2, got {n}")));
    }
    require_coprime(a, n)?;
    let f = factorize_with(n, budget)?;
    order_from_factorization(a, &f, budget)
}

/// Order of `a` modulo `f.n()`, by stripping prime factors from `lambda(n)`
/// (largest prime first) while `a^(h/q) = 1` still holds.
pub fn order_from_factorization(a: u128, f: &Factorization, budget: FactorBudget) -> Result<u128> {
    let n = f.n();
    if n < 2 {
        return Err(Error::InvalidInput(format!("modulus must be >= 2, got {n}")));
    }
    require_coprime(a, n)?;
    let m = Modulus::new(n)?;
    let lambda = carmichael_lambda(f, budget)?;
    let mut h = lambda.n();
    for &(q, k) in lambda.factors().iter().rev() {
        for _ in 0..k {
            if m.pow(a, h / q) == 1 {
                h /= q;
            } else {
                break;
            }
        }
    }
    Ok(h)
}

/// Orders of `a` modulo every prime-power divisor `p^j` of `f.n()`.
///
/// `h_a(p)` comes from [`order_from_factorization`]; each further power is
/// lifted with `h_a(p^j) in {h_a(p^(j-1)), p * h_a(p^(j-1))}`.
pub fn prime_power_orders(
    a: u128,
    f: &Factorization,
    budget: FactorBudget,
) -> Result<Vec<PrimePowerOrder>> {
    let mut out = Vec::new();
    for &(p, e) in f.factors() {
        require_coprime(a, p)?;
        let base_fact = Factorization::from_factors(p, vec![(p, 1)])?;
        let mut h = order_from_factorization(a, &base_fact, budget)?;
        let mut pj = p;
        out.push(PrimePowerOrder {
            prime: p,
            exponent: 1,
            value: p,
            order: h,
        });
        for j in 2..=e {
            pj *= p;
            if Modulus::new(pj)?.pow(a, h) != 1 {
                h *= p;
            }
            out.push(PrimePowerOrder {
                prime: p,
                exponent: j,
                value: pj,
                order: h,
            });
        }
    }
    Ok(out)
}

/// The orbit decomposition of `{1, ..., n-1}` under `x -> a x mod n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetPartition {
    pub base: u128,
    pub modulus: u128,
    /// Each coset starts at its least element and continues in orbit order;
    /// cosets are sorted by least element.
    pub cosets: Vec<Vec<u64>>,
}

impl CosetPartition {
    /// `r_a(n)`.
    pub fn count(&self) -> usize {
        self.cosets.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.cosets.iter().map(Vec::len).collect()
    }

    /// Least common multiple of the coset sizes.
    pub fn lcm_of_sizes(&self) -> u128 {
        self.cosets
            .iter()
            .fold(1u128, |acc, c| lcm(acc, c.len() as u128).expect("small"))
    }
}

impl std::fmt::Display for CosetPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for coset in &self.cosets {
            let items: Vec<String> = coset.iter().map(u64::to_string).collect();
            writeln!(f, "{{{}}}", items.join(", "))?;
        }
        Ok(())
    }
}

pub fn coset_partition(a: u128, n: u128) -> Result<CosetPartition> {
    coset_partition_bounded(a, n, DEFAULT_PARTITION_BOUND)
}

/// [`coset_partition`] with an explicit ceiling on `n`.
pub fn coset_partition_bounded(a: u128, n: u128, bound: u128) -> Result<CosetPartition> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("modulus must be >= 3, got {n}")));
    }
    require_coprime(a, n)?;
    if n > bound {
        return Err(Error::Capacity(format!(
            "modulus {n} exceeds the enumeration bound {bound}; use coset_count instead"
        )));
    }
    let n64 = n as u64;
    let a64 = (a % n) as u64;
    let mut seen = vec![false; n as usize];
    let mut cosets = Vec::new();
    for start in 1..n64 {
        if seen[start as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = start;
        loop {
            seen[x as usize] = true;
            orbit.push(x);
            x = ((x as u128 * a64 as u128) % n) as u64;
            if x == start {
                break;
            }
        }
        cosets.push(orbit);
    }
    Ok(CosetPartition {
        base: a,
        modulus: n,
        cosets,
    })
}

/// `r_a(n)` from the divisor sum over `f`, without enumeration.
pub fn coset_count(a: u128, n: u128, f: &Factorization) -> Result<u128> {
    coset_count_with(a, n, f, FactorBudget::default())
}

pub fn coset_count_with(a: u128, n: u128, f: &Factorization, budget: FactorBudget) -> Result<u128> {
    if f.n() != n {
        return Err(Error::InvalidInput(format!(
            "factorization is of {}, not {n}",
            f.n()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("modulus must be >= 2, got {n}")));
    }
    require_coprime(a, n)?;
    let table = prime_power_orders(a, f, budget)?;
    count_from_table(f, &table)
}

/// Sum `phi(d) / h_a(d)` over divisors `d > 1`, where `h_a(d)` is the lcm of
/// the prime-power orders and `phi(d)` is multiplicative.
fn count_from_table(f: &Factorization, table: &[PrimePowerOrder]) -> Result<u128> {
    // Per prime: choices j = 0..=l, each carrying (phi(p^j), h(p^j)).
    let choices: Vec<Vec<(u128, u128)>> = f
        .factors()
        .iter()
        .map(|&(p, e)| {
            let mut v = vec![(1u128, 1u128)];
            for ppo in table.iter().filter(|t| t.prime == p) {
                v.push((p.pow(ppo.exponent - 1) * (p - 1), ppo.order));
            }
            debug_assert_eq!(v.len(), e as usize + 1);
            v
        })
        .collect();

    fn walk(choices: &[Vec<(u128, u128)>], phi: u128, h: u128, total: &mut u128) -> Result<()> {
        match choices.split_first() {
            None => {
                if phi % h != 0 {
                    return Err(Error::InvalidInput(format!(
                        "order {h} does not divide phi {phi}"
                    )));
                }
                *total += phi / h;
                Ok(())
            }
            Some((head, tail)) => {
                for &(ph, hh) in head {
                    let h2 = lcm(h, hh).ok_or_else(|| Error::Capacity("order overflow".into()))?;
                    walk(tail, phi * ph, h2, total)?;
                }
                Ok(())
            }
        }
    }

    let mut total = 0u128;
    walk(&choices, 1, 1, &mut total)?;
    // The empty choice is d = 1, which contributes phi(1)/h(1) = 1.
    Ok(total - 1)
}

/// Every divisor `d > 1` of `f.n()` paired with `h_a(d)`, ascending in `d`.
///
/// Orders are assembled as lcms of the prime-power table, so no divisor is
/// refactored.
pub fn divisor_orders(a: u128, f: &Factorization, budget: FactorBudget) -> Result<Vec<(u128, u128)>> {
    let table = prime_power_orders(a, f, budget)?;
    let mut out = vec![(1u128, 1u128)];
    for &(p, _) in f.factors() {
        let len = out.len();
        for t in table.iter().filter(|t| t.prime == p) {
            for i in 0..len {
                let (d, h) = out[i];
                let l = lcm(h, t.order).ok_or_else(|| Error::Capacity("order overflow".into()))?;
                out.push((d * t.value, l));
            }
        }
    }
    out.remove(0);
    out.sort_unstable();
    Ok(out)
}

/// Order of `a` modulo one prime-power divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerOrder {
    pub prime: u128,
    pub exponent: u32,
    /// `prime^exponent`.
    pub value: u128,
    pub order: u128,
}

/// Order and coset structure of `a` modulo `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderProfile {
    pub base: u128,
    pub modulus: u128,
    /// `h_a(n)`.
    pub h: u128,
    /// `r_a(n)`.
    pub r: u128,
    pub prime_power_orders: Vec<PrimePowerOrder>,
    pub factorization: Factorization,
}

impl OrderProfile {
    /// `r h + 1 == n`, which holds exactly for primes and overpseudoprimes.
    pub fn satisfies_rh_identity(&self) -> bool {
        self.r
            .checked_mul(self.h)
            .and_then(|v| v.checked_add(1))
            .is_some_and(|v| v == self.modulus)
    }

    pub fn order_of_prime_power(&self, value: u128) -> Option<u128> {
        self.prime_power_orders
            .iter()
            .find(|p| p.value == value)
            .map(|p| p.order)
    }
}

pub fn order_profile(a: u128, n: u128) -> Result<OrderProfile> {
    order_profile_with(a, n, FactorBudget::default())
}

pub fn order_profile_with(a: u128, n: u128, budget: FactorBudget) -> Result<OrderProfile> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("modulus must be >= 3, got {n}")));
    }
    require_coprime(a, n)?;
    let f = factorize_with(n, budget)?;
    order_profile_factored(a, f, budget)
}

/// [`order_profile`] for an already factored modulus.
pub fn order_profile_factored(
    a: u128,
    f: Factorization,
    budget: FactorBudget,
) -> Result<OrderProfile> {
    let n = f.n();
    if n < 3 {
        return Err(Error::InvalidInput(format!("modulus must be >= 3, got {n}")));
    }
    require_coprime(a, n)?;
    let table = prime_power_orders(a, &f, budget)?;
    let h = order_from_factorization(a, &f, budget)?;
    let mut crt_h = 1u128;
    for &(p, e) in f.factors() {
        let top = table
            .iter()
            .find(|t| t.prime == p && t.exponent == e)
            .expect("table covers every maximal prime power");
        crt_h = lcm(crt_h, top.order).ok_or_else(|| Error::Capacity("order overflow".into()))?;
    }
    assert_eq!(h, crt_h, "order of {a} mod {n} disagrees with its prime-power decomposition");
    let r = count_from_table(&f, &table)?;
    Ok(OrderProfile {
        base: a,
        modulus: n,
        h,
        r,
        prime_power_orders: table,
        factorization: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, is_prime, pow_mod};

    fn naive_order(a: u128, n: u128) -> u128 {
        let a = a % n;
        let mut x = a;
        let mut h = 1;
        while x != 1 % n {
            x = x * a % n;
            h += 1;
        }
        h
    }

    #[test]
    fn named_orders() {
        assert_eq!(mult_order(2, 13).unwrap(), 12);
        assert_eq!(mult_order(2, 61).unwrap(), 60);
        assert_eq!(mult_order(2, 397).unwrap(), 44);
        assert_eq!(mult_order(2, 15).unwrap(), 4);
        assert_eq!(mult_order(2, 1093).unwrap(), 364);
        assert_eq!(mult_order(2, 3511).unwrap(), 1755);
        assert_eq!(mult_order(11, 7).unwrap(), 3);
        assert_eq!(mult_order(11, 19).unwrap(), 3);
        assert_eq!(mult_order(3, 2).unwrap(), 1);
    }

    #[test]
    fn non_coprime_rejected() {
        assert_eq!(
            mult_order(3, 15),
            Err(Error::NotCoprime {
                base: 3,
                modulus: 15,
                gcd: 3
            })
        );
        assert!(matches!(coset_partition(5, 25), Err(Error::NotCoprime { .. })));
        assert!(matches!(mult_order(2, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn agrees_with_linear_scan_to_5000() {
        for n in 2..=5000u128 {
            for a in [2u128, 3, 5, 7, 10, 11] {
                if gcd(a, n) == 1 {
                    assert_eq!(mult_order(a, n).unwrap(), naive_order(a, n), "a={a} n={n}");
                }
            }
        }
    }

    #[test]
    fn order_divides_lambda_and_is_minimal() {
        for n in 3..=3000u128 {
            let f = factorize(n).unwrap();
            let lambda = carmichael_lambda(&f, FactorBudget::default()).unwrap().n();
            for a in [2u128, 3, 5, 7] {
                if gcd(a, n) != 1 {
                    continue;
                }
                let h = mult_order(a, n).unwrap();
                assert_eq!(lambda % h, 0);
                assert_eq!(pow_mod(a, h, n).unwrap(), 1);
                for q in factorize(h.max(2)).unwrap().primes() {
                    if h % q == 0 {
                        assert_ne!(pow_mod(a, h / q, n).unwrap(), 1);
                    }
                }
                for d in f.divisors().into_iter().filter(|&d| d > 1) {
                    assert_eq!(h % mult_order(a, d).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn partition_of_15() {
        let p = coset_partition(2, 15).unwrap();
        assert_eq!(
            p.cosets,
            vec![vec![1, 2, 4, 8], vec![3, 6, 12, 9], vec![5, 10], vec![7, 14, 13, 11]]
        );
        assert_eq!(p.count(), 4);
        assert_eq!(p.lcm_of_sizes(), 4);
    }

    #[test]
    fn small_partitions() {
        assert_eq!(coset_partition(2, 3).unwrap().cosets, vec![vec![1, 2]]);
        assert_eq!(
            coset_partition(2, 7).unwrap().cosets,
            vec![vec![1, 2, 4], vec![3, 6, 5]]
        );
    }

    #[test]
    fn partition_capacity_error() {
        assert!(matches!(
            coset_partition_bounded(2, 1001, 1000),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(coset_partition(2, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn counts_by_formula() {
        assert_eq!(coset_count(2, 15, &factorize(15).unwrap()).unwrap(), 4);
        assert_eq!(coset_count(2, 13, &factorize(13).unwrap()).unwrap(), 1);
        assert_eq!(coset_count(2, 2047, &factorize(2047).unwrap()).unwrap(), 186);
        assert_eq!(coset_partition(2, 2047).unwrap().count(), 186);
        assert!(coset_count(2, 16, &factorize(15).unwrap()).is_err());
    }

    #[test]
    fn formula_matches_enumeration() {
        for n in (3..=4001u128).step_by(2) {
            let f = factorize(n).unwrap();
            for a in [2u128, 3, 5, 7, 10, 11] {
                if gcd(a, n) != 1 {
                    continue;
                }
                let part = coset_partition(a, n).unwrap();
                assert_eq!(coset_count(a, n, &f).unwrap(), part.count() as u128, "a={a} n={n}");
                assert_eq!(part.lcm_of_sizes(), mult_order(a, n).unwrap());
            }
        }
    }

    #[test]
    fn prime_cosets_equal_size() {
        for p in (3..2000u128).filter(|&p| is_prime(p)) {
            for a in [2u128, 3, 5] {
                if p == a || p % a == 0 {
                    continue;
                }
                let part = coset_partition(a, p).unwrap();
                let h = mult_order(a, p).unwrap();
                assert!(part.sizes().iter().all(|&s| s as u128 == h));
                assert_eq!(part.count() as u128 * h + 1, p);
            }
        }
    }

    #[test]
    fn profiles() {
        let p = order_profile(2, 15).unwrap();
        assert_eq!((p.h, p.r), (4, 4));

        let p = order_profile(2, 13_421_773).unwrap();
        assert_eq!((p.h, p.r), (52, 258_111));
        for v in [53, 157, 1613] {
            assert_eq!(p.order_of_prime_power(v), Some(52));
        }
        assert!(p.satisfies_rh_identity());

        let p = order_profile(11, 133).unwrap();
        assert_eq!((p.h, p.r), (3, 44));
        assert_eq!(p.order_of_prime_power(7), Some(3));
        assert_eq!(p.order_of_prime_power(19), Some(3));
    }

    #[test]
    fn prime_power_lifting_matches_direct() {
        for n in [9u128, 27, 81, 25, 125, 49, 343, 1093 * 1093, 11 * 11 * 13, 3 * 3 * 5 * 5 * 7] {
            let f = factorize(n).unwrap();
            for a in [2u128, 7, 10] {
                if gcd(a, n) != 1 {
                    continue;
                }
                for t in prime_power_orders(a, &f, FactorBudget::default()).unwrap() {
                    assert_eq!(t.order, mult_order(a, t.value).unwrap());
                }
            }
        }
    }

    #[test]
    fn divisor_orders_match_direct() {
        for n in [15u128, 45, 2047, 314_821, 1093 * 1093 * 3] {
            let f = factorize(n).unwrap();
            let got = divisor_orders(2, &f, FactorBudget::default()).unwrap();
            let want: Vec<(u128, u128)> = f
                .divisors()
                .into_iter()
                .filter(|&d| d > 1)
                .map(|d| (d, mult_order(2, d).unwrap()))
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn lambda_values() {
        let lam = |n| carmichael_lambda(&factorize(n).unwrap(), FactorBudget::default()).unwrap().n();
        assert_eq!(lam(8), 2);
        assert_eq!(lam(16), 4);
        assert_eq!(lam(15), 4);
        assert_eq!(lam(561), 80);
        assert_eq!(lam(1093 * 1093), 1092 * 1093);
    }
}

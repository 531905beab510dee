//! Generalized repunits `(a^p - 1) / (a - 1)` and order-driven searches for
//! their divisors.
//!
//! A prime `q` coprime to `a(a - 1)` divides the repunit exactly when the
//! order of `a` mod `q` is `p`. That forces `q = 1 (mod p)`, so divisor
//! searches only walk that progression.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, FactorBudget, Factorization, Modulus};
use crate::error::{Error, Result};
use crate::order::{mult_order, order_from_factorization};

/// Largest `p * log2(a)` accepted by [`make_repunit`].
pub const MAX_REPUNIT_BITS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repunit {
    pub base: u128,
    pub exponent: u128,
    pub value: BigUint,
    /// `gcd(value, base - 1) = 1`.
    pub coprime_to_base_minus_1: bool,
}

impl Repunit {
    /// The value, when it fits in `u128`.
    pub fn value_u128(&self) -> Option<u128> {
        self.value.to_u128()
    }
}

pub fn make_repunit(a: u128, p: u128) -> Result<Repunit> {
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let bits = (128 - a.leading_zeros()) as u128 * p;
    if bits > MAX_REPUNIT_BITS as u128 {
        return Err(Error::Capacity(format!(
            "repunit ({a}^{p} - 1)/({a} - 1) needs about {bits} bits; limit is {MAX_REPUNIT_BITS}"
        )));
    }
    let value = (BigUint::from(a).pow(p as u32) - 1u32) / BigUint::from(a - 1);
    let coprime = a == 2 || gcd_big(&value, a - 1) == 1;
    Ok(Repunit {
        base: a,
        exponent: p,
        value,
        coprime_to_base_minus_1: coprime,
    })
}

fn gcd_big(x: &BigUint, m: u128) -> u128 {
    let r = (x % BigUint::from(m)).to_u128().expect("reduced below m");
    gcd(m, r)
}

fn require_base_coprime(d: u128, a: u128) -> Result<()> {
    if gcd(d, a) != 1 || gcd(d, a - 1) != 1 {
        return Err(Error::Hypothesis(format!(
            "{d} must be coprime to a(a-1) = {a}*{}",
            a - 1
        )));
    }
    Ok(())
}

/// `h_a(d) = p`, which for `d` coprime to `a(a - 1)` is equivalent to `d`
/// dividing the base-`a` repunit of length `p`.
pub fn divisor_iff_order(d: u128, a: u128, p: u128) -> Result<bool> {
    if d < 2 {
        return Err(Error::InvalidInput("d must be greater than 1".into()));
    }
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    require_base_coprime(d, a)?;
    Ok(mult_order(a, d)? == p)
}

/// Candidate filter for progression scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgressionFilter {
    /// Keep only `q = +-1 (mod 8)`. Valid for base 2 and odd `p`: there
    /// `p | (q-1)/2`, so 2 is a quadratic residue mod `q`.
    pub plus_minus_one_mod_8: bool,
}

impl ProgressionFilter {
    /// Mod-8 filter on for base 2 with odd `p`, off otherwise.
    pub fn default_for(a: u128, p: u128) -> Self {
        ProgressionFilter {
            plus_minus_one_mod_8: a == 2 && p % 2 == 1,
        }
    }

    fn admits(self, q: u128) -> bool {
        !self.plus_minus_one_mod_8 || matches!(q % 8, 1 | 7)
    }
}

/// Odd candidates `q = 1 (mod p)`, ascending from the first one above 1.
struct Progression {
    step: u128,
}

impl Progression {
    fn new(p: u128) -> Self {
        // Odd q with q = 1 (mod p): step 2p for odd p, 2 for p = 2.
        Progression {
            step: if p == 2 { 2 } else { 2 * p },
        }
    }

    fn first(&self) -> u128 {
        1 + self.step
    }
}

/// `h_a(q) = p` for prime `p`, tested as `a^p = 1` and `a != 1 (mod q)`.
fn has_order(a: u128, p: u128, q: u128) -> bool {
    let m = Modulus::new(q).expect("q > 1");
    let ar = m.reduce(a);
    ar != 0 && ar != 1 && m.pow(ar, p) == 1
}

/// All primes `q <= bound` with `h_a(q) = p`.
pub fn find_divisors_by_order(a: u128, p: u128, bound: u128) -> Result<Vec<u128>> {
    find_divisors_by_order_with(a, p, bound, ProgressionFilter::default_for(a, p))
}

pub fn find_divisors_by_order_with(
    a: u128,
    p: u128,
    bound: u128,
    filter: ProgressionFilter,
) -> Result<Vec<u128>> {
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if bound < 2 {
        return Err(Error::InvalidInput("bound must be at least 2".into()));
    }
    if filter.plus_minus_one_mod_8 && (a != 2 || p == 2) {
        return Err(Error::InvalidInput(
            "the mod-8 filter is only valid for base 2 and odd p".into(),
        ));
    }
    let prog = Progression::new(p);
    let first = prog.first();
    if first > bound {
        return Ok(Vec::new());
    }
    let count = (bound - first) / prog.step + 1;
    let count = u64::try_from(count)
        .map_err(|_| Error::Capacity(format!("bound {bound} is too large to scan")))?;
    Ok((0..count)
        .into_par_iter()
        .filter_map(|k| {
            let q = first + k as u128 * prog.step;
            (filter.admits(q) && has_order(a, p, q) && is_prime(q)).then_some(q)
        })
        .collect())
}

/// Outcome of [`stepwise_factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepwiseStatus {
    /// Every prime factor is known. Any final cofactor is prime because the
    /// progression was exhausted below its square root.
    Complete,
    /// The scan reached `bound` while the cofactor still had room for a
    /// prime factor below its square root.
    Inconclusive { cofactor: BigUint },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepwiseFactorization {
    pub repunit: Repunit,
    /// Prime factors found so far with exponents, ascending. For a complete
    /// result this includes the certified residual prime.
    pub factors: Vec<(BigUint, u32)>,
    /// The cofactor certified prime by exhausting the scan below its square
    /// root, if any.
    pub residual: Option<BigUint>,
    /// Largest candidate examined.
    pub scanned_to: u128,
    pub status: StepwiseStatus,
}

impl StepwiseFactorization {
    pub fn is_complete(&self) -> bool {
        self.status == StepwiseStatus::Complete
    }

    /// The found primes that fit in `u128`, ignoring exponents.
    pub fn primes_u128(&self) -> Vec<u128> {
        self.factors.iter().filter_map(|(q, _)| q.to_u128()).collect()
    }

    /// A [`Factorization`] when complete and the repunit fits in `u128`.
    pub fn to_factorization(&self) -> Option<Factorization> {
        if !self.is_complete() {
            return None;
        }
        let n = self.repunit.value_u128()?;
        let factors = self
            .factors
            .iter()
            .map(|(q, e)| q.to_u128().map(|q| (q, *e)))
            .collect::<Option<Vec<_>>>()?;
        Factorization::from_factors(n, factors).ok()
    }
}

impl std::fmt::Display for StepwiseFactorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(q, e)| if *e == 1 { q.to_string() } else { format!("{q}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))?;
        if let StepwiseStatus::Inconclusive { cofactor } = &self.status {
            if !parts.is_empty() {
                write!(f, " * ")?;
            }
            write!(f, "[{cofactor} unresolved]")?;
        }
        Ok(())
    }
}

pub fn stepwise_factor(a: u128, p: u128, bound: u128) -> Result<StepwiseFactorization> {
    stepwise_factor_with(a, p, bound, ProgressionFilter::default_for(a, p))
}

/// Peel prime factors off the repunit in ascending order: find the least
/// prime `q` of order `p` not exceeding the square root of the current
/// cofactor, divide it out, and repeat. When no candidate is left below the
/// square root the cofactor is prime. `p` itself divides the repunit exactly
/// when `p | a - 1`; it has order 1 and is removed first.
pub fn stepwise_factor_with(
    a: u128,
    p: u128,
    bound: u128,
    filter: ProgressionFilter,
) -> Result<StepwiseFactorization> {
    if bound < 2 {
        return Err(Error::InvalidInput("bound must be at least 2".into()));
    }
    if filter.plus_minus_one_mod_8 && (a != 2 || p == 2) {
        return Err(Error::InvalidInput(
            "the mod-8 filter is only valid for base 2 and odd p".into(),
        ));
    }
    let repunit = make_repunit(a, p)?;
    let mut cofactor = repunit.value.clone();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();

    let divide_out = |c: &mut BigUint, q: u128| -> u32 {
        let qb = BigUint::from(q);
        let mut e = 0;
        while (&*c % &qb).is_zero() {
            *c /= &qb;
            e += 1;
        }
        e
    };

    if (a - 1) % p == 0 {
        let e = divide_out(&mut cofactor, p);
        if e > 0 {
            factors.push((BigUint::from(p), e));
        }
    }

    let root_limit = |c: &BigUint| c.sqrt().to_u128().unwrap_or(u128::MAX);
    let prog = Progression::new(p);
    let mut q = prog.first();
    let mut limit = root_limit(&cofactor);
    let mut scanned_to = 0;
    let status = loop {
        if q > limit {
            break StepwiseStatus::Complete;
        }
        if q > bound {
            break StepwiseStatus::Inconclusive {
                cofactor: cofactor.clone(),
            };
        }
        scanned_to = q;
        if filter.admits(q) && has_order(a, p, q) && is_prime(q) {
            let e = divide_out(&mut cofactor, q);
            if e > 0 {
                factors.push((BigUint::from(q), e));
                limit = root_limit(&cofactor);
            }
        }
        q += prog.step;
    };
    let mut residual = None;
    if status == StepwiseStatus::Complete && cofactor > BigUint::from(1u32) {
        residual = Some(cofactor.clone());
        factors.push((cofactor, 1));
    }
    Ok(StepwiseFactorization {
        repunit,
        factors,
        residual,
        scanned_to,
        status,
    })
}

/// One divisor pair with `upper - lower = quotient * modulus_order + remainder`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorDifference {
    pub lower: u128,
    pub upper: u128,
    pub quotient: u128,
    pub remainder: u128,
}

/// Every divisor pair `d1 < d2` of `n`, 1 and `n` included, with the
/// difference divided by `h_a(n)`.
///
/// Requires `n` prime or an overpseudoprime to base `a`; otherwise the
/// divisibility is not guaranteed and the input is rejected.
pub fn divisor_differences(n: u128, a: u128, f: &Factorization) -> Result<Vec<DivisorDifference>> {
    if f.n() != n {
        return Err(Error::InvalidInput(format!("factorization is of {}, not {n}", f.n())));
    }
    if n < 3 {
        return Err(Error::InvalidInput("n must be at least 3".into()));
    }
    if gcd(a, n) != 1 {
        return Err(Error::NotCoprime { base: a, modulus: n, gcd: gcd(a, n) });
    }
    let budget = FactorBudget::default();
    if !f.is_prime() {
        if n % 2 == 0 {
            return Err(Error::Hypothesis(format!("{n} is even")));
        }
        let mismatches = crate::classify::order_mismatches(a, f, budget)?;
        if !mismatches.is_empty() {
            return Err(Error::Hypothesis(format!(
                "{n} is not an overpseudoprime to base {a}; divisor differences need not be multiples of its order"
            )));
        }
    }
    let h = order_from_factorization(a, f, budget)?;
    let divisors = f.divisors();
    let mut out = Vec::with_capacity(divisors.len() * (divisors.len() - 1) / 2);
    for (i, &lower) in divisors.iter().enumerate() {
        for &upper in &divisors[i + 1..] {
            let diff = upper - lower;
            out.push(DivisorDifference {
                lower,
                upper,
                quotient: diff / h,
                remainder: diff % h,
            });
        }
    }
    Ok(out)
}

/// `h_a(n)` divides `d2 - d1` for every divisor pair of `n`.
pub fn divisor_difference_check(n: u128, a: u128, f: &Factorization) -> Result<bool> {
    Ok(divisor_differences(n, a, f)?.iter().all(|d| d.remainder == 0))
}

/// A prime in the progression `1 + r x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionPrime {
    pub x: u128,
    pub p: u128,
    /// `h_2(p)`.
    pub order: u128,
    pub qualifies: bool,
}

/// Primes `p = 1 + r x` for `1 <= x <= x_max`, each with its base-2 order
/// and whether that order equals `r`. `M_r` is prime exactly when a single
/// prime of the whole progression qualifies.
pub fn mersenne_progression_scan(r: u128, x_max: u128) -> Result<Vec<ProgressionPrime>> {
    if !is_prime(r) {
        return Err(Error::NotPrime(r));
    }
    let x_max = u64::try_from(x_max).map_err(|_| Error::Capacity("x_max too large".into()))?;
    let hits: Result<Vec<Option<ProgressionPrime>>> = (1..=x_max)
        .into_par_iter()
        .map(|x| {
            let x = x as u128;
            let p = r
                .checked_mul(x)
                .and_then(|v| v.checked_add(1))
                .ok_or_else(|| Error::Capacity("progression term overflows u128".into()))?;
            if p == 2 || !is_prime(p) {
                return Ok(None);
            }
            let order = mult_order(2, p)?;
            Ok(Some(ProgressionPrime {
                x,
                p,
                order,
                qualifies: order == r,
            }))
        })
        .collect();
    Ok(hits?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    #[test]
    fn repunit_values() {
        assert_eq!(make_repunit(2, 29).unwrap().value, BigUint::from(536_870_911u32));
        assert_eq!(
            make_repunit(2, 29).unwrap().value,
            BigUint::from(233u32 * 1103 * 2089)
        );
        let r = make_repunit(11, 3).unwrap();
        assert_eq!(r.value, BigUint::from(133u32));
        assert!(r.coprime_to_base_minus_1);
        assert_eq!(make_repunit(2, 2).unwrap().value, BigUint::from(3u32));
        assert_eq!(make_repunit(2, 9), Err(Error::NotPrime(9)));
        // (4^3 - 1)/3 = 21 shares the factor 3 with a - 1.
        assert!(!make_repunit(4, 3).unwrap().coprime_to_base_minus_1);
        assert!(matches!(make_repunit(2, 1_000_000_007), Err(Error::Capacity(_))));
    }

    #[test]
    fn order_membership() {
        assert!(divisor_iff_order(233, 2, 29).unwrap());
        assert!(divisor_iff_order(7, 11, 3).unwrap());
        assert!(!divisor_iff_order(23, 2, 29).unwrap());
        assert!(matches!(divisor_iff_order(5, 11, 3), Err(Error::Hypothesis(_))));
        assert!(matches!(divisor_iff_order(22, 11, 3), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn order_driven_divisor_search() {
        assert_eq!(find_divisors_by_order(2, 29, 23171).unwrap(), vec![233, 1103, 2089]);
        assert_eq!(find_divisors_by_order(2, 11, 100).unwrap(), vec![23, 89]);
        assert_eq!(find_divisors_by_order(11, 3, 20).unwrap(), vec![7, 19]);
        assert!(find_divisors_by_order(2, 13, 90).unwrap().is_empty());
    }

    #[test]
    fn mod8_filter_does_not_change_results() {
        for p in [3u128, 5, 7, 11, 13, 23, 29] {
            let with = find_divisors_by_order_with(2, p, 200_000, ProgressionFilter { plus_minus_one_mod_8: true }).unwrap();
            let without = find_divisors_by_order_with(2, p, 200_000, ProgressionFilter { plus_minus_one_mod_8: false }).unwrap();
            assert_eq!(with, without, "p={p}");
        }
        assert!(find_divisors_by_order_with(3, 5, 100, ProgressionFilter { plus_minus_one_mod_8: true }).is_err());
    }

    #[test]
    fn search_matches_trial_division_of_repunit() {
        for a in [2u128, 3, 5, 6, 10, 11] {
            for p in [2u128, 3, 5, 7, 11, 13] {
                let m = make_repunit(a, p).unwrap().value;
                let bound = 20_000u128;
                let brute: Vec<u128> = (3..=bound)
                    .filter(|&q| is_prime(q) && gcd(q, a * (a - 1)) == 1)
                    .filter(|&q| (&m % BigUint::from(q)).is_zero())
                    .collect();
                assert_eq!(find_divisors_by_order(a, p, bound).unwrap(), brute, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn stepwise_examples() {
        let s = stepwise_factor(2, 29, 1 << 15).unwrap();
        assert!(s.is_complete());
        assert_eq!(s.primes_u128(), vec![233, 1103, 2089]);
        assert_eq!(s.residual, Some(BigUint::from(2089u32)));
        assert_eq!(s.to_string(), "233 * 1103 * 2089");

        let s = stepwise_factor(2, 13, 91).unwrap();
        assert!(s.is_complete());
        assert_eq!(s.primes_u128(), vec![8191]);
        assert_eq!(s.residual, Some(BigUint::from(8191u32)));

        let s = stepwise_factor(2, 11, 46).unwrap();
        assert!(s.is_complete());
        assert_eq!(s.primes_u128(), vec![23, 89]);
    }

    #[test]
    fn stepwise_reports_inconclusive_when_bound_too_small() {
        let s = stepwise_factor(2, 29, 300).unwrap();
        match &s.status {
            StepwiseStatus::Inconclusive { cofactor } => {
                assert_eq!(cofactor, &BigUint::from(536_870_911u32 / 233))
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(s.primes_u128(), vec![233]);
        assert!(s.to_factorization().is_none());
        assert!(s.to_string().ends_with("unresolved]"));
    }

    #[test]
    fn stepwise_removes_p_when_it_divides_base_minus_one() {
        // (7^3 - 1)/6 = 57 = 3 * 19 and 3 | 7 - 1.
        let s = stepwise_factor(7, 3, 100).unwrap();
        assert_eq!(s.primes_u128(), vec![3, 19]);
        // (4^3 - 1)/3 = 21 = 3 * 7.
        let s = stepwise_factor(4, 3, 100).unwrap();
        assert_eq!(s.primes_u128(), vec![3, 7]);
    }

    #[test]
    fn stepwise_agrees_with_factorize() {
        for a in [2u128, 3, 5, 10, 11, 12] {
            for p in [2u128, 3, 5, 7, 11, 13, 17] {
                let r = make_repunit(a, p).unwrap();
                let Some(n) = r.value_u128() else { continue };
                if n > 1u128 << 50 {
                    continue;
                }
                let s = stepwise_factor(a, p, n.isqrt() + 1).unwrap();
                assert!(s.is_complete());
                assert_eq!(s.to_factorization().unwrap(), factorize(n).unwrap(), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn divisor_differences_examples() {
        let n = 536_870_911u128;
        let f = factorize(n).unwrap();
        assert!(divisor_difference_check(n, 2, &f).unwrap());
        let diffs = divisor_differences(n, 2, &f).unwrap();
        assert_eq!(diffs.len(), 28);
        let find = |lo, hi| diffs.iter().find(|d| d.lower == lo && d.upper == hi).unwrap().quotient;
        assert_eq!(find(233, 2089), 64);
        assert_eq!(find(1103, 2089), 34);

        assert!(divisor_difference_check(133, 11, &factorize(133).unwrap()).unwrap());
        assert!(divisor_difference_check(2047, 2, &factorize(2047).unwrap()).unwrap());
        assert!(divisor_difference_check(8191, 2, &factorize(8191).unwrap()).unwrap());
        assert!(matches!(
            divisor_difference_check(314_821, 2, &factorize(314_821).unwrap()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn progression_scans() {
        let q = |r, x| -> Vec<(u128, u128)> {
            mersenne_progression_scan(r, x).unwrap().into_iter().filter(|p| p.qualifies).map(|p| (p.x, p.p)).collect()
        };
        assert_eq!(q(13, 630), vec![(630, 8191)]);
        assert_eq!(q(11, 8), vec![(2, 23), (8, 89)]);
        let hits = q(29, 72);
        assert!(hits.contains(&(8, 233)));
        assert!(hits.contains(&(72, 2089)));
        assert!(mersenne_progression_scan(12, 5).is_err());
    }
}

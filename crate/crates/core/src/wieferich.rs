//! Wieferich primes of arbitrary order in any base, and the matching
//! overpseudoprime prime powers.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, primes_below, Modulus};
use crate::classify::is_over_psp_def;
use crate::error::{Error, Result};

/// Largest Wieferich order resolved before [`wieferich_order`] gives up.
pub const DEFAULT_MAX_ORDER: u32 = 8;

/// Largest `p_max` accepted by [`scan_wieferich`]; the sieve is held in memory.
pub const SCAN_LIMIT: u128 = 1 << 32;

/// `p^(order_w + 1)` exactly divides `base^(p-1) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WieferichRecord {
    pub p: u128,
    pub base: u128,
    pub order_w: u32,
}

impl WieferichRecord {
    pub fn is_wieferich(&self) -> bool {
        self.order_w >= 1
    }
}

pub fn wieferich_order(p: u128, a: u128) -> Result<WieferichRecord> {
    wieferich_order_capped(p, a, DEFAULT_MAX_ORDER)
}

/// Exact Wieferich order, found by testing `a^(p-1) = 1` modulo
/// `p^2, p^3, ...` until the congruence fails. Moduli past `u128` switch to
/// arbitrary precision. Orders above `max_order` are a capacity error.
pub fn wieferich_order_capped(p: u128, a: u128, max_order: u32) -> Result<WieferichRecord> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a % p == 0 {
        return Err(Error::NotCoprime {
            base: a,
            modulus: p,
            gcd: p,
        });
    }
    let big_p = BigUint::from(p);
    let big_e = BigUint::from(p - 1);
    let big_a = BigUint::from(a);
    for k in 2..=max_order + 2 {
        let holds = match p.checked_pow(k) {
            Some(pk) => Modulus::new(pk)?.pow(a, p - 1) == 1 % pk,
            None => big_a.modpow(&big_e, &big_p.pow(k)).is_one(),
        };
        if !holds {
            return Ok(WieferichRecord {
                p,
                base: a,
                order_w: k - 2,
            });
        }
    }
    Err(Error::Capacity(format!(
        "{p} is a base-{a} Wieferich prime of order above {max_order}"
    )))
}

/// Whether `p^(w+1)` is an overpseudoprime to base `a`, decided through the
/// Wieferich order and checked against the defining identity whenever
/// `p^(w+1)` fits in `u128`.
pub fn over_psp_power(p: u128, a: u128, w: u32) -> Result<bool> {
    if w == 0 {
        return Err(Error::InvalidInput("w must be at least 1".into()));
    }
    if p == 2 {
        return Err(Error::InvalidInput("overpseudoprimes are odd; p must be odd".into()));
    }
    let rec = wieferich_order_capped(p, a, DEFAULT_MAX_ORDER.max(w + 1))?;
    let verdict = rec.order_w >= w;
    if let Some(n) = p.checked_pow(w + 1) {
        let by_definition = is_over_psp_def(n, a)?;
        assert_eq!(
            verdict, by_definition,
            "Wieferich order {} of {p} (base {a}) disagrees with the overpseudoprime test on {n}",
            rec.order_w
        );
    }
    Ok(verdict)
}

/// All base-`a` Wieferich primes `p <= p_max`, ascending.
pub fn scan_wieferich(a: u128, p_max: u128) -> Result<Vec<WieferichRecord>> {
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if p_max > SCAN_LIMIT {
        return Err(Error::Capacity(format!(
            "p_max {p_max} exceeds the scan limit {SCAN_LIMIT}"
        )));
    }
    let primes = primes_below(p_max as u64 + 1);
    let found: Result<Vec<Option<WieferichRecord>>> = primes
        .par_iter()
        .map(|&p| {
            let p = p as u128;
            if gcd(a, p) != 1 {
                return Ok(None);
            }
            let p2 = p * p;
            if Modulus::new(p2)?.pow(a, p - 1) != 1 {
                return Ok(None);
            }
            wieferich_order(p, a).map(Some)
        })
        .collect();
    Ok(found?.into_iter().flatten().collect())
}

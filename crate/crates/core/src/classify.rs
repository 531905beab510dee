//! Pseudoprime taxonomy for a pair `(n, a)`: Fermat, strong, super and
//! overpseudoprime, with witnesses for every negative verdict.
//!
//! The overpseudoprime verdict is computed two independent ways, from the
//! identity `n = r_a(n) h_a(n) + 1` and from invariance of `h_a` over the
//! prime-power divisors of `n`. [`classify`] aborts if they ever disagree.

use serde::{Deserialize, Serialize};

use crate::arith::{factorize_with, gcd, is_prime, FactorBudget, Factorization, Modulus};
use crate::error::{Error, Result};
use crate::order::{divisor_orders, order_profile_factored, prime_power_orders, require_coprime};

/// Evidence attached to a classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Witness {
    /// `a^(n-1) mod n` when it is not 1.
    FermatResidue { residue: u128 },
    /// Least divisor `d > 1` with `a^(d-1) != 1 (mod d)`; `order` is `h_a(d)`.
    SuperViolation { divisor: u128, order: u128 },
    /// A prime-power divisor whose order differs from `h_a(n)`.
    OrderMismatch {
        divisor: u128,
        order: u128,
        modulus_order: u128,
    },
}

/// All taxonomy flags for one `(n, base)` pair. Pseudoprime flags are
/// `None` for prime `n`, where the classes are undefined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n: u128,
    pub base: u128,
    pub is_prime: bool,
    pub fermat_psp: Option<bool>,
    pub strong_psp: Option<bool>,
    pub super_psp: Option<bool>,
    pub over_psp: Option<bool>,
    pub squarefree: bool,
    pub h: u128,
    pub r: u128,
    pub factorization: Factorization,
    pub witnesses: Vec<Witness>,
}

fn require_odd_composite(n: u128, a: u128) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::InvalidInput("n must be odd".into()));
    }
    if n < 3 {
        return Err(Error::InvalidInput("n must be at least 3".into()));
    }
    if is_prime(n) {
        return Err(Error::InvalidInput(format!("{n} is prime; pseudoprime classes apply to composites")));
    }
    require_coprime(a, n)
}

fn require_factorization_of(n: u128, f: &Factorization) -> Result<()> {
    if f.n() != n {
        return Err(Error::InvalidInput(format!("factorization is of {}, not {n}", f.n())));
    }
    Ok(())
}

/// `a^(n-1) = 1 (mod n)` for odd composite `n`.
pub fn is_fermat_psp(n: u128, a: u128) -> Result<bool> {
    require_odd_composite(n, a)?;
    Ok(Modulus::new(n)?.pow(a, n - 1) == 1)
}

/// Miller-Rabin predicate: with `n - 1 = 2^s m`, `m` odd, true iff
/// `a^m = 1` or `a^(2^k m) = -1` for some `0 <= k < s`.
pub fn is_strong_psp(n: u128, a: u128) -> Result<bool> {
    require_odd_composite(n, a)?;
    Ok(crate::arith::strong_probable_prime(Modulus::new(n)?, a))
}

/// Every divisor `d > 1` satisfies `a^(d-1) = 1 (mod d)`, tested as
/// `h_a(d) | d - 1`.
pub fn is_super_psp(n: u128, a: u128, f: &Factorization) -> Result<bool> {
    require_odd_composite(n, a)?;
    require_factorization_of(n, f)?;
    Ok(super_violation(a, f, FactorBudget::default())?.is_none())
}

/// Least divisor `d > 1` of `f.n()` with `h_a(d)` not dividing `d - 1`.
pub fn super_violation(a: u128, f: &Factorization, budget: FactorBudget) -> Result<Option<Witness>> {
    Ok(divisor_orders(a, f, budget)?
        .into_iter()
        .find(|&(d, h)| (d - 1) % h != 0)
        .map(|(divisor, order)| Witness::SuperViolation { divisor, order }))
}

/// Overpseudoprime by definition: `n = r_a(n) h_a(n) + 1`, with `r` from the
/// divisor-sum formula.
pub fn is_over_psp_def(n: u128, a: u128) -> Result<bool> {
    is_over_psp_def_with(n, a, FactorBudget::default())
}

pub fn is_over_psp_def_with(n: u128, a: u128, budget: FactorBudget) -> Result<bool> {
    require_odd_composite(n, a)?;
    let f = factorize_with(n, budget)?;
    Ok(order_profile_factored(a, f, budget)?.satisfies_rh_identity())
}

/// Overpseudoprime by order invariance: `h_a(p^j) = h_a(n)` for every
/// prime-power divisor. Mixed divisors follow since their orders are lcms
/// of prime-power orders.
pub fn is_over_psp_char(n: u128, a: u128, f: &Factorization) -> Result<bool> {
    require_odd_composite(n, a)?;
    require_factorization_of(n, f)?;
    Ok(order_mismatches(a, f, FactorBudget::default())?.is_empty())
}

/// Prime-power divisors whose order differs from `h_a(n)`.
pub fn order_mismatches(a: u128, f: &Factorization, budget: FactorBudget) -> Result<Vec<Witness>> {
    let table = prime_power_orders(a, f, budget)?;
    let h = crate::order::order_from_factorization(a, f, budget)?;
    Ok(table
        .into_iter()
        .filter(|t| t.order != h)
        .map(|t| Witness::OrderMismatch {
            divisor: t.value,
            order: t.order,
            modulus_order: h,
        })
        .collect())
}

pub fn classify(n: u128, a: u128) -> Result<ClassificationReport> {
    classify_with(n, a, FactorBudget::default())
}

/// Full report for odd `n >= 3` and base `a >= 2` coprime to `n`.
///
/// # Panics
///
/// If the two overpseudoprime criteria disagree, which can only happen
/// through an arithmetic bug.
pub fn classify_with(n: u128, a: u128, budget: FactorBudget) -> Result<ClassificationReport> {
    if n % 2 == 0 {
        return Err(Error::InvalidInput("n must be odd".into()));
    }
    if n < 3 {
        return Err(Error::InvalidInput("n must be at least 3".into()));
    }
    if a < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    let g = gcd(a, n);
    if g != 1 {
        return Err(Error::NotCoprime { base: a, modulus: n, gcd: g });
    }
    let f = factorize_with(n, budget)?;
    let profile = order_profile_factored(a, f.clone(), budget)?;

    if f.is_prime() {
        return Ok(ClassificationReport {
            n,
            base: a,
            is_prime: true,
            fermat_psp: None,
            strong_psp: None,
            super_psp: None,
            over_psp: None,
            squarefree: true,
            h: profile.h,
            r: profile.r,
            factorization: f,
            witnesses: Vec::new(),
        });
    }

    let m = Modulus::new(n)?;
    let mut witnesses = Vec::new();
    let residue = m.pow(a, n - 1);
    let fermat = residue == 1;
    if !fermat {
        witnesses.push(Witness::FermatResidue { residue });
    }
    let strong = crate::arith::strong_probable_prime(m, a);
    let violation = super_violation(a, &f, budget)?;
    let super_psp = violation.is_none();
    witnesses.extend(violation);

    let over_def = profile.satisfies_rh_identity();
    let mismatches = order_mismatches(a, &f, budget)?;
    let over_char = mismatches.is_empty();
    assert_eq!(
        over_def, over_char,
        "overpseudoprime criteria disagree for n={n}, a={a}: r*h+1 test says {over_def}, order invariance says {over_char}"
    );
    witnesses.extend(mismatches);

    Ok(ClassificationReport {
        n,
        base: a,
        is_prime: false,
        fermat_psp: Some(fermat),
        strong_psp: Some(strong),
        super_psp: Some(super_psp),
        over_psp: Some(over_def),
        squarefree: f.is_squarefree(),
        h: profile.h,
        r: profile.r,
        factorization: f,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize, pow_mod};
    use crate::order::{coset_partition, mult_order};

    fn f(n: u128) -> Factorization {
        factorize(n).unwrap()
    }

    /// Overpseudoprime straight from the definition, with `r` counted by
    /// walking the orbits and `h` by linear scan.
    fn brute_over(n: u128, a: u128) -> bool {
        let part = coset_partition(a, n).unwrap();
        let h = part.lcm_of_sizes();
        part.count() as u128 * h + 1 == n
    }

    fn brute_super(n: u128, a: u128) -> bool {
        (2..=n).filter(|d| n % d == 0).all(|d| pow_mod(a, d - 1, d).unwrap() == 1)
    }

    #[test]
    fn fermat_examples() {
        assert!(is_fermat_psp(341, 2).unwrap());
        assert!(is_fermat_psp(314_821, 2).unwrap());
        assert!(!is_fermat_psp(15, 2).unwrap());
        assert!(matches!(is_fermat_psp(13, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(is_fermat_psp(16, 3), Err(Error::InvalidInput(_))));
        assert!(matches!(is_fermat_psp(15, 3), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn strong_examples() {
        assert!(is_strong_psp(2047, 2).unwrap());
        assert!(!is_strong_psp(341, 2).unwrap());
        assert!(is_strong_psp(13_421_773, 2).unwrap());
        assert!(is_strong_psp(314_821, 2).unwrap());
    }

    #[test]
    fn super_examples() {
        assert!(is_super_psp(2047, 2, &f(2047)).unwrap());
        assert!(is_super_psp(341, 2, &f(341)).unwrap());
        assert!(is_super_psp(13_421_773, 2, &f(13_421_773)).unwrap());
        assert!(!is_super_psp(314_821, 2, &f(314_821)).unwrap());
        assert_eq!(
            super_violation(2, &f(314_821), FactorBudget::default()).unwrap(),
            Some(Witness::SuperViolation { divisor: 793, order: 60 })
        );
        assert!(brute_super(341, 2));
        assert!(!brute_super(314_821, 2));
    }

    #[test]
    fn over_examples() {
        assert!(is_over_psp_def(13_421_773, 2).unwrap());
        assert!(!is_over_psp_def(314_821, 2).unwrap());
        assert!(is_over_psp_def(133, 11).unwrap());
        assert!(is_over_psp_char(25, 7, &f(25)).unwrap());
        assert!(is_over_psp_char(1093 * 1093, 2, &f(1093 * 1093)).unwrap());
        assert!(!is_over_psp_char(314_821, 2, &f(314_821)).unwrap());
        assert!(is_over_psp_char(13, 2, &f(13)).is_err());
    }

    #[test]
    fn example_one_witnesses() {
        let w = order_mismatches(2, &f(314_821), FactorBudget::default()).unwrap();
        assert_eq!(
            w,
            vec![
                Witness::OrderMismatch { divisor: 13, order: 12, modulus_order: 660 },
                Witness::OrderMismatch { divisor: 61, order: 60, modulus_order: 660 },
                Witness::OrderMismatch { divisor: 397, order: 44, modulus_order: 660 },
            ]
        );
    }

    #[test]
    fn report_2047() {
        let r = classify(2047, 2).unwrap();
        assert!(!r.is_prime);
        assert_eq!(r.fermat_psp, Some(true));
        assert_eq!(r.strong_psp, Some(true));
        assert_eq!(r.super_psp, Some(true));
        assert_eq!(r.over_psp, Some(true));
        assert_eq!((r.h, r.r), (11, 186));
        assert!(r.witnesses.is_empty());
        assert_eq!(r.over_psp, Some(brute_over(2047, 2)));
        assert_eq!(r.super_psp, Some(brute_super(2047, 2)));
    }

    #[test]
    fn report_prime_marks_classes_not_applicable() {
        let r = classify(13, 2).unwrap();
        assert!(r.is_prime);
        assert_eq!(r.fermat_psp, None);
        assert_eq!(r.over_psp, None);
        assert_eq!((r.h, r.r), (12, 1));
    }

    #[test]
    fn report_314821() {
        let r = classify(314_821, 2).unwrap();
        assert_eq!(r.over_psp, Some(false));
        assert_eq!(r.strong_psp, Some(true));
        assert_eq!(r.fermat_psp, Some(true));
        assert_eq!(r.super_psp, Some(false));
        assert_eq!(r.h, 660);
    }

    #[test]
    fn input_validation() {
        assert_eq!(classify(4, 2), Err(Error::InvalidInput("n must be odd".into())));
        assert!(matches!(classify(1, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(classify(21, 7), Err(Error::NotCoprime { .. })));
        assert!(matches!(classify(21, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn brute_force_agreement_below_3000() {
        for n in (9..3000u128).step_by(2) {
            if is_prime(n) {
                continue;
            }
            for a in [2u128, 3, 5, 7, 11] {
                if gcd(a, n) != 1 {
                    continue;
                }
                let r = classify(n, a).unwrap();
                assert_eq!(r.over_psp, Some(brute_over(n, a)), "n={n} a={a}");
                assert_eq!(r.super_psp, Some(brute_super(n, a)), "n={n} a={a}");
                assert_eq!(r.fermat_psp, Some(pow_mod(a, n - 1, n).unwrap() == 1));
                assert_eq!(r.h, mult_order(a, n).unwrap());
            }
        }
    }

    #[test]
    fn report_json_round_trip() {
        let r = classify(314_821, 2).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"over_psp\":false"));
        let back: ClassificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let r = classify(13, 2).unwrap();
        let back: ClassificationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}

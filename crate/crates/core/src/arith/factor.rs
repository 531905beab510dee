use serde::{Deserialize, Serialize};

use super::modular::{gcd, isqrt, Modulus};
use super::prime::{is_prime, small_primes, SMALL_PRIME_LIMIT};
use crate::error::{Error, Result};

/// Effort budget for the Pollard rho stage of [`factorize_with`], counted in
/// iterations of the pseudorandom map summed over all cofactors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    pub rho_iterations: u64,
}

impl FactorBudget {
    pub const DEFAULT_RHO_ITERATIONS: u64 = 1 << 24;

    pub fn new(rho_iterations: u64) -> Self {
        FactorBudget { rho_iterations }
    }
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget::new(Self::DEFAULT_RHO_ITERATIONS)
    }
}

/// Complete prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    n: u128,
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    /// Validates and wraps a list of `(prime, exponent)` pairs.
    pub fn from_factors(n: u128, mut factors: Vec<(u128, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut product: u128 = 1;
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!("repeated prime {}", w[0].0)));
            }
        }
        for &(p, e) in &factors {
            if e == 0 {
                return Err(Error::InvalidInput(format!("zero exponent on {p}")));
            }
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            product = p
                .checked_pow(e)
                .and_then(|pe| product.checked_mul(pe))
                .ok_or_else(|| Error::InvalidInput("factor product overflows u128".into()))?;
        }
        if product != n {
            return Err(Error::InvalidInput(format!(
                "factors multiply to {product}, not {n}"
            )));
        }
        Ok(Factorization { n, factors })
    }

    pub fn n(&self) -> u128 {
        self.n
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn num_divisors(&self) -> u128 {
        self.factors.iter().map(|&(_, e)| e as u128 + 1).product()
    }

    /// All divisors in ascending order, including 1 and n.
    pub fn divisors(&self) -> Vec<u128> {
        let mut out = vec![1u128];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u128;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Every prime-power divisor `p^j`, `1 <= j <= l`, as `(p, j, p^j)`.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u128, u32, u128)> + '_ {
        self.factors
            .iter()
            .flat_map(|&(p, e)| (1..=e).map(move |j| (p, j, p.pow(j))))
    }

    /// Euler's totient, `prod p^(l-1) (p-1)`.
    pub fn euler_phi(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e - 1) * (p - 1))
            .product()
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Euler's totient of the factored integer.
pub fn euler_phi(f: &Factorization) -> u128 {
    f.euler_phi()
}

/// Factor `n >= 2` with the default budget.
pub fn factorize(n: u128) -> Result<Factorization> {
    factorize_with(n, FactorBudget::default())
}

/// Trial division by primes below 10^6, then Brent's variant of Pollard rho
/// on the remaining cofactors.
pub fn factorize_with(n: u128, budget: FactorBudget) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("cannot factor {n}; need n >= 2")));
    }
    let mut found: Vec<(u128, u32)> = Vec::new();
    let mut rest = n;
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        let divides = if rest <= u64::MAX as u128 {
            (rest as u64) % (p as u64) == 0
        } else {
            rest % p == 0
        };
        if divides {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            found.push((p, e));
        }
    }
    let limit = SMALL_PRIME_LIMIT as u128;
    if rest > 1 {
        if rest < limit * limit {
            found.push((rest, 1));
        } else {
            let mut remaining = budget.rho_iterations;
            let mut unresolved = Vec::new();
            let mut stack = vec![rest];
            while let Some(c) = stack.pop() {
                if is_prime(c) {
                    found.push((c, 1));
                    continue;
                }
                let r = isqrt(c);
                if r * r == c {
                    stack.push(r);
                    stack.push(r);
                    continue;
                }
                match rho_split(c, &mut remaining) {
                    Some(d) => {
                        stack.push(d);
                        stack.push(c / d);
                    }
                    None => unresolved.push(c),
                }
            }
            if !unresolved.is_empty() {
                unresolved.sort_unstable();
                return Err(Error::IncompleteFactorization { n, unresolved });
            }
        }
    }
    found.sort_unstable();
    let mut merged: Vec<(u128, u32)> = Vec::with_capacity(found.len());
    for (p, e) in found {
        match merged.last_mut() {
            Some(last) if last.0 == p => last.1 += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(Factorization { n, factors: merged })
}

/// Find a nontrivial divisor of odd composite `n`, trying the maps
/// `y -> y^2 + c` for `c = 1, 2, ...` until the budget is spent.
fn rho_split(n: u128, remaining: &mut u64) -> Option<u128> {
    let m = Modulus::new(n).ok()?;
    let mut c = 1u128;
    while *remaining > 0 {
        if let Some(d) = brent(m, c, remaining) {
            return Some(d);
        }
        c += 1;
    }
    None
}

fn brent(m: Modulus, c: u128, remaining: &mut u64) -> Option<u128> {
    const BATCH: u64 = 128;
    let n = m.get();
    let f = |y: u128| m.add(m.mul(y, y), c);
    let diff = |a: u128, b: u128| a.abs_diff(b);

    let mut y = 2u128;
    let mut x = y;
    let mut ys = y;
    let mut q = 1u128;
    let mut g = 1u128;
    let mut r = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            if *remaining < steps {
                *remaining = 0;
                return None;
            }
            *remaining -= steps;
            for _ in 0..steps {
                y = f(y);
                q = m.mul(q, diff(x, y));
            }
            g = gcd(q, n);
            k += steps;
        }
        r *= 2;
    }
    if g == n {
        // The batch overshot; replay it one step at a time.
        loop {
            ys = f(ys);
            g = gcd(diff(x, ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

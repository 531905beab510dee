//! Exact integer and modular arithmetic over `u128`, deterministic primality
//! and factorization.

mod factor;
mod modular;
mod prime;

pub use factor::{euler_phi, factorize, factorize_with, FactorBudget, Factorization};
pub use modular::{gcd, isqrt, lcm, mul_mod, pow_mod, Modulus};
pub(crate) use prime::strong_probable_prime;
pub use prime::{is_prime, primes_below, small_primes, MR_DETERMINISTIC_BOUND, SMALL_PRIME_LIMIT};

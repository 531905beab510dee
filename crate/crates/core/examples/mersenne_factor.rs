//! Factoring 2^p - 1 using only candidates of order p.
//!
//! cargo run --release --example mersenne_factor -- 29

use oppk::arith::factorize;
use oppk::repunit::{divisor_differences, find_divisors_by_order, stepwise_factor};

fn main() -> oppk::Result<()> {
    let p: u128 = std::env::args().nth(1).map(|s| s.parse().expect("prime exponent")).unwrap_or(29);
    let s = stepwise_factor(2, p, 1 << 32)?;
    println!("2^{p} - 1 = {} = {s}", s.repunit.value);
    println!("scanned to {}, complete: {}", s.scanned_to, s.is_complete());

    println!("divisors of order {p} below 10^5: {:?}", find_divisors_by_order(2, p, 100_000)?);

    if let (Some(n), true) = (s.repunit.value_u128(), p > 2) {
        let f = factorize(n)?;
        if !f.is_prime() {
            let diffs = divisor_differences(n, 2, &f)?;
            let all = diffs.iter().all(|d| d.remainder == 0);
            println!("{} divisor pairs, all differences divisible by {p}: {all}", diffs.len());
            for d in diffs.iter().filter(|d| f.primes().any(|q| q == d.lower) && f.primes().any(|q| q == d.upper)) {
                println!("  {} - {} = {p} * {}", d.upper, d.lower, d.quotient);
            }
        }
    }
    Ok(())
}

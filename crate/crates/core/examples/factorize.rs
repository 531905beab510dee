//! Factorization, primality and the order of a base.
//!
//! cargo run --example factorize -- 147573952589676412927

use oppk::arith::{factorize, is_prime};
use oppk::order::{carmichael_lambda, mult_order};
use oppk::arith::FactorBudget;

fn main() -> oppk::Result<()> {
    let n: u128 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("integer argument"))
        .unwrap_or((1 << 67) - 1);
    let f = factorize(n)?;
    println!("{n} = {f}");
    println!("prime: {}", is_prime(n));
    if n % 2 == 1 {
        let lambda = carmichael_lambda(&f, FactorBudget::default())?;
        println!("lambda = {}", lambda.n());
        println!("h_2 = {}", mult_order(2, n)?);
    }
    Ok(())
}

//! Build overpseudoprimes from primes that share an order.

use oppk::search::{compose_over_psp_with, order_pool, ComposeOptions};

fn main() -> oppk::Result<()> {
    for h in [11u128, 20, 28, 36, 52, 60] {
        let pool = order_pool(2, 100_000, h)?;
        let built = compose_over_psp_with(2, 100_000, h, ComposeOptions::default())?;
        println!("h={h}: pool {pool:?}");
        for c in built.iter().take(5) {
            println!("  {} {:?} verified={}", c.value, c.factors, c.verified);
        }
    }

    let opts = ComposeOptions { with_powers: true, max_pool: 20 };
    let with_sq = compose_over_psp_with(2, 10_000, 364, opts)?;
    println!("h=364 with Wieferich squares: {} values, smallest {}", with_sq.len(), with_sq[0].value);
    Ok(())
}

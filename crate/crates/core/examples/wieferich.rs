//! Wieferich primes and their orders across several bases.

use oppk::wieferich::{over_psp_power, scan_wieferich};

fn main() -> oppk::Result<()> {
    for a in [2u128, 3, 5, 7, 10, 11] {
        for rec in scan_wieferich(a, 100_000)?.into_iter().filter(|r| r.p > 2) {
            let sq = over_psp_power(rec.p, a, 1)?;
            println!("base {a}: p = {} order {} (p^2 overpseudoprime: {sq})", rec.p, rec.order_w);
        }
    }
    Ok(())
}

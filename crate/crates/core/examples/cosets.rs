//! Orbits of multiplication by the base on the nonzero residues.
//!
//! cargo run --example cosets -- 15 2

use oppk::arith::factorize;
use oppk::order::{coset_count, coset_partition, mult_order};

fn main() -> oppk::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u128>().expect("integer argument"));
    let n = args.next().unwrap_or(15);
    let a = args.next().unwrap_or(2);

    let part = coset_partition(a, n)?;
    print!("{part}");
    let r = coset_count(a, n, &factorize(n)?)?;
    println!("r = {} (formula {r}), h = {}", part.count(), mult_order(a, n)?);
    println!("sizes {:?}, lcm {}", part.sizes(), part.lcm_of_sizes());
    Ok(())
}

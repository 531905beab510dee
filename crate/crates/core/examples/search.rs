//! Overpseudoprimes below a limit.
//!
//! cargo run --release --example search -- 2 1000000

use oppk::search::enumerate_over_psp;

fn main() -> oppk::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u128>().expect("integer argument"));
    let a = args.next().unwrap_or(2);
    let limit = args.next().unwrap_or(1_000_000);
    let res = enumerate_over_psp(a, limit)?;
    for h in &res.hits {
        println!("{:>12}  h={:<6} r={:<8} {}", h.n, h.h, h.r, h.factorization);
    }
    println!("{} found below {limit}, {} unresolved", res.hits.len(), res.unresolved.len());
    Ok(())
}

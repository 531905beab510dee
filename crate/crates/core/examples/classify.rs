//! Pseudoprime verdicts with witnesses.
//!
//! cargo run --example classify -- 314821 2

use oppk::classify::classify;

fn main() -> oppk::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u128>().expect("integer argument"));
    let ns: Vec<u128> = match args.next() {
        Some(n) => vec![n],
        None => vec![2047, 314_821, 13_421_773],
    };
    let a = args.next().unwrap_or(2);
    for n in ns {
        let rep = classify(n, a)?;
        println!(
            "{n} = {}: fermat {:?} strong {:?} super {:?} over {:?} (h={}, r={})",
            rep.factorization, rep.fermat_psp, rep.strong_psp, rep.super_psp, rep.over_psp, rep.h, rep.r
        );
        for w in &rep.witnesses {
            println!("  {w:?}");
        }
    }
    Ok(())
}

//! Orders of the base modulo 1, 3, 5, ... written as a b-file.
//!
//! cargo run --example order_table -- 2 1000 > b.txt

use oppk::search::{order_table, order_table_bfile, write_bfile};

fn main() -> oppk::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().expect("integer argument"));
    let a = args.next().unwrap_or(2);
    let count = args.next().unwrap_or(100);
    let entries = order_table(a as u128, count)?;
    write_bfile(&mut std::io::stdout().lock(), order_table_bfile(&entries)).expect("stdout");
    Ok(())
}

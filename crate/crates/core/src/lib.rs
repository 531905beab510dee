//! Multiplicative orders, cyclotomic cosets and the pseudoprime classes
//! built on them, for moduli up to `u128`.
//!
//! An odd composite `n` is an overpseudoprime to base `a` when
//! `n = r_a(n) h_a(n) + 1`, where `h_a(n)` is the order of `a` modulo `n` and
//! `r_a(n)` the number of orbits of `x -> a x` on `1..n`. Equivalently every
//! divisor `d > 1` of `n` has the same order.
//!
//! ```
//! let rep = oppk::classify::classify(2047, 2)?;
//! assert_eq!(rep.over_psp, Some(true));
//! assert_eq!((rep.h, rep.r), (11, 186));
//! # Ok::<(), oppk::Error>(())
//! ```

pub mod arith;
pub mod classify;
pub mod cli;
pub mod error;
pub mod order;
pub mod repunit;
pub mod search;
pub mod verify;
pub mod wieferich;

pub use error::{Error, Result};

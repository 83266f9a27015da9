//! Additive energy between integer sets and the squares, with exact
//! cross-checks for every identity and inequality along the way.
//!
//! Modules, bottom-up:
//!
//! * [`arith`]: primes, factorization, the occupancy ceiling `Δ`, partial sums.
//! * [`sets`]: integer sets, generators, residue profiles, set files.
//! * [`energy`]: representation functions and additive energy.
//! * [`sieve`]: composite-moduli inequality, larger sieve, divisor sums.
//! * [`theorem`]: the decomposition of `E(A,S)` and derived reports.

pub mod arith;
pub mod energy;
pub mod error;
pub mod sets;
pub mod sieve;
pub mod theorem;

pub use error::{Error, Result};
pub use sets::IntegerSet;

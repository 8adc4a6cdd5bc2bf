//! Invariants of irregular primes: Bernoulli numbers, Iwasawa power series,
//! the structure of the class-group components `S_{n,i}`, and certificates
//! for Bernoulli congruences coming from zeros of p-adic L-functions.
//!
//! The arithmetic core is generic over the residue word (`u32`, `u64`,
//! `u128`); the number-theoretic layers work with the [`Padic`] alias.

pub mod bernoulli;
pub mod congruence;
pub mod error;
pub mod hensel;
pub mod iwasawa;
pub mod padic;
pub mod series;
pub mod snf;
pub mod structure;
pub mod word;

pub use error::{Error, Result};
pub use padic::PadicElement;
pub use series::TruncatedSeries;
pub use word::Word;

/// Residues modulo `p^N` in a 64-bit word; enough for `p^N < 2^63`.
pub type Padic = PadicElement<u64>;
/// Wide residues for precisions beyond the 64-bit range.
pub type Padic128 = PadicElement<u128>;
pub type Padic32 = PadicElement<u32>;
pub type Series = TruncatedSeries<u64>;

//! Unsigned machine words that can carry residues modulo `p^N`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{PrimInt, Unsigned};

/// A residue word. Implementations supply modular multiplication without
/// overflow; everything else comes from [`PrimInt`].
pub trait Word:
    PrimInt + Unsigned + Hash + Debug + Display + Default + Send + Sync + 'static
{
    /// `a * b mod m` for `a, b < m`.
    fn mul_mod(a: Self, b: Self, m: Self) -> Self;

    /// `a + b mod m` for `a, b < m`; never overflows.
    #[inline]
    fn add_mod(a: Self, b: Self, m: Self) -> Self {
        let gap = m - b;
        if a >= gap {
            a - gap
        } else {
            a + b
        }
    }

    /// `a - b mod m` for `a, b < m`.
    #[inline]
    fn sub_mod(a: Self, b: Self, m: Self) -> Self {
        if a >= b {
            a - b
        } else {
            m - (b - a)
        }
    }

    fn from_u64(x: u64) -> Option<Self> {
        Self::from(x)
    }

    fn to_u128(self) -> u128;
}

impl Word for u32 {
    #[inline]
    fn mul_mod(a: u32, b: u32, m: u32) -> u32 {
        ((a as u64 * b as u64) % m as u64) as u32
    }

    fn to_u128(self) -> u128 {
        self as u128
    }
}

impl Word for u64 {
    #[inline]
    fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
        if m <= u32::MAX as u64 {
            (a * b) % m
        } else {
            ((a as u128 * b as u128) % m as u128) as u64
        }
    }

    fn to_u128(self) -> u128 {
        self as u128
    }
}

impl Word for u128 {
    fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
        if m <= u64::MAX as u128 {
            return (a * b) % m;
        }
        // Double-and-add; add_mod never overflows.
        let (mut acc, mut base, mut e) = (0u128, a, b);
        while e > 0 {
            if e & 1 == 1 {
                acc = <u128 as Word>::add_mod(acc, base, m);
            }
            base = <u128 as Word>::add_mod(base, base, m);
            e >>= 1;
        }
        acc
    }

    fn to_u128(self) -> u128 {
        self
    }
}

/// `base^exp mod m` by square-and-multiply.
pub fn pow_mod<W: Word>(base: W, mut exp: u128, m: W) -> W {
    let mut acc = W::one() % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = W::mul_mod(acc, b, m);
        }
        b = W::mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// `p^k` if it fits into `W` with headroom for one addition.
pub fn checked_prime_power<W: Word>(p: W, k: u32) -> Option<W> {
    let mut acc = W::one();
    for _ in 0..k {
        acc = acc.checked_mul(&p)?;
    }
    let half = W::max_value() >> 1;
    (acc <= half).then_some(acc)
}

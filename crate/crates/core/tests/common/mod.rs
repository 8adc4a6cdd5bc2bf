//! Reference implementations shared by the integration suites. Each one is
//! deliberately naive and independent of the library's algorithms.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `B_0 .. B_max` from `Σ_{j<=m} C(m+1, j) B_j = 0`.
pub fn bernoulli_recurrence(max: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for m in 1..=max {
        let mut binom = BigInt::one(); // C(m+1, 0)
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Modular inverse by the extended Euclidean algorithm.
pub fn inverse_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// `r mod p^k` for a rational with p-unit denominator.
pub fn rational_mod(r: &BigRational, p: u64, k: u32) -> Option<u64> {
    let m = BigInt::from(p).pow(k);
    let inv = inverse_mod(r.denom(), &m)?;
    let v = (r.numer() * inv).mod_floor(&m);
    Some(u64::try_from(v).unwrap())
}

/// `-(1 - p^{m-1}) B_m / m mod p^k`.
pub fn lp_target(b: &[BigRational], p: u64, m: usize, k: u32) -> u64 {
    let euler = BigRational::one() - BigRational::from_integer(BigInt::from(p).pow(m as u32 - 1));
    let v = -(euler * &b[m] / BigRational::from_integer(BigInt::from(m)));
    rational_mod(&v, p, k).unwrap()
}

pub fn v_p(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while x.is_multiple_of(&pb) {
        x /= &pb;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `a^e mod m` by repeated multiplication.
pub fn naive_pow(a: u64, e: u64, m: u64) -> u64 {
    (0..e).fold(1 % m, |acc, _| ((acc as u128 * a as u128) % m as u128) as u64)
}

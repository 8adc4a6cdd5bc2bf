//! Capped-precision p-adic integers.
//!
//! A [`PadicElement`] is a residue modulo `p^N` together with the number `N`
//! of p-adic digits it is known to. Every operation returns the largest
//! precision its inputs justify; division by `p` drops digits explicitly.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::word::{checked_prime_power, pow_mod, Word};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicElement<W: Word> {
    prime: W,
    precision: u32,
    residue: W,
    modulus: W,
}

/// `p^N` or a [`Error::PrecisionOverflow`].
pub fn prime_power<W: Word>(p: W, n: u32) -> Result<W> {
    checked_prime_power(p, n).ok_or(Error::PrecisionOverflow {
        prime: p.to_u128(),
        precision: n,
    })
}

/// Largest `N` such that `p^N` is representable in `W`.
pub fn max_precision<W: Word>(p: W) -> u32 {
    let mut n = 0;
    while checked_prime_power(p, n + 1).is_some() {
        n += 1;
    }
    n
}

/// Exact p-adic valuation of a nonzero integer.
pub fn valuation_u128(mut x: u128, p: u128) -> u32 {
    assert!(x != 0, "valuation of zero");
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

impl<W: Word> PadicElement<W> {
    pub fn new(prime: W, precision: u32, residue: W) -> Result<Self> {
        if prime < W::from(3u8).unwrap() {
            return Err(Error::Usage(format!("p-adic arithmetic needs an odd prime, got {prime}")));
        }
        if precision == 0 {
            return Err(Error::Usage("precision must be positive".into()));
        }
        let modulus = prime_power(prime, precision)?;
        Ok(PadicElement { prime, precision, residue: residue % modulus, modulus })
    }

    pub fn zero(prime: W, precision: u32) -> Result<Self> {
        Self::new(prime, precision, W::zero())
    }

    pub fn one(prime: W, precision: u32) -> Result<Self> {
        Self::new(prime, precision, W::one())
    }

    pub fn from_i128(prime: W, precision: u32, value: i128) -> Result<Self> {
        let zero = Self::zero(prime, precision)?;
        let m = zero.modulus.to_u128() as i128;
        let r = value.rem_euclid(m) as u128;
        Ok(Self { residue: W::from(r).unwrap(), ..zero })
    }

    pub fn from_i64(prime: W, precision: u32, value: i64) -> Result<Self> {
        Self::from_i128(prime, precision, value as i128)
    }

    pub fn from_bigint(prime: W, precision: u32, value: &BigInt) -> Result<Self> {
        let zero = Self::zero(prime, precision)?;
        let m = BigInt::from(zero.modulus.to_u128());
        let r = value.mod_floor(&m).to_u128().expect("reduced below modulus");
        Ok(Self { residue: W::from(r).unwrap(), ..zero })
    }

    /// Image of a rational with p-unit denominator.
    pub fn from_rational(prime: W, precision: u32, value: &BigRational) -> Result<Self> {
        let p = BigInt::from(prime.to_u128());
        if value.denom().is_multiple_of(&p) {
            return Err(Error::Domain(format!("{value} is not {prime}-integral")));
        }
        let num = Self::from_bigint(prime, precision, value.numer())?;
        let den = Self::from_bigint(prime, precision, value.denom())?;
        num.mul(&den.invert()?)
    }

    pub fn prime(&self) -> W {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> W {
        self.residue
    }

    /// `p^precision`.
    pub fn modulus(&self) -> W {
        self.modulus
    }

    /// Representative in `(-p^N/2, p^N/2]`.
    pub fn signed_residue(&self) -> i128 {
        let r = self.residue.to_u128() as i128;
        let m = self.modulus.to_u128() as i128;
        if r > m / 2 {
            r - m
        } else {
            r
        }
    }

    /// Largest `e <= N` with `p^e | residue`. A zero residue reports `N`,
    /// meaning "at least N".
    pub fn valuation(&self) -> u32 {
        if self.residue.is_zero() {
            return self.precision;
        }
        valuation_u128(self.residue.to_u128(), self.prime.to_u128())
    }

    /// Indistinguishable from zero at this precision.
    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !(self.residue % self.prime).is_zero()
    }

    /// Base-`p` digits, least significant first, exactly `precision` of them.
    pub fn digits(&self) -> Vec<W> {
        let mut r = self.residue;
        (0..self.precision)
            .map(|_| {
                let d = r % self.prime;
                r = r / self.prime;
                d
            })
            .collect()
    }

    /// Forget digits. Raising precision is refused.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::Usage(format!(
                "cannot raise precision from {} to {precision}",
                self.precision
            )));
        }
        Self::new(self.prime, precision, self.residue)
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime.to_u128(), other.prime.to_u128()));
        }
        Ok(())
    }

    /// Bring both operands to their common precision.
    fn align(&self, other: &Self) -> Result<(Self, Self)> {
        self.check_prime(other)?;
        let n = self.precision.min(other.precision);
        Ok((self.with_precision(n)?, other.with_precision(n)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        Ok(Self { residue: W::add_mod(a.residue, b.residue, a.modulus), ..a })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        Ok(Self { residue: W::sub_mod(a.residue, b.residue, a.modulus), ..a })
    }

    pub fn neg(&self) -> Self {
        Self { residue: W::sub_mod(W::zero(), self.residue, self.modulus), ..*self }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        Ok(Self { residue: W::mul_mod(a.residue, b.residue, a.modulus), ..a })
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let k = Self::from_i64(self.prime, self.precision, k).expect("same parameters");
        self.mul(&k).expect("same prime")
    }

    pub fn add_i64(&self, k: i64) -> Self {
        let k = Self::from_i64(self.prime, self.precision, k).expect("same parameters");
        self.add(&k).expect("same prime")
    }

    pub fn pow(&self, exp: u128) -> Self {
        Self { residue: pow_mod(self.residue, exp, self.modulus), ..*self }
    }

    /// Unique inverse of a unit at the same precision.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::Domain(format!(
                "{self} is not a unit and cannot be inverted"
            )));
        }
        // Euler: x^(phi(p^N) - 1), phi(p^N) = p^(N-1) (p - 1).
        let phi = (self.modulus / self.prime).to_u128() * (self.prime.to_u128() - 1);
        Ok(self.pow(phi - 1))
    }

    /// Exact division by `p^k`. The result is known to `N - k` digits.
    pub fn div_by_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(*self);
        }
        if k >= self.precision {
            return Err(Error::PrecisionExhausted(format!(
                "dividing a {}-digit value by p^{k} leaves no digits",
                self.precision
            )));
        }
        let pk = prime_power(self.prime, k)?;
        if !(self.residue % pk).is_zero() {
            return Err(Error::Domain(format!("{self} is not divisible by p^{k}")));
        }
        Self::new(self.prime, self.precision - k, self.residue / pk)
    }

    /// `x / y` where `y = p^k * unit` and `v(x) >= k`. The unit is known to
    /// `N_y - k` digits, so the quotient carries `min(N_x - k, v(x) - k + N_y - k)`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        self.check_prime(divisor)?;
        if divisor.is_zero() {
            return Err(Error::Domain("division by a value indistinguishable from zero".into()));
        }
        let k = divisor.valuation();
        if self.valuation() < k {
            return Err(Error::Domain(format!(
                "valuation {} of dividend is below divisor valuation {k}",
                self.valuation()
            )));
        }
        let unit = divisor.div_by_p_pow(k)?;
        let quotient = self.div_by_p_pow(k)?;
        let inverse = Self::new(self.prime, quotient.precision, unit.invert()?.residue)?;
        let digits = quotient.precision.min(self.valuation() - k + unit.precision);
        quotient.mul(&inverse)?.with_precision(digits)
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.residue.to_u128())
    }
}

impl<W: Word> fmt::Display for PadicElement<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.prime, self.precision)
    }
}

impl<W: Word> fmt::Debug for PadicElement<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Teichmüller lift `ω(a)`: the `(p-1)`-st root of unity congruent to `a` mod `p`,
/// found by iterating `x -> x^p` until it stabilises.
pub fn teichmuller<W: Word>(a: i64, p: W, precision: u32) -> Result<PadicElement<W>> {
    let x = PadicElement::from_i64(p, precision, a)?;
    if !x.is_unit() {
        return Err(Error::Domain(format!("teichmuller({a}) undefined: {p} divides {a}")));
    }
    let p_exp = p.to_u128();
    let mut cur = x;
    loop {
        let next = cur.pow(p_exp);
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// `(1+p)^s` via the binomial series `sum_k C(s, k) p^k`.
///
/// The result has precision `min(N, precision(s) + 1)`: changing `s` by
/// `p^M` changes `(1+p)^s` by a multiple of `p^(M+1)`.
pub fn pow_one_plus_p<W: Word>(s: &PadicElement<W>, precision: u32) -> Result<PadicElement<W>> {
    let p = s.prime();
    let pu = p.to_u128();
    let target = precision.min(s.precision() + 1);
    let one = PadicElement::one(p, target)?;

    // Terms with k - v(k!) >= target vanish; v(k!) <= (k-1)/(p-1) bounds the cutoff.
    let mut kmax: u64 = 1;
    while (kmax as u128) - (kmax as u128 - 1) / (pu - 1) < target as u128 {
        kmax += 1;
    }
    let extra = factorial_valuation(kmax, pu);
    let work = prime_power(p, target + extra)?;
    let s_work = s.residue() % work;

    let p_pow = PadicElement::new(p, target, p)?;
    let mut sum = one;
    let mut numer = W::one() % work;
    let mut fact_unit = one;
    let mut fact_val = 0u32;
    let mut p_k = one;
    for k in 1..=kmax {
        let j = W::from(k - 1).unwrap() % work;
        numer = W::mul_mod(numer, W::sub_mod(s_work, j, work), work);
        let kv = valuation_u128(k as u128, pu);
        fact_val += kv;
        let k_unit = (k as u128) / pu.pow(kv);
        fact_unit = fact_unit.mul(&PadicElement::from_i128(p, target, k_unit as i128)?)?;
        p_k = p_k.mul(&p_pow)?;

        let pv = prime_power(p, fact_val)?;
        debug_assert!((numer % pv).is_zero());
        let binom = PadicElement::new(p, target, numer / pv)?.mul(&fact_unit.invert()?)?;
        sum = sum.add(&binom.mul(&p_k)?)?;
    }
    Ok(sum)
}

fn factorial_valuation(k: u64, p: u128) -> u32 {
    let mut v = 0u128;
    let mut q = p;
    while q <= k as u128 {
        v += k as u128 / q;
        q *= p;
    }
    v as u32
}

/// Reduce a rational with p-unit denominator into `[0, p^N)` using big integers;
/// handy where `p^N` does not fit a word.
pub fn rational_mod_prime_power(value: &BigRational, p: u64, n: u32) -> Option<BigInt> {
    let m = BigInt::from(p).pow(n);
    let den = value.denom().mod_floor(&m);
    let inv = mod_inverse_bigint(&den, &m)?;
    Some((value.numer() * inv).mod_floor(&m))
}

fn mod_inverse_bigint(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Valuation of a nonzero rational; `None` for zero.
pub fn rational_valuation(value: &BigRational, p: u64) -> Option<i64> {
    if value.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |x: &BigInt| {
        let mut x = x.clone();
        let mut v = 0i64;
        while x.is_multiple_of(&pb) {
            x /= &pb;
            v += 1;
        }
        v
    };
    let num = value.numer().clone();
    let num = if num.sign() == Sign::Minus { -num } else { num };
    Some(count(&num) - count(value.denom()))
}

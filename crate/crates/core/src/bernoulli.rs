//! Bernoulli numbers, irregular pairs and generalized Bernoulli numbers
//! `B_{1, ω^{-i}}`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{max_precision, prime_power, teichmuller};
use crate::Padic;

pub type ExactRational = BigRational;

/// Largest index served by the exact path unless configured otherwise.
pub const DEFAULT_EXACT_CAP: u64 = 4000;

/// Memoised exact Bernoulli numbers `B_0 ..= B_max` (convention `B_1 = -1/2`).
///
/// Even-index values come from tangent numbers, which needs only big-integer
/// additions and small multiplications. The table grows geometrically and is
/// safe to share: readers take a read lock, growth takes the write lock.
pub struct BernoulliTable {
    cap: u64,
    values: RwLock<Vec<BigRational>>,
}

impl BernoulliTable {
    pub fn new(cap: u64) -> Self {
        Self { cap, values: RwLock::new(Vec::new()) }
    }

    pub fn global() -> &'static BernoulliTable {
        static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
        TABLE.get_or_init(|| BernoulliTable::new(DEFAULT_EXACT_CAP))
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn get(&self, m: u64) -> Result<BigRational> {
        if m > self.cap {
            return Err(Error::Resource(format!(
                "B_{m} exceeds the exact cap {}; use the modular path (bm_over_m_mod)",
                self.cap
            )));
        }
        {
            let values = self.values.read().expect("bernoulli table poisoned");
            if let Some(b) = values.get(m as usize) {
                return Ok(b.clone());
            }
        }
        let mut values = self.values.write().expect("bernoulli table poisoned");
        if values.len() <= m as usize {
            let target = (m.max(2 * values.len() as u64)).min(self.cap);
            *values = bernoulli_by_tangent_numbers(target);
        }
        Ok(values[m as usize].clone())
    }
}

/// `B_0 ..= B_max` from the tangent numbers `T_k` via
/// `B_{2k} = (-1)^(k-1) 2k T_k / (2^(2k) (2^(2k) - 1))`.
fn bernoulli_by_tangent_numbers(max: u64) -> Vec<BigRational> {
    let half = (max / 2) as usize;
    let mut t: Vec<BigInt> = vec![BigInt::zero(); half + 1];
    if half >= 1 {
        t[1] = BigInt::one();
        for k in 2..=half {
            t[k] = &t[k - 1] * (k - 1);
        }
        for k in 2..=half {
            for j in k..=half {
                t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
            }
        }
    }

    let mut out = Vec::with_capacity(max as usize + 1);
    for m in 0..=max {
        let b = match m {
            0 => BigRational::one(),
            1 => BigRational::new(BigInt::from(-1), BigInt::from(2)),
            _ if m % 2 == 1 => BigRational::zero(),
            _ => {
                let k = (m / 2) as usize;
                let four_k = BigInt::one() << (2 * k);
                let num = &t[k] * (2 * k);
                let den = &four_k * (&four_k - 1u32);
                let b = BigRational::new(num, den);
                if k % 2 == 0 {
                    -b
                } else {
                    b
                }
            }
        };
        out.push(b);
    }
    out
}

/// Exact `B_m` with `B_1 = -1/2`.
pub fn bernoulli_exact(m: u64) -> Result<ExactRational> {
    BernoulliTable::global().get(m)
}

pub fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn require_odd_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::Usage(format!("{p} is not an odd prime")))
    }
}

/// One irregular index of `p`: `p | B_k` with `k` even in `[2, p-3]`, paired
/// with the odd index `i = p - k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularDatum {
    pub p: u64,
    pub k: u64,
    pub i: u64,
    pub s: Option<u32>,
    pub lambda: Option<u32>,
}

impl IrregularDatum {
    pub fn new(p: u64, k: u64) -> Self {
        Self { p, k, i: p - k, s: None, lambda: None }
    }
}

/// All irregular pairs of `p`, ascending in `k`; `r_0` is the length.
pub fn irregular_scan(p: u64) -> Result<Vec<IrregularDatum>> {
    require_odd_prime(p)?;
    let ks: Vec<u64> = if p < 5 {
        Vec::new()
    } else if p - 3 <= BernoulliTable::global().cap() {
        irregular_indices_exact(p)?
    } else {
        irregular_indices_power_sums(p)
    };
    Ok(ks.into_iter().map(|k| IrregularDatum::new(p, k)).collect())
}

fn irregular_indices_exact(p: u64) -> Result<Vec<u64>> {
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for k in (2..=p - 3).step_by(2) {
        if bernoulli_exact(k)?.numer().is_multiple_of(&pb) {
            out.push(k);
        }
    }
    Ok(out)
}

/// `sum_{a<p} a^k ≡ p B_k (mod p^2)` for even `k <= p - 3`.
fn irregular_indices_power_sums(p: u64) -> Vec<u64> {
    let m = (p as u128) * (p as u128);
    let mut out = Vec::new();
    // powers[a] = a^k mod p^2, advanced by a^2 per even step
    let squares: Vec<u128> = (0..p as u128).map(|a| a * a % m).collect();
    let mut powers = squares.clone();
    for k in (2..=p - 3).step_by(2) {
        let sum: u128 = powers.iter().fold(0, |acc, &x| (acc + x) % m);
        if (sum / p as u128) % p as u128 == 0 {
            out.push(k);
        }
        for (x, &sq) in powers.iter_mut().zip(&squares) {
            *x = *x * sq % m;
        }
    }
    out
}

/// `r_0`, the number of irregular indices.
pub fn r0(p: u64) -> Result<usize> {
    Ok(irregular_scan(p)?.len())
}

fn check_odd_index(p: u64, i: u64) -> Result<()> {
    require_odd_prime(p)?;
    if i % 2 == 0 || i < 3 || i + 2 > p {
        return Err(Error::Usage(format!("index i = {i} must be odd in [3, {}]", p.saturating_sub(2))));
    }
    Ok(())
}

/// `B_{1, ω^{-i}}` known to `N` digits.
pub fn b1_chi(p: u64, i: u64, precision: u32) -> Result<Padic> {
    b1_chi_at_level(p, i, precision, 1)
}

/// `B_{1,χ} = p^{-m} sum_{a <= p^m, p ∤ a} χ(a) a` with `χ = ω^{-i}`. The sum is
/// taken modulo `p^{N+m}` so that `N` digits survive the division.
pub fn b1_chi_at_level(p: u64, i: u64, precision: u32, level: u32) -> Result<Padic> {
    check_odd_index(p, i)?;
    if precision == 0 || level == 0 {
        return Err(Error::Usage("precision and level must be positive".into()));
    }
    let work_precision = precision + level;
    let modulus = prime_power(p, work_precision)?;
    let exponent = ((p - 1) - i % (p - 1)) % (p - 1);
    let chi: Vec<u64> = std::iter::once(Ok(0))
        .chain((1..p).map(|b| Ok(teichmuller::<u64>(b as i64, p, work_precision)?.pow(exponent as u128).residue())))
        .collect::<Result<_>>()?;

    let count = prime_power(p, level)?;
    let mut acc: u128 = 0;
    let m = modulus as u128;
    for a in 1..=count {
        let r = (a % p) as usize;
        if r == 0 {
            continue;
        }
        acc = (acc + (chi[r] as u128) * ((a % modulus) as u128) % m) % m;
    }
    Padic::new(p, work_precision, acc as u64)?.div_by_p_pow(level)
}

/// `s_i = v_p(B_{1, ω^{-i}})` for an irregular index, resolved by raising the
/// precision until the valuation is strictly below it.
pub fn s_invariant(p: u64, i: u64) -> Result<u32> {
    if !b1_chi(p, i, 1)?.is_zero() {
        return Err(Error::Domain(format!("i = {i} is a regular index of p = {p}")));
    }
    let cap = max_precision::<u64>(p).saturating_sub(1);
    for n in 2..=cap {
        let b = b1_chi(p, i, n)?;
        if !b.is_zero() {
            return Ok(b.valuation());
        }
    }
    Err(Error::Resource(format!(
        "s_{i} for p = {p} is at least {cap}; precision cap reached"
    )))
}

/// Reduce `B_m / m` style rationals: `numerator * denominator^{-1} mod p`.
pub fn rational_mod_p(value: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = value.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let inv = den.extended_gcd(&pb).x.mod_floor(&pb);
    (value.numer() * inv).mod_floor(&pb).to_u64()
}

/// A line of a known-irregular-pairs table that the scan did not reproduce,
/// or a scan result missing from the table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMismatch {
    pub p: u64,
    pub k: u64,
    pub in_table: bool,
    pub in_scan: bool,
}

/// Parse `p k` lines; blank lines and `#` comments are skipped.
pub fn parse_known_pairs(text: &str) -> Result<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<u64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(p)), Some(Ok(k)), None) => out.push((p, k)),
            _ => {
                return Err(Error::Usage(format!(
                    "pairs table line {}: expected \"p k\", got {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Compare a scan of `p` with the table rows for `p`. The table is never
/// adopted; disagreements are returned for the report.
pub fn crosscheck_pairs(p: u64, scan: &[IrregularDatum], table: &[(u64, u64)]) -> Vec<PairMismatch> {
    let expected: Vec<u64> = table.iter().filter(|(q, _)| *q == p).map(|&(_, k)| k).collect();
    let found: Vec<u64> = scan.iter().map(|d| d.k).collect();
    let mut out: Vec<PairMismatch> = expected
        .iter()
        .filter(|k| !found.contains(k))
        .map(|&k| PairMismatch { p, k, in_table: true, in_scan: false })
        .collect();
    out.extend(
        found
            .iter()
            .filter(|k| !expected.contains(k))
            .map(|&k| PairMismatch { p, k, in_table: false, in_scan: true }),
    );
    out
}

//! The Bernoulli congruence
//!
//! ```text
//! Σ_{k<λ_i} C(λ_i - 1, k) (-1)^{λ_i-1-k} (1 - p^{m_k - 1}) B_{m_k} / m_k ≡ 0 (mod p^{n+λ_i}),
//! m_k = t_n + k (p - 1),
//! ```
//!
//! checked with one guard digit and recorded as a replayable certificate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iwasawa::{bm_over_m_mod, find_s0, index_for_exponent, lambda_invariant, TermPath, ZeroCertificate};
use crate::padic::prime_power;
use crate::Padic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceTerm {
    pub k: u32,
    pub exponent: u128,
    /// `(1 - p^{m-1}) B_m / m mod p^K`.
    pub residue: u64,
    pub path: TermPath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceCertificate {
    pub p: u64,
    pub i: u64,
    pub n: u32,
    pub lambda_i: u32,
    pub u: u64,
    /// `s_0` residue and digit count; absent for `n = 0`.
    pub s0: Option<(u64, u32)>,
    pub t_n: u128,
    pub precision: u32,
    pub terms: Vec<CongruenceTerm>,
    pub sum_residue: u64,
    /// `v_p` of the sum; equal to `precision` when the sum vanishes.
    pub valuation: u32,
    pub required: u32,
    pub verdict: Verdict,
}

/// Replayed sum, valuation and verdict from stored term residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Replay {
    pub sum_residue: u64,
    pub valuation: u32,
    pub verdict: Verdict,
}

fn binomial(n: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

fn alternating_sum(p: u64, precision: u32, lambda: u32, residues: &[u64]) -> Result<Padic> {
    let mut sum = Padic::zero(p, precision)?;
    for (k, &r) in residues.iter().enumerate() {
        let k = k as u32;
        let c = Padic::from_i128(p, precision, binomial(lambda - 1, k) as i128)?;
        let term = Padic::new(p, precision, r)?.mul(&c)?;
        sum = if (lambda - 1 - k) % 2 == 1 { sum.sub(&term)? } else { sum.add(&term)? };
    }
    Ok(sum)
}

fn verdict(valuation: u32, required: u32) -> Verdict {
    if valuation >= required {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

impl CongruenceCertificate {
    /// Recompute the sum from the stored residues alone.
    pub fn replay(&self) -> Result<Replay> {
        let residues: Vec<u64> = self.terms.iter().map(|t| t.residue).collect();
        let sum = alternating_sum(self.p, self.precision, self.lambda_i, &residues)?;
        let valuation = sum.valuation();
        Ok(Replay { sum_residue: sum.residue(), valuation, verdict: verdict(valuation, self.required) })
    }

    /// The stored sum, valuation and verdict are reproduced by [`Self::replay`]
    /// and every exponent lies in the class of `p - i`.
    pub fn is_consistent(&self) -> bool {
        let class_ok = self
            .terms
            .iter()
            .all(|t| t.exponent % (self.p - 1) as u128 == ((self.p - self.i) % (self.p - 1)) as u128);
        class_ok
            && self.replay().is_ok_and(|r| {
                r.sum_residue == self.sum_residue && r.valuation == self.valuation && r.verdict == self.verdict
            })
    }
}

/// Smallest zero precision giving `n` digits of `s_0`, raised until the
/// certificate carries them.
fn zero_for_digits(p: u64, i: u64, n: u32, lambda: u32) -> Result<ZeroCertificate> {
    let u = Padic::from_i64(p, n + lambda + 1, p as i64 - 1)?;
    let mut target = n + 1;
    loop {
        let z = find_s0(p, i, &u, target)?;
        if z.s0_digits >= n {
            return Ok(z);
        }
        if target >= n + lambda + 4 {
            return Err(Error::Resource(format!(
                "s0 for p = {p}, i = {i} reached only {} digits at target {target}",
                z.s0_digits
            )));
        }
        target += 1;
    }
}

/// Verify the congruence for `(p, i)` at level `n` modulo `p^K`,
/// `K = n + λ_i + 1` unless overridden.
pub fn verify_congruence(p: u64, i: u64, n: u32, precision: Option<u32>) -> Result<CongruenceCertificate> {
    let lambda = lambda_invariant(p, i)?;
    if lambda == 0 {
        return Err(Error::Domain(format!("i = {i} is a regular index of p = {p}")));
    }
    let required = n + lambda;
    let precision = precision.unwrap_or(required + 1);
    if precision < required + 1 {
        return Err(Error::Usage(format!("precision {precision} leaves no guard digit above {required}")));
    }
    prime_power(p, precision)?;

    let (t_n, s0) = if n == 0 {
        ((p - i) as u128, None)
    } else {
        let z = zero_for_digits(p, i, n, lambda)?;
        let t = z.t.iter().find(|(m, _)| *m == n).map(|&(_, t)| t).expect("t_n listed up to s0 digits");
        (t, Some((z.s0, z.s0_digits)))
    };

    let mut terms = Vec::with_capacity(lambda as usize);
    for k in 0..lambda {
        let exponent = t_n + k as u128 * (p - 1) as u128;
        let m = u64::try_from(exponent).map_err(|_| Error::Resource(format!("exponent {exponent} too large")))?;
        debug_assert_eq!(index_for_exponent(p, m)?, i);
        let term = bm_over_m_mod(p, m, precision)?;
        terms.push(CongruenceTerm { k, exponent, residue: term.value.residue(), path: term.path });
    }
    let residues: Vec<u64> = terms.iter().map(|t| t.residue).collect();
    let sum = alternating_sum(p, precision, lambda, &residues)?;
    Ok(CongruenceCertificate {
        p,
        i,
        n,
        lambda_i: lambda,
        u: p - 1,
        s0,
        t_n,
        precision,
        terms,
        sum_residue: sum.residue(),
        valuation: sum.valuation(),
        required,
        verdict: verdict(sum.valuation(), required),
    })
}

//! Fast invariant checks runnable from the command line.

use iwasawa_core::bernoulli::{bernoulli_exact, crosscheck_pairs, irregular_scan, is_odd_prime, parse_known_pairs};
use iwasawa_core::congruence::{verify_congruence, Verdict};
use iwasawa_core::iwasawa::{bm_over_m_mod_via, index_for_exponent, lp_value, TermPath};
use iwasawa_core::padic::{pow_one_plus_p, teichmuller};
use iwasawa_core::snf::{smith_normal_form, Exponent};
use iwasawa_core::structure::{sni_structure_with, Basis};
use iwasawa_core::{Padic, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::run::KNOWN_PAIRS;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestPayload {
    pub checks: Vec<CheckResult>,
}

fn teichmuller_multiplicative() -> Result<bool> {
    for p in [5u64, 7, 37] {
        for a in (1..40i64).filter(|a| a % p as i64 != 0) {
            for b in (1..40i64).filter(|b| b % p as i64 != 0) {
                let lhs = teichmuller::<u64>(a, p, 4)?.mul(&teichmuller::<u64>(b, p, 4)?)?;
                if lhs != teichmuller::<u64>(a * b, p, 4)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn binomial_exponentiation() -> Result<bool> {
    for p in [5u64, 7, 37] {
        for s in -20i64..20 {
            for t in -20i64..20 {
                let (x, y) = (Padic::from_i64(p, 4, s)?, Padic::from_i64(p, 4, t)?);
                let lhs = pow_one_plus_p(&x.add(&y)?, 4)?;
                if lhs != pow_one_plus_p(&x, 4)?.mul(&pow_one_plus_p(&y, 4)?)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn von_staudt_clausen() -> Result<bool> {
    for m in (2..=120u64).step_by(2) {
        let mut x = bernoulli_exact(m)?;
        for q in (2..=m + 1).filter(|&q| (q == 2 || is_odd_prime(q)) && m % (q - 1) == 0) {
            x += BigRational::new(BigInt::from(1), BigInt::from(q));
        }
        if !x.is_integer() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn interpolation() -> Result<bool> {
    for p in [5u64, 7, 37] {
        for m in (2..=60u64).step_by(2).filter(|m| m % (p - 1) != 0) {
            let i = index_for_exponent(p, m)?;
            let s = Padic::from_i64(p, 3, 1 - m as i64)?;
            let want = bm_over_m_mod_via(p, m, 3, TermPath::ExactRational)?.value.neg();
            if lp_value(p, i, &s, 3)? != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn smith_form() -> Result<bool> {
    let m = |rows: &[[u64; 2]]| -> Result<Vec<Vec<Padic>>> {
        rows.iter().map(|r| r.iter().map(|&x| Padic::new(5, 4, x)).collect()).collect()
    };
    let d = smith_normal_form(&m(&[[5, 5], [0, 25]])?)?;
    let circulant = sni_structure_with(7, 5, 2, 6, Basis::GroupRing, 2000)?;
    let monomial = sni_structure_with(7, 5, 2, 6, Basis::Monomial, 2000)?;
    Ok(d.exponents == vec![Exponent::Exact(1), Exponent::Exact(2)] && circulant == monomial)
}

fn known_pairs() -> Result<bool> {
    let table = parse_known_pairs(KNOWN_PAIRS)?;
    for p in (5..300u64).filter(|&p| is_odd_prime(p)).chain([691]) {
        if !crosscheck_pairs(p, &irregular_scan(p)?, &table).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn congruence_p37() -> Result<bool> {
    Ok(verify_congruence(37, 5, 0, None)?.verdict == Verdict::Pass)
}

pub fn run_selftest() -> SelftestPayload {
    let suites: [(&'static str, fn() -> Result<bool>); 7] = [
        ("teichmuller_multiplicative", teichmuller_multiplicative),
        ("binomial_exponentiation_homomorphism", binomial_exponentiation),
        ("von_staudt_clausen", von_staudt_clausen),
        ("interpolation_identity", interpolation),
        ("smith_normal_form", smith_form),
        ("known_irregular_pairs", known_pairs),
        ("congruence_p37_n0", congruence_p37),
    ];
    let checks = suites
        .into_iter()
        .map(|(name, check)| match check() {
            Ok(passed) => CheckResult { name, passed, detail: None },
            Err(e) => CheckResult { name, passed: false, detail: Some(e.to_string()) },
        })
        .collect();
    SelftestPayload { checks }
}

//! Iwasawa power series `f(T, ω^{1-i})` and the p-adic L-function
//! `L_p(s, ω^{p-i})`.
//!
//! The level-`n` approximant is the Stickelberger sum
//!
//! ```text
//! g_n = σ p^{-(n+1)} Σ_{a < p^{n+1}, p ∤ a} a ω^{-i}(a) (1+T)^{ε e(a)}   mod (1+T)^{p^n} - 1
//! ```
//!
//! with `a ω(a)^{-1} ≡ (1+p)^{e(a)} (mod p^{n+1})`. It is the exact image of
//! `f` in `Z_p[T]/((1+T)^{p^n} - 1)`, so evaluations at `v(t) >= 1` agree
//! with `f` modulo `p^{n+1}`. The orientation `ε` and sign `σ` are fixed by
//! matching `L_p(1-m) = -(1 - p^{m-1}) B_m / m` at two Bernoulli nodes.
//!
//! Approximants are stored in the group-ring basis: `coeffs[d]` multiplies
//! `(1+T)^d`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::bernoulli::{bernoulli_exact, BernoulliTable};
use crate::error::{Error, Result};
use crate::hensel::{hensel_zero, DifferenceMap, PadicMap};
use crate::padic::{pow_one_plus_p, prime_power, teichmuller};
use crate::word::Word;
use crate::{Padic, Series};

/// Sign conventions selected by calibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Convention {
    /// `+1`: `(1+T)^{e(a)}`, `-1`: `(1+T)^{-e(a)}`.
    pub orientation: i8,
    /// Global sign applied to `p^{-(n+1)} Σ a ω^{-i}(a) ...`.
    pub sign: i8,
}

const CONVENTIONS: [Convention; 4] = [
    Convention { orientation: 1, sign: 1 },
    Convention { orientation: 1, sign: -1 },
    Convention { orientation: -1, sign: 1 },
    Convention { orientation: -1, sign: -1 },
];

/// `g_n(T) ≈ f(T, ω^{1-i})` at level `n` and precision `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IwasawaApproximant {
    p: u64,
    i: u64,
    level: u32,
    precision: u32,
    convention: Convention,
    coeffs: Vec<u64>,
}

fn check_index(p: u64, i: u64) -> Result<()> {
    if !crate::bernoulli::is_odd_prime(p) {
        return Err(Error::Usage(format!("{p} is not an odd prime")));
    }
    if i % 2 == 0 || i < 3 || i + 2 > p {
        return Err(Error::Usage(format!("index i = {i} must be odd in [3, {}]", p.saturating_sub(2))));
    }
    Ok(())
}

/// Unoriented, unsigned Stickelberger coefficients
/// `c_e = p^{-(n+1)} Σ_{e(a) = e} a ω^{-i}(a) mod p^N`, `e < p^n`.
///
/// `(Z/p^{n+1})^*` is swept as `ζ (1+p)^e` with `ζ` running over the
/// Teichmüller lifts, so no discrete logarithms are taken.
fn stickelberger_raw(p: u64, i: u64, level: u32, precision: u32) -> Result<Vec<u64>> {
    let q = prime_power(p, level + 1)?;
    let work_precision = precision + level + 1;
    let work = prime_power(p, work_precision)?;
    let size = prime_power(p, level)? as usize;
    let exponent = ((p - 1) - i % (p - 1)) % (p - 1);

    let mut zeta_q = Vec::with_capacity(p as usize - 1);
    let mut chi = Vec::with_capacity(p as usize - 1);
    for b in 1..p {
        let z = teichmuller::<u64>(b as i64, p, work_precision)?;
        zeta_q.push(z.residue() % q);
        chi.push(z.pow(exponent as u128).residue());
    }
    // Accumulating p-1 products below q * work must fit a u128.
    let bound = (q as u128)
        .checked_mul(work as u128)
        .and_then(|b| b.checked_mul(p as u128))
        .ok_or(Error::PrecisionOverflow { prime: p as u128, precision: work_precision + level + 1 })?;
    debug_assert!(bound > 0);

    let mut out = Vec::with_capacity(size);
    let mut u = 1u64;
    for _ in 0..size {
        let mut acc: u128 = 0;
        for (&z, &c) in zeta_q.iter().zip(&chi) {
            let a = u64::mul_mod(z, u, q);
            acc += a as u128 * c as u128;
        }
        let total = (acc % work as u128) as u64;
        debug_assert_eq!(total % q, 0, "Stickelberger sum not divisible by p^(n+1)");
        out.push(total / q);
        u = u64::mul_mod(u, 1 + p, q);
    }
    Ok(out)
}

fn orient(raw: &[u64], convention: Convention, modulus: u64) -> Vec<u64> {
    let size = raw.len();
    let mut out = vec![0u64; size];
    for (e, &c) in raw.iter().enumerate() {
        let d = if convention.orientation == 1 || e == 0 { e } else { size - e };
        out[d] = if convention.sign == 1 { c } else { u64::sub_mod(0, c, modulus) };
    }
    out
}

/// `-(1 - p^{m-1}) B_m / m mod p^K`, the value `L_p(1-m, ω^m)`.
pub fn interpolation_target(p: u64, m: u64, precision: u32) -> Result<Padic> {
    let b = bernoulli_exact(m)?;
    let bm_over_m = Padic::from_rational(p, precision, &(b / num_bigint::BigInt::from(m)))?;
    let euler = euler_factor(p, m, precision)?;
    Ok(bm_over_m.mul(&euler)?.neg())
}

/// `1 - p^{m-1} mod p^K`.
fn euler_factor(p: u64, m: u64, precision: u32) -> Result<Padic> {
    let one = Padic::one(p, precision)?;
    if m - 1 >= precision as u64 {
        return Ok(one);
    }
    one.sub(&Padic::new(p, precision, prime_power(p, (m - 1) as u32)?)?)
}

/// The two smallest even `m ≡ p - i (mod p-1)`.
fn calibration_nodes(p: u64, i: u64) -> [u64; 2] {
    let m = p - i;
    [m, m + (p - 1)]
}

fn eval_group_ring(coeffs: &[u64], p: u64, precision: u32, x: &Padic) -> Result<Padic> {
    let modulus = prime_power(p, precision)?;
    let xr = x.residue() % modulus;
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = u64::add_mod(u64::mul_mod(acc, xr, modulus), c % modulus, modulus);
    }
    Padic::new(p, precision, acc)
}

fn node_argument(p: u64, m: u64, precision: u32) -> Result<Padic> {
    // (1+p)^{1-m}; the exponent is an exact integer
    let s = Padic::from_i64(p, precision, 1 - m as i64)?;
    pow_one_plus_p(&s, precision)
}

/// Conventions whose evaluations match both Bernoulli nodes at `min(N, n+1)` digits.
fn matching_conventions(p: u64, i: u64, raw: &[u64], level: u32, precision: u32) -> Result<Vec<Convention>> {
    let certified = precision.min(level + 1);
    let modulus = prime_power(p, precision)?;
    let mut nodes = Vec::new();
    for m in calibration_nodes(p, i) {
        nodes.push((node_argument(p, m, certified)?, interpolation_target(p, m, certified)?));
    }
    let mut out = Vec::new();
    for convention in CONVENTIONS {
        let coeffs = orient(raw, convention, modulus);
        let mut ok = true;
        for (x, target) in &nodes {
            if eval_group_ring(&coeffs, p, certified, x)? != *target {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(convention);
        }
    }
    Ok(out)
}

/// Largest Stickelberger sweep spent on escalating an ambiguous calibration.
const CALIBRATION_SWEEP_LIMIT: u64 = 200_000_000;

/// Calibrate the convention for `(p, i)` on reference approximants, raising
/// level and precision until exactly one convention matches.
pub fn calibrate(p: u64, i: u64) -> Result<Convention> {
    check_index(p, i)?;
    static CALIBRATIONS: OnceLock<RwLock<HashMap<(u64, u64), Convention>>> = OnceLock::new();
    let table = CALIBRATIONS.get_or_init(Default::default);
    if let Some(c) = table.read().expect("calibration table poisoned").get(&(p, i)) {
        return Ok(*c);
    }
    let mut last = Vec::new();
    for level in 1..=4u32 {
        let precision = level + 1;
        let sweep = prime_power(p, level).ok().and_then(|q| q.checked_mul(p - 1));
        if level > 1 && sweep.map_or(true, |w| w > CALIBRATION_SWEEP_LIMIT) {
            break;
        }
        let raw = stickelberger_raw(p, i, level, precision)?;
        last = matching_conventions(p, i, &raw, level, precision)?;
        if last.len() == 1 {
            table.write().expect("calibration table poisoned").insert((p, i), last[0]);
            return Ok(last[0]);
        }
        if last.is_empty() {
            break;
        }
    }
    Err(Error::Calibration(format!(
        "p = {p}, i = {i}: {} conventions match the Bernoulli nodes {:?}",
        last.len(),
        calibration_nodes(p, i)
    )))
}

/// Build `g_n` for `(p, i)` at level `n >= 1` and precision `N`, with
/// calibration, node verification and a cross-check against level `n - 1`
/// (or `n + 1` when `n = 1`) by exact projection.
pub fn stickelberger_approx(p: u64, i: u64, level: u32, precision: u32) -> Result<IwasawaApproximant> {
    check_index(p, i)?;
    if level == 0 || precision == 0 {
        return Err(Error::Usage("level and precision must be positive".into()));
    }
    let convention = calibrate(p, i)?;
    let approx = build_unchecked(p, i, level, precision, convention)?;
    approx.verify_nodes()?;

    let other_level = if level == 1 { 2 } else { level - 1 };
    let other = build_unchecked(p, i, other_level, precision, convention)?;
    let (low, high) = if other_level < level { (&other, &approx) } else { (&approx, &other) };
    if high.project(low.level)?.coeffs != low.coeffs {
        return Err(Error::Consistency(format!(
            "level {} approximant does not project onto level {} for p = {p}, i = {i}",
            high.level, low.level
        )));
    }
    Ok(approx)
}

fn build_unchecked(p: u64, i: u64, level: u32, precision: u32, convention: Convention) -> Result<IwasawaApproximant> {
    let raw = stickelberger_raw(p, i, level, precision)?;
    let modulus = prime_power(p, precision)?;
    Ok(IwasawaApproximant { p, i, level, precision, convention, coeffs: orient(&raw, convention, modulus) })
}

impl IwasawaApproximant {
    /// Reassemble from stored group-ring coefficients; the node identities
    /// are re-verified before the value is accepted.
    pub fn from_parts(p: u64, i: u64, level: u32, precision: u32, coeffs: Vec<u64>) -> Result<Self> {
        check_index(p, i)?;
        let modulus = prime_power(p, precision)?;
        if coeffs.len() as u64 != prime_power(p, level)? || coeffs.iter().any(|&c| c >= modulus) {
            return Err(Error::Consistency("stored approximant has the wrong shape".into()));
        }
        let convention = calibrate(p, i)?;
        let approx = Self { p, i, level, precision, convention, coeffs };
        approx.verify_nodes()?;
        Ok(approx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn i(&self) -> u64 {
        self.i
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Coefficients of `(1+T)^d`, `d < p^n`.
    pub fn group_ring_coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Digits certified for evaluations at `v(t) >= 1`.
    pub fn certified_precision(&self) -> u32 {
        self.precision.min(self.level + 1)
    }

    /// `g_n(0)`, which equals `f(0) = L_p(0, ω^{1-i}) = -B_{1, ω^{-i}}` exactly.
    pub fn constant_term(&self) -> Padic {
        let modulus = prime_power(self.p, self.precision).expect("validated");
        let sum = self.coeffs.iter().fold(0u64, |acc, &c| u64::add_mod(acc, c, modulus));
        Padic::new(self.p, self.precision, sum).expect("validated")
    }

    /// `g_n(t)` for `v(t) >= 1`, to `min(N, n+1, precision(t))` digits.
    pub fn eval(&self, t: &Padic) -> Result<Padic> {
        if t.prime() != self.p {
            return Err(Error::PrimeMismatch(self.p as u128, t.prime() as u128));
        }
        if t.valuation() == 0 {
            return Err(Error::Domain(format!("approximant evaluation needs v(t) >= 1, got {t}")));
        }
        let digits = self.certified_precision().min(t.precision());
        let x = t.add_i64(1).with_precision(digits)?;
        eval_group_ring(&self.coeffs, self.p, digits, &x)
    }

    /// `g_n((1+p)^s - 1)`, i.e. `L_p(s, ω^{p-i})` to the certified digits.
    pub fn eval_at_s(&self, s: &Padic) -> Result<Padic> {
        let x = pow_one_plus_p(s, self.certified_precision())?;
        let digits = x.precision();
        eval_group_ring(&self.coeffs, self.p, digits, &x)
    }

    /// Exact image at a lower level: coefficients summed over residue classes
    /// of `d mod p^level`.
    pub fn project(&self, level: u32) -> Result<Self> {
        if level > self.level {
            return Err(Error::Usage(format!("cannot project level {} up to {level}", self.level)));
        }
        let size = prime_power(self.p, level)? as usize;
        let modulus = prime_power(self.p, self.precision)?;
        let mut coeffs = vec![0u64; size];
        for (d, &c) in self.coeffs.iter().enumerate() {
            let slot = &mut coeffs[d % size];
            *slot = u64::add_mod(*slot, c, modulus);
        }
        Ok(Self { level, coeffs, ..self.clone() })
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::Usage("cannot raise approximant precision".into()));
        }
        let modulus = prime_power(self.p, precision)?;
        Ok(Self { precision, coeffs: self.coeffs.iter().map(|c| c % modulus).collect(), ..self.clone() })
    }

    /// Expansion in the monomial basis `1, T, ..., T^{p^n - 1}`. Quadratic in
    /// `p^n`; meant for small levels.
    pub fn to_t_basis(&self) -> Result<Series> {
        let modulus = prime_power(self.p, self.precision)?;
        let size = self.coeffs.len();
        let mut poly = vec![0u64; size];
        for (step, &c) in self.coeffs.iter().rev().enumerate() {
            // poly <- poly * (1 + T) + c; degree stays below `step + 1`
            for j in (1..=step.min(size - 1)).rev() {
                poly[j] = u64::add_mod(poly[j], poly[j - 1], modulus);
            }
            poly[0] = u64::add_mod(poly[0], c, modulus);
        }
        Series::from_residues(self.p, self.precision, &poly)
    }

    fn verify_nodes(&self) -> Result<()> {
        let certified = self.certified_precision();
        for m in calibration_nodes(self.p, self.i) {
            let x = node_argument(self.p, m, certified)?;
            let got = eval_group_ring(&self.coeffs, self.p, certified, &x)?;
            let want = interpolation_target(self.p, m, certified)?;
            if got != want {
                return Err(Error::Calibration(format!(
                    "p = {}, i = {}, level {}: node m = {m} gives {got}, expected {want}",
                    self.p, self.i, self.level
                )));
            }
        }
        Ok(())
    }
}

/// Key of a stored approximant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApproximantKey {
    pub p: u64,
    pub i: u64,
    pub level: u32,
    pub precision: u32,
}

/// Persistent backing for [`ApproximantCache`].
pub trait ApproximantStore: Send + Sync {
    fn load(&self, key: &ApproximantKey) -> Option<Vec<u64>>;
    fn store(&self, key: &ApproximantKey, coeffs: &[u64]);
}

/// Per-`(p, i, level)` approximants, keeping the most precise one built.
/// Lookups take a read lock; builds happen outside the lock and are
/// published under the write lock.
#[derive(Default)]
pub struct ApproximantCache {
    entries: RwLock<HashMap<(u64, u64, u32), Arc<IwasawaApproximant>>>,
    store: RwLock<Option<Arc<dyn ApproximantStore>>>,
}

impl ApproximantCache {
    pub fn global() -> &'static ApproximantCache {
        static CACHE: OnceLock<ApproximantCache> = OnceLock::new();
        CACHE.get_or_init(ApproximantCache::default)
    }

    pub fn set_store(&self, store: Option<Arc<dyn ApproximantStore>>) {
        *self.store.write().expect("cache poisoned") = store;
    }

    pub fn clear(&self) {
        self.entries.write().expect("cache poisoned").clear();
    }

    /// An approximant at `level` with precision at least `precision`.
    pub fn get(&self, p: u64, i: u64, level: u32, precision: u32) -> Result<Arc<IwasawaApproximant>> {
        if let Some(a) = self.entries.read().expect("cache poisoned").get(&(p, i, level)) {
            if a.precision >= precision {
                return Ok(Arc::clone(a));
            }
        }
        let key = ApproximantKey { p, i, level, precision };
        let store = self.store.read().expect("cache poisoned").clone();
        let loaded = store
            .as_ref()
            .and_then(|s| s.load(&key))
            .and_then(|coeffs| IwasawaApproximant::from_parts(p, i, level, precision, coeffs).ok());
        let approx = match loaded {
            Some(a) => Arc::new(a),
            None => {
                let a = Arc::new(stickelberger_approx(p, i, level, precision)?);
                if let Some(s) = &store {
                    s.store(&key, &a.coeffs);
                }
                a
            }
        };
        let mut entries = self.entries.write().expect("cache poisoned");
        let slot = entries.entry((p, i, level)).or_insert_with(|| Arc::clone(&approx));
        if slot.precision < approx.precision {
            *slot = Arc::clone(&approx);
        }
        Ok(approx)
    }
}

/// `λ_i`: index of the first unit coefficient of `f(T, ω^{1-i})`, read off
/// `g_1 mod p`. The search is confined to degrees below `p`; finding no unit
/// there would contradict `λ_i <= p - 1`.
pub fn lambda_invariant(p: u64, i: u64) -> Result<u32> {
    check_index(p, i)?;
    let g1 = ApproximantCache::global().get(p, i, 1, 1)?.with_precision(1)?;
    let series = g1.to_t_basis()?;
    match series.first_unit_index() {
        Some(j) => Ok(j as u32),
        None => Err(Error::TheoremViolation(format!(
            "no unit coefficient of f(T, ω^(1-{i})) in degrees < {p}: λ_{i} <= p - 1 fails for p = {p}"
        ))),
    }
}

/// Smallest level certifying `K` digits.
fn level_for(precision: u32) -> u32 {
    precision.saturating_sub(1).max(1)
}

/// `L_p(s, ω^{p-i}) mod p^K`.
pub fn lp_value(p: u64, i: u64, s: &Padic, precision: u32) -> Result<Padic> {
    lp_value_at_level(p, i, s, precision, level_for(precision))
}

/// [`lp_value`] through an explicitly chosen approximant level `>= K - 1`.
pub fn lp_value_at_level(p: u64, i: u64, s: &Padic, precision: u32, level: u32) -> Result<Padic> {
    if s.prime() != p {
        return Err(Error::PrimeMismatch(p as u128, s.prime() as u128));
    }
    if level + 1 < precision {
        return Err(Error::Usage(format!("level {level} cannot certify {precision} digits")));
    }
    let approx = ApproximantCache::global().get(p, i, level, precision)?;
    let v = approx.eval_at_s(s)?;
    v.with_precision(v.precision().min(precision))
}

/// Which route produced a Bernoulli term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermPath {
    ExactRational,
    LpSeries,
}

/// `(1 - p^{m-1}) B_m / m mod p^K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliTerm {
    pub value: Padic,
    pub path: TermPath,
}

/// Odd index `i` with `p - i ≡ m (mod p-1)`.
pub fn index_for_exponent(p: u64, m: u64) -> Result<u64> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::Usage(format!("m = {m} must be positive and even")));
    }
    let r = m % (p - 1);
    if r == 0 {
        return Err(Error::Domain(format!("p - 1 = {} divides m = {m} (pole of L_p)", p - 1)));
    }
    Ok(p - r)
}

/// `(1 - p^{m-1}) B_m / m mod p^K`, exactly below the Bernoulli cap and through
/// `-L_p(1 - m)` above it.
pub fn bm_over_m_mod(p: u64, m: u64, precision: u32) -> Result<BernoulliTerm> {
    let path = if m <= BernoulliTable::global().cap() { TermPath::ExactRational } else { TermPath::LpSeries };
    bm_over_m_mod_via(p, m, precision, path)
}

pub fn bm_over_m_mod_via(p: u64, m: u64, precision: u32, path: TermPath) -> Result<BernoulliTerm> {
    let i = index_for_exponent(p, m)?;
    let value = match path {
        TermPath::ExactRational => interpolation_target(p, m, precision)?.neg(),
        TermPath::LpSeries => {
            let s = Padic::from_i128(p, precision, 1 - m as i128)?;
            let v = lp_value_at_level(p, i, &s, precision, precision.max(1))?;
            if v.precision() < precision {
                return Err(Error::Resource(format!(
                    "series level {precision} certifies only {} digits for m = {m}",
                    v.precision()
                )));
            }
            v.neg()
        }
    };
    Ok(BernoulliTerm { value, path })
}

/// `Δ_u^k F(s) = Σ_j C(k, j) (-1)^{k-j} F(s + j u)`.
pub fn delta_power_with<F>(eval: F, u: &Padic, k: u32, s: &Padic) -> Result<Padic>
where
    F: Fn(&Padic) -> Result<Padic>,
{
    let mut acc: Option<Padic> = None;
    let mut binom: i128 = 1;
    for j in 0..=k {
        let point = s.add(&u.mul_i64(j as i64))?;
        let term = eval(&point)?.mul_i64(binom as i64);
        let term = if (k - j) % 2 == 1 { term.neg() } else { term };
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
        binom = binom * (k - j) as i128 / (j + 1) as i128;
    }
    Ok(acc.expect("k + 1 >= 1 terms"))
}

/// Literal `k`-fold iteration `Δ^k F(s) = Δ^{k-1} F(s+u) - Δ^{k-1} F(s)`.
pub fn delta_iterated_with<F>(eval: &F, u: &Padic, k: u32, s: &Padic) -> Result<Padic>
where
    F: Fn(&Padic) -> Result<Padic>,
{
    if k == 0 {
        return eval(s);
    }
    let shifted = s.add(u)?;
    delta_iterated_with(eval, u, k - 1, &shifted)?.sub(&delta_iterated_with(eval, u, k - 1, s)?)
}

/// `Δ_u^k L_p(s, ω^{p-i}) mod p^K`.
pub fn delta_power(p: u64, i: u64, u: &Padic, k: u32, s: &Padic, precision: u32) -> Result<Padic> {
    delta_power_with(|x| lp_value(p, i, x, precision), u, k, s)
}

/// Digits of `β = 1 - λ + (1 - p + i - s_0)/(p - 1)` and the exponent
/// `t_n = p - i + (p - 1) r_n(β)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaExpansion {
    pub n: u32,
    pub digits: Vec<u64>,
    pub r_n: u128,
    pub t_n: u128,
}

pub fn beta_and_t(p: u64, i: u64, lambda: u32, s0: &Padic, n: u32) -> Result<BetaExpansion> {
    check_index(p, i)?;
    if n == 0 {
        return Ok(BetaExpansion { n, digits: Vec::new(), r_n: 0, t_n: (p - i) as u128 });
    }
    if s0.precision() < n {
        return Err(Error::Resource(format!(
            "s0 carries {} digits; {n} are required for r_{n}(β)",
            s0.precision()
        )));
    }
    let s0 = s0.with_precision(n)?;
    let inv = Padic::from_i64(p, n, p as i64 - 1)?.invert()?;
    let numer = Padic::from_i64(p, n, 1 - p as i64 + i as i64)?.sub(&s0)?;
    let beta = numer.mul(&inv)?.add_i64(1 - lambda as i64);
    let digits = beta.digits();
    let r_n = beta.residue() as u128;
    let t_n = (p - i) as u128 + (p - 1) as u128 * r_n;
    if t_n % (p - 1) as u128 != ((p - i) % (p - 1)) as u128 || t_n % 2 != 0 {
        return Err(Error::Consistency(format!("t_{n} = {t_n} is not ≡ p - i (mod p - 1)")));
    }
    Ok(BetaExpansion { n, digits, r_n, t_n })
}

/// Certified zero of `Δ_u^{λ-1} L_p(s, ω^{p-i})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCertificate {
    pub p: u64,
    pub i: u64,
    pub u: u64,
    pub lambda_i: u32,
    pub target_precision: u32,
    pub working_precision: u32,
    pub step_exponent: u32,
    /// Residues mod `p` passing the seed test; a valid certificate has one.
    pub seeds: Vec<u64>,
    /// `s_0 mod p^{digits}`.
    pub s0: u64,
    pub s0_digits: u32,
    pub residual_valuation: u32,
    pub derivative_valuation: u32,
    /// `v(Δ^{λ} L_p(s_0))`, strictly below the working precision.
    pub next_difference_valuation: u32,
    pub beta_digits: Vec<u64>,
    /// `(n, t_n)` for `n = 0 ..= s0_digits`.
    pub t: Vec<(u32, u128)>,
}

impl ZeroCertificate {
    pub fn s0_element(&self) -> Result<Padic> {
        Padic::new(self.p, self.s0_digits, self.s0)
    }
}

/// Locate and certify the unique zero `s_0 ∈ Z_p` of
/// `G(s) = Δ_u^{λ_i - 1} L_p(s, ω^{p-i})` to residual valuation `K`.
///
/// Every residue mod `p` is tested as a seed (`v(G(c)) > v(G'(c))`); exactly
/// one must pass. The seed is refined mod `p^2` until the Hensel condition
/// holds, then Newton runs with the difference-quotient derivative of step
/// `p^h`, `h = ⌈K/2⌉ + 1`.
pub fn find_s0(p: u64, i: u64, u: &Padic, precision: u32) -> Result<ZeroCertificate> {
    check_index(p, i)?;
    let lambda = lambda_invariant(p, i)?;
    if lambda == 0 {
        return Err(Error::Domain(format!("i = {i} is a regular index of p = {p}; L_p has no zero")));
    }
    if precision == 0 {
        return Err(Error::Usage("target precision must be positive".into()));
    }
    let h = precision.div_ceil(2) + 1;
    let mut working = precision.max(h + 2);
    loop {
        match find_s0_at(p, i, u, precision, lambda, h, working) {
            Err(Error::PrecisionExhausted(_)) if working < precision + h + 2 => working += 1,
            other => return other,
        }
    }
}

fn find_s0_at(p: u64, i: u64, u: &Padic, target: u32, lambda: u32, h: u32, working: u32) -> Result<ZeroCertificate> {
    let u_w = Padic::new(p, working, u.residue())?;
    let g = |s: &Padic| delta_power(p, i, &u_w, lambda - 1, s, working);
    let map = DifferenceMap { f: g, step_exponent: h };

    let mut seeds = Vec::new();
    for c in 0..p {
        let s = Padic::new(p, working, c)?;
        let value = map.eval(&s)?;
        let slope = map.derivative(&s)?;
        if slope.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "difference quotient unresolved at s = {c} with {working} digits"
            )));
        }
        if value.is_zero() || value.valuation() > slope.valuation() {
            seeds.push(c);
        }
    }
    if seeds.len() != 1 {
        return Err(Error::UniquenessScan(format!(
            "p = {p}, i = {i}: expected exactly one seed mod p, found {seeds:?}"
        )));
    }

    let base = seeds[0];
    let mut start = None;
    for j in 0..p {
        let s = Padic::new(p, working, base + p * j)?;
        let value = map.eval(&s)?;
        let slope = map.derivative(&s)?;
        if value.is_zero() || value.valuation() > 2 * slope.valuation() {
            start = Some(s);
            break;
        }
    }
    let start = start.ok_or_else(|| {
        Error::NoCertifiedZero(format!("seed {base} mod {p} has no Hensel start mod p^2"))
    })?;

    let zero = hensel_zero(&map, &start, target)?;
    let padded = Padic::new(p, working, zero.zero.residue())?;
    let next = delta_power(p, i, &u_w, lambda, &padded, working)?;
    if next.is_zero() {
        return Err(Error::TheoremViolation(format!(
            "Δ^{lambda} L_p vanishes to {working} digits at s0 = {}",
            zero.zero
        )));
    }

    let digits = zero.zero.precision();
    let beta = beta_and_t(p, i, lambda, &zero.zero, digits)?;
    let t = (0..=digits)
        .map(|n| beta_and_t(p, i, lambda, &zero.zero, n).map(|b| (n, b.t_n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZeroCertificate {
        p,
        i,
        u: u.residue(),
        lambda_i: lambda,
        target_precision: target,
        working_precision: working,
        step_exponent: h,
        seeds,
        s0: zero.zero.residue(),
        s0_digits: digits,
        residual_valuation: zero.residual_valuation,
        derivative_valuation: zero.derivative_valuation,
        next_difference_valuation: next.valuation(),
        beta_digits: beta.digits,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_sums_are_integral_and_project() {
        let lvl2 = stickelberger_raw(7, 3, 2, 3).unwrap();
        let lvl1 = stickelberger_raw(7, 3, 1, 3).unwrap();
        let m = 343;
        let mut proj = vec![0u64; 7];
        for (e, c) in lvl2.iter().enumerate() {
            proj[e % 7] = (proj[e % 7] + c) % m;
        }
        assert_eq!(proj, lvl1);
    }

    #[test]
    fn calibration_example_node() {
        // p = 5, i = 3, m = 2: L_p(-1) = -(1-5)(1/12) = 1/3 ≡ 17 mod 25
        let target = interpolation_target(5, 2, 2).unwrap();
        assert_eq!(target.residue(), 17);
        let g = stickelberger_approx(5, 3, 1, 2).unwrap();
        let s = Padic::from_i64(5, 2, -1).unwrap();
        assert_eq!(g.eval_at_s(&s).unwrap().residue(), 17);
    }

    #[test]
    fn convention_is_universal() {
        let c = calibrate(37, 5).unwrap();
        for (p, i) in [(5, 3), (7, 3), (7, 5), (11, 7), (59, 15)] {
            assert_eq!(calibrate(p, i).unwrap(), c, "p={p} i={i}");
        }
        assert_eq!(c, Convention { orientation: -1, sign: -1 });
    }

    #[test]
    fn constant_term_is_minus_b1() {
        for (p, i) in [(37u64, 5u64), (7, 3), (11, 5)] {
            let g = stickelberger_approx(p, i, 1, 3).unwrap();
            let b = crate::bernoulli::b1_chi(p, i, 3).unwrap();
            assert_eq!(g.constant_term(), b.neg(), "p={p} i={i}");
        }
    }

    #[test]
    fn t_basis_agrees_with_group_ring() {
        let g = stickelberger_approx(7, 5, 1, 3).unwrap();
        let series = g.to_t_basis().unwrap();
        for t in [7u64, 14, 49, 7 * 3] {
            let t = Padic::new(7, 3, t).unwrap();
            assert_eq!(series.eval(&t).unwrap().with_precision(2).unwrap(), g.eval(&t).unwrap());
        }
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_invariant(5, 3).unwrap(), 0);
        assert_eq!(lambda_invariant(37, 5).unwrap(), 1);
        assert!(lambda_invariant(37, 4).is_err());
    }

    #[test]
    fn index_for_exponent_classes() {
        assert_eq!(index_for_exponent(37, 32).unwrap(), 5);
        assert_eq!(index_for_exponent(37, 68).unwrap(), 5);
        assert_eq!(index_for_exponent(7, 4).unwrap(), 3);
        assert!(matches!(index_for_exponent(7, 12), Err(Error::Domain(_))));
        assert!(index_for_exponent(7, 3).is_err());
    }

    #[test]
    fn delta_of_constant_vanishes() {
        let u = Padic::from_i64(37, 3, 36).unwrap();
        let s = Padic::from_i64(37, 3, 11).unwrap();
        let c = Padic::from_i64(37, 3, 999).unwrap();
        for k in 1..4 {
            assert!(delta_power_with(|_| Ok(c), &u, k, &s).unwrap().is_zero());
        }
        assert_eq!(delta_power_with(|_| Ok(c), &u, 0, &s).unwrap(), c);
    }

    #[test]
    fn beta_n_zero() {
        let s0 = Padic::new(37, 2, 100).unwrap();
        let b = beta_and_t(37, 5, 1, &s0, 0).unwrap();
        assert_eq!((b.digits.len(), b.r_n, b.t_n), (0, 0, 32));
        assert!(matches!(beta_and_t(37, 5, 1, &s0, 3), Err(Error::Resource(_))));
    }
}

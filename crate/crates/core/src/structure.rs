//! Finite abelian p-groups attached to `p`: `S_{n,i}` from Smith normal form,
//! the two structure formulas for `V_n^+`, and the per-prime spectrum report.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bernoulli::{b1_chi, irregular_scan, is_odd_prime, s_invariant, IrregularDatum};
use crate::error::{Error, Result};
use crate::iwasawa::{lambda_invariant, ApproximantCache, IwasawaApproximant};
use crate::padic::prime_power;
use crate::snf::{DivisorSequence, ResidueMatrix};
use crate::word::Word;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `p^n` for which `S_{n,i}` is computed.
pub const DEFAULT_MATRIX_CAP: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ComputedSnf,
    /// `r_0 Z/p^{n+1} ⊕ (λ - r_0) Z/p^n`, as announced.
    FormulaAnnounced,
    /// `r_0 Z/p^n ⊕ (λ - r_0) Z/p^{n-1}` (Ullom).
    FormulaUllom,
}

/// `⊕_j Z/p^{e_j}` with `e_1 >= e_2 >= ... > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupDescriptor {
    pub prime: u64,
    pub exponents: Vec<u32>,
    pub provenance: Provenance,
}

impl AbelianGroupDescriptor {
    /// Drops trivial factors and sorts descending.
    pub fn new(prime: u64, mut exponents: Vec<u32>, provenance: Provenance) -> Self {
        exponents.retain(|&e| e > 0);
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Self { prime, exponents, provenance }
    }

    pub fn trivial(prime: u64, provenance: Provenance) -> Self {
        Self::new(prime, Vec::new(), provenance)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `log_p` of the order.
    pub fn order_exponent(&self) -> u64 {
        self.exponents.iter().map(|&e| e as u64).sum()
    }

    /// `dim_{F_p} G / pG`.
    pub fn factor_count(&self) -> usize {
        self.exponents.len()
    }

    /// Same group, ignoring provenance.
    pub fn same_group(&self, other: &Self) -> bool {
        self.prime == other.prime && self.exponents == other.exponents
    }
}

impl fmt::Display for AbelianGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|&e| if e == 1 { format!("Z/{}", self.prime) } else { format!("Z/{}^{e}", self.prime) })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Basis of `Z/p^N[T]/(P_n(T))` used for the multiplication matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `(1+T)^d`: multiplication by `g` is a circulant matrix.
    GroupRing,
    /// `T^j`, reduced modulo `P_n(T) = (1+T)^{p^n} - 1`.
    Monomial,
}

/// `s_i`, or `0` for a regular index.
pub fn s_or_zero(p: u64, i: u64) -> Result<u32> {
    if b1_chi(p, i, 1)?.is_zero() {
        s_invariant(p, i)
    } else {
        Ok(0)
    }
}

fn approximant_at(p: u64, i: u64, n: u32, precision: u32) -> Result<IwasawaApproximant> {
    let g = ApproximantCache::global().get(p, i, n.max(1), precision)?;
    g.with_precision(precision)?.project(n)
}

fn group_ring_matrix(g: &IwasawaApproximant) -> Result<ResidueMatrix<u64>> {
    let c = g.group_ring_coeffs();
    let q = c.len();
    let mut m = ResidueMatrix::zeros(g.p(), g.precision(), q, q)?;
    for j in 0..q {
        for (d, &x) in c.iter().enumerate() {
            m.set((d + j) % q, j, x);
        }
    }
    Ok(m)
}

fn monomial_matrix(g: &IwasawaApproximant) -> Result<ResidueMatrix<u64>> {
    let (p, precision) = (g.p(), g.precision());
    let modulus = prime_power(p, precision)?;
    let series = g.to_t_basis()?;
    let q = series.truncation();
    // T^q ≡ -Σ_{0<k<q} C(q, k) T^k (mod P_n)
    let mut binom = vec![0u64; q + 1];
    binom[0] = 1;
    for r in 1..=q {
        for k in (1..=r).rev() {
            binom[k] = u64::add_mod(binom[k], binom[k - 1], modulus);
        }
    }
    let mut column: Vec<u64> = series.coeffs().iter().map(|c| c.residue()).collect();
    let mut m = ResidueMatrix::zeros(p, precision, q, q)?;
    for j in 0..q {
        for (k, &x) in column.iter().enumerate() {
            m.set(k, j, x);
        }
        let top = column[q - 1];
        column.rotate_right(1);
        column[0] = 0;
        for k in 1..q {
            column[k] = u64::sub_mod(column[k], u64::mul_mod(top, binom[k], modulus), modulus);
        }
    }
    Ok(m)
}

/// `S_{n,i} ≅ Z_p[T]/(P_n(T), f(T, ω^{1-i}))` from the elementary divisors of
/// multiplication by `g_n` at precision `N`.
pub fn sni_structure(p: u64, i: u64, n: u32, precision: u32) -> Result<AbelianGroupDescriptor> {
    sni_structure_with(p, i, n, precision, Basis::GroupRing, DEFAULT_MATRIX_CAP)
}

pub fn sni_structure_with(
    p: u64,
    i: u64,
    n: u32,
    precision: u32,
    basis: Basis,
    matrix_cap: u64,
) -> Result<AbelianGroupDescriptor> {
    let size = prime_power(p, n)?;
    if size > matrix_cap {
        return Err(Error::Resource(format!("p^n = {size} exceeds the matrix cap {matrix_cap}")));
    }
    let s = s_or_zero(p, i)?;
    if precision <= n + s + 1 {
        return Err(Error::Usage(format!(
            "precision {precision} must exceed n + s_i + 1 = {}",
            n + s + 1
        )));
    }
    let g = approximant_at(p, i, n, precision)?;
    let matrix = match basis {
        Basis::GroupRing => group_ring_matrix(&g)?,
        Basis::Monomial => monomial_matrix(&g)?,
    };
    descriptor_from_divisors(p, &matrix.smith_normal_form())
}

fn descriptor_from_divisors(p: u64, divisors: &DivisorSequence) -> Result<AbelianGroupDescriptor> {
    if divisors.is_saturated() {
        return Err(Error::PrecisionSaturated { precision: divisors.precision });
    }
    Ok(AbelianGroupDescriptor::new(p, divisors.cokernel_exponents(), Provenance::ComputedSnf))
}

/// `Z/p^{n+s_i} ⊕ (λ_i - 1) Z/p^n` for an irregular index.
pub fn sni_formula(p: u64, n: u32, s: u32, lambda: u32) -> AbelianGroupDescriptor {
    if lambda == 0 {
        return AbelianGroupDescriptor::trivial(p, Provenance::FormulaAnnounced);
    }
    let mut exponents = vec![n + s];
    exponents.extend(std::iter::repeat(n).take(lambda as usize - 1));
    AbelianGroupDescriptor::new(p, exponents, Provenance::FormulaAnnounced)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VPlusVariant {
    Announced,
    Ullom,
}

/// `V_n^+` from `r_0` and `λ`, `n >= 1`.
pub fn v_plus_structure(
    p: u64,
    r0: u32,
    lambda: u32,
    n: u32,
    variant: VPlusVariant,
) -> Result<AbelianGroupDescriptor> {
    if n == 0 {
        return Err(Error::Usage("V_n^+ is defined for n >= 1".into()));
    }
    if r0 > lambda {
        return Err(Error::Consistency(format!("r0 = {r0} exceeds λ = {lambda}")));
    }
    let (high, low, provenance) = match variant {
        VPlusVariant::Announced => (n + 1, n, Provenance::FormulaAnnounced),
        VPlusVariant::Ullom => (n, n - 1, Provenance::FormulaUllom),
    };
    let mut exponents = vec![high; r0 as usize];
    exponents.extend(std::iter::repeat(low).take((lambda - r0) as usize));
    Ok(AbelianGroupDescriptor::new(p, exponents, provenance))
}

/// `log_p |V_n^+| = r_0 + r_1 + ... + r_{n-1}` with `r_j = λ` for `j >= 1`.
pub fn cardinality_count(r0: u32, lambda: u32, n: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    r0 as u64 + (n as u64 - 1) * lambda as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularEntry {
    pub k: u64,
    pub i: u64,
    pub s: Option<u32>,
    pub lambda: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureEntry {
    /// Cyclic exponents of `S_{n,i}` keyed by `i`.
    #[serde(rename = "S_ni")]
    pub s_ni: BTreeMap<u64, Vec<u32>>,
    #[serde(rename = "V_ullom", skip_serializing_if = "Option::is_none")]
    pub v_ullom: Option<Vec<u32>>,
    #[serde(rename = "V_announced", skip_serializing_if = "Option::is_none")]
    pub v_announced: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    pub semiregular_assumed: bool,
    pub rn_equals_lambda_assumed: bool,
    /// The announced `V_n^+` order exceeds the cardinality count by `p^λ`.
    pub announced_index_shift: bool,
    /// Named consistency checks; `false` is a finding.
    pub checks: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema_version: u32,
    pub prime: u64,
    pub r0: u32,
    pub irregular: Vec<IrregularEntry>,
    pub lambda_total: Option<u32>,
    pub nu: Option<u32>,
    pub km_verdict: Option<bool>,
    pub structures: BTreeMap<u32, StructureEntry>,
    pub flags: ReportFlags,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<FieldError>,
}

impl SpectrumReport {
    /// Every consistency check passed and no field failed.
    pub fn all_checks_pass(&self) -> bool {
        self.errors.is_empty() && self.flags.checks.values().all(|&ok| ok)
    }
}

/// Options for [`spectrum_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub n_max: u32,
    /// Floor for the SNF precision; each `(n, i)` uses at least `n + s_i + 3`.
    pub precision: Option<u32>,
    pub matrix_cap: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { n_max: 1, precision: None, matrix_cap: DEFAULT_MATRIX_CAP }
    }
}

/// Full pipeline for one prime. Field failures are annotated, not fatal.
pub fn spectrum_report(p: u64, options: &ReportOptions) -> Result<SpectrumReport> {
    if !is_odd_prime(p) {
        return Err(Error::Usage(format!("{p} is not an odd prime")));
    }
    let mut errors = Vec::new();
    let mut note = |field: String, e: Error| errors.push(FieldError { field, message: e.to_string() });

    let scan: Vec<IrregularDatum> = irregular_scan(p)?;
    let mut irregular = Vec::with_capacity(scan.len());
    for d in &scan {
        let s = s_invariant(p, d.i).map_err(|e| note(format!("irregular[{}].s", d.i), e)).ok();
        let lambda = lambda_invariant(p, d.i).map_err(|e| note(format!("irregular[{}].lambda", d.i), e)).ok();
        irregular.push(IrregularEntry { k: d.k, i: d.i, s, lambda });
    }
    let r0 = irregular.len() as u32;
    let lambda_total = irregular.iter().map(|e| e.lambda).sum::<Option<u32>>();
    let nu = irregular.iter().map(|e| e.s).sum::<Option<u32>>();
    let km_verdict = irregular.iter().map(|e| e.s.map(|s| s == 1)).collect::<Option<Vec<_>>>().map(|v| v.iter().all(|&b| b));

    let mut checks = BTreeMap::new();
    let mut structures = BTreeMap::new();
    for n in 0..=options.n_max {
        let mut entry = StructureEntry::default();
        for e in &irregular {
            let Some(s) = e.s else { continue };
            let precision = options.precision.unwrap_or(0).max(n + s + 3);
            match sni_structure_with(p, e.i, n, precision, Basis::GroupRing, options.matrix_cap) {
                Ok(g) => {
                    if let Some(lambda) = e.lambda {
                        let formula = sni_formula(p, n, s, lambda);
                        checks.insert(format!("snf_matches_formula.n{n}.i{}", e.i), g.same_group(&formula));
                        if n == 1 {
                            checks.insert(format!("factor_count_equals_lambda.i{}", e.i), g.factor_count() == lambda as usize);
                        }
                    }
                    entry.s_ni.insert(e.i, g.exponents);
                }
                Err(err) => note(format!("structures[{n}].S_ni[{}]", e.i), err),
            }
        }
        if n >= 1 && entry.s_ni.len() == irregular.len() {
            if let Some(lambda) = lambda_total {
                let dims: usize = entry.s_ni.values().map(Vec::len).sum();
                checks.insert(format!("total_factor_count_equals_lambda.n{n}"), dims == lambda as usize);
            }
        }
        if n >= 1 {
            if let Some(lambda) = lambda_total {
                let ullom = v_plus_structure(p, r0, lambda, n, VPlusVariant::Ullom)?;
                let announced = v_plus_structure(p, r0, lambda, n, VPlusVariant::Announced)?;
                let count = cardinality_count(r0, lambda, n);
                checks.insert(format!("ullom_order_matches_count.n{n}"), ullom.order_exponent() == count);
                checks.insert(
                    format!("announced_order_excess_is_lambda.n{n}"),
                    announced.order_exponent() == count + lambda as u64,
                );
                entry.v_ullom = Some(ullom.exponents);
                entry.v_announced = Some(announced.exponents);
            }
        }
        structures.insert(n, entry);
    }
    if let Some(lambda) = lambda_total {
        checks.insert("r0_le_lambda".into(), r0 <= lambda);
    }
    if let Some(nu) = nu {
        checks.insert("r0_le_nu".into(), r0 <= nu);
    }

    Ok(SpectrumReport {
        schema_version: SCHEMA_VERSION,
        prime: p,
        r0,
        irregular,
        lambda_total,
        nu,
        km_verdict,
        structures,
        flags: ReportFlags {
            semiregular_assumed: true,
            rn_equals_lambda_assumed: true,
            announced_index_shift: lambda_total.is_some_and(|l| l > 0),
            checks,
        },
        errors,
    })
}

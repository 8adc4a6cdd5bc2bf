//! Newton/Hensel refinement of simple zeros of p-adic maps.

use crate::error::{Error, Result};
use crate::padic::{prime_power, PadicElement};
use crate::series::TruncatedSeries;
use crate::word::Word;

/// A map `Z_p -> Z_p` that can be evaluated and differentiated.
pub trait PadicMap<W: Word> {
    fn eval(&self, s: &PadicElement<W>) -> Result<PadicElement<W>>;
    fn derivative(&self, s: &PadicElement<W>) -> Result<PadicElement<W>>;
}

/// Map given by two closures: the function and its analytic derivative.
pub struct AnalyticMap<F, D> {
    pub f: F,
    pub df: D,
}

impl<W, F, D> PadicMap<W> for AnalyticMap<F, D>
where
    W: Word,
    F: Fn(&PadicElement<W>) -> Result<PadicElement<W>>,
    D: Fn(&PadicElement<W>) -> Result<PadicElement<W>>,
{
    fn eval(&self, s: &PadicElement<W>) -> Result<PadicElement<W>> {
        (self.f)(s)
    }

    fn derivative(&self, s: &PadicElement<W>) -> Result<PadicElement<W>> {
        (self.df)(s)
    }
}

/// Derivative by the difference quotient `(F(s + p^h) - F(s)) / p^h`.
pub struct DifferenceMap<F> {
    pub f: F,
    pub step_exponent: u32,
}

impl<W, F> PadicMap<W> for DifferenceMap<F>
where
    W: Word,
    F: Fn(&PadicElement<W>) -> Result<PadicElement<W>>,
{
    fn eval(&self, s: &PadicElement<W>) -> Result<PadicElement<W>> {
        (self.f)(s)
    }

    fn derivative(&self, s: &PadicElement<W>) -> Result<PadicElement<W>> {
        let h = self.step_exponent;
        let step = PadicElement::new(s.prime(), s.precision(), prime_power(s.prime(), h)?)?;
        let upper = (self.f)(&s.add(&step)?)?;
        let lower = (self.f)(s)?;
        upper.sub(&lower)?.div_by_p_pow(h)
    }
}

impl<W: Word> PadicMap<W> for TruncatedSeries<W> {
    fn eval(&self, s: &PadicElement<W>) -> Result<PadicElement<W>> {
        TruncatedSeries::eval(self, s)
    }

    fn derivative(&self, s: &PadicElement<W>) -> Result<PadicElement<W>> {
        TruncatedSeries::derivative(self).eval(s)
    }
}

/// Outcome of a certified Newton run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenselZero<W: Word> {
    /// The zero, carrying only the digits the residual certifies.
    pub zero: PadicElement<W>,
    /// `v(F(zero))` measured after truncation.
    pub residual_valuation: u32,
    /// `v(F'(zero))`.
    pub derivative_valuation: u32,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 64;

/// Refine `c0` to a zero `s` with `v(F(s)) >= target`.
///
/// Requires `v(F(c0)) > 2 v(F'(c0))`; then the zero is unique in the disc
/// `c0 + p^(v(F(c0)) - v(F'(c0))) Z_p`. The residual is re-evaluated at the
/// returned point, never assumed.
pub fn hensel_zero<W: Word, M: PadicMap<W>>(
    map: &M,
    c0: &PadicElement<W>,
    target: u32,
) -> Result<HenselZero<W>> {
    let f0 = map.eval(c0)?;
    let d0 = map.derivative(c0)?;
    if d0.is_zero() {
        return Err(Error::NoCertifiedZero(format!(
            "derivative vanishes to working precision at {c0}"
        )));
    }
    let (vf, vd) = (f0.valuation(), d0.valuation());
    if !f0.is_zero() && vf <= 2 * vd {
        return Err(Error::NoCertifiedZero(format!(
            "Hensel condition fails at {c0}: v(F) = {vf}, v(F') = {vd}"
        )));
    }

    let mut s = *c0;
    let mut last_vf = if f0.is_zero() { f0.precision() } else { vf };
    let mut f = f0;
    let mut d = d0;
    for iteration in 0..MAX_ITERATIONS {
        if f.precision() < target {
            return Err(Error::PrecisionExhausted(format!(
                "map evaluates to only {} digits, {target} required",
                f.precision()
            )));
        }
        if f.valuation() >= target {
            return finish(map, &s, d.valuation(), target, iteration);
        }
        let step = f.div_exact(&d)?;
        // Pad the step back to the iterate's precision; the padded digits are
        // a representative choice, certified by the residual afterwards.
        let step = PadicElement::new(s.prime(), s.precision(), step.residue())?;
        s = s.sub(&step)?;
        f = map.eval(&s)?;
        d = map.derivative(&s)?;
        let vf = f.valuation();
        if !f.is_zero() && vf <= last_vf {
            return Err(Error::PrecisionExhausted(format!(
                "Newton stalled at residual valuation {vf}"
            )));
        }
        last_vf = vf;
    }
    Err(Error::PrecisionExhausted(format!("no convergence after {MAX_ITERATIONS} steps")))
}

fn finish<W: Word, M: PadicMap<W>>(
    map: &M,
    s: &PadicElement<W>,
    vd: u32,
    target: u32,
    iterations: usize,
) -> Result<HenselZero<W>> {
    let digits = target.saturating_sub(vd).max(1).min(s.precision());
    // Evaluate the residual at the truncated zero; its padding is zero.
    let truncated = s.with_precision(digits)?;
    let padded = PadicElement::new(s.prime(), s.precision(), truncated.residue())?;
    let residual = map.eval(&padded)?;
    let residual_valuation = residual.valuation();
    if residual_valuation < target {
        return Err(Error::PrecisionExhausted(format!(
            "residual valuation {residual_valuation} below target {target} after truncation"
        )));
    }
    Ok(HenselZero { zero: truncated, residual_valuation, derivative_valuation: vd, iterations })
}

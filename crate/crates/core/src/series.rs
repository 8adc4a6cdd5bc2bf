//! Truncated power series over `Z/p^N`.

use crate::error::{Error, Result};
use crate::padic::PadicElement;
use crate::word::Word;

/// `c_0 + c_1 T + ... + c_{M-1} T^{M-1} + O(T^M)`, all coefficients at a
/// common prime and precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries<W: Word> {
    prime: W,
    precision: u32,
    coeffs: Vec<PadicElement<W>>,
}

impl<W: Word> TruncatedSeries<W> {
    pub fn new(coeffs: Vec<PadicElement<W>>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Usage("a truncated series needs at least one coefficient".into()))?;
        let (prime, precision) = (first.prime(), first.precision());
        for c in &coeffs {
            if c.prime() != prime {
                return Err(Error::PrimeMismatch(prime.to_u128(), c.prime().to_u128()));
            }
            if c.precision() != precision {
                return Err(Error::Usage(format!(
                    "coefficient precisions differ: {} vs {precision}",
                    c.precision()
                )));
            }
        }
        Ok(Self { prime, precision, coeffs })
    }

    pub fn from_residues(prime: W, precision: u32, residues: &[W]) -> Result<Self> {
        let coeffs = residues
            .iter()
            .map(|&r| PadicElement::new(prime, precision, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn prime(&self) -> W {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Number of retained coefficients `M`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[PadicElement<W>] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&PadicElement<W>> {
        self.coeffs.get(j)
    }

    /// Horner evaluation at `t` with `v(t) >= 1`. The discarded tail
    /// contributes valuation `>= M`, so the result carries `min(N, M)` digits
    /// (or fewer if `t` itself is less precise).
    pub fn eval(&self, t: &PadicElement<W>) -> Result<PadicElement<W>> {
        if t.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime.to_u128(), t.prime().to_u128()));
        }
        if t.valuation() == 0 {
            return Err(Error::Domain(format!(
                "series evaluation needs v(t) >= 1, got t = {t}"
            )));
        }
        let mut acc = *self.coeffs.last().expect("nonempty");
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(t)?.add(c)?;
        }
        let m = u32::try_from(self.coeffs.len()).unwrap_or(u32::MAX);
        acc.with_precision(acc.precision().min(m))
    }

    /// Formal derivative, truncated one term shorter (at least one term).
    pub fn derivative(&self) -> Self {
        let coeffs: Vec<_> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.mul_i64(j as i64))
            .collect();
        if coeffs.is_empty() {
            let zero = PadicElement::zero(self.prime, self.precision).expect("valid parameters");
            return Self { coeffs: vec![zero], ..self.clone() };
        }
        Self { coeffs, ..self.clone() }
    }

    /// Index of the first unit coefficient, if any.
    pub fn first_unit_index(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.is_unit())
    }
}

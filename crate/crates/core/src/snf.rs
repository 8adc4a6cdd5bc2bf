//! Smith normal form over the local ring `Z/p^N`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{prime_power, valuation_u128, PadicElement};
use crate::word::Word;

/// An elementary divisor `p^e`. Divisors that vanish at the working precision
/// are only known to be at least `p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Exponent {
    Exact(u32),
    AtLeast(u32),
}

impl Exponent {
    pub fn is_saturated(&self) -> bool {
        matches!(self, Exponent::AtLeast(_))
    }

    /// The exponent, or the precision bound for saturated entries.
    pub fn bound(&self) -> u32 {
        match *self {
            Exponent::Exact(e) | Exponent::AtLeast(e) => e,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Exact(e) => write!(f, "{e}"),
            Exponent::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// Elementary divisor exponents `e_1 <= e_2 <= ...` of a matrix over `Z/p^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorSequence {
    pub prime: u128,
    pub precision: u32,
    pub exponents: Vec<Exponent>,
}

impl DivisorSequence {
    pub fn is_saturated(&self) -> bool {
        self.exponents.iter().any(Exponent::is_saturated)
    }

    /// Exponents of the nontrivial cyclic factors `Z/p^e`, `e > 0`, of the
    /// cokernel, saturated entries counted at the precision bound.
    pub fn cokernel_exponents(&self) -> Vec<u32> {
        self.exponents.iter().map(Exponent::bound).filter(|&e| e > 0).collect()
    }
}

/// Dense row-major matrix of raw residues modulo `p^N`.
#[derive(Clone, Debug)]
pub struct ResidueMatrix<W: Word> {
    prime: W,
    precision: u32,
    modulus: W,
    rows: usize,
    cols: usize,
    data: Vec<W>,
}

impl<W: Word> ResidueMatrix<W> {
    pub fn zeros(prime: W, precision: u32, rows: usize, cols: usize) -> Result<Self> {
        let modulus = prime_power(prime, precision)?;
        Ok(Self { prime, precision, modulus, rows, cols, data: vec![W::zero(); rows * cols] })
    }

    pub fn from_elements(entries: &[Vec<PadicElement<W>>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let first = entries
            .iter()
            .flatten()
            .next()
            .ok_or_else(|| Error::Usage("empty matrix".into()))?;
        let mut m = Self::zeros(first.prime(), first.precision(), rows, cols)?;
        for (r, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Usage("ragged matrix".into()));
            }
            for (c, x) in row.iter().enumerate() {
                if x.prime() != m.prime {
                    return Err(Error::PrimeMismatch(m.prime.to_u128(), x.prime().to_u128()));
                }
                if x.precision() != m.precision {
                    return Err(Error::Usage("matrix entries must share precision".into()));
                }
                m.set(r, c, x.residue());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> W {
        self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> W {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: W) {
        self.data[r * self.cols + c] = v % self.modulus;
    }

    fn valuation(&self, x: W) -> u32 {
        if x.is_zero() {
            self.precision
        } else {
            valuation_u128(x.to_u128(), self.prime.to_u128())
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// Elementary divisors by pivoting on an entry of minimal valuation
    /// (ties: smallest row, then smallest column), normalising the pivot to
    /// `p^v` and clearing its row and column.
    pub fn smith_normal_form(mut self) -> DivisorSequence {
        let m = self.modulus;
        let p = self.prime;
        let size = self.rows.min(self.cols);
        let mut exponents = Vec::with_capacity(size);

        for t in 0..size {
            let mut best: Option<(u32, usize, usize)> = None;
            'search: for r in t..self.rows {
                for c in t..self.cols {
                    let x = self.get(r, c);
                    if x.is_zero() {
                        continue;
                    }
                    let v = self.valuation(x);
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                        if v == 0 {
                            break 'search;
                        }
                    }
                }
            }
            let Some((v, r, c)) = best else {
                exponents.extend((t..size).map(|_| Exponent::AtLeast(self.precision)));
                break;
            };
            self.swap_rows(t, r);
            self.swap_cols(t, c);

            // Scale the pivot row so the pivot becomes exactly p^v.
            let pv = prime_power(p, v).expect("v below precision");
            let unit = PadicElement::new(p, self.precision, self.get(t, t) / pv)
                .and_then(|u| u.invert())
                .expect("pivot unit part is invertible")
                .residue();
            let cols = self.cols;
            for c in t..cols {
                let x = self.data[t * cols + c];
                self.data[t * cols + c] = W::mul_mod(x, unit, m);
            }

            // Clear column t below the pivot; every entry is divisible by p^v.
            let (head, tail) = self.data.split_at_mut((t + 1) * cols);
            let pivot_row = &head[t * cols..];
            for row in tail.chunks_mut(cols) {
                let x = row[t];
                if x.is_zero() {
                    continue;
                }
                let factor = x / pv;
                for c in t..cols {
                    let y = pivot_row[c];
                    if !y.is_zero() {
                        row[c] = W::sub_mod(row[c], W::mul_mod(factor, y, m), m);
                    }
                }
                debug_assert!(row[t].is_zero());
            }
            // Column operations only touch row t once column t is clear.
            for c in t + 1..cols {
                self.data[t * cols + c] = W::zero();
            }
            exponents.push(Exponent::Exact(v));
        }
        exponents.sort();
        DivisorSequence { prime: p.to_u128(), precision: self.precision, exponents }
    }
}

/// Elementary divisors of a square matrix of p-adic elements.
pub fn smith_normal_form<W: Word>(matrix: &[Vec<PadicElement<W>>]) -> Result<DivisorSequence> {
    let m = ResidueMatrix::from_elements(matrix)?;
    if m.rows() != m.cols() {
        return Err(Error::Usage("smith_normal_form expects a square matrix".into()));
    }
    Ok(m.smith_normal_form())
}

//! Brute-force truncated free associative algebra.
//!
//! Series are plain maps from words to rationals, multiplied by
//! concatenation and truncated at a fixed degree. Nothing here touches the
//! matrix pipeline; it is the reference the matrix results are checked
//! against.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Rational;
use crate::series::{Alphabet, NCSeries, SeriesSpec, Word};

/// Highest degree the oracle is meant to be run at.
pub const ORACLE_MAX_ORDER: usize = 10;

/// Noncommutative polynomial truncated at `max_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedNCSeries {
    alphabet: Alphabet,
    max_degree: usize,
    terms: BTreeMap<Word, Rational>,
}

impl TruncatedNCSeries {
    pub fn zero(alphabet: Alphabet, max_degree: usize) -> Self {
        Self {
            alphabet,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(alphabet: Alphabet, max_degree: usize, c: Rational) -> Self {
        let mut s = Self::zero(alphabet, max_degree);
        s.add_term(Word::empty(), c);
        s
    }

    pub fn letter(alphabet: Alphabet, max_degree: usize, letter: u8) -> Self {
        let mut s = Self::zero(alphabet, max_degree);
        s.add_term(Word::new(vec![letter]), Rational::one());
        s
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn coefficient(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c · w`; words beyond the truncation degree are dropped.
    pub fn add_term(&mut self, w: Word, c: Rational) {
        if w.len() > self.max_degree || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet || self.max_degree != other.max_degree {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    /// Concatenation product, skipping pairs whose total length exceeds the
    /// truncation degree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                if wa.len() + wb.len() <= self.max_degree {
                    out.add_term(wa.concat(wb), ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// `Σ_k c_k a^k` for a series `a` without constant term.
    pub fn compose(&self, f: &SeriesSpec) -> Result<Self> {
        if !self.coefficient(&Word::empty()).is_zero() {
            return Err(Error::NonZeroConstant);
        }
        let mut out = Self::constant(self.alphabet.clone(), self.max_degree, f.coefficient(0));
        let mut power = Self::constant(self.alphabet.clone(), self.max_degree, Rational::one());
        for k in 1..=self.max_degree {
            power = power.mul(self)?;
            out = out.add(&power.scale(&f.coefficient(k)))?;
        }
        Ok(out)
    }

    /// Truncated degree-`n` slice as a plain series.
    pub fn homogeneous_part(&self, degree: usize) -> NCSeries {
        let mut out = NCSeries::zero(self.alphabet.clone(), degree);
        for (w, c) in &self.terms {
            if w.len() == degree {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    }

    pub fn to_series(&self) -> NCSeries {
        let mut out = NCSeries::zero(self.alphabet.clone(), self.max_degree);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

pub fn nc_mul(a: &TruncatedNCSeries, b: &TruncatedNCSeries) -> Result<TruncatedNCSeries> {
    a.mul(b)
}

/// `Σ_{k=0}^{n} a^k / k!`; requires a zero constant term.
pub fn nc_exp(a: &TruncatedNCSeries) -> Result<TruncatedNCSeries> {
    a.compose(&SeriesSpec::exp())
}

/// `Σ_{q=1}^{n} (-1)^{q+1}/q · (a - 1)^q`; requires constant term 1.
pub fn nc_log(a: &TruncatedNCSeries) -> Result<TruncatedNCSeries> {
    if !a.coefficient(&Word::empty()).is_one() {
        return Err(Error::LogConstant);
    }
    let one = TruncatedNCSeries::constant(a.alphabet.clone(), a.max_degree, Rational::one());
    let d = a.add(&one.scale(&-Rational::one()))?;
    let mut out = TruncatedNCSeries::zero(a.alphabet.clone(), a.max_degree);
    let mut power = one;
    for q in 1..=a.max_degree {
        power = power.mul(&d)?;
        let sign = if q % 2 == 1 { 1 } else { -1 };
        out = out.add(&power.scale(&Rational::new(BigInt::from(sign), BigInt::from(q))))?;
    }
    Ok(out)
}

/// Degree-`n` part of `log(f_0(a_0) f_1(a_1) ⋯)` computed in the free
/// algebra, one series per factor.
pub fn oracle_bch(n: usize, series: &[SeriesSpec]) -> Result<NCSeries> {
    if n == 0 {
        return Err(Error::InvalidOrder {
            got: n,
            max: ORACLE_MAX_ORDER,
        });
    }
    let alphabet = Alphabet::standard(series.len())?;
    for f in series {
        let c0 = f.coefficient(0);
        if !c0.is_one() {
            return Err(Error::NonUnitConstant(c0.to_string()));
        }
    }
    let mut product = TruncatedNCSeries::constant(alphabet.clone(), n, Rational::one());
    for (letter, f) in series.iter().enumerate() {
        let a = TruncatedNCSeries::letter(alphabet.clone(), n, letter as u8);
        product = product.mul(&a.compose(f)?)?;
    }
    Ok(nc_log(&product)?.homogeneous_part(n))
}

/// [`oracle_bch`] with every factor exponential.
pub fn oracle_bch_exp(n: usize, m: usize) -> Result<NCSeries> {
    oracle_bch(n, &vec![SeriesSpec::exp(); m])
}

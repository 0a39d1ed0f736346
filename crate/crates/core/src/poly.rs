//! Exact rationals and multilinear polynomials in position-indexed commuting
//! variables.
//!
//! A variable is identified by a letter family `k >= 1` and a position
//! `0..n`. Family 1 holds the σ variables, family 2 the τ variables, and so
//! on. Every monomial is multilinear: a position carries at most one variable
//! and only to the first power.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Largest order representable by the position bitmasks.
pub const MAX_POSITIONS: usize = 64;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

pub fn rat_arith(a: &Rational, b: &Rational, op: RatOp) -> Result<Rational> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => return checked_div(a, b),
    })
}

/// `1/k!`.
pub fn inv_factorial(k: usize) -> Rational {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    Rational::new(BigInt::one(), f)
}

/// A multilinear monomial. `masks[k - 1]` holds the positions carrying a
/// family-`k` variable; trailing empty masks are never stored, so equal
/// monomials compare equal regardless of how many families are in play.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    masks: SmallVec<[u64; 2]>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Self::default()
    }

    /// A single variable of `family` (>= 1) at `position` (0-based).
    pub fn var(family: usize, position: usize) -> Self {
        assert!(family >= 1, "family 0 is the base letter and carries no variable");
        assert!(position < MAX_POSITIONS);
        let mut masks = SmallVec::from_elem(0, family);
        masks[family - 1] = 1u64 << position;
        Self { masks }
    }

    /// σ variables at the given 0-based positions.
    pub fn sigma(positions: &[usize]) -> Self {
        let mut mask = 0u64;
        for &p in positions {
            mask |= 1 << p;
        }
        Self::from_masks(&[mask])
    }

    pub fn from_masks(masks: &[u64]) -> Self {
        let mut m = Self {
            masks: masks.iter().copied().collect(),
        };
        m.trim();
        debug_assert!(m.disjoint_families(), "family masks overlap");
        m
    }

    /// Builds a monomial from its position vector: `digits[i]` is 0 for no
    /// variable or the family index at position `i`.
    pub fn from_digits(digits: &[usize]) -> Self {
        let mut masks: SmallVec<[u64; 2]> = SmallVec::new();
        for (pos, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            if masks.len() < d {
                masks.resize(d, 0);
            }
            masks[d - 1] |= 1 << pos;
        }
        Self { masks }
    }

    fn trim(&mut self) {
        while self.masks.last() == Some(&0) {
            self.masks.pop();
        }
    }

    fn disjoint_families(&self) -> bool {
        let mut seen = 0u64;
        for &m in &self.masks {
            if seen & m != 0 {
                return false;
            }
            seen |= m;
        }
        true
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Mask of σ positions (family 1).
    pub fn sigma_mask(&self) -> u64 {
        self.masks.first().copied().unwrap_or(0)
    }

    /// Positions carrying any variable.
    pub fn support(&self) -> u64 {
        self.masks.iter().fold(0, |acc, m| acc | m)
    }

    /// Highest family index present, 0 for the empty monomial.
    pub fn max_family(&self) -> usize {
        self.masks.len()
    }

    pub fn is_one(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.support().count_ones()
    }

    /// Family index at `position`, 0 when the position is free.
    pub fn digit(&self, position: usize) -> usize {
        let bit = 1u64 << position;
        self.masks
            .iter()
            .position(|m| m & bit != 0)
            .map_or(0, |k| k + 1)
    }

    pub fn digits(&self, n: usize) -> Vec<usize> {
        (0..n).map(|p| self.digit(p)).collect()
    }

    /// Product of two monomials with disjoint supports.
    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        let overlap = self.support() & other.support();
        if overlap != 0 {
            return Err(Error::OverlappingSupport {
                position: overlap.trailing_zeros() as usize,
            });
        }
        let (long, short) = if self.masks.len() >= other.masks.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut masks = long.masks.clone();
        for (dst, src) in masks.iter_mut().zip(short.masks.iter()) {
            *dst |= src;
        }
        Ok(Monomial { masks })
    }
}

impl Ord for Monomial {
    /// Lexicographic on the position vector, position 0 first.
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.masks.len().max(other.masks.len());
        let mut diff = 0u64;
        for k in 0..len {
            let a = self.masks.get(k).copied().unwrap_or(0);
            let b = other.masks.get(k).copied().unwrap_or(0);
            diff |= a ^ b;
        }
        if diff == 0 {
            return Ordering::Equal;
        }
        let p = diff.trailing_zeros() as usize;
        self.digit(p).cmp(&other.digit(p))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const FAMILY_NAMES: [&str; 3] = ["σ", "τ", "υ"];

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        let support = self.support();
        for p in 0..MAX_POSITIONS {
            if support & (1 << p) == 0 {
                continue;
            }
            if !first {
                f.write_str("·")?;
            }
            first = false;
            let k = self.digit(p);
            match FAMILY_NAMES.get(k - 1) {
                Some(name) => write!(f, "{name}{}", p + 1)?,
                None => write!(f, "v{k}_{}", p + 1)?,
            }
        }
        Ok(())
    }
}

/// A finite sum of rational multiples of multilinear monomials over `n`
/// positions. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultilinearPoly {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_POSITIONS, "order {n} exceeds {MAX_POSITIONS} positions");
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::term(n, Monomial::one(), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn term(n: usize, mono: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(n);
        assert!(
            mono.support() >> n == 0,
            "monomial {mono} uses positions beyond order {n}"
        );
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in position-vector lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// Highest family index present in any monomial.
    pub fn max_family(&self) -> usize {
        self.terms.keys().map(Monomial::max_family).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.n);
        out.add_product(self, other)?;
        Ok(out)
    }

    /// `self += a * b`, the accumulation step of every matrix product.
    pub fn add_product(&mut self, a: &Self, b: &Self) -> Result<()> {
        self.check_order(a)?;
        self.check_order(b)?;
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb)?, ca * cb);
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), -v)).collect(),
        }
    }

    /// Value with `σ_i = signs[i]`. Only defined for σ-only polynomials;
    /// signs must be ±1.
    pub fn eval_pm1(&self, signs: &[i8]) -> Result<Rational> {
        if signs.len() != self.n {
            return Err(Error::OrderMismatch {
                left: self.n,
                right: signs.len(),
            });
        }
        debug_assert!(signs.iter().all(|s| *s == 1 || *s == -1));
        let minus = signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s < 0)
            .fold(0u64, |acc, (i, _)| acc | (1 << i));
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            if m.max_family() > 1 {
                return Err(Error::FamilyOutOfRange {
                    family: m.max_family(),
                    letters: 2,
                });
            }
            if (m.sigma_mask() & minus).count_ones() % 2 == 1 {
                total -= c;
            } else {
                total += c;
            }
        }
        Ok(total)
    }
}

impl fmt::Debug for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}·{m}")?;
            }
        }
        Ok(())
    }
}

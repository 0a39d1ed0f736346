//! Upper-triangular `(n+1)×(n+1)` matrices over multilinear polynomials.
//!
//! Every matrix here is `I` plus a strictly upper-triangular part, so the
//! power series for `f` and `log` terminate after at most `n` powers.

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{Monomial, MultilinearPoly, Rational, MAX_POSITIONS};
use crate::series::SeriesSpec;

/// Dense upper-triangular matrix. Rows and columns are indexed `0..=n`;
/// entries below the diagonal are identically zero.
#[derive(Clone, PartialEq, Eq)]
pub struct TriMatrix {
    n: usize,
    entries: Vec<Vec<MultilinearPoly>>,
}

/// Symbols of the words in the word-product identity: `M` is the bare
/// superdiagonal shift, `N` carries a σ variable on each superdiagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftSymbol {
    M,
    N,
}

pub(crate) fn check_order(n: usize) -> Result<()> {
    if n == 0 || n >= MAX_POSITIONS {
        return Err(Error::InvalidOrder {
            got: n,
            max: MAX_POSITIONS - 1,
        });
    }
    Ok(())
}

impl TriMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![vec![MultilinearPoly::zero(n); n + 1]; n + 1],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..=n {
            m.entries[i][i] = MultilinearPoly::one(n);
        }
        m
    }

    /// Superdiagonal shift. Family 0 gives `M` (ones); family `k >= 1`
    /// gives `N` with the family-`k` variable of position `i` at `(i, i+1)`.
    pub fn shift(n: usize, family: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i][i + 1] = if family == 0 {
                MultilinearPoly::one(n)
            } else {
                MultilinearPoly::term(n, Monomial::var(family, i), Rational::one())
            };
        }
        m
    }

    /// Builds a matrix from a rule for the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> MultilinearPoly) -> Self {
        let mut m = Self::zero(n);
        for i in 0..=n {
            for j in i..=n {
                m.entries[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &MultilinearPoly {
        &self.entries[i][j]
    }

    /// Entry `(1, n+1)` in one-based terms.
    pub fn upper_right(&self) -> &MultilinearPoly {
        &self.entries[0][self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(MultilinearPoly::is_zero)
    }

    pub fn has_unit_diagonal(&self) -> bool {
        self.first_non_unit_diagonal().is_none()
    }

    fn first_non_unit_diagonal(&self) -> Option<usize> {
        (0..=self.n).find(|&i| self.entries[i][i] != MultilinearPoly::one(self.n))
    }

    pub fn mul(&self, other: &TriMatrix) -> Result<TriMatrix> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..=n {
            for j in i..=n {
                let mut acc = MultilinearPoly::zero(n);
                for k in i..=j {
                    acc.add_product(&self.entries[i][k], &other.entries[k][j])?;
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &TriMatrix) -> Result<TriMatrix> {
        self.zip_with(other, MultilinearPoly::add)
    }

    pub fn sub(&self, other: &TriMatrix) -> Result<TriMatrix> {
        self.zip_with(other, MultilinearPoly::sub)
    }

    fn zip_with(
        &self,
        other: &TriMatrix,
        op: impl Fn(&MultilinearPoly, &MultilinearPoly) -> Result<MultilinearPoly>,
    ) -> Result<TriMatrix> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = Self::zero(self.n);
        for i in 0..=self.n {
            for j in i..=self.n {
                out.entries[i][j] = op(&self.entries[i][j], &other.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> TriMatrix {
        let mut out = self.clone();
        for row in &mut out.entries {
            for e in row {
                *e = e.scale(c);
            }
        }
        out
    }

    pub fn add_identity_scaled(&self, c: &Rational) -> TriMatrix {
        let mut out = self.clone();
        let n = self.n;
        for i in 0..=n {
            out.entries[i][i] = out.entries[i][i]
                .add(&MultilinearPoly::constant(n, c.clone()))
                .expect("same order");
        }
        out
    }
}

impl fmt::Debug for TriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// `f(A)` where `A` is the superdiagonal shift of `family` (0 = base).
/// Evaluated by Horner's rule; `A^{n+1} = 0` makes the truncation exact.
pub fn build_factor_matrix(n: usize, family: usize, f: &SeriesSpec) -> Result<TriMatrix> {
    check_order(n)?;
    let c0 = f.coefficient(0);
    if !c0.is_one() {
        return Err(Error::NonUnitConstant(c0.to_string()));
    }
    let shift = TriMatrix::shift(n, family);
    let mut acc = TriMatrix::zero(n).add_identity_scaled(&f.coefficient(n));
    for k in (0..n).rev() {
        acc = shift.mul(&acc)?.add_identity_scaled(&f.coefficient(k));
    }
    Ok(acc)
}

/// Entry `(1, n+1)` of `log P` for a unit-diagonal `P`.
///
/// Only the first row of each power of `P - I` is formed: with `v_0 = e_1`
/// and `v_q = v_{q-1} (P - I)`, the entry is `Σ_q (-1)^{q+1}/q · v_q[n]`.
#[allow(clippy::needless_range_loop)]
pub fn log_upper_right(p: &TriMatrix) -> Result<MultilinearPoly> {
    if let Some(index) = p.first_non_unit_diagonal() {
        return Err(Error::NonUnitDiagonal { index });
    }
    let n = p.n;
    let mut row: Vec<MultilinearPoly> = (0..=n).map(|_| MultilinearPoly::zero(n)).collect();
    row[0] = MultilinearPoly::one(n);
    let mut result = MultilinearPoly::zero(n);
    for q in 1..=n {
        // After q steps the row is supported on columns >= q.
        let mut next: Vec<MultilinearPoly> = (0..=n).map(|_| MultilinearPoly::zero(n)).collect();
        for j in q..=n {
            for k in (q - 1)..j {
                if row[k].is_zero() {
                    continue;
                }
                next[j].add_product(&row[k], &p.entries[k][j])?;
            }
        }
        row = next;
        let sign = if q % 2 == 1 { 1 } else { -1 };
        let c = Rational::new(sign.into(), (q as i64).into());
        result = result.add(&row[n].scale(&c))?;
    }
    Ok(result)
}

/// `[Π(W)]_{1,n+1}` for a word over `{M, N}` of length `n`.
pub fn word_matrix_product(n: usize, word: &[ShiftSymbol]) -> Result<MultilinearPoly> {
    check_order(n)?;
    if word.len() != n {
        return Err(Error::OrderMismatch {
            left: n,
            right: word.len(),
        });
    }
    let m = TriMatrix::shift(n, 0);
    let sigma = TriMatrix::shift(n, 1);
    let mut acc = TriMatrix::identity(n);
    for sym in word {
        acc = acc.mul(match sym {
            ShiftSymbol::M => &m,
            ShiftSymbol::N => &sigma,
        })?;
    }
    Ok(acc.upper_right().clone())
}

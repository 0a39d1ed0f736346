//! Signed evaluation: `z_n = 2^{-n} Σ_s L(s) (x + s_1 y)⋯(x + s_n y)`, where
//! `L(s)` is the upper-right entry of `log FG` with each `σ_i` replaced by
//! `s_i = ±1`.
//!
//! Two symmetries of `L` cut the work over the `2^n` sign lattice:
//! `L(s) = 0` whenever the number of `+1` entries is even, and
//! `L(s_1…s_n) = (-1)^{n-1} L(s_n…s_1)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nilmatrix::check_order;
use crate::poly::{inv_factorial, Rational};
use crate::series::{Alphabet, NCSeries, Word};

/// Largest order accepted by the lattice operations (`2^n` table entries).
pub const MAX_SIGNED_ORDER: usize = 24;

/// A point of the sign lattice. Bit `i` of `minus` set means `s_{i+1} = -1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignAssignment {
    n: usize,
    minus: u64,
}

impl SignAssignment {
    pub fn from_minus_mask(n: usize, minus: u64) -> Self {
        assert!(n < 64 && minus >> n == 0, "mask {minus:#b} exceeds order {n}");
        Self { n, minus }
    }

    /// Panics unless every entry is `1` or `-1`.
    pub fn from_signs(signs: &[i8]) -> Self {
        let mut minus = 0;
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => minus |= 1 << i,
                other => panic!("sign entries must be ±1, got {other}"),
            }
        }
        Self::from_minus_mask(signs.len(), minus)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn minus_mask(&self) -> u64 {
        self.minus
    }

    pub fn sign(&self, i: usize) -> i8 {
        if self.minus >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.sign(i)).collect()
    }

    pub fn plus_count(&self) -> usize {
        self.n - self.minus.count_ones() as usize
    }

    pub fn reversed(&self) -> Self {
        Self {
            n: self.n,
            minus: reverse_bits(self.minus, self.n),
        }
    }

    /// `Π s_i` over the positions in `mask`.
    pub fn product_over(&self, mask: u64) -> i8 {
        if (self.minus & mask).count_ones() % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

impl fmt::Debug for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if self.sign(i) > 0 { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

fn reverse_bits(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

/// `(-1)^{n-1}`.
fn parity_sign(n: usize) -> i64 {
    if n % 2 == 1 {
        1
    } else {
        -1
    }
}

fn check_signed_order(n: usize) -> Result<()> {
    check_order(n)?;
    if n > MAX_SIGNED_ORDER {
        return Err(Error::InvalidOrder {
            got: n,
            max: MAX_SIGNED_ORDER,
        });
    }
    Ok(())
}

/// `L(s)` over plain rationals: `F` and `G` are built with the signs
/// substituted and the log's first row is iterated as in the symbolic case.
#[allow(clippy::needless_range_loop)]
pub fn eval_assignment_rational(s: &SignAssignment) -> Rational {
    let n = s.n;
    let size = n + 1;
    // P = F G; P[i][k] = Σ_j 1/(j-i)! · 1/(k-j)! · Π_{l=j}^{k-1} s_l
    let mut p = vec![vec![Rational::zero(); size]; size];
    for i in 0..size {
        for k in i..size {
            let mut acc = Rational::zero();
            for j in i..=k {
                let prod = s.product_over(span_mask(j, k));
                let term = inv_factorial(j - i) * inv_factorial(k - j);
                if prod > 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            p[i][k] = acc;
        }
    }
    let mut row = vec![Rational::zero(); size];
    row[0] = Rational::one();
    let mut result = Rational::zero();
    for q in 1..=n {
        let mut next = vec![Rational::zero(); size];
        for j in q..size {
            for k in (q - 1)..j {
                if !row[k].is_zero() {
                    next[j] += &row[k] * &p[k][j];
                }
            }
        }
        row = next;
        let term = &row[n] / Rational::from_integer(BigInt::from(q));
        if q % 2 == 1 {
            result += term;
        } else {
            result -= term;
        }
    }
    result
}

/// Positions `j..k` (0-based, end exclusive) as a mask.
fn span_mask(j: usize, k: usize) -> u64 {
    if k <= j {
        0
    } else {
        ((1u64 << (k - j)) - 1) << j
    }
}

/// Integer-scaled route for `L(s)`.
///
/// `Q[i][k] = (k-i)! · P[i][k]` and `w_q[j] = j! · v_q[j]` are integers, with
/// `w_q[j] = Σ_k w_{q-1}[k] · Q[k][j] · C(j, k)`, so the whole iteration runs
/// in checked `i128`. Returns `None` on overflow.
fn eval_assignment_scaled(s: &SignAssignment) -> Option<Rational> {
    let n = s.n;
    let size = n + 1;
    let mut binom = vec![vec![0i128; size]; size];
    for a in 0..size {
        binom[a][0] = 1;
        for b in 1..=a {
            binom[a][b] = binom[a - 1][b - 1].checked_add(binom[a - 1][b])?;
        }
    }
    let mut q_mat = vec![vec![0i128; size]; size];
    for i in 0..size {
        for k in (i + 1)..size {
            let mut acc = 0i128;
            for j in i..=k {
                let c = binom[k - i][j - i];
                acc = if s.product_over(span_mask(j, k)) > 0 {
                    acc.checked_add(c)?
                } else {
                    acc.checked_sub(c)?
                };
            }
            q_mat[i][k] = acc;
        }
    }
    let lcm = (1..=n as i128).fold(1i128, |l, q| l.lcm(&q));
    let mut row = vec![0i128; size];
    row[0] = 1;
    let mut numer = 0i128;
    for q in 1..=n {
        let mut next = vec![0i128; size];
        for j in q..size {
            let mut acc = 0i128;
            for k in (q - 1)..j {
                if row[k] != 0 {
                    let t = row[k].checked_mul(q_mat[k][j])?.checked_mul(binom[j][k])?;
                    acc = acc.checked_add(t)?;
                }
            }
            next[j] = acc;
        }
        row = next;
        let t = row[n].checked_mul(lcm / q as i128)?;
        numer = if q % 2 == 1 {
            numer.checked_add(t)?
        } else {
            numer.checked_sub(t)?
        };
    }
    let mut fact = BigInt::one();
    for i in 2..=n {
        fact *= i;
    }
    Some(Rational::new(BigInt::from(numer), fact * BigInt::from(lcm)))
}

/// Exact value of `L(s)`, the upper-right entry of `log FG` at the sign
/// assignment `s`.
pub fn eval_assignment(s: &SignAssignment) -> Rational {
    eval_assignment_scaled(s).unwrap_or_else(|| eval_assignment_rational(s))
}

/// Lattice points `0..2^n` in reflected Gray-code order.
pub fn gray_order(n: usize) -> impl Iterator<Item = u64> {
    (0..1u64 << n).map(|i| i ^ (i >> 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    None,
    Symmetry,
}

/// `L(s)` for every point of the order-`n` sign lattice, indexed by the
/// minus mask.
#[derive(Debug, Clone)]
pub struct SignedCoefficientTable {
    n: usize,
    values: Vec<Rational>,
    evaluated: usize,
}

impl PartialEq for SignedCoefficientTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.values == other.values
    }
}

impl SignedCoefficientTable {
    /// Wraps precomputed values; completeness is checked on use.
    pub fn from_values(n: usize, values: Vec<Rational>) -> Self {
        let evaluated = values.len();
        Self {
            n,
            values,
            evaluated,
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of direct evaluations performed while building.
    pub fn evaluated(&self) -> usize {
        self.evaluated
    }

    pub fn get(&self, s: &SignAssignment) -> &Rational {
        &self.values[s.minus as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SignAssignment, &Rational)> {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .map(move |(m, v)| (SignAssignment::from_minus_mask(n, m as u64), v))
    }

    fn check_complete(&self) -> Result<()> {
        let expected = 1usize << self.n;
        if self.values.len() != expected {
            return Err(Error::IncompleteTable {
                n: self.n,
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Fills the sign table for order `n`.
///
/// With [`Pruning::Symmetry`], points with an even number of `+1` entries are
/// set to zero without evaluation, and of each reversal pair only the
/// smaller mask is evaluated. Work is sharded across threads; the result
/// does not depend on scheduling.
pub fn build_table(n: usize, pruning: Pruning) -> Result<SignedCoefficientTable> {
    check_signed_order(n)?;
    let to_eval: Vec<u64> = match pruning {
        Pruning::None => gray_order(n).collect(),
        Pruning::Symmetry => gray_order(n)
            .filter(|&m| {
                let s = SignAssignment::from_minus_mask(n, m);
                s.plus_count() % 2 == 1 && m <= s.reversed().minus
            })
            .collect(),
    };
    let computed: Vec<(u64, Rational)> = to_eval
        .par_iter()
        .map(|&m| (m, eval_assignment(&SignAssignment::from_minus_mask(n, m))))
        .collect();
    let mut values = vec![Rational::zero(); 1 << n];
    let sign = Rational::from_integer(parity_sign(n).into());
    for (m, v) in &computed {
        if pruning == Pruning::Symmetry {
            let rev = reverse_bits(*m, n);
            values[rev as usize] = v * &sign;
        }
        values[*m as usize] = v.clone();
    }
    Ok(SignedCoefficientTable {
        n,
        values,
        evaluated: computed.len(),
    })
}

/// Walsh-Hadamard transform in place: `out[y] = Σ_s a[s] (-1)^{|s ∧ y|}`.
fn hadamard(a: &mut [BigInt]) {
    let mut h = 1;
    while h < a.len() {
        for block in (0..a.len()).step_by(2 * h) {
            for i in block..block + h {
                let u = a[i].clone();
                let v = std::mem::take(&mut a[i + h]);
                a[i + h] = &u - &v;
                a[i] = u + v;
            }
        }
        h *= 2;
    }
}

/// Word coefficients from the sign table: the coefficient of `W` is
/// `2^{-n} Σ_s L(s) Π_{i : W_i = y} s_i`.
pub fn reconstruct_term(table: &SignedCoefficientTable) -> Result<NCSeries> {
    table.check_complete()?;
    let n = table.n;
    let denom = table
        .values
        .iter()
        .fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let mut scaled: Vec<BigInt> = table
        .values
        .iter()
        .map(|v| v.numer() * (&denom / v.denom()))
        .collect();
    hadamard(&mut scaled);
    let total_denom = denom << n;
    let mut out = NCSeries::zero(Alphabet::xy(), n);
    for (y_mask, numer) in scaled.into_iter().enumerate() {
        if !numer.is_zero() {
            out.add_term(
                Word::from_mask(n, y_mask as u64),
                Rational::new(numer, total_denom.clone()),
            );
        }
    }
    Ok(out)
}

/// Per-order outcome of the nonvanishing scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub n: usize,
    /// Points with an even number of `+1` entries (zero by symmetry).
    pub pruned_zero: usize,
    /// The all-plus point for odd `n > 1`.
    pub structural_zero: usize,
    pub nonzero: usize,
    /// Points not predicted to vanish whose value is zero.
    pub unexpected: Vec<SignAssignment>,
    /// Structural-zero points whose value turned out nonzero.
    pub violated: Vec<SignAssignment>,
    pub evaluated: usize,
}

impl ScanReport {
    pub fn predicted_zero(&self) -> usize {
        self.pruned_zero + self.structural_zero
    }

    pub fn is_clean(&self) -> bool {
        self.unexpected.is_empty() && self.violated.is_empty()
    }
}

/// Classifies every lattice point of order `n`.
pub fn scan_order(n: usize) -> Result<ScanReport> {
    let table = build_table(n, Pruning::Symmetry)?;
    let mut report = ScanReport {
        n,
        pruned_zero: 0,
        structural_zero: 0,
        nonzero: 0,
        unexpected: Vec::new(),
        violated: Vec::new(),
        evaluated: table.evaluated(),
    };
    for (s, v) in table.iter() {
        if s.plus_count() % 2 == 0 {
            report.pruned_zero += 1;
        } else if n > 1 && n % 2 == 1 && s.minus == 0 {
            report.structural_zero += 1;
            if !v.is_zero() {
                report.violated.push(s);
            }
        } else if v.is_zero() {
            report.unexpected.push(s);
        } else {
            report.nonzero += 1;
        }
    }
    Ok(report)
}

/// Runs [`scan_order`] for `1..=n_max`.
pub fn scan_nonvanishing(n_max: usize) -> Result<Vec<ScanReport>> {
    check_signed_order(n_max)?;
    (1..=n_max).map(scan_order).collect()
}

/// `2^{-n} L(s)`, the coefficient of `(x + s_1 y)⋯(x + s_n y)`.
pub fn product_coefficient(s: &SignAssignment) -> Rational {
    let v = eval_assignment(s);
    let two_n = BigInt::one() << s.n;
    Rational::new(v.numer().clone(), v.denom() * two_n)
}

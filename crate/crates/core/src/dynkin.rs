//! Dynkin substitution: each degree-`n` word becomes `1/n` times its
//! left-normed commutator `[[…[a_1, a_2], a_3]…, a_n]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Rational;
use crate::series::{Alphabet, NCSeries, Word};

/// `coefficient · [[…[a_1, a_2]…], a_n]` over the letters of `word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieTerm {
    pub coefficient: Rational,
    pub word: Word,
}

impl LieTerm {
    /// Bracket notation, e.g. `[[x,y],x]`; a single letter prints bare.
    pub fn bracket(&self, alphabet: &Alphabet) -> String {
        let mut letters = self.word.letters().iter().map(|&l| alphabet.name(l));
        let mut out = letters.next().unwrap_or_default().to_string();
        for l in letters {
            out = format!("[{out},{l}]");
        }
        out
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a LieTerm, &'a Alphabet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}·{}", self.0.coefficient, self.0.bracket(self.1))
            }
        }
        D(self, alphabet)
    }
}

/// Replaces every word of a homogeneous degree-`n` series by `1/n` times its
/// left-normed commutator. No Lie-algebra simplification is attempted.
pub fn dynkin_substitute(z: &NCSeries) -> Result<Vec<LieTerm>> {
    let Some(n) = z.terms().next().map(|(w, _)| w.len()) else {
        return Ok(Vec::new());
    };
    if n == 0 {
        return Err(Error::NotHomogeneous {
            expected: 1,
            found: 0,
        });
    }
    let inv_n = Rational::new(1.into(), (n as i64).into());
    z.terms()
        .map(|(w, c)| {
            if w.len() != n {
                return Err(Error::NotHomogeneous {
                    expected: n,
                    found: w.len(),
                });
            }
            Ok(LieTerm {
                coefficient: c * &inv_n,
                word: w.clone(),
            })
        })
        .collect()
}

/// Word expansion of the left-normed bracket over `word`: starting from
/// `a_1`, each further letter `c` maps `S` to `S c - c S`.
pub fn expand_bracket(word: &Word) -> Vec<(Word, i64)> {
    let letters = word.letters();
    let Some((&first, rest)) = letters.split_first() else {
        return Vec::new();
    };
    let mut acc = vec![(Word::new(vec![first]), 1i64)];
    for &c in rest {
        let cw = Word::new(vec![c]);
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (w, k) in &acc {
            next.push((w.concat(&cw), *k));
            next.push((cw.concat(w), -*k));
        }
        acc = next;
    }
    acc
}

/// Largest `m^n` expanded with the dense accumulator.
const DENSE_LIMIT: usize = 1 << 20;

/// Sums the word expansions of all brackets.
pub fn expand_commutators(terms: &[LieTerm], alphabet: &Alphabet) -> NCSeries {
    let max_degree = terms.iter().map(|t| t.word.len()).max().unwrap_or(0);
    let mut out = NCSeries::zero(alphabet.clone(), max_degree);
    let m = alphabet.len();
    for n in 1..=max_degree {
        let group: Vec<&LieTerm> = terms.iter().filter(|t| t.word.len() == n).collect();
        if group.is_empty() {
            continue;
        }
        match m.checked_pow(n as u32).filter(|&size| size <= DENSE_LIMIT) {
            Some(size) => expand_dense(&group, n, m, size, &mut out),
            None => {
                for t in group {
                    for (w, k) in expand_bracket(&t.word) {
                        out.add_term(w, &t.coefficient * Rational::from_integer(k.into()));
                    }
                }
            }
        }
    }
    out
}

/// Expands all degree-`n` brackets at once over a dense array of integer
/// numerators indexed by base-`m` word value. Step `k` maps `S` to
/// `S a - a S` for the letter `a` at position `k`: the first half keeps the
/// index, the second rotates the first `k + 1` letters right by one.
fn expand_dense(group: &[&LieTerm], n: usize, m: usize, size: usize, out: &mut NCSeries) {
    let denom = group
        .iter()
        .fold(BigInt::one(), |acc, t| acc.lcm(t.coefficient.denom()));
    let mut values = vec![BigInt::zero(); size];
    for t in group {
        let idx = t.word.letters().iter().fold(0, |acc, &l| acc * m + l as usize);
        values[idx] += t.coefficient.numer() * (&denom / t.coefficient.denom());
    }
    for k in 1..n {
        let tail = m.pow((n - k - 1) as u32);
        let front = m.pow(k as u32);
        let mut next = values.clone();
        for (idx, v) in values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let (prefix, rest) = (idx / tail, idx % tail);
            let (w, a) = (prefix / m, prefix % m);
            next[(a * front + w) * tail + rest] -= v;
        }
        values = next;
    }
    for (mut idx, v) in values.into_iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let mut letters = vec![0u8; n];
        for l in letters.iter_mut().rev() {
            *l = (idx % m) as u8;
            idx /= m;
        }
        out.add_term(Word::new(letters), Rational::new(v, denom.clone()));
    }
}

/// `1 · [a]` for each single-letter word; used for `n = 1` round trips.
pub fn letter_term(letter: u8) -> LieTerm {
    LieTerm {
        coefficient: Rational::one(),
        word: Word::new(vec![letter]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::bch_term;
    use crate::poly::{int, rat};

    fn lie(c: Rational, letters: &[u8]) -> LieTerm {
        LieTerm {
            coefficient: c,
            word: Word::new(letters.to_vec()),
        }
    }

    #[test]
    fn substitution_examples() {
        let xy = Alphabet::xy();
        let z1 = bch_term(1).unwrap();
        assert_eq!(dynkin_substitute(&z1).unwrap(), vec![letter_term(0), letter_term(1)]);

        let z2 = bch_term(2).unwrap();
        let terms = dynkin_substitute(&z2).unwrap();
        assert_eq!(terms, vec![lie(rat(1, 4), &[0, 1]), lie(rat(-1, 4), &[1, 0])]);
        assert_eq!(terms[0].bracket(&xy), "[x,y]");
        assert_eq!(expand_commutators(&terms, &xy), z2);
    }

    #[test]
    fn expansion_examples() {
        let xy = Alphabet::xy();
        let e = expand_commutators(&[lie(int(1), &[0, 1])], &xy);
        assert_eq!(e.coefficient_of("xy"), Some(int(1)));
        assert_eq!(e.coefficient_of("yx"), Some(int(-1)));
        assert_eq!(e.len(), 2);

        let e = expand_commutators(&[lie(int(1), &[0, 1, 0])], &xy);
        assert_eq!(e.coefficient_of("yxx"), Some(int(-1)));
        assert_eq!(e.coefficient_of("xyx"), Some(int(2)));
        assert_eq!(e.coefficient_of("xxy"), Some(int(-1)));
        assert_eq!(e.len(), 3);
        assert_eq!(lie(int(1), &[0, 1, 0]).bracket(&xy), "[[x,y],x]");

        assert!(expand_commutators(&[], &xy).is_empty());
    }

    #[test]
    fn rejects_mixed_degrees() {
        let xy = Alphabet::xy();
        let mut s = NCSeries::zero(xy, 2);
        s.add_term(Word::new(vec![0]), int(1));
        s.add_term(Word::new(vec![0, 1]), int(1));
        assert!(matches!(
            dynkin_substitute(&s),
            Err(Error::NotHomogeneous { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn dense_expansion_matches_per_bracket_sum() {
        for m in 2..=3 {
            let alphabet = Alphabet::standard(m).unwrap();
            for n in 1..=6 {
                let terms: Vec<LieTerm> = (0..m.pow(n as u32))
                    .step_by(3)
                    .map(|idx| {
                        let mut letters = vec![0u8; n];
                        let mut rest = idx;
                        for l in letters.iter_mut() {
                            *l = (rest % m) as u8;
                            rest /= m;
                        }
                        lie(rat(idx as i64 % 5 - 2, (n + idx % 4) as i64), &letters)
                    })
                    .filter(|t| !t.coefficient.is_zero())
                    .collect();
                let mut naive = NCSeries::zero(alphabet.clone(), n);
                for t in &terms {
                    for (w, k) in expand_bracket(&t.word) {
                        naive.add_term(w, &t.coefficient * int(k));
                    }
                }
                assert_eq!(expand_commutators(&terms, &alphabet), naive, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn expansion_is_linear() {
        let xy = Alphabet::xy();
        let a = vec![lie(rat(1, 3), &[0, 1, 1]), lie(int(2), &[1, 0])];
        let b = vec![lie(rat(-1, 3), &[0, 1, 1]), lie(rat(5, 2), &[1, 1, 0, 1])];
        let joint: Vec<_> = a.iter().chain(b.iter()).cloned().collect();
        let sum = expand_commutators(&a, &xy).add(&expand_commutators(&b, &xy)).unwrap();
        assert!(expand_commutators(&joint, &xy).same_terms(&sum));
    }

    #[test]
    fn round_trip_on_bch_terms() {
        let xy = Alphabet::xy();
        for n in 1..=6 {
            let z = bch_term(n).unwrap();
            let back = expand_commutators(&dynkin_substitute(&z).unwrap(), &xy);
            assert_eq!(back, z, "n={n}");
        }
    }
}

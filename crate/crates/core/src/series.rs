//! Alphabets, words, and noncommutative series in the word basis, plus the
//! scalar power series `f` used to build factor matrices.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{inv_factorial, Rational};

/// Upper bound on the number of factors (letters) in a product.
pub const MAX_FACTORS: usize = 16;

const DEFAULT_LETTERS: [&str; MAX_FACTORS] = [
    "x", "y", "w", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m",
];

/// Ordered, distinct letter names. Letter 0 is the base letter; letter `k`
/// corresponds to variable family `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Self> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.len() < 2 || letters.len() > MAX_FACTORS {
            return Err(Error::InvalidAlphabet(format!(
                "need between 2 and {MAX_FACTORS} letters, got {}",
                letters.len()
            )));
        }
        for (i, l) in letters.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_control() || c.is_whitespace()) {
                return Err(Error::InvalidAlphabet(format!("bad letter name {l:?}")));
            }
            if letters[..i].contains(l) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter {l:?}")));
            }
        }
        Ok(Self { letters })
    }

    /// `x, y`, then `w`, then `a, b, c, ...`.
    pub fn standard(m: usize) -> Result<Self> {
        if !(2..=MAX_FACTORS).contains(&m) {
            return Err(Error::InvalidFactorCount {
                got: m,
                max: MAX_FACTORS,
            });
        }
        Self::new(DEFAULT_LETTERS[..m].iter().copied())
    }

    pub fn xy() -> Self {
        Self::standard(2).expect("two letters")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, letter: u8) -> &str {
        &self.letters[letter as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.letters.iter().position(|l| l == name).map(|i| i as u8)
    }

    fn single_char(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    /// Renders a word. Single-character alphabets concatenate (`xyx`);
    /// otherwise letters are joined with spaces.
    pub fn render(&self, word: &Word) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.letters()
            .iter()
            .map(|&l| self.name(l))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`Alphabet::render`].
    pub fn parse_word(&self, text: &str) -> Option<Word> {
        let letters = if self.single_char() {
            text.chars()
                .map(|c| self.index_of(c.encode_utf8(&mut [0; 4])))
                .collect::<Option<Vec<_>>>()?
        } else {
            text.split_whitespace()
                .map(|t| self.index_of(t))
                .collect::<Option<Vec<_>>>()?
        };
        Some(Word::new(letters))
    }
}

/// A finite sequence of letter indices. Ordered by length first, then
/// lexicographically by letter index.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_letter(&self) -> Option<u8> {
        self.0.iter().copied().max()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Two-letter word whose `y` positions are the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Word {
        Word((0..n).map(|i| ((mask >> i) & 1) as u8).collect())
    }

    /// Positions holding `letter`, as a bitmask.
    pub fn mask_of(&self, letter: u8) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == letter)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

/// A finite linear combination of words over an alphabet, truncated at
/// `max_degree`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct NCSeries {
    alphabet: Alphabet,
    max_degree: usize,
    terms: BTreeMap<Word, Rational>,
}

impl NCSeries {
    pub fn zero(alphabet: Alphabet, max_degree: usize) -> Self {
        Self {
            alphabet,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Word, Rational> {
        self.terms
    }

    pub fn coefficient(&self, word: &Word) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of a word given by its rendered form.
    pub fn coefficient_of(&self, text: &str) -> Option<Rational> {
        self.alphabet.parse_word(text).map(|w| self.coefficient(&w))
    }

    /// Adds `c · word`. Panics if the word leaves the alphabet or exceeds the
    /// truncation degree; callers construct words from validated data.
    pub fn add_term(&mut self, word: Word, c: Rational) {
        assert!(word.len() <= self.max_degree, "word longer than max degree");
        assert!(
            word.max_letter().is_none_or(|l| (l as usize) < self.alphabet.len()),
            "letter outside alphabet"
        );
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
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

    pub fn add(&self, other: &NCSeries) -> Result<NCSeries> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree.max(other.max_degree));
        for (w, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> NCSeries {
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    /// Applies a letter-level or word-level rewrite to every word.
    pub fn map_words(&self, f: impl Fn(&Word) -> Word) -> NCSeries {
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree);
        for (w, c) in &self.terms {
            out.add_term(f(w), c.clone());
        }
        out
    }

    /// Length shared by every stored word, if any.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut lens = self.terms.keys().map(Word::len);
        let first = lens.next()?;
        lens.all(|l| l == first).then_some(first)
    }

    /// Restriction to words of length exactly `degree`.
    pub fn slice(&self, degree: usize) -> NCSeries {
        Self {
            alphabet: self.alphabet.clone(),
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same coefficients, ignoring the declared truncation degree.
    pub fn same_terms(&self, other: &NCSeries) -> bool {
        self.alphabet == other.alphabet && self.terms == other.terms
    }

    /// First word (in canonical order) whose coefficients differ, with
    /// `(self, other)` coefficients.
    pub fn first_difference(&self, other: &NCSeries) -> Option<(Word, Rational, Rational)> {
        let mut words: Vec<&Word> = self.terms.keys().chain(other.terms.keys()).collect();
        words.sort();
        words.dedup();
        words.into_iter().find_map(|w| {
            let a = self.coefficient(w);
            let b = other.coefficient(w);
            (a != b).then(|| (w.clone(), a, b))
        })
    }

    pub fn render_word(&self, word: &Word) -> String {
        self.alphabet.render(word)
    }
}

impl fmt::Debug for NCSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for NCSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            let word = if w.is_empty() {
                "1".to_string()
            } else {
                self.alphabet.render(w)
            };
            if a.is_one() {
                write!(f, "{word}")?;
            } else {
                write!(f, "{a}·{word}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum SeriesKind {
    Exp,
    Coefficients(Vec<Rational>),
}

/// A scalar power series `f(t) = Σ c_k t^k` with `f(0) = 1`. Coefficients
/// beyond the stored list are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeriesSpec(SeriesKind);

impl SeriesSpec {
    pub fn exp() -> Self {
        Self(SeriesKind::Exp)
    }

    pub fn from_coefficients(coefficients: Vec<Rational>) -> Result<Self> {
        match coefficients.first() {
            Some(c) if c.is_one() => {}
            Some(c) => return Err(Error::NonUnitConstant(c.to_string())),
            None => return Err(Error::NonUnitConstant("empty series".into())),
        }
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Ok(Self(SeriesKind::Coefficients(coefficients)))
    }

    pub fn is_exp(&self) -> bool {
        matches!(self.0, SeriesKind::Exp)
    }

    /// Coefficient of `t^k`.
    pub fn coefficient(&self, k: usize) -> Rational {
        match &self.0 {
            SeriesKind::Exp => inv_factorial(k),
            SeriesKind::Coefficients(cs) => cs.get(k).cloned().unwrap_or_else(Rational::zero),
        }
    }

    /// Coefficients `c_0 ..= c_degree`.
    pub fn truncated(&self, degree: usize) -> Vec<Rational> {
        (0..=degree).map(|k| self.coefficient(k)).collect()
    }

    /// Stable textual identity: `exp` or the comma-separated coefficient list.
    pub fn fingerprint(&self) -> String {
        match &self.0 {
            SeriesKind::Exp => "exp".to_string(),
            SeriesKind::Coefficients(cs) => cs
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

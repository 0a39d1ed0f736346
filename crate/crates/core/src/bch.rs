//! Order-`n` terms of `log(f_0(a_0) f_1(a_1) ⋯ f_{m-1}(a_{m-1}))` in the word
//! basis.
//!
//! The term is read off the upper-right entry of the logarithm of a product
//! of `m` factor matrices, one per letter. Factor `k` is `f_k` applied to the
//! superdiagonal shift carrying family-`k` variables (family 0 carries none),
//! and [`t_operator`] turns each multilinear monomial into the word with
//! letter `k` wherever a family-`k` variable sits.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::{Error, Result};
use crate::nilmatrix::{build_factor_matrix, check_order, log_upper_right, TriMatrix};
use crate::poly::MultilinearPoly;
use crate::series::{Alphabet, NCSeries, SeriesSpec, Word, MAX_FACTORS};

/// Maps each monomial to the length-`n` word whose letter at position `i` is
/// the family index found there (0 when the position is free).
pub fn t_operator(p: &MultilinearPoly, alphabet: &Alphabet) -> Result<NCSeries> {
    let n = p.order();
    let family = p.max_family();
    if family >= alphabet.len() {
        return Err(Error::FamilyOutOfRange {
            family,
            letters: alphabet.len(),
        });
    }
    let mut out = NCSeries::zero(alphabet.clone(), n);
    for (mono, c) in p.terms() {
        let word = Word::new(mono.digits(n).into_iter().map(|d| d as u8).collect());
        out.add_term(word, c.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct TermKey {
    n: usize,
    series: Vec<SeriesSpec>,
}

static TERM_CACHE: LazyLock<RwLock<HashMap<TermKey, Arc<NCSeries>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

fn check_factors(m: usize) -> Result<()> {
    if !(2..=MAX_FACTORS).contains(&m) {
        return Err(Error::InvalidFactorCount {
            got: m,
            max: MAX_FACTORS,
        });
    }
    Ok(())
}

/// Product of the factor matrices `f_0(M) f_1(N_1) ⋯`.
pub fn factor_product(n: usize, series: &[SeriesSpec]) -> Result<TriMatrix> {
    check_order(n)?;
    check_factors(series.len())?;
    let mut acc = build_factor_matrix(n, 0, &series[0])?;
    for (family, f) in series.iter().enumerate().skip(1) {
        acc = acc.mul(&build_factor_matrix(n, family, f)?)?;
    }
    Ok(acc)
}

/// The multilinear polynomial `(log Π_k f_k(·))_{1,n+1}`.
pub fn log_polynomial(n: usize, series: &[SeriesSpec]) -> Result<MultilinearPoly> {
    log_upper_right(&factor_product(n, series)?)
}

/// Computes the term without consulting or filling the cache.
pub fn logf_term_uncached(n: usize, series: &[SeriesSpec]) -> Result<NCSeries> {
    let p = log_polynomial(n, series)?;
    t_operator(&p, &Alphabet::standard(series.len())?)
}

/// Order-`n` term of `log(f_0(a_0) ⋯ f_{m-1}(a_{m-1}))` over the standard
/// alphabet, one series per factor. Results are memoized per process.
pub fn logf_term(n: usize, series: &[SeriesSpec]) -> Result<NCSeries> {
    check_order(n)?;
    check_factors(series.len())?;
    let key = TermKey {
        n,
        series: series.to_vec(),
    };
    if let Some(hit) = TERM_CACHE.read().expect("cache lock").get(&key) {
        return Ok(NCSeries::clone(hit));
    }
    let term = Arc::new(logf_term_uncached(n, series)?);
    TERM_CACHE
        .write()
        .expect("cache lock")
        .entry(key)
        .or_insert_with(|| term.clone());
    Ok(NCSeries::clone(&term))
}

/// Order-`n` term of `log(e^{a_0} e^{a_1} ⋯ e^{a_{m-1}})`.
pub fn bch_term_multi(n: usize, m: usize) -> Result<NCSeries> {
    check_factors(m)?;
    logf_term(n, &vec![SeriesSpec::exp(); m])
}

/// Order-`n` term `z_n` of `log(e^x e^y)`.
pub fn bch_term(n: usize) -> Result<NCSeries> {
    bch_term_multi(n, 2)
}

/// Same coefficients over a caller-chosen alphabet of matching size.
pub fn relabel(term: &NCSeries, alphabet: Alphabet) -> Result<NCSeries> {
    if alphabet.len() != term.alphabet().len() {
        return Err(Error::AlphabetMismatch);
    }
    let mut out = NCSeries::zero(alphabet, term.max_degree());
    for (w, c) in term.terms() {
        out.add_term(w.clone(), c.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat, Monomial, Rational};

    fn series(alphabet: &Alphabet, terms: &[(&str, Rational)]) -> NCSeries {
        let n = terms.iter().map(|(w, _)| w.chars().count()).max().unwrap_or(0);
        let mut s = NCSeries::zero(alphabet.clone(), n);
        for (w, c) in terms {
            s.add_term(alphabet.parse_word(w).unwrap(), c.clone());
        }
        s
    }

    #[test]
    fn t_operator_examples() {
        let xy = Alphabet::xy();
        let p = MultilinearPoly::term(6, Monomial::sigma(&[1, 3, 4]), int(1));
        let z = t_operator(&p, &xy).unwrap();
        assert_eq!(z.coefficient_of("xyxyyx"), Some(int(1)));
        assert_eq!(z.len(), 1);

        let mixed = Monomial::var(1, 1).mul(&Monomial::var(2, 2)).unwrap();
        let p = MultilinearPoly::term(4, mixed, int(1));
        let xyw = Alphabet::standard(3).unwrap();
        assert_eq!(t_operator(&p, &xyw).unwrap().coefficient_of("xywx"), Some(int(1)));
        assert!(matches!(
            t_operator(&p, &xy),
            Err(Error::FamilyOutOfRange { family: 2, letters: 2 })
        ));

        let p = MultilinearPoly::one(3);
        assert_eq!(t_operator(&p, &xy).unwrap().coefficient_of("xxx"), Some(int(1)));
    }

    #[test]
    fn low_order_terms() {
        let xy = Alphabet::xy();
        assert_eq!(bch_term(1).unwrap(), series(&xy, &[("x", int(1)), ("y", int(1))]));
        assert_eq!(
            bch_term(2).unwrap(),
            series(&xy, &[("xy", rat(1, 2)), ("yx", rat(-1, 2))])
        );
        assert_eq!(
            bch_term(4).unwrap(),
            series(
                &xy,
                &[
                    ("yyxx", rat(-1, 24)),
                    ("yxyx", rat(1, 12)),
                    ("xyxy", rat(-1, 12)),
                    ("xxyy", rat(1, 24)),
                ]
            )
        );
        assert_eq!(bch_term(7).unwrap().coefficient_of("yxxxyyy"), Some(rat(-1, 1512)));
    }

    #[test]
    fn three_factor_terms() {
        let xyw = Alphabet::standard(3).unwrap();
        let h = rat(1, 2);
        let expected = series(
            &xyw,
            &[
                ("wx", -h.clone()),
                ("wy", -h.clone()),
                ("xw", h.clone()),
                ("xy", h.clone()),
                ("yw", h.clone()),
                ("yx", -h.clone()),
            ],
        );
        assert_eq!(bch_term_multi(2, 3).unwrap(), expected);
        assert_eq!(
            bch_term_multi(1, 3).unwrap(),
            series(&xyw, &[("x", int(1)), ("y", int(1)), ("w", int(1))])
        );
        for n in 1..=6 {
            assert_eq!(bch_term_multi(n, 2).unwrap(), bch_term(n).unwrap());
        }
    }

    #[test]
    fn f_series_terms() {
        let xy = Alphabet::xy();
        let lin = SeriesSpec::from_coefficients(vec![int(1), int(1)]).unwrap();
        let two = logf_term(2, &[lin.clone(), lin.clone()]).unwrap();
        let expected = series(
            &xy,
            &[
                ("xx", rat(-1, 2)),
                ("xy", rat(1, 2)),
                ("yx", rat(-1, 2)),
                ("yy", rat(-1, 2)),
            ],
        );
        assert_eq!(two, expected);
        assert_eq!(
            logf_term(1, &[lin.clone(), lin]).unwrap(),
            series(&xy, &[("x", int(1)), ("y", int(1))])
        );
        assert_eq!(
            logf_term(2, &[SeriesSpec::exp(), SeriesSpec::exp()]).unwrap(),
            bch_term(2).unwrap()
        );
    }

    #[test]
    fn trivial_factor_drops_its_letter() {
        let unit = SeriesSpec::from_coefficients(vec![int(1)]).unwrap();
        let lin = SeriesSpec::from_coefficients(vec![int(1), int(1), rat(1, 3)]).unwrap();
        for n in 1..=4 {
            let z = logf_term(n, &[lin.clone(), SeriesSpec::exp(), unit.clone()]).unwrap();
            assert!(z.terms().all(|(w, _)| !w.letters().contains(&2)), "n={n}");
            let two = logf_term(n, &[lin.clone(), SeriesSpec::exp()]).unwrap();
            assert_eq!(z.len(), two.len());
            for (w, c) in two.terms() {
                assert_eq!(&z.coefficient(w), c);
            }
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(matches!(bch_term(0), Err(Error::InvalidOrder { got: 0, .. })));
        assert!(matches!(bch_term_multi(2, 1), Err(Error::InvalidFactorCount { got: 1, .. })));
        assert!(matches!(
            bch_term_multi(2, MAX_FACTORS + 1),
            Err(Error::InvalidFactorCount { .. })
        ));
    }

    #[test]
    fn symmetries_of_computed_terms() {
        for n in 1..=8 {
            let z = bch_term(n).unwrap();
            let sign = if n % 2 == 1 { int(1) } else { int(-1) };
            assert_eq!(z.homogeneous_degree(), Some(n));
            let swapped = z.map_words(|w| Word::new(w.letters().iter().map(|l| 1 - l).collect()));
            assert_eq!(swapped, z.scale(&sign), "swap n={n}");
            let reversed = z.map_words(Word::reversed);
            assert_eq!(reversed, z.scale(&sign), "reverse n={n}");
        }
    }

    #[test]
    fn relabel_keeps_coefficients() {
        let z = bch_term(2).unwrap();
        let ab = relabel(&z, Alphabet::new(["a", "b"]).unwrap()).unwrap();
        assert_eq!(ab.coefficient_of("ab"), Some(rat(1, 2)));
        assert!(relabel(&z, Alphabet::standard(3).unwrap()).is_err());
    }

    #[test]
    fn cache_is_consistent_across_threads() {
        let handles: Vec<_> = (0..4)
            .map(|_| std::thread::spawn(|| bch_term(6).unwrap()))
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let cold = logf_term_uncached(6, &[SeriesSpec::exp(), SeriesSpec::exp()]).unwrap();
        assert!(results.iter().all(|r| *r == cold));
    }
}

//! The output document and its three renderings: plain text, JSON, and a
//! LaTeX math fragment.

use std::fmt::Write as _;

use bchterm::{dynkin_substitute, Alphabet, NCSeries, Rational, SeriesSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub order: usize,
    /// `bch` (two exponentials), `multi` (more than two exponentials) or
    /// `logf` (at least one non-exponential factor).
    pub mode: String,
    pub factors: usize,
    pub letters: Vec<String>,
    /// Per-factor series fingerprints: `exp` or the coefficient list.
    pub series: Vec<String>,
    pub version: String,
}

/// One word with an exact coefficient; rationals are kept as decimal
/// integer strings so no precision is lost in transit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub word: String,
    pub numerator: String,
    pub denominator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub word: String,
    pub bracket: String,
    pub numerator: String,
    pub denominator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub metadata: Metadata,
    pub payload: Vec<TermEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynkin: Option<Vec<BracketEntry>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

pub fn mode_name(series: &[SeriesSpec]) -> &'static str {
    if series.iter().all(SeriesSpec::is_exp) {
        if series.len() == 2 {
            "bch"
        } else {
            "multi"
        }
    } else {
        "logf"
    }
}

fn split(c: &Rational) -> (String, String) {
    (c.numer().to_string(), c.denom().to_string())
}

impl TermEntry {
    pub fn coefficient(&self) -> Result<Rational, CliError> {
        parse_fraction(&self.numerator, &self.denominator)
    }
}

impl BracketEntry {
    pub fn coefficient(&self) -> Result<Rational, CliError> {
        parse_fraction(&self.numerator, &self.denominator)
    }
}

fn parse_fraction(numer: &str, denom: &str) -> Result<Rational, CliError> {
    format!("{numer}/{denom}")
        .parse()
        .map_err(|_| CliError::Format(format!("bad coefficient {numer}/{denom}")))
}

impl OutputDocument {
    /// Builds the document for a computed term. `term` must use `alphabet`.
    pub fn from_term(
        term: &NCSeries,
        series: &[SeriesSpec],
        with_dynkin: bool,
    ) -> Result<Self, CliError> {
        let alphabet = term.alphabet();
        let payload = term
            .terms()
            .map(|(w, c)| {
                let (numerator, denominator) = split(c);
                TermEntry {
                    word: alphabet.render(w),
                    numerator,
                    denominator,
                }
            })
            .collect();
        let dynkin = if with_dynkin {
            let terms = dynkin_substitute(term)?;
            Some(
                terms
                    .iter()
                    .map(|t| {
                        let (numerator, denominator) = split(&t.coefficient);
                        BracketEntry {
                            word: alphabet.render(&t.word),
                            bracket: t.bracket(alphabet),
                            numerator,
                            denominator,
                        }
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self {
            metadata: Metadata {
                order: term.max_degree(),
                mode: mode_name(series).to_string(),
                factors: series.len(),
                letters: alphabet.letters().to_vec(),
                series: series.iter().map(SeriesSpec::fingerprint).collect(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            payload,
            dynkin,
        })
    }

    /// Rebuilds the word series carried in the payload.
    pub fn to_series(&self) -> Result<NCSeries, CliError> {
        let alphabet = Alphabet::new(self.metadata.letters.iter().cloned())?;
        let mut out = NCSeries::zero(alphabet.clone(), self.metadata.order);
        for e in &self.payload {
            let w = alphabet
                .parse_word(&e.word)
                .ok_or_else(|| CliError::Format(format!("word {:?} not over the alphabet", e.word)))?;
            out.add_term(w, e.coefficient()?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Format(e.to_string()))
    }

    /// One `coefficient  word` line per term; Dynkin terms follow after a
    /// `# dynkin` marker line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.payload {
            let _ = writeln!(out, "{}  {}", fraction(&e.numerator, &e.denominator), e.word);
        }
        if let Some(dynkin) = &self.dynkin {
            out.push_str("# dynkin\n");
            for e in dynkin {
                let _ = writeln!(out, "{}  {}", fraction(&e.numerator, &e.denominator), e.bracket);
            }
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let mut out = format!("z_{{{}}} = {}", self.metadata.order, latex_sum(
            self.payload.iter().map(|e| (e.numerator.as_str(), e.denominator.as_str(), latex_word(&e.word))),
        ));
        if let Some(dynkin) = &self.dynkin {
            let _ = write!(
                out,
                " \\\\\nz_{{{}}} = {}",
                self.metadata.order,
                latex_sum(dynkin.iter().map(|e| {
                    (e.numerator.as_str(), e.denominator.as_str(), latex_word(&e.bracket))
                }))
            );
        }
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
            Format::Latex => self.to_latex(),
        }
    }
}

fn fraction(numer: &str, denom: &str) -> String {
    if denom == "1" {
        numer.to_string()
    } else {
        format!("{numer}/{denom}")
    }
}

fn latex_word(word: &str) -> String {
    // Multi-character letter names are space-separated already; keep them
    // upright so they read as single symbols.
    if word.contains(' ') {
        word.split(' ')
            .map(|l| format!("\\mathrm{{{l}}}"))
            .collect::<Vec<_>>()
            .join(" ")
    } else {
        word.to_string()
    }
}

fn latex_sum<'a>(terms: impl Iterator<Item = (&'a str, &'a str, String)>) -> String {
    let mut out = String::new();
    for (i, (numer, denom, word)) in terms.enumerate() {
        let negative = numer.starts_with('-');
        let abs = numer.trim_start_matches('-');
        if i == 0 {
            if negative {
                out.push_str("- ");
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if denom != "1" {
            let _ = write!(out, "\\frac{{{abs}}}{{{denom}}} {word}");
        } else if abs != "1" {
            let _ = write!(out, "{abs} {word}");
        } else {
            out.push_str(&word);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parses the payload section of the text rendering back into
/// `(word, coefficient)` pairs.
pub fn parse_text(text: &str) -> Result<Vec<(String, Rational)>, CliError> {
    let mut out = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') {
            break;
        }
        let (c, w) = line
            .split_once("  ")
            .ok_or_else(|| CliError::Format(format!("bad text line {line:?}")))?;
        let c: Rational = c
            .parse()
            .map_err(|_| CliError::Format(format!("bad coefficient {c:?}")))?;
        out.push((w.to_string(), c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bchterm::bch_term;

    fn doc(n: usize, dynkin: bool) -> OutputDocument {
        let series = [SeriesSpec::exp(), SeriesSpec::exp()];
        OutputDocument::from_term(&bch_term(n).unwrap(), &series, dynkin).unwrap()
    }

    #[test]
    fn text_rendering_of_z4() {
        let text = doc(4, false).to_text();
        assert_eq!(text, "1/24  xxyy\n-1/12  xyxy\n1/12  yxyx\n-1/24  yyxx\n");
    }

    #[test]
    fn latex_rendering_of_z2() {
        let d = doc(2, true);
        assert_eq!(
            d.to_latex(),
            "z_{2} = \\frac{1}{2} xy - \\frac{1}{2} yx \\\\\nz_{2} = \\frac{1}{4} [x,y] - \\frac{1}{4} [y,x]\n"
        );
        assert_eq!(doc(1, false).to_latex(), "z_{1} = x + y\n");
    }

    #[test]
    fn dynkin_text_section() {
        let text = doc(2, true).to_text();
        assert!(text.ends_with("# dynkin\n1/4  [x,y]\n-1/4  [y,x]\n"), "{text}");
    }

    #[test]
    fn json_round_trip_and_series() {
        let d = doc(5, true);
        let back = OutputDocument::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_series().unwrap(), bch_term(5).unwrap());
        assert_eq!(d.metadata.mode, "bch");
        assert_eq!(d.metadata.series, ["exp", "exp"]);
    }

    #[test]
    fn text_parses_back() {
        let d = doc(3, false);
        let parsed = parse_text(&d.to_text()).unwrap();
        assert_eq!(parsed.len(), d.payload.len());
        for ((w, c), e) in parsed.iter().zip(&d.payload) {
            assert_eq!(w, &e.word);
            assert_eq!(c, &e.coefficient().unwrap());
        }
    }
}

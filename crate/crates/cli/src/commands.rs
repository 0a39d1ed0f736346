use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use bchterm::bch::{bch_term, bch_term_multi, logf_term, logf_term_uncached, relabel};
use bchterm::dynkin::{dynkin_substitute, expand_commutators};
use bchterm::oracle::{oracle_bch, oracle_bch_exp, ORACLE_MAX_ORDER};
use bchterm::signed::{build_table, reconstruct_term, scan_order, Pruning, ScanReport, MAX_SIGNED_ORDER};
use bchterm::{Alphabet, NCSeries, Rational, SeriesSpec, Word};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::Serialize;

use crate::cache::{Cache, CacheKey};
use crate::document::{mode_name, Format, OutputDocument};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "bchterm", version, about = "Exact terms of log(e^x e^y) and its generalizations")]
pub struct Cli {
    /// Do not read or write the on-disk term cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the order-N term.
    Term(TermArgs),
    /// Cross-check the matrix pipeline against the independent routes.
    Verify(VerifyArgs),
    /// Look for sign assignments that vanish beyond the symmetry predictions.
    Scan(ScanArgs),
    /// Time the symbolic-matrix and signed-evaluation pipelines.
    Bench(BenchArgs),
}

#[derive(Debug, clap::Args)]
pub struct TermArgs {
    /// Order of the term (>= 1).
    pub n: usize,
    /// Number of factors in the product (default 2).
    #[arg(long)]
    pub factors: Option<usize>,
    /// Comma-separated letter names, one per factor.
    #[arg(long, value_delimiter = ',')]
    pub letters: Vec<String>,
    /// Power series for a factor: `exp` or coefficients `1,c1,c2,...`.
    /// Give once to use it for every factor, or once per factor.
    #[arg(long = "series", value_parser = parse_series)]
    pub series: Vec<SeriesSpec>,
    /// Also emit the Dynkin commutator form.
    #[arg(long)]
    pub dynkin: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyMode {
    /// Matrix terms vs. the free-algebra oracle (two letters).
    Oracle,
    /// Three-letter terms vs. the oracle, up to order 6.
    Multi,
    /// Log of products of non-exponential series vs. the oracle.
    Fseries,
    /// Sign-lattice reconstruction and pruning.
    Signed,
    /// Dynkin substitution round trip.
    Dynkin,
    /// Swap, reversal and vanishing identities.
    Symmetry,
}

impl VerifyMode {
    fn needs_oracle(self) -> bool {
        matches!(self, Self::Oracle | Self::Multi | Self::Fseries)
    }

    fn name(self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::Multi => "multi",
            Self::Fseries => "fseries",
            Self::Signed => "signed",
            Self::Dynkin => "dynkin",
            Self::Symmetry => "symmetry",
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Highest order to check.
    #[arg(required_unless_present = "against")]
    pub n_max: Option<usize>,
    /// Recompute the term described by a saved JSON document and compare.
    #[arg(long, value_name = "PATH", conflicts_with = "modes")]
    pub against: Option<PathBuf>,
    /// Comma-separated subset of checks (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub modes: Vec<VerifyMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct ScanArgs {
    /// Highest order to scan.
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    /// Inclusive order range `A..B` (or a single order). `A > B` is empty.
    #[arg(value_parser = parse_range)]
    pub range: OrderRange,
    /// Timed runs per order and pipeline; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub repeat: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderRange {
    pub start: usize,
    pub end: usize,
}

impl OrderRange {
    pub fn orders(self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

pub fn parse_range(s: &str) -> Result<OrderRange, String> {
    let bad = || format!("expected an order or a range A..B, got {s:?}");
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => Ok(OrderRange {
            start: num(a)?,
            end: num(b.strip_prefix('=').unwrap_or(b))?,
        }),
        None => {
            let n = num(s)?;
            Ok(OrderRange { start: n, end: n })
        }
    }
}

/// `exp`, or a comma-separated list of rationals starting with 1.
pub fn parse_series(s: &str) -> Result<SeriesSpec, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("exp") {
        return Ok(SeriesSpec::exp());
    }
    let coefficients = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Rational>()
                .map_err(|_| format!("bad coefficient {t:?} in series {s:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SeriesSpec::from_coefficients(coefficients).map_err(|e| e.to_string())
}

pub fn run(cli: &Cli, out: &mut dyn Write, diag: &mut dyn Write) -> Result<(), CliError> {
    let cache = if cli.no_cache { None } else { Cache::from_env() };
    match &cli.command {
        Command::Term(args) => cmd_term(args, cache.as_ref(), out, diag),
        Command::Verify(args) => cmd_verify(args, out),
        Command::Scan(args) => cmd_scan(args, out),
        Command::Bench(args) => cmd_bench(args, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("writing output", e))
}

/// Resolves factor count, per-factor series and alphabet from the flags.
pub fn resolve_term(args: &TermArgs) -> Result<(Vec<SeriesSpec>, Alphabet), CliError> {
    let m = args
        .factors
        .or((!args.letters.is_empty()).then_some(args.letters.len()))
        .or((args.series.len() > 1).then_some(args.series.len()))
        .unwrap_or(2);
    let series = match args.series.len() {
        0 => vec![SeriesSpec::exp(); m],
        1 => vec![args.series[0].clone(); m],
        k if k == m => args.series.clone(),
        k => {
            return Err(CliError::Usage(format!(
                "got {k} --series values for {m} factors; give one or {m}"
            )))
        }
    };
    let alphabet = if args.letters.is_empty() {
        Alphabet::standard(m)?
    } else if args.letters.len() != m {
        return Err(CliError::Usage(format!(
            "got {} letters for {m} factors",
            args.letters.len()
        )));
    } else {
        Alphabet::new(args.letters.iter().cloned())?
    };
    Ok((series, alphabet))
}

fn compute_document(
    n: usize,
    series: &[SeriesSpec],
    alphabet: &Alphabet,
    dynkin: bool,
) -> Result<OutputDocument, CliError> {
    let term = relabel(&logf_term(n, series)?, alphabet.clone())?;
    OutputDocument::from_term(&term, series, dynkin)
}

fn cmd_term(
    args: &TermArgs,
    cache: Option<&Cache>,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("order must be at least 1".into()));
    }
    let (series, alphabet) = resolve_term(args)?;
    let key = CacheKey {
        mode: mode_name(&series).to_string(),
        order: args.n,
        factors: series.len(),
        series: series.iter().map(SeriesSpec::fingerprint).collect(),
        letters: alphabet.letters().to_vec(),
        dynkin: args.dynkin,
    };
    let doc = match cache.and_then(|c| c.load(&key)) {
        Some(doc) => doc,
        None => {
            let doc = compute_document(args.n, &series, &alphabet, args.dynkin)?;
            if let Some(c) = cache {
                if let Err(e) = c.store(&key, &doc) {
                    let _ = writeln!(diag, "warning: cache not updated: {e}");
                }
            }
            doc
        }
    };
    let rendered = doc.render(args.format);
    match &args.out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e)),
        None => emit(out, &rendered),
    }
}

fn describe_mismatch(label: &str, a: &NCSeries, b: &NCSeries, names: (&str, &str)) -> Option<String> {
    a.first_difference(b).map(|(w, x, y)| {
        format!(
            "{label}: first differing word {}: {} {x}, {} {y}",
            a.render_word(&w),
            names.0,
            names.1
        )
    })
}

fn check_mode(mode: VerifyMode, n: usize) -> Result<Vec<String>, CliError> {
    let mut failures = Vec::new();
    match mode {
        VerifyMode::Oracle => {
            let (a, b) = (bch_term(n)?, oracle_bch_exp(n, 2)?);
            failures.extend(describe_mismatch("z_n", &a, &b, ("matrix", "oracle")));
        }
        VerifyMode::Multi => {
            let (a, b) = (bch_term_multi(n, 3)?, oracle_bch_exp(n, 3)?);
            failures.extend(describe_mismatch("three factors", &a, &b, ("matrix", "oracle")));
        }
        VerifyMode::Fseries => {
            let int = |v: i64| Rational::from_integer(v.into());
            let lin = SeriesSpec::from_coefficients(vec![int(1), int(1)])?;
            let other = SeriesSpec::from_coefficients(vec![
                int(1),
                Rational::new(2.into(), 3.into()),
                int(0),
                Rational::new((-1).into(), 5.into()),
            ])?;
            for (label, series) in [
                ("f=1+t", vec![lin.clone(), lin.clone()]),
                ("mixed factors", vec![other, SeriesSpec::exp(), lin]),
            ] {
                let (a, b) = (logf_term(n, &series)?, oracle_bch(n, &series)?);
                failures.extend(describe_mismatch(label, &a, &b, ("matrix", "oracle")));
            }
        }
        VerifyMode::Signed => {
            let table = build_table(n, Pruning::Symmetry)?;
            let (a, b) = (reconstruct_term(&table)?, bch_term(n)?);
            failures.extend(describe_mismatch("reconstruction", &a, &b, ("signed", "matrix")));
            if table != build_table(n, Pruning::None)? {
                failures.push("pruned and unpruned sign tables differ".into());
            }
        }
        VerifyMode::Dynkin => {
            let z = bch_term(n)?;
            let back = expand_commutators(&dynkin_substitute(&z)?, z.alphabet());
            failures.extend(describe_mismatch("round trip", &back, &z, ("expanded", "matrix")));
        }
        VerifyMode::Symmetry => {
            let z = bch_term(n)?;
            let sign = Rational::from_integer(if n % 2 == 1 { 1 } else { -1 }.into());
            let expected = z.scale(&sign);
            let swapped = z.map_words(|w| Word::new(w.letters().iter().map(|l| 1 - l).collect()));
            failures.extend(describe_mismatch("swap", &swapped, &expected, ("swapped", "expected")));
            let reversed = z.map_words(Word::reversed);
            failures.extend(describe_mismatch("reversal", &reversed, &expected, ("reversed", "expected")));
            if z.homogeneous_degree() != Some(n) {
                failures.push("term is not homogeneous".into());
            }
            let table = build_table(n, Pruning::None)?;
            for (s, v) in table.iter() {
                let odd_all_plus = n > 1 && n % 2 == 1 && s.minus_mask() == 0;
                if (s.plus_count() % 2 == 0 || odd_all_plus) && !v.is_zero() {
                    failures.push(format!("assignment {s} should vanish, value {v}"));
                }
                if *v != table.get(&s.reversed()) * &sign {
                    failures.push(format!("reversal fails at {s}"));
                }
            }
        }
    }
    Ok(failures)
}

fn verify_document(path: &std::path::Path, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    let doc = OutputDocument::from_json(&text)?;
    let stored = doc.to_series()?;
    let series = doc
        .metadata
        .series
        .iter()
        .map(|s| parse_series(s).map_err(CliError::Format))
        .collect::<Result<Vec<_>, _>>()?;
    let alphabet = stored.alphabet().clone();
    if series.len() != alphabet.len() {
        return Err(CliError::Format("series and letter counts differ".into()));
    }
    let fresh = relabel(&logf_term(doc.metadata.order, &series)?, alphabet)?;
    match describe_mismatch(&path.display().to_string(), &stored, &fresh, ("stored", "computed")) {
        Some(f) => {
            emit(out, &format!("{f}\n"))?;
            Err(CliError::Mismatch(f))
        }
        None => emit(out, &format!("{}: {} terms match\n", path.display(), fresh.len())),
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(path) = &args.against {
        return verify_document(path, out);
    }
    let n_max = args.n_max.expect("clap enforces n_max");
    let modes = if args.modes.is_empty() {
        VerifyMode::value_variants().to_vec()
    } else {
        args.modes.clone()
    };
    if n_max == 0 {
        return Err(CliError::Usage("n_max must be at least 1".into()));
    }
    if n_max > ORACLE_MAX_ORDER && modes.iter().any(|m| m.needs_oracle()) {
        return Err(CliError::Usage(format!(
            "oracle checks are limited to n <= {ORACLE_MAX_ORDER}; pass --modes signed,dynkin,symmetry for larger orders"
        )));
    }
    if n_max > MAX_SIGNED_ORDER {
        return Err(CliError::Usage(format!("n_max must be at most {MAX_SIGNED_ORDER}")));
    }
    let mut first_failure = None;
    let mut report = String::new();
    for mode in modes {
        let top = if mode == VerifyMode::Multi { n_max.min(6) } else { n_max };
        for n in 1..=top {
            let failures = check_mode(mode, n)?;
            let status = if failures.is_empty() { "PASS" } else { "FAIL" };
            report.push_str(&format!("n={n:<2} {:<8} {status}\n", mode.name()));
            for f in &failures {
                report.push_str(&format!("    {f}\n"));
            }
            if first_failure.is_none() {
                first_failure = failures
                    .first()
                    .map(|f| format!("{} at n={n}: {f}", mode.name()));
            }
            if mode == VerifyMode::Oracle && n == 7 {
                let word = Alphabet::xy().parse_word("yxxxyyy").expect("valid word");
                report.push_str(&format!(
                    "    yxxxyyy: matrix {}, oracle {}\n",
                    bch_term(7)?.coefficient(&word),
                    oracle_bch_exp(7, 2)?.coefficient(&word)
                ));
            }
        }
    }
    emit(out, &report)?;
    match first_failure {
        Some(f) => Err(CliError::Mismatch(f)),
        None => emit(out, "all checks passed\n"),
    }
}

#[derive(Debug, Serialize)]
struct ScanRow {
    n: usize,
    assignments: u64,
    pruned_zero: usize,
    structural_zero: usize,
    nonzero: usize,
    evaluated: usize,
    unexpected: Vec<String>,
    violated: Vec<String>,
}

impl From<&ScanReport> for ScanRow {
    fn from(r: &ScanReport) -> Self {
        Self {
            n: r.n,
            assignments: 1 << r.n,
            pruned_zero: r.pruned_zero,
            structural_zero: r.structural_zero,
            nonzero: r.nonzero,
            evaluated: r.evaluated,
            unexpected: r.unexpected.iter().map(ToString::to_string).collect(),
            violated: r.violated.iter().map(ToString::to_string).collect(),
        }
    }
}

fn cmd_scan(args: &ScanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.n_max == 0 || args.n_max > MAX_SIGNED_ORDER {
        return Err(CliError::Usage(format!(
            "n_max must be between 1 and {MAX_SIGNED_ORDER}"
        )));
    }
    let mut rows = Vec::new();
    for n in 1..=args.n_max {
        let report = scan_order(n)?;
        if args.format == ReportFormat::Text {
            emit(
                out,
                &format!(
                    "n={:<2} assignments {:>8}  predicted zero {:>8} (even +1 count {}, all-plus {})  nonzero {:>8}  unexpected {}\n",
                    n,
                    1u64 << n,
                    report.predicted_zero(),
                    report.pruned_zero,
                    report.structural_zero,
                    report.nonzero,
                    report.unexpected.len()
                ),
            )?;
            for s in &report.unexpected {
                emit(out, &format!("    unexpected zero at {s}\n"))?;
            }
            for s in &report.violated {
                emit(out, &format!("    predicted zero is nonzero at {s}\n"))?;
            }
        }
        rows.push(ScanRow::from(&report));
    }
    if args.format == ReportFormat::Json {
        let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
        text.push('\n');
        emit(out, &text)?;
    }
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.unexpected.is_empty() || !r.violated.is_empty())
        .map(|r| format!("n={}", r.n))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("unexpected vanishing at {}", bad.join(", "))))
    }
}

#[derive(Debug, Serialize)]
struct BenchRow {
    n: usize,
    pipeline: &'static str,
    median_ms: f64,
    terms: usize,
}

fn median_ms(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

fn time_pipeline(
    repeat: usize,
    mut f: impl FnMut() -> Result<NCSeries, CliError>,
) -> Result<(f64, usize), CliError> {
    let mut samples = Vec::with_capacity(repeat);
    let mut terms = 0;
    for _ in 0..repeat {
        let start = Instant::now();
        let z = f()?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
        terms = z.len();
    }
    Ok((median_ms(&mut samples), terms))
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    if args.range.start == 0 && args.range.end >= 1 {
        return Err(CliError::Usage("orders start at 1".into()));
    }
    if args.range.end > MAX_SIGNED_ORDER {
        return Err(CliError::Usage(format!("orders above {MAX_SIGNED_ORDER} are not supported")));
    }
    let exp2 = [SeriesSpec::exp(), SeriesSpec::exp()];
    let mut rows = Vec::new();
    for n in args.range.orders() {
        let (t, terms) = time_pipeline(args.repeat, || Ok(logf_term_uncached(n, &exp2)?))?;
        rows.push(BenchRow { n, pipeline: "symbolic", median_ms: t, terms });
        let (t, terms) = time_pipeline(args.repeat, || {
            Ok(reconstruct_term(&build_table(n, Pruning::Symmetry)?)?)
        })?;
        rows.push(BenchRow { n, pipeline: "signed", median_ms: t, terms });
    }
    match args.format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
            text.push('\n');
            emit(out, &text)
        }
        ReportFormat::Text => {
            let mut text = format!("{:>3}  {:<9} {:>12}  {:>6}\n", "n", "pipeline", "median_ms", "terms");
            for r in &rows {
                text.push_str(&format!(
                    "{:>3}  {:<9} {:>12.3}  {:>6}\n",
                    r.n, r.pipeline, r.median_ms, r.terms
                ));
            }
            emit(out, &text)
        }
    }
}

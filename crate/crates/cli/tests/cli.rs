use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bchterm::{bch_term, Rational};
use bchterm_cli::document::{parse_text, OutputDocument};
use serde_json::Value;

fn bchterm(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bchterm"))
        .args(args)
        .env("BCHTERM_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn ok(cache: &Path, args: &[&str]) -> String {
    let out = bchterm(cache, args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(cache: &Path, args: &[&str]) -> i32 {
    bchterm(cache, args).status.code().unwrap()
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn as_map(pairs: Vec<(String, Rational)>) -> BTreeMap<String, Rational> {
    pairs.into_iter().collect()
}

#[test]
fn term_four_text() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(dir.path(), &["--no-cache", "term", "4"]);
    assert_eq!(text, "1/24  xxyy\n-1/12  xyxy\n1/12  yxyx\n-1/24  yyxx\n");
}

#[test]
fn three_factor_term() {
    let dir = tempfile::tempdir().unwrap();
    let got = as_map(parse_text(&ok(dir.path(), &["term", "2", "--factors", "3"])).unwrap());
    let h = r(1, 2);
    let expected: BTreeMap<String, Rational> = [
        ("xy", h.clone()),
        ("xw", h.clone()),
        ("yx", -h.clone()),
        ("yw", h.clone()),
        ("wx", -h.clone()),
        ("wy", -h),
    ]
    .into_iter()
    .map(|(w, c)| (w.to_string(), c))
    .collect();
    assert_eq!(got, expected);
}

#[test]
fn linear_series_term() {
    let dir = tempfile::tempdir().unwrap();
    // log((1+x)(1+y)) at order 2 is xy - (x+y)^2/2.
    let got = as_map(parse_text(&ok(dir.path(), &["term", "2", "--series", "1,1"])).unwrap());
    let expected: BTreeMap<String, Rational> = [
        ("xx", r(-1, 2)),
        ("xy", r(1, 2)),
        ("yx", r(-1, 2)),
        ("yy", r(-1, 2)),
    ]
    .into_iter()
    .map(|(w, c)| (w.to_string(), c))
    .collect();
    assert_eq!(got, expected);
}

#[test]
fn custom_letters_and_per_factor_series() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        dir.path(),
        &["term", "2", "--letters", "a,b", "--series", "exp", "--series", "1,1"],
    );
    let got = as_map(parse_text(&text).unwrap());
    // log(e^a (1+b)) = a + b - b^2/2 + (ab - ba)/2 + ...
    assert_eq!(got["bb"], r(-1, 2));
    assert_eq!(got["ab"], r(1, 2));
    assert!(!got.contains_key("aa"));
}

#[test]
fn formats_carry_the_same_terms() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(dir.path(), &["term", "6", "--format", "text"]);
    let json = ok(dir.path(), &["term", "6", "--format", "json"]);
    let latex = ok(dir.path(), &["term", "6", "--format", "latex"]);

    let from_text = as_map(parse_text(&text).unwrap());
    let doc = OutputDocument::from_json(&json).unwrap();
    let from_json: BTreeMap<String, Rational> = doc
        .payload
        .iter()
        .map(|e| (e.word.clone(), e.coefficient().unwrap()))
        .collect();
    assert_eq!(from_text, from_json);
    assert_eq!(doc.to_series().unwrap(), bch_term(6).unwrap());

    assert!(latex.starts_with("z_{6} = "));
    let latex_terms = latex.matches(['+', '-']).count();
    assert_eq!(latex_terms, from_text.len(), "{latex}");
    for word in from_text.keys() {
        assert!(latex.contains(&format!(" {word}")), "{word} missing from {latex}");
    }

    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["metadata"]["order"], 6);
    assert_eq!(v["metadata"]["mode"], "bch");
    assert!(v.get("dynkin").is_none());
}

#[test]
fn dynkin_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(dir.path(), &["term", "3", "--dynkin"]);
    let (_, dynkin) = text.split_once("# dynkin\n").unwrap();
    assert!(dynkin.lines().any(|l| l.ends_with("[[x,y],x]")), "{dynkin}");
    let json = ok(dir.path(), &["term", "3", "--dynkin", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert!(v["dynkin"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = ok(dir.path(), &["term", "7", "--format", "json"]);
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let path = entries[0].as_ref().unwrap().path();
    assert_eq!(fs::read_to_string(&path).unwrap(), first);
    let second = ok(dir.path(), &["term", "7", "--format", "json"]);
    assert_eq!(first, second);

    // The cached entry is what gets served: a tampered entry shows up.
    let tampered = first.replacen("\"1512\"", "\"1513\"", 1);
    assert_ne!(tampered, first);
    fs::write(&path, &tampered).unwrap();
    assert_eq!(ok(dir.path(), &["term", "7", "--format", "json"]), tampered);
    assert_eq!(ok(dir.path(), &["--no-cache", "term", "7", "--format", "json"]), first);
}

#[test]
fn unwritable_cache_only_warns() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = bchterm(&blocker.join("sub"), &["term", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(parse_text(&String::from_utf8(out.stdout).unwrap()).unwrap().len(), 6);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z5.tex");
    let stdout = ok(
        dir.path(),
        &["term", "5", "--format", "latex", "--out", path.to_str().unwrap()],
    );
    assert!(stdout.is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("z_{5} = "));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["term", "0"]), 1);
    assert_eq!(code(d, &["term", "3", "--series", "2,1"]), 1);
    assert_eq!(code(d, &["term", "3", "--factors", "3", "--series", "exp", "--series", "exp"]), 1);
    assert_eq!(code(d, &["term", "3", "--letters", "x,x"]), 1);
    assert_eq!(code(d, &["verify", "11"]), 1);
    assert_eq!(code(d, &["scan", "25"]), 1);
    assert_eq!(code(d, &["bench", "x..y"]), 1);
    assert_eq!(code(d, &["frobnicate"]), 1);
    assert_eq!(code(d, &["--help"]), 0);
}

#[test]
fn mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z4.json");
    ok(
        dir.path(),
        &["term", "4", "--format", "json", "--out", path.to_str().unwrap()],
    );
    let good = ok(dir.path(), &["verify", "--against", path.to_str().unwrap()]);
    assert!(good.contains("4 terms match"), "{good}");

    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen("\"24\"", "\"25\"", 1)).unwrap();
    let out = bchterm(dir.path(), &["verify", "--against", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("xxyy") && report.contains("1/25") && report.contains("1/24"), "{report}");
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let missing = d.join("no/such/dir/out.txt");
    assert_eq!(code(d, &["term", "3", "--out", missing.to_str().unwrap()]), 3);
    let absent = d.join("absent.json");
    assert_eq!(code(d, &["verify", "--against", absent.to_str().unwrap()]), 3);
    let junk = d.join("junk.json");
    fs::write(&junk, "not json").unwrap();
    assert_eq!(code(d, &["verify", "--against", junk.to_str().unwrap()]), 3);
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["verify", "7"]);
    assert!(out.contains("yxxxyyy: matrix -1/1512, oracle -1/1512"), "{out}");
    assert!(out.ends_with("all checks passed\n"));
    assert!(!out.contains("FAIL"));
    let big = ok(dir.path(), &["verify", "12", "--modes", "signed,symmetry"]);
    assert!(big.contains("n=12 signed   PASS"), "{big}");
}

#[test]
fn scan_small_orders() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(dir.path(), &["scan", "3"]);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.ends_with("unexpected 0")), "{text}");

    let json = ok(dir.path(), &["scan", "2", "--format", "json"]);
    let rows: Value = serde_json::from_str(&json).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["unexpected"].as_array().unwrap().len(), 0);
        let total = row["pruned_zero"].as_u64().unwrap()
            + row["structural_zero"].as_u64().unwrap()
            + row["nonzero"].as_u64().unwrap();
        assert_eq!(total, row["assignments"].as_u64().unwrap());
    }
}

#[test]
fn bench_reports_term_counts() {
    let dir = tempfile::tempdir().unwrap();
    let json = ok(dir.path(), &["bench", "1..6", "--repeat", "1", "--format", "json"]);
    let rows: Value = serde_json::from_str(&json).unwrap();
    let counts: BTreeMap<(u64, String), u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                (r["n"].as_u64().unwrap(), r["pipeline"].as_str().unwrap().to_string()),
                r["terms"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(counts.len(), 12);
    for (n, expected) in [(1, 2), (2, 2), (3, 6), (4, 4)] {
        for p in ["symbolic", "signed"] {
            assert_eq!(counts[&(n, p.to_string())], expected, "n={n} {p}");
        }
    }
    for n in 5..=6 {
        assert_eq!(counts[&(n, "symbolic".into())], counts[&(n, "signed".into())]);
    }

    let empty = ok(dir.path(), &["bench", "5..2"]);
    assert_eq!(empty.lines().count(), 1, "header only: {empty}");
    assert_eq!(ok(dir.path(), &["bench", "5..2", "--format", "json"]).trim(), "[]");
}

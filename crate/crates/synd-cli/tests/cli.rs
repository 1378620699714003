//! End-to-end tests through the compiled binary: exit codes, report
//! shapes, byte determinism, and the dispatch coverage audit.

use std::io::Write;
use std::process::{Command, Output};

use synd::{q, Q};

fn synd_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synd"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout_of(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> &str {
    std::str::from_utf8(&out.stderr).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn parse_q(text: &str) -> Q {
    match text.split_once('/') {
        Some((n, d)) => q(n.parse().unwrap(), d.parse().unwrap()),
        None => q(text.parse().unwrap(), 1),
    }
}

fn dist(a: Q, b: Q) -> Q {
    if a > b { a - b } else { b - a }
}

#[test]
fn density_example_matches_published_tails() {
    let args = [
        "density",
        "--window",
        "1d:1048576",
        "--expr",
        "family(upper_pair).A",
    ];
    let first = synd_bin(&args);
    assert_eq!(code(&first), 0, "stderr: {}", stderr_of(&first));
    let text = stdout_of(&first);
    let mut lower = None;
    let mut upper = None;
    for line in text.lines() {
        if let Some(v) = line.strip_prefix("tail_lower,") {
            lower = Some(parse_q(v));
        }
        if let Some(v) = line.strip_prefix("tail_upper,") {
            upper = Some(parse_q(v));
        }
    }
    let (lower, upper) = (lower.expect("tail_lower row"), upper.expect("tail_upper row"));
    let tol = q(2, 100);
    assert!(dist(lower, q(1, 2)) <= tol, "lower {lower} not near 1/2");
    assert!(dist(upper, q(2, 3)) <= tol, "upper {upper} not near 2/3");

    // Identical invocations are byte-identical, with or without an
    // explicit thread count.
    let again = synd_bin(&args);
    assert_eq!(first.stdout, again.stdout);
    let threaded = synd_bin(&["--threads", "2"].iter().chain(&args).copied().collect::<Vec<_>>());
    assert_eq!(first.stdout, threaded.stdout);
}

#[test]
fn mann_exhaustive_example_is_violation_free() {
    let out = synd_bin(&["mann", "--exhaustive", "8"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "0 violations / 65536 pairs\n");
}

#[test]
fn malformed_expression_exits_two_with_byte_position() {
    let out = synd_bin(&["eval", "--expr", "interval(2,"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    let err = stderr_of(&out);
    assert!(err.contains("column 11"), "stderr: {err}");
}

#[test]
fn mann_pair_report_lists_densities() {
    let out = synd_bin(&[
        "mann",
        "--window",
        "1d:100",
        "--expr",
        "interval(1, 50)",
        "--expr",
        "interval(1, 50)",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("sigma_a 1/2\n"), "report: {text}");
    assert!(text.contains("holds true\n"), "report: {text}");
    assert!(text.contains("first_violation none\n"), "report: {text}");
}

#[test]
fn rle_out_file_round_trips_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.rle");
    let path_str = path.to_str().unwrap();
    let out = synd_bin(&[
        "eval",
        "--window",
        "1d:40",
        "--expr",
        "ap(3, 7, 5)",
        "--out",
        path_str,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("window 1 classical1d 40\n"), "file: {written}");

    // Reading the serialized set back emits the same bytes.
    let back = synd_bin(&["eval", "--file", path_str]);
    assert_eq!(code(&back), 0, "stderr: {}", stderr_of(&back));
    assert_eq!(stdout_of(&back), written);

    let json = synd_bin(&["eval", "--file", path_str, "--format", "json"]);
    assert_eq!(code(&json), 0);
    assert!(stdout_of(&json).contains("\"cardinality\": 5"), "json: {}", stdout_of(&json));

    // A --window that disagrees with the serialized header is refused.
    let clash = synd_bin(&["eval", "--file", path_str, "--window", "1d:39"]);
    assert_eq!(code(&clash), 2);
}

#[test]
fn eval_applies_block_growth_before_emitting() {
    let out = synd_bin(&[
        "eval",
        "--window",
        "1d:20",
        "--expr",
        "mod(2, {1})",
        "--dilate-block",
        "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "window 1 classical1d 20\nrun 0 20\n");
}

#[test]
fn family_pair_report_carries_both_sets() {
    let out = synd_bin(&["family", "--family", "upper_pair", "--window", "1d:64"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.starts_with("set A\nwindow 1 classical1d 64\n"), "report: {text}");
    assert!(text.contains("\nset B\nwindow 1 classical1d 64\n"), "report: {text}");
}

#[test]
fn family_accepts_construction_parameters() {
    let out = synd_bin(&[
        "family",
        "--family",
        "non_pws",
        "--param",
        "n0=4",
        "--window",
        "1d:200",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).starts_with("window 1 classical1d 200\n"));

    let unknown = synd_bin(&["family", "--family", "no_such", "--window", "1d:10"]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn search_m_reports_minimal_radius() {
    let out = synd_bin(&[
        "search-m",
        "--window",
        "1d:300",
        "--expr",
        "mod(3, {0})",
        "--mode",
        "lower",
        "--level",
        "9/10",
        "--epsilon",
        "0",
        "--k-max",
        "1",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "minimal m: 1\n");
}

#[test]
fn cover_checks_instances_and_audits_selections() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(
        f,
        r#"{{
  "ground": [[1], [2], [3], [4], [5], [6]],
  "subsets": [[[1], [2], [3]], [[3], [4]], [[5], [6]]],
  "mult_bound": 2,
  "threshold": "1/2",
  "target": [[3]]
}}"#
    )
    .unwrap();
    drop(f);
    let path_str = path.to_str().unwrap();

    let out = synd_bin(&["cover", "--file", path_str]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "lhs,1/6\nrhs,2/3\nholds,true\n");

    let json = synd_bin(&["cover", "--file", path_str, "--format", "json"]);
    assert_eq!(code(&json), 0);
    assert!(stdout_of(&json).contains("\"holds\": true"));

    // Shrinking the threshold turns the hypothesis false: exit 1.
    let tight = std::fs::read_to_string(&path).unwrap().replace("1/2", "1/10");
    std::fs::write(&path, tight).unwrap();
    let fail = synd_bin(&["cover", "--file", path_str]);
    assert_eq!(code(&fail), 1, "stderr: {}", stderr_of(&fail));

    let audit = synd_bin(&[
        "cover",
        "--besicovitch",
        "--dim",
        "2",
        "--count",
        "10",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&audit), 0, "stderr: {}", stderr_of(&audit));
    assert!(stdout_of(&audit).contains("audited 10 selections"));
}

#[test]
fn two_scale_reports_exact_fractions() {
    let out = synd_bin(&[
        "two-scale",
        "--window",
        "c1000:1",
        "--expr",
        "mod(2, {0})",
        "--inner",
        "100",
        "--smear",
        "10",
        "--delta",
        "1/4",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(
        stdout_of(&out),
        "fraction,1901/2001\nmeasure,1/1\nabs_diff,100/2001\n"
    );

    let synd_rows = synd_bin(&[
        "two-scale",
        "--syndetic",
        "--window",
        "c200:1",
        "--expr",
        "mod(2, {0})",
        "--expr",
        "mod(2, {1})",
        "--inner",
        "40",
        "--delta",
        "1/4",
        "--m-max",
        "2",
    ]);
    assert_eq!(code(&synd_rows), 0, "stderr: {}", stderr_of(&synd_rows));
    let text = stdout_of(&synd_rows);
    assert!(text.starts_with("m,fraction\n"), "report: {text}");
    assert!(text.lines().count() >= 2, "report: {text}");
}

#[test]
fn verify_example_upper_pair_fails_honestly() {
    // The desk-scale sumset witness tails sit far from the asymptotic
    // targets, so the second claim is expected to fail and the bundle
    // to exit 1. See the bundle's module comment.
    let out = synd_bin(&["verify-example", "upper-42"]);
    assert_eq!(code(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("claim 1 (operand tail densities): PASS"), "report: {text}");
    assert!(
        text.contains("claim 2 (sumset witness tail invariance): FAIL"),
        "report: {text}"
    );
    assert!(text.contains("example upper-42: 1 of 2 claims failed"), "report: {text}");
}

#[test]
fn verify_example_optimal_bundle_passes() {
    let out = synd_bin(&["verify-example", "optimal-41"]);
    assert_eq!(code(&out), 0, "report: {}", stdout_of(&out));
    assert!(stdout_of(&out).ends_with("example optimal-41: all claims hold\n"));
}

#[test]
fn verify_example_remaining_bundles_pass() {
    for name in ["epsilon-28", "big-44", "nonpws-12"] {
        let out = synd_bin(&["verify-example", name]);
        assert_eq!(code(&out), 0, "{name} report: {}", stdout_of(&out));
        assert!(
            stdout_of(&out).ends_with(&format!("example {name}: all claims hold\n")),
            "{name} report: {}",
            stdout_of(&out)
        );
    }
}

#[test]
fn help_prints_to_stdout_and_exits_zero() {
    let out = synd_bin(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).contains("verify-example"));

    let bare = synd_bin(&[]);
    assert_eq!(code(&bare), 2);
    assert!(!stderr_of(&bare).is_empty());
}

#[test]
fn dispatch_table_reaches_every_operation() {
    if let Err(e) = synd_cli::dispatch_is_complete() {
        panic!("{e}");
    }
}

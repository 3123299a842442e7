use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use korder::parse_sequence;

fn korder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_korder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = korder(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    stdout(&out)
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().skip(1).collect()
}

fn value_after(text: &str, key: &str) -> f64 {
    let start = text
        .find(key)
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
        + key.len();
    text[start..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn generate_pattern_shift_and_lex() {
    let ps = ok(&[
        "generate",
        "--n",
        "5",
        "--k",
        "3",
        "--algo",
        "pattern-shift",
    ]);
    assert_eq!(ps.lines().next(), Some("n=5 k=3"));
    assert_eq!(data_lines(&ps)[0], "0,1,2");

    let lex = ok(&["generate", "--n", "5", "--k", "3", "--algo", "lex"]);
    assert_eq!(&data_lines(&lex)[..2], ["0,1,2", "0,1,3"]);

    let bu = ok(&[
        "generate",
        "--n",
        "5",
        "--k",
        "3",
        "--algo",
        "base-unrank",
        "--base",
        "2",
    ]);
    assert_eq!(data_lines(&bu).len(), 10);
    let a: BTreeSet<_> = data_lines(&bu).into_iter().collect();
    let b: BTreeSet<_> = data_lines(&lex).into_iter().collect();
    assert_eq!(a, b);
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for algo in [
        "lex",
        "colex",
        "revdoor",
        "pattern-shift",
        "base-unrank",
        "prng-perm",
        "gse",
        "gse-reversed",
        "mis",
    ] {
        let path = dir.path().join(format!("{algo}.txt"));
        let path = path.to_str().unwrap();
        ok(&[
            "generate", "--n", "7", "--k", "3", "--algo", algo, "--out", path,
        ]);
        let text = fs::read_to_string(path).unwrap();
        let seq = parse_sequence(&text).unwrap();
        assert!(seq.is_complete(), "{algo}");
        assert_eq!(korder::sequence_to_string(&seq), text, "{algo}");
    }
}

#[test]
fn score_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let ps = write(
        dir.path(),
        "ps.txt",
        &ok(&[
            "generate",
            "--n",
            "5",
            "--k",
            "3",
            "--algo",
            "pattern-shift",
        ]),
    );
    assert_eq!(ok(&["score", &ps]).trim(), "U=67 |S|=16 T=4.1875");
    let lex = write(
        dir.path(),
        "lex.txt",
        &ok(&["generate", "--n", "5", "--k", "3", "--algo", "lex"]),
    );
    assert_eq!(ok(&["score", &lex]).trim(), "U=71 |S|=16 T=4.4375");

    let with_profile = ok(&["score", &ps, "--profile"]);
    let lines: Vec<&str> = with_profile.lines().collect();
    assert_eq!(lines[1], "i,query,D,scenes_remaining,cumulative_U");
    assert_eq!(lines[2], "1,0-1-2,4,12,4");
    assert!(lines.last().unwrap().ends_with(",0,67"));

    let json: serde_json::Value = serde_json::from_str(&ok(&["score", &ps, "--json"])).unwrap();
    assert_eq!(json["U"], 67);
    assert_eq!(json["scene_count"], 16);
}

#[test]
fn score_generated_on_the_fly() {
    let out = ok(&["score", "--n", "5", "--k", "3", "--algo", "lex"]);
    assert_eq!(out.trim(), "U=71 |S|=16 T=4.4375");
}

#[test]
fn missing_query_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let full = ok(&["generate", "--n", "5", "--k", "3", "--algo", "lex"]);
    let short: String = full
        .lines()
        .filter(|l| *l != "1,3,4")
        .map(|l| format!("{l}\n"))
        .collect();
    let path = write(dir.path(), "short.txt", &short);
    let out = korder(&["score", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("{1,3,4}"), "{}", stderr(&out));
}

#[test]
fn malformed_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.txt", "n=5 k=3\n0,2,1\n");
    assert_eq!(korder(&["score", &path]).status.code(), Some(1));
}

#[test]
fn sigma_values() {
    let s = value_after(&ok(&["sigma", "--n", "10", "--k", "3"]), "sigma=");
    assert!((s - 17.4).abs() <= 0.05, "{s}");
    let s = value_after(&ok(&["sigma", "--n", "20", "--k", "5"]), "sigma=");
    assert!((s - 322.5).abs() <= 0.05, "{s}");

    let curve = ok(&["sigma", "--n", "5", "--k", "3", "--remaining"]);
    assert_eq!(curve.lines().next(), Some("i,expected_remaining"));
    assert_eq!(curve.lines().count(), 11);
}

#[test]
fn random_baseline_closed_form_and_monte_carlo() {
    let out = ok(&["random-baseline", "--n", "5", "--k", "3"]);
    assert_eq!(value_after(&out, "expected="), 7.09375);

    let args = [
        "random-baseline",
        "--n",
        "5",
        "--k",
        "3",
        "--trials",
        "20000",
        "--seed",
        "3",
    ];
    let out = ok(&args);
    let mean = value_after(&out, "monte_carlo=");
    let se = value_after(&out, "stderr=");
    assert!((mean - 7.09375).abs() <= 4.0 * se, "{out}");
    assert_eq!(ok(&args), out);
}

#[test]
fn optimal_small_case() {
    let out = ok(&["optimal", "--n", "5", "--k", "3"]);
    assert!(out.starts_with("U=65 |S|=16 T=4.0625"), "{out}");
    let brute = ok(&["optimal", "--n", "5", "--k", "3", "--method", "brute-force"]);
    assert!(brute.starts_with("U=65 |S|=16"), "{brute}");
    assert!(brute.contains("worst U=71"), "{brute}");
    let bare = ok(&[
        "optimal",
        "--n",
        "5",
        "--k",
        "3",
        "--without",
        "p1",
        "--without",
        "p3",
    ]);
    assert!(bare.starts_with("U=65 |S|=16"), "{bare}");

    let json: serde_json::Value =
        serde_json::from_str(&ok(&["optimal", "--n", "4", "--k", "3", "--json"])).unwrap();
    assert_eq!(json["optimal_U"], 11);
    assert_eq!(json["scene_count"], 5);
}

#[test]
fn optimal_beyond_exact_range_is_capacity() {
    assert_eq!(
        korder(&["optimal", "--n", "7", "--k", "3"]).status.code(),
        Some(2)
    );
}

fn compare_rows(text: &str) -> Vec<(String, String, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].to_owned(),
                f[1].to_owned(),
                f[4].parse().unwrap_or(f64::NAN),
            )
        })
        .collect()
}

#[test]
fn compare_orders_by_score() {
    let out = ok(&[
        "compare",
        "--n",
        "10",
        "--k",
        "3",
        "--algos",
        "lex,pattern-shift,base-unrank,mis,gse",
    ]);
    assert_eq!(out.lines().next(), Some("algo,status,U,scenes,T"));
    let names: Vec<String> = compare_rows(&out)
        .into_iter()
        .map(|r| r.0)
        .filter(|n| n != "sigma" && n != "random-baseline")
        .collect();
    assert_eq!(names, ["gse", "mis", "base-unrank", "pattern-shift", "lex"]);
    let rows = compare_rows(&out);
    assert!(rows.iter().any(|r| r.0 == "sigma"));
    assert!(rows.windows(2).all(|w| w[0].2 <= w[1].2));
}

#[test]
fn compare_random_beats_pattern_shift_at_17() {
    let rows = compare_rows(&ok(&[
        "compare",
        "--n",
        "17",
        "--k",
        "3",
        "--algos",
        "pattern-shift",
    ]));
    let t = |name: &str| rows.iter().find(|r| r.0 == name).unwrap().2;
    assert!(t("random-baseline") < t("pattern-shift"));
}

#[test]
fn compare_all_ones_when_k_equals_n() {
    for row in compare_rows(&ok(&["compare", "--n", "4", "--k", "4"])) {
        assert_eq!(row.2, 1.0, "{row:?}");
    }
}

#[test]
fn compare_remaining_columns_and_archive() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("archive");
    let out = ok(&[
        "compare",
        "--n",
        "6",
        "--k",
        "3",
        "--algos",
        "lex,gse",
        "--remaining",
        "--archive",
        archive.to_str().unwrap(),
    ]);
    let header: Vec<&str> = out.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 5 + 20);
    assert_eq!(header[5], "R1");
    for line in out.lines() {
        assert_eq!(line.split(',').count(), header.len());
    }
    for name in ["lex_n6_k3.txt", "gse_n6_k3.txt"] {
        let text = fs::read_to_string(archive.join(name)).unwrap();
        assert!(parse_sequence(&text).unwrap().is_complete());
    }
}

#[test]
fn compare_reports_failures_per_row() {
    let out = korder(&[
        "compare",
        "--n",
        "6",
        "--k",
        "3",
        "--algos",
        "base-unrank,lex",
        "--base",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = compare_rows(&stdout(&out));
    let status = |name: &str| rows.iter().find(|r| r.0 == name).unwrap().1.clone();
    assert_eq!(status("base-unrank"), "error");
    assert_eq!(status("lex"), "ok");
    assert_eq!(rows.last().unwrap().0, "base-unrank");
    assert!(stderr(&out).contains("base-unrank"));

    let out = korder(&["compare", "--n", "30", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_compare_parses() {
    let json: serde_json::Value = serde_json::from_str(&ok(&[
        "compare", "--n", "5", "--k", "3", "--algos", "lex", "--json",
    ]))
    .unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().any(|r| r["algo"] == "lex" && r["U"] == 71));
}

#[test]
fn verify_default_range_passes() {
    let out = ok(&["verify"]);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
    assert!(out.contains("PASS oracle"));
}

#[test]
fn verify_flags_repeated_query() {
    let dir = tempfile::tempdir().unwrap();
    let lex = ok(&["generate", "--n", "5", "--k", "3", "--algo", "lex"]);
    let faulty = lex.replace("2,3,4\n", "0,1,2\n");
    let path = write(dir.path(), "faulty.txt", &faulty);
    let out = korder(&["verify", "--sequence", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL completeness"));
    assert!(stderr(&out).contains("repeated"));

    let good = write(dir.path(), "good.txt", &lex);
    assert!(ok(&["verify", "--sequence", &good]).contains("PASS scoring-equivalence U=71"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        korder(&["sigma", "--n", "3", "--k", "5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        korder(&["generate", "--n", "5", "--k", "3", "--algo", "nope"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        korder(&["generate", "--n", "64", "--k", "3", "--algo", "lex"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        korder(&["score", "--n", "25", "--k", "3", "--algo", "lex"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        korder(&[
            "generate",
            "--n",
            "5",
            "--k",
            "3",
            "--algo",
            "base-unrank",
            "--base",
            "1"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(korder(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_flags_give_identical_bytes() {
    let args = [
        "generate",
        "--n",
        "12",
        "--k",
        "4",
        "--algo",
        "prng-perm",
        "--seed",
        "99",
    ];
    assert_eq!(korder(&args).stdout, korder(&args).stdout);
    let other = korder(&[
        "generate",
        "--n",
        "12",
        "--k",
        "4",
        "--algo",
        "prng-perm",
        "--seed",
        "100",
    ]);
    assert_ne!(korder(&args).stdout, other.stdout);

    let compare = ["compare", "--n", "9", "--k", "3"];
    let mut single = vec!["--threads", "1"];
    single.extend_from_slice(&compare);
    assert_eq!(ok(&compare), ok(&single));
}

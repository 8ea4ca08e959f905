use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcs"))
        .args(args)
        .env_remove("DCS_BUDGET_NODES")
        .env_remove("DCS_BUDGET_MS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).expect("writable temp dir");
    p.to_str().expect("utf-8 path").to_string()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = dcs(&a);
    (code(&o), serde_json::from_str(&stdout(&o)).expect("json report"))
}

#[test]
fn convolve_prints_the_digit_string() {
    let o = dcs(&["convolve", "--k", "5", "--L", "1,3,7,9", "--t", "12", "--x", "354241"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "3152424\n");
}

#[test]
fn extremal_reports_max_and_witness() {
    let o = dcs(&["extremal", "--k", "2", "--levels", "0,1,2", "--structure", "cs-line", "--brute"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("max=4\n"), "{s}");
    assert!(s.contains("witness free: true") && s.contains("brute force max=4"), "{s}");
}

#[test]
fn line_search_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write(dir.path(), "yes.words", "# a line\n11\n22\n");
    let no = write(dir.path(), "no.words", "12\n21\n");
    let o = dcs(&["search-line", "--k", "2", "--n", "2", "--set", &yes]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("line vv\n"));
    let o = dcs(&["search-line", "--k", "2", "--n", "2", "--set", &no]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&dcs(&["bogus"])), 3);
    assert_eq!(code(&dcs(&["convolve", "--k", "5"])), 3);
    assert_eq!(code(&dcs(&["verify", "no-such-suite"])), 3);
    assert_eq!(code(&dcs(&["search-line", "--k", "2", "--n", "2", "--set", "/nonexistent/file"])), 3);
    assert_eq!(code(&dcs(&["regularize", "--k", "2", "--eps", "0.25", "--ell", "1", "--levels", "1", "--family", "x"])), 3);
    assert_eq!(code(&dcs(&["--help"])), 0);
}

#[test]
fn budget_exhaustion_exits_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_dcs"))
        .args(["extremal", "--k", "2", "--levels", "2", "--structure", "line"])
        .env("DCS_BUDGET_NODES", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = dcs(&["--budget-nodes", "1", "minimal", "cs", "--k", "2", "--d", "2", "--m", "1", "--r", "2", "--nmax", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn minimal_numbers() {
    let o = dcs(&["minimal", "cs", "--k", "2", "--d", "1", "--m", "1", "--r", "2", "--nmax", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("CS(2,1,1,2) = 1"));
    let o = dcs(&["minimal", "cs", "--k", "2", "--d", "2", "--m", "1", "--r", "2", "--nmax", "3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("CS(2,2,1,2) > 3"));
    assert!(stdout(&o).contains("counterexamples verified: true"));
}

#[test]
fn search_with_a_coloring_file() {
    let dir = tempfile::tempdir().unwrap();
    // Subtr_1([2]^{<3}) has 6 lines; a constant coloring makes the least
    // 2-dimensional subtree a witness.
    let c = write(dir.path(), "c.json", r#"{"r": 2, "colors": [1, 1, 1, 1, 1, 1]}"#);
    let (exit, rep) = json(&["search", "cs", "--k", "2", "--dim", "2", "--m", "1", "--coloring", &c]);
    assert_eq!(exit, 0);
    assert_eq!(rep["result"]["witness"], serde_json::json!({"k": 2, "c": "-", "ws": ["v", "v"]}));
    assert_eq!(rep["result"]["verified"], Value::Bool(true));
    let o = dcs(&["search-cstree", "--k", "2", "--dim", "2", "--m", "1", "--coloring", &c]);
    assert_eq!(code(&o), 0);
    let bad = write(dir.path(), "bad.json", r#"{"r": 2, "colors": [1, 2]}"#);
    assert_eq!(code(&dcs(&["search", "cs", "--k", "2", "--dim", "2", "--m", "1", "--coloring", &bad])), 3);
    let o = dcs(&["search", "gr", "--k", "2", "--dim", "2", "--m", "1", "--d", "1", "--random-coloring", "5", "--r", "2"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn bounds_patterns_and_coding() {
    let o = dcs(&["bounds", "eval", "reg", "--arg", "k=2", "--arg", "ell=1", "--arg", "q=1", "--arg", "eps=1/4"]);
    assert_eq!(stdout(&o), "reg = 1\n");
    let o = dcs(&["bounds", "eval", "nope"]);
    assert_eq!(code(&o), 3);
    let o = dcs(&["pattern-restrict", "--k", "2", "--p", "v1", "--L", "0,2", "--emit", "phi", "--x", "2"]);
    assert_eq!(stdout(&o), "21\n");
    let o = dcs(&["pattern-restrict", "--k", "2", "--p", "v1", "--L", "0,2"]);
    assert!(stdout(&o).starts_with("coded levels: 0,1\n"));
    let o = dcs(&["hl-code", "--b", "2,2", "--word", "(1,2)(2,1)"]);
    assert_eq!(stdout(&o), "(12, 21)\n");
    let o = dcs(&["hl-code", "--b", "2,2", "--word", "(1,2)", "--stem", "-", "--gens", "v"]);
    assert!(stdout(&o).contains("product: true, strong-subtree conditions: true"));
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "convolution-grid", "--k", "2", "--maxL", "3"],
        vec!["verify", "fact-5.2"],
        vec!["verify", "lemma-7.7"],
        vec!["verify", "fact-3.4", "--k", "2", "--n", "4"],
        vec!["--threads", "2", "verify", "probability"],
    ] {
        let o = dcs(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("PASS"), "{args:?}");
    }
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn reports_are_deterministic_and_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "a.words", "11\n12\n22\n");
    let fam = write(dir.path(), "f.words", "1\n2\n11\n12\n21\n22\n111\n222\n");
    let runs: Vec<Vec<&str>> = vec![
        vec!["dhj-reduce", "--k", "2", "--n", "2", "--delta", "1/2", "--set", &set],
        vec!["search-line", "--k", "2", "--n", "2", "--set", &set],
        vec!["regularize", "--k", "2", "--eps", "1/2", "--ell", "2", "--levels", "1,2,3", "--family", &fam],
        vec!["extremal", "--k", "2", "--levels", "2", "--structure", "line"],
        vec!["minimal", "cs", "--k", "2", "--d", "2", "--m", "1", "--r", "2", "--nmax", "2"],
        vec!["convolve", "--k", "5", "--L", "1,3,7,9", "--t", "12", "--x", "354241"],
    ];
    for args in runs {
        let (e1, r1) = json(&args);
        let (e2, r2) = json(&args);
        assert_eq!(e1, e2);
        assert_eq!(strip_timing(r1.clone()), strip_timing(r2), "{args:?}");
        assert_eq!(r1["exit"].as_i64(), Some(e1 as i64));
        assert!(r1["certificates"].as_array().unwrap().iter().all(|c| c["holds"] == Value::Bool(true)));
        let path = write(dir.path(), "report.json", &serde_json::to_string(&r1).unwrap());
        let o = dcs(&["recheck", &path]);
        assert_eq!(code(&o), 0, "{args:?}: {}", stdout(&o));
    }
}

#[test]
fn recheck_rejects_tampered_reports() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(dir.path(), "a.words", "11\n12\n22\n");
    let (_, mut rep) = json(&["dhj-reduce", "--k", "2", "--n", "2", "--delta", "1/2", "--set", &set]);
    // The embedded input is used, so removing the file changes nothing.
    std::fs::remove_file(&set).unwrap();
    let good = write(dir.path(), "good.json", &serde_json::to_string(&rep).unwrap());
    assert_eq!(code(&dcs(&["recheck", &good])), 0);
    let mut denser = rep.clone();
    denser["inputs"][&set] = Value::String("11\n12\n21\n22\n".into());
    let bad = write(dir.path(), "bad.json", &serde_json::to_string(&denser).unwrap());
    let o = dcs(&["recheck", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("inputs digest differs"));
    // Too sparse for the reduction: the rerun itself fails.
    rep["inputs"][&set] = Value::String("11\n".into());
    let bad = write(dir.path(), "bad.json", &serde_json::to_string(&rep).unwrap());
    let o = dcs(&["recheck", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("now fails"));
}

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn lagmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagmatch"))
        .args(args)
        .env_remove("LAGMATCH_THREADS")
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lagmatch"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn line(o: &Output, key: &str) -> String {
    let prefix = format!("{key}: ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("no '{key}' in:\n{}", stdout(o)))
}

#[test]
fn dim_reports_golden_dimensions() {
    let torus = lagmatch(&["dim", "--fixture", "torus"]);
    assert!(torus.status.success());
    assert_eq!(line(&torus, "structures[0].d"), "1");
    assert_eq!(
        line(&torus, "structures[0].admissibility"),
        "monotone_regime"
    );
    let klein = lagmatch(&["dim", "--fixture", "klein"]);
    assert_eq!(line(&klein, "structures[0].d"), "4");
    assert_eq!(line(&klein, "structures[0].c1_squared"), "24");
}

#[test]
fn tqft_eval_examples() {
    let anosov = lagmatch(&["tqft-eval", "--fixture", "anosov"]);
    assert_eq!(line(&anosov, "value"), "1");
    assert_eq!(line(&anosov, "fibered.agreement"), "pass");
    let sep = lagmatch(&["tqft-eval", "--fixture", "separating"]);
    assert_eq!(line(&sep, "value"), "0");
    assert_eq!(line(&sep, "reason"), "separating vanishing");
    let sphere = lagmatch(&["tqft-eval", "--fixture", "sphere_identity"]);
    assert_eq!(line(&sphere, "value"), "3");
}

#[test]
fn example_invariants() {
    let a = lagmatch(&["example", "s2xs2", "--m", "2", "--n", "1"]);
    assert_eq!(line(&a, "invariant"), "U^5");
    let b = lagmatch(&["example", "s1s3_sum", "--m", "1", "--n", "2"]);
    assert_eq!(line(&b, "invariant"), "±U^1 ⊗ λ");
    let c = lagmatch(&["example", "s2xs2", "--m", "-1", "--n", "1"]);
    assert_eq!(line(&c, "invariant"), "0");
}

#[test]
fn unknown_example_lists_names() {
    let o = lagmatch(&["example", "cp2", "--m", "0", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("s2xs2") && err.contains("s1s3_sum"), "{err}");
}

#[test]
fn cz_rotation_and_sum() {
    let one = lagmatch(&["cz", "--fixture", "cz_rotation"]);
    assert_eq!(line(&one, "total"), "1");
    let pair = lagmatch(&["cz", "--fixture", "cz_pair"]);
    assert_eq!(line(&pair, "paths[0].index"), "1");
    assert_eq!(line(&pair, "paths[1].index"), "3");
    assert_eq!(line(&pair, "total"), "4");
}

#[test]
fn cz_constant_identity_is_degenerate() {
    let doc = r#"{"version": 1, "cz": {"paths": [[[[1,0],[0,1]], [[1,0],[0,1]]]]}}"#;
    let o = with_stdin(&["cz", "--input", "-"], doc);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn coarse_cz_samples_hit_resolution_guard() {
    // a full turn in two steps
    let doc =
        r#"{"version": 1, "cz": {"paths": [[[[1,0],[0,1]], [[-1,0],[0,-1]], [[0,-1],[1,0]]]]}}"#;
    let o = with_stdin(&["cz", "--input", "-"], doc);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn malformed_documents_exit_2() {
    assert_eq!(
        with_stdin(&["dim", "--input", "-"], "{not json")
            .status
            .code(),
        Some(2)
    );
    let unknown_key = r#"{"version": 1, "extra": 1}"#;
    assert_eq!(
        with_stdin(&["dim", "--input", "-"], unknown_key)
            .status
            .code(),
        Some(2)
    );
    let wrong_version = r#"{"version": 2}"#;
    assert_eq!(
        with_stdin(&["dim", "--input", "-"], wrong_version)
            .status
            .code(),
        Some(2)
    );
    let float_genus = r#"{"version": 1, "morse_cycle": {"genus": 1.5, "points": 1, "moves": []}}"#;
    assert_eq!(
        with_stdin(&["tqft-eval", "--input", "-"], float_genus)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lagmatch(&["dim"]).status.code(), Some(2));
}

#[test]
fn non_closing_cycle_exits_3() {
    let doc = r#"{"version": 1, "morse_cycle": {"genus": 1, "points": 1,
        "moves": [{"down": {"circle": [1, 0]}}]}}"#;
    let o = with_stdin(&["tqft-eval", "--input", "-"], doc);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn bad_thread_count_exits_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_lagmatch"))
        .args(["dim", "--fixture", "torus"])
        .env("LAGMATCH_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_round_trips_numbers() {
    let o = lagmatch(&["gradings", "--fixture", "gradings", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["modulus"], 2);
    assert_eq!(v["w_lambda"]["w"][0], "-1/3");
    assert_eq!(v["restrictions"]["consistent"], true);
    let text = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(text, stdout(&o));
}

#[test]
fn input_file_matches_fixture() {
    let dir = std::env::temp_dir().join(format!("lagmatch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("torus.json");
    std::fs::write(&path, lagmatch::cli::fixtures::get("torus").unwrap()).unwrap();
    let from_file = lagmatch(&["dim", "--input", path.to_str().unwrap()]);
    let from_fixture = lagmatch(&["dim", "--fixture", "torus"]);
    assert_eq!(from_file.stdout, from_fixture.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

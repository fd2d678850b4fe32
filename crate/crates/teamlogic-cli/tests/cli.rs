use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamlogic")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("teamlogic-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn fixtures(name: &str, rows: &[&str]) -> (PathBuf, String, String) {
    let dir = scratch(name);
    let model = dir.join("m.model");
    let team = dir.join("t.team");
    std::fs::write(&model, "# two elements\ndomain a b\nrel P 1\n  a\nconst c b\n").unwrap();
    let mut t = String::from("vars x y\n");
    for r in rows {
        t.push_str(&format!("row {r}\n"));
    }
    std::fs::write(&team, t).unwrap();
    let (m, t) = (model.display().to_string(), team.display().to_string());
    (dir, m, t)
}

#[test]
fn check_reports_unsat_for_a_broken_dependence() {
    let (_d, m, t) = fixtures("unsat", &["a a", "a b"]);
    let o = run(&["check", "--model", &m, "--team", &t, "--formula", "=(x; y)"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "UNSAT");
}

#[test]
fn check_uses_relations_and_constants() {
    let (_d, m, t) = fixtures("symbols", &["a b", "a a"]);
    let o = run(&["check", "--model", &m, "--team", &t, "--formula", "P(x) /\\ (y = 'c \\/ y != 'c)"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "SAT");
}

#[test]
fn empty_team_satisfies_everything() {
    let (_d, m, t) = fixtures("empty", &[]);
    let o = run(&["check", "--model", &m, "--team", &t, "--formula", "=(x; y) /\\ x != x"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "SAT");
}

#[test]
fn malformed_input_exits_with_two() {
    let (_d, m, t) = fixtures("malformed", &["a a"]);
    assert_eq!(code(&run(&["check", "--model", &m, "--team", &t, "--formula", "=(x; "])), 2);
    assert_eq!(code(&run(&["check", "--model", &m, "--team", &t, "--formula", "=(x; z)"])), 2);
    assert_eq!(code(&run(&["check", "--model", "/nonexistent", "--team", &t, "--formula", "x = y"])), 2);
    assert_eq!(code(&run(&["entail", "--concl", "x = y", "--bogus"])), 2);
    assert_eq!(code(&run(&["entail", "--concl", "x = y", "--max-domain", "0"])), 2);
    assert_eq!(code(&run(&["props", "--suite", "no-such-suite"])), 2);
}

#[test]
fn armstrong_transitivity_is_valid() {
    let o = run(&["entail", "--hyp", "=(x; y)", "--hyp", "=(y; z)", "--concl", "=(x; z)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("VALID-UP-TO 2"));
}

#[test]
fn dependence_symmetry_dumps_a_counterexample() {
    let dir = scratch("cx");
    let prefix = dir.join("witness");
    let o = run(&["entail", "--hyp", "=(x; y)", "--concl", "=(y; x)", "--out", prefix.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("COUNTEREXAMPLE"));
    let model = prefix.with_extension("model");
    let team = prefix.with_extension("team");
    let back =
        run(&["check", "--model", model.to_str().unwrap(), "--team", team.to_str().unwrap(), "--formula", "=(x; y)"]);
    assert_eq!(code(&back), 0);
    let back =
        run(&["check", "--model", model.to_str().unwrap(), "--team", team.to_str().unwrap(), "--formula", "=(y; x)"]);
    assert_eq!(code(&back), 1);
}

#[test]
fn machine_output_is_key_value() {
    let o = run(&["--machine", "entail", "--hyp", "=(x; y)", "--concl", "=(y; x)"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.contains('=')), "{out}");
    assert!(out.lines().any(|l| l == "verdict=counterexample"));
    let o = run(&["--machine", "negate", "--formula", "x = y"]);
    assert_eq!(stdout(&o).trim(), "negation=E w1. E w2. (inc(w1, w2; x, y) /\\ w1 != w2)");
}

#[test]
fn negation_of_an_equality() {
    let o = run(&["negate", "--formula", "x = y"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "E w1. E w2. (inc(w1, w2; x, y) /\\ w1 != w2)");
    let o = run(&["negate", "--formula", "E x. =(x; y)"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("OUTSIDE-FRAGMENT"));
}

#[test]
fn translation_of_an_atom() {
    let o = run(&["translate", "--formula", "inc(x; y)"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("eso: ")));
    assert!(out.lines().any(|l| l.starts_with("sigma-pi: ")));
    let o = run(&["translate", "--formula", "E x. (inc(x; y) \\/ x = y)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("E2 "), "{}", stdout(&o));
}

#[test]
fn prove_accepts_and_rejects() {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../teamlogic/corpus");
    let script = corpus.join("dep_transitivity_core.proof");
    let o = run(&["prove", "--script", script.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("ACCEPTED"));
    let dir = scratch("prove");
    let bad = dir.join("bad.proof");
    std::fs::write(&bad, "1. =(x; y) ; hyp\n2. =(y; x) ; hyp\n3. =(y; x) /\\ =(x; y) ; andI 1 2\n").unwrap();
    let o = run(&["prove", "--script", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("REJECTED"));
    std::fs::write(&bad, "1. =(x; ; hyp\n").unwrap();
    assert_eq!(code(&run(&["prove", "--script", bad.to_str().unwrap()])), 2);
}

#[test]
fn props_reports_counts() {
    let o = run(&["props", "--suite", "empty-team", "--suite", "fo-wneg", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("empty-team: PASS (100 checks, 0 failures)"), "{out}");
    assert!(out.contains("fo-wneg: PASS"));
    let o = run(&["--machine", "props", "--suite", "simulation"]);
    assert_eq!(stdout(&o).trim(), "suite=simulation status=pass checks=200 failures=0");
}

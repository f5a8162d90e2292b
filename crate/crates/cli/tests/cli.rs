use std::process::{Command, Output};

const SIG0: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../sigs/sig0.sexp");

fn glue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glue")).args(args).output().expect("glue runs")
}

fn stdout(o: &Output) -> &str {
    std::str::from_utf8(&o.stdout).unwrap().trim_end()
}

#[test]
fn norm_eta_expands_a_variable() {
    let o = glue(&["norm", "-s", SIG0, "-c", "((arr a a))", "-t", "v"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(lam a (app (ix 1) v))");
}

#[test]
fn eq_on_a_beta_redex() {
    let o = glue(&["eq", "-s", SIG0, "-c", "(a)", "-t1", "(app (lam a v) v)", "-t2", "v"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true");
}

#[test]
fn check_reads_the_arity() {
    let o = glue(&["check", "-s", SIG0, "-c", "()", "-t", "(op c)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a");
}

#[test]
fn unequal_terms_exit_one() {
    for cmd in ["eq", "oracle-eq"] {
        let o = glue(&[cmd, "-s", SIG0, "-c", "(a)", "-t1", "(sub (op c) p)", "-t2", "v"]);
        assert_eq!(o.status.code(), Some(1), "{cmd}");
        assert_eq!(stdout(&o), "false");
    }
}

#[test]
fn bad_input_exits_two() {
    let cases: &[&[&str]] = &[
        &["norm", "-s", SIG0, "-t", "(app v"],
        &["norm", "-s", SIG0, "-c", "(a)", "-t", "(app v v)"],
        &["check", "-s", SIG0, "-t", "(op nope)"],
        &["check", "-s", SIG0, "-c", "(z)", "-t", "v"],
        &["check", "-s", "/no/such/file", "-t", "v"],
        &["eq", "-s", SIG0, "-c", "(a)", "-t1", "v", "-t2", "(lam a v)"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = glue(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn parse_errors_carry_a_position() {
    let o = glue(&["norm", "-s", SIG0, "-t", "(lam a"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("term:1:"), "{err}");
}

#[test]
fn json_nf_round_trips() {
    use glue_core::normal::{readback_nf, Nf};
    let o = glue(&["norm", "--json", "-s", SIG0, "-c", "((arr a a) a)", "-t", "(ix 1)"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n: Nf = serde_json::from_value(v["nf"].clone()).unwrap();
    assert_eq!(readback_nf(&n).to_string(), v["term"].as_str().unwrap());
    let ty: glue_core::signature::Ty = serde_json::from_value(v["type"].clone()).unwrap();
    assert_eq!(ty.to_string(), "(arr a a)");
}

#[test]
fn trace_lists_rules() {
    let o = glue(&["oracle-eq", "--json", "--trace", "-s", SIG0, "-c", "(a)", "-t1", "(app (lam a v) v)", "-t2", "v"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["equal"], true);
    let steps = v["traces"][0]["steps"].as_array().unwrap();
    assert_eq!(steps[0]["rule"], "app/beta");
    assert_eq!(v["traces"][1]["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn fuzz_small_run() {
    let o = glue(&["fuzz", "--seed", "3", "--count", "40", "--max-size", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("seed 3 count 40 max-size 12"), "{out}");
    assert!(out.ends_with("all properties hold"));
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 9);
}

#[test]
fn fuzz_json_report() {
    let o = glue(&["fuzz", "--json", "--seed", "1", "--count", "20", "-s", SIG0]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 9);
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tanaka-kit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("tanaka-kit-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn prolong_reports_dims_and_total() {
    let o = run(&["prolong", &fixture("sec3_5_fprime.json"), "--kmax", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dims"], serde_json::json!([2, 0]));
    assert_eq!(v["total"], 9);
    let o = run(&["prolong", &fixture("sec3_5_fprime.json"), "--kmax", "2"]);
    assert!(stdout(&o).starts_with("dims [2, 0]\ntotal 9\n"));
}

#[test]
fn deform_streams_a_trace_ending_in_a_contradiction() {
    let o = run(&["deform", &fixture("sec3_5_case_i.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("branch 0\n"));
    assert!(out.contains("=> inconsistent: 1 = 0 (NonzeroConstant"), "{out}");
    assert!(out.ends_with("verdict Inconsistent\n"));
    let o = run(&["deform", &fixture("sec3_5_case_i.json"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["verdict"], "Inconsistent");
    assert_eq!(v[0]["branches"][0]["certificate"]["kind"], "nonzero_constant");
    assert_eq!(v[0]["branches"][0]["replay_ok"], true);
}

#[test]
fn unexpected_verdicts_exit_one() {
    let text = std::fs::read_to_string(fixture("sec3_5_case_i.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["expect"]["verdict"] = "Consistent".into();
    let p = temp("wrong-verdict.json", &v.to_string());
    let o = run(&["deform", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unexpected verdict"));
    let p = temp(
        "wrong-curve.json",
        r#"{"schema":"curve.v1","components":["1","t","t^2","t^3"],"expect":{"wronskian":"13"}}"#,
    );
    assert_eq!(run(&["curve", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn malformed_input_exits_two_with_position() {
    let p = temp("bad.json", "{\"schema\": \"liealg.v1\",\n  \"basis\": [1,}");
    let o = run(&["prolong", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2 column"), "{}", stderr(&o));
    let p = temp("bad-curve.json", r#"{"schema":"curve.v1","components":["1","t","t^2","t^^3"]}"#);
    let o = run(&["curve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("column 3"), "{}", stderr(&o));
    assert_eq!(run(&["prolong", "/nonexistent/fixture.json"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_tanaka-kit")).args(["catalog"]).env("TANAKA_KIT_JOBS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tube_reports_are_deterministic() {
    let args = ["tube", &fixture("rational_normal_curve.json"), "--inclusions", "--sections", "--symmetries", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["ranks"]["k10"], 2);
    assert_eq!(v["sections"]["z10"], serde_json::json!(["4*s^2", "0", "0"]));
    let o = run(&["tube", "hyperquadric", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ranks"]["k10"], 0);
    let o = run(&["tube", &fixture("quartic_osculating.json"), "--variant", "osculating", "--symmetries"]);
    assert!(stdout(&o).contains("rho: not a symmetry"));
}

#[test]
fn verify_paper_subset_is_deterministic() {
    let fx = fixture("");
    let args = ["verify-paper", "--fixtures", &fx, "--only", "1,2,3,5,8", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["criteria"].as_array().unwrap().len(), 5);
    let o = run(&["verify-paper", "--fixtures", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_lists_twelve_rows() {
    let o = run(&["catalog", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r["nondegenerate"] == "true" && r["jordan_nondegenerate_at_sample"] == true));
}

#[test]
fn report_can_be_written_to_a_file() {
    let out = std::env::temp_dir().join(format!("tanaka-kit-cli-{}-out.json", std::process::id()));
    let o = run(&["curve", &fixture("rational_normal_curve.json"), "--json", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["wronskian"], "12");
}

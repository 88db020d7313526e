use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_massey"))
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn exponent_examples() {
    let out = run(&["exponent", "--n", "4", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["e"], 2);
    assert_eq!(r["results"]["d"], 4);
    assert_eq!(r["results"]["class_count"], 40);
    assert_eq!(r["passed"], true);

    let r = json(&run(&["exponent", "--n", "2", "--p", "5"]));
    assert_eq!(r["results"]["e"], 5);

    let out = run(&["exponent", "--n", "7", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["open_case"], true);
    assert_eq!(r["results"]["e"], 2);
    assert_eq!(r["results"]["u1_order"], 1u64 << 21);
}

#[test]
fn exit_codes() {
    let out = run(&["exponent", "--n", "6", "--p", "3", "--max-elems", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("14348907 > 1000"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let out = run(&["exponent", "--n", "3", "--p", "4"]);
    assert_eq!(out.status.code(), Some(4));

    let out = run(&["suite", "nope"]);
    assert_eq!(out.status.code(), Some(4));

    let out = run(&["run", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(4));

    // a failing expectation is a check failure; the report is still written
    let file = r#"{"kind":"brauer","n":4,"p":2,"generators":[{"a":[1,1,0,1]},{"a":[1,0,1,1]}],"expect":{"formula_dim":2}}"#;
    let out = run_stdin(&["run", "-"], file);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    let failing: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["witness"]["got"], 1);
}

#[test]
fn schema_errors_name_the_path() {
    let cases = [
        (r#"{"kind":"massey","group":{"cyclic":2},"n":2,"p":2,"alpha":[[0],["x"]]}"#, "alpha[1][0]"),
        (r#"{"kind":"massey","group":{"product":[{"cyclic":2},{"dihedra":3}]},"n":2,"p":2,"alpha":[[0],[0]]}"#, "group.product[1]"),
        (r#"{"kind":"massey","group":{"cyclic":2},"n":3,"p":2,"alpha":[[0],[0]]}"#, "`alpha`: expected 3 entries"),
        (r#"{"kind":"massey","group":{"cyclic":2},"n":2,"p":2,"alpha":[[0],[2]]}"#, "`alpha[1][0]` = 2"),
        (r#"{"kind":"massey","group":{"cyclic":2},"n":2,"p":2,"alpha":[[0],[0]],"extra":1}"#, "unknown field `extra`"),
        (r#"{"kind":"brauer","n":4,"p":2,"generators":[{"a":[1,1,0]}]}"#, "generators[0].a"),
        (r#"{"kind":"brauer","n":4,"p":2,"generators":[{"a":[1,1,0,1],"chi":"q"}]}"#, "generators[0].chi"),
        (r#"{"kind":"brauer","n":4,"p":2}"#, "exactly one of `generators` and `scan`"),
        (r#"{"kind":"embedding","group":{"cyclic":2},"n":2,"p":2,"kernel":"center","alpha":[[[1,1,0],[1,1,0],[0,0,1]]]}"#, "alpha[0][1][0]"),
        (r#"{"kind":"group","group":{"table":{"rows":[[0,1],[1,1]]}}}"#, "invalid group"),
        (r#"{"kind":"wat"}"#, "unknown kind `wat`"),
        (r#"[1, 2]"#, "JSON object"),
    ];
    for (file, needle) in cases {
        let out = run_stdin(&["run", "-"], file);
        assert_eq!(out.status.code(), Some(4), "{file}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{file}: {}", stderr(&out));
    }
    // α that is not a homomorphism: Z/3 → Z/2 with a nonzero value
    let out = run_stdin(&["run", "-"], r#"{"kind":"massey","group":{"cyclic":3},"n":2,"p":2,"alpha":[[1],[0]]}"#);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bundled_n4_example_has_formula_dim_one() {
    let path = crate_dir().join("examples/e_n4.json");
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["results"]["formula_dim"], 1);
    assert_eq!(r["results"]["sha_dim"], 1);
    assert_eq!(r["results"]["sha_b0_dim"], 0);
    assert_eq!(r["results"]["group_order"], 4);
}

#[test]
fn trivial_massey_problem_is_defined_and_vanishes() {
    let path = crate_dir().join("examples/massey_trivial.json");
    let r = json(&run(&["run", path.to_str().unwrap()]));
    assert_eq!(r["results"]["defined"], true);
    assert_eq!(r["results"]["vanishes"], true);
    let out = run_stdin(
        &["run", "-"],
        r#"{"kind":"massey","group":"quaternion","n":4,"p":2,"alpha":[[0,0],[0,0],[0,0],[0,0]]}"#,
    );
    let r = json(&out);
    assert_eq!((r["results"]["defined"].clone(), r["results"]["vanishes"].clone()), (Value::Bool(true), Value::Bool(true)));
}

fn golden_dir() -> PathBuf {
    crate_dir().join("tests/golden")
}

fn examples() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(crate_dir().join("examples"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

/// Set MASSEY_UPDATE_GOLDEN=1 to regenerate after reviewing a change.
#[test]
fn examples_match_golden_reports() {
    let update = std::env::var_os("MASSEY_UPDATE_GOLDEN").is_some();
    let list = examples();
    assert!(list.len() >= 8);
    for path in list {
        let out = run(&["run", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), stderr(&out));
        let golden = golden_dir().join(path.file_name().unwrap());
        if update {
            std::fs::write(&golden, &out.stdout).unwrap();
            continue;
        }
        let want = std::fs::read(&golden).unwrap_or_else(|_| panic!("missing golden report {}", golden.display()));
        assert!(want == out.stdout, "{} differs from {}", path.display(), golden.display());
    }
}

fn digest_of(path: &Path) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(std::fs::read(path).unwrap()).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn reports_are_deterministic_across_runs_and_threads() {
    let path = crate_dir().join("examples/brauer_scan_n4.json");
    let p = path.to_str().unwrap();
    let a = run(&["--threads", "1", "run", p]);
    let b = run(&["--threads", "3", "run", p]);
    let c = bin().args(["run", p]).env("MASSEY_THREADS", "2").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let r = json(&a);
    assert_eq!(r["input_digest"], Value::String(digest_of(&path)));
    let s1 = run(&["--threads", "1", "suite", "prs"]);
    let s2 = run(&["--threads", "4", "suite", "prs"]);
    assert_eq!(s1.stdout, s2.stdout);
    // timing goes to stderr only
    assert!(stderr(&a).contains("elapsed"));
    assert!(!String::from_utf8_lossy(&a.stdout).contains("elapsed"));
}

#[test]
fn pretty_output_is_a_table() {
    let path = crate_dir().join("examples/e_n4.json");
    let out = run(&["--pretty", "run", path.to_str().unwrap()]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("formula_dim"));
    assert!(s.contains("PASS"));
    assert!(s.contains("all checks passed"));
}

#[test]
fn fast_suites_pass() {
    for name in ["prs", "bogomolov", "generalized", "brauer"] {
        let out = run(&["suite", name]);
        assert_eq!(out.status.code(), Some(0), "suite {name}: {}", stderr(&out));
        let r = json(&out);
        assert_eq!(r["passed"], true);
        if name == "brauer" {
            let row = r["checks"]
                .as_array()
                .unwrap()
                .iter()
                .find(|c| c["criterion"] == 8)
                .expect("n = 4 example row");
            assert_eq!(row["passed"], true);
            assert_eq!(r["results"]["n4_example"]["formula_dim"], 1);
        }
    }
}

#[test]
fn embedding_problem_reports_a_verified_lift() {
    // Z/4 → U/Z sending the generator to I + e01 + e12 + e23 lifts to U
    let path = crate_dir().join("examples/embedding_z4_center.json");
    let r = json(&run(&["run", path.to_str().unwrap()]));
    assert_eq!(r["results"]["solvable"], true);
    let img = &r["results"]["images"][0];
    assert_eq!(img[0][1], 1);
    assert_eq!(img[1][2], 1);
    // Z/2 cannot send its generator to an element of order 4 modulo Z
    let out = run_stdin(
        &["run", "-"],
        r#"{"kind":"embedding","group":{"cyclic":2},"n":3,"p":2,"kernel":"u1","oracle":true,
            "alpha":[[[1,1,0,0],[0,1,1,0],[0,0,1,1],[0,0,0,1]]]}"#,
    );
    let r = json(&out);
    assert_eq!(r["results"]["solvable"], false, "{r}");
    assert_eq!(r["passed"], true);
}

//! End-to-end tests of the command-line interface: exit codes, stable
//! closure listings, the decision procedure, and derivation traces.

use std::path::PathBuf;
use std::process::Command;

fn euclid() -> Command {
    Command::new(env!("CARGO_BIN_EXE_euclid"))
}

fn repo_root() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("euclid-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

const CHAIN_STATE: &str = r#"
state {
  point a, point b, point c, point d, point e, line L
  on(a, L), on(b, L)
  between(a, c, b), between(a, d, c), between(c, e, b)
}
"#;

#[test]
fn check_corpus_passes_with_exit_zero() {
    let root = repo_root();
    let out = euclid()
        .arg("check")
        .arg(root.join("corpus/book1.e"))
        .arg("--library")
        .arg(root.join("corpus"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("I.1 pass"));
    assert!(text.contains("tech.2 pass"));
    assert!(!text.contains("fail"));
}

#[test]
fn check_failure_exits_one_and_names_the_step() {
    let root = repo_root();
    let book1 = std::fs::read_to_string(root.join("corpus/book1.e")).unwrap();
    let broken = book1.replace(
        "hence inside(a, beta)                     -- d is the center and seg(d,a) < seg(d,g)\n",
        "",
    );
    assert_ne!(book1, broken);
    let path = write_temp("broken_I2.e", &broken);
    // A library with only the assumed statements, so the mutant does not
    // collide with the shipped corpus names.
    let prelude = std::fs::read_to_string(root.join("corpus/prelude.e")).unwrap();
    write_temp("prelude.e", &prelude);
    let out = euclid().arg("check").arg(&path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(1),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("I.2 fail"), "{text}");
    assert!(text.contains("intersections.5"), "{text}");
}

#[test]
fn unreadable_input_exits_two() {
    let out = euclid()
        .arg("check")
        .arg("no-such-file.e")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_error_exits_two_with_diagnostic() {
    let path = write_temp(
        "bad.e",
        "theorem Z (point a) { conclude betwen(a, a, a) assumed }",
    );
    let out = euclid().arg("check").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown predicate 'betwen'"), "{err}");
    assert!(err.contains("bad.e:1:"), "{err}");
}

#[test]
fn closure_lists_the_chained_betweenness_and_is_stable() {
    let path = write_temp("chain.e", CHAIN_STATE);
    let run = || {
        let out = euclid().arg("closure").arg(&path).output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run();
    assert!(first.contains("between(a, d, e)"), "{first}");
    // Sorted, deduplicated, byte-identical across runs.
    let lines: Vec<&str> = first.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(lines, sorted);
    assert_eq!(first, run());
}

#[test]
fn decide_reports_inconsistency_and_consistency() {
    let bad = write_temp(
        "seg_contra.e",
        r#"
state {
  point a, point b, point c
  between(a, b, c)
  seg(a, c) < seg(a, b)
}
"#,
    );
    let out = euclid().arg("decide").arg(&bad).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "inconsistent");

    let ok = write_temp(
        "realizable.e",
        r#"
state {
  point a, point b, point c
  between(a, b, c)
}
"#,
    );
    let out = euclid().arg("decide").arg(&ok).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "consistent");
}

#[test]
fn explain_prints_a_one_step_trace_for_symmetry() {
    let path = write_temp(
        "single.e",
        r#"
state {
  point a, point b, point c
  between(a, b, c)
}
"#,
    );
    let out = euclid()
        .arg("explain")
        .arg(&path)
        .arg("between(c, b, a)")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("between.1a"), "{text}");
    assert!(text.contains("|- between(c, b, a)"), "{text}");
    assert_eq!(text.lines().count(), 1, "one-step trace expected: {text}");
}

#[test]
fn json_report_is_one_object_per_theorem() {
    let root = repo_root();
    let out = euclid()
        .arg("check")
        .arg(root.join("corpus/book1.e"))
        .arg("--library")
        .arg(root.join("corpus"))
        .arg("--json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut saw_pass = false;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("name").is_some());
        assert!(v.get("verdict").is_some());
        if v["verdict"] == "pass" {
            saw_pass = true;
        }
    }
    assert!(saw_pass);
}

#[test]
fn library_path_environment_variable_is_honored() {
    let root = repo_root();
    let out = euclid()
        .arg("check")
        .arg(root.join("corpus/book1.e"))
        .env("E_LIBRARY_PATH", root.join("corpus"))
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn explain_reports_metric_entailments_with_their_context() {
    let path = write_temp(
        "metric.e",
        r#"
state {
  point a, point b, point c
  between(a, b, c)
  seg(a, b) = seg(b, c)
}
"#,
    );
    let out = euclid()
        .arg("explain")
        .arg(&path)
        .arg("seg(a, b) < seg(a, c)")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("entailed by linear arithmetic"), "{text}");

    let out = euclid()
        .arg("explain")
        .arg(&path)
        .arg("seg(a, c) < seg(a, b)")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn jobs_flag_does_not_change_the_report() {
    let root = repo_root();
    let run = |jobs: Option<&str>| {
        let mut cmd = euclid();
        cmd.arg("check")
            .arg(root.join("corpus/book1.e"))
            .arg("--library")
            .arg(root.join("corpus"));
        if let Some(j) = jobs {
            cmd.arg("--jobs").arg(j);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    assert_eq!(run(None), run(Some("2")));
}

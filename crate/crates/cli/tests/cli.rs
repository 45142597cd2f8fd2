//! End-to-end tests of the `manip` binary: exit codes, file round trips,
//! witness verification, and the cross-check harness.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_manip");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const TOY: &str =
    "candidates: a b c\npvote: a > b\nmanipulators: 1\npreferred: c\nrule: plurality\n";

#[test]
fn solve_emits_schema_stable_record() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.election", TOY);
    let out = run(&["solve", "--problem", "wm", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["problem", "rule", "answer", "witness", "stats"] {
        assert!(record.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(record["answer"], "yes");
    assert!(record["witness"]["extension"].is_array());
}

#[test]
fn nw_yes_has_null_witness_and_nw_no_carries_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "fixed.election",
        "candidates: a b\nvote: a > b\npreferred: a\nrule: plurality\n",
    );
    let out = run(&["solve", "--problem", "nw", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["answer"], "yes");
    assert!(
        record["witness"].is_null(),
        "necessary-winner yes carries no witness"
    );

    let input = write(
        dir.path(),
        "open.election",
        "candidates: a b\npvote:\npreferred: a\nrule: plurality\n",
    );
    let out = run(&["solve", "--problem", "nw", "--input", &input]);
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["answer"], "no");
    assert_eq!(
        record["witness"]["extension"][0][0], "b",
        "counterexample extension"
    );
}

#[test]
fn missing_file_and_bad_instance_exit_one() {
    let out = run(&[
        "solve",
        "--problem",
        "wm",
        "--input",
        "/nonexistent.election",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "zero.election",
        "candidates: a b\npvote: a > b\nmanipulators: 0\npreferred: a\nrule: plurality\n",
    );
    let out = run(&["solve", "--problem", "sm", "--input", &input]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "zero manipulators must be an input error"
    );

    let input = write(
        dir.path(),
        "typo.election",
        "candidates: a b\nvote: a > z\n",
    );
    let out = run(&["solve", "--problem", "pw", "--input", &input]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 2"), "diagnostics carry the line: {msg}");
}

#[test]
fn forced_poly_on_hard_combination_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.election", TOY);
    let out = run(&[
        "solve",
        "--problem",
        "wm",
        "--rule",
        "copeland",
        "--algo",
        "poly",
        "--input",
        &input,
    ]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("NP-complete") && msg.contains("Copeland"),
        "{msg}"
    );
}

#[test]
fn tight_budget_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "open.election",
        "candidates: a b c d\npvote:\npvote:\npvote:\nmanipulators: 1\npreferred: a\nrule: copeland\n",
    );
    let out = run(&[
        "solve",
        "--problem",
        "sm",
        "--input",
        &input,
        "--algo",
        "oracle",
        "--budget",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_accepts_good_and_rejects_tampered_witness() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.election", TOY);
    let out = run(&["solve", "--problem", "wm", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let record = write(
        dir.path(),
        "record.json",
        &String::from_utf8_lossy(&out.stdout),
    );
    let out = run(&["verify", "--input", &input, "--witness", &record]);
    assert_eq!(out.status.code(), Some(0));

    let mut parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&record).unwrap()).unwrap();
    // Swap the claimed extension's first vote to favor the wrong candidate.
    parsed["witness"]["extension"][0] = serde_json::json!(["a", "b", "c"]);
    let tampered = write(dir.path(), "tampered.json", &parsed.to_string());
    let out = run(&["verify", "--input", &input, "--witness", &tampered]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_checks_sm_records_through_the_nw_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "sm.election",
        "candidates: a b c\nvote: a > b > c\nmanipulators: 2\npreferred: a\nrule: bucklin\n",
    );
    let out = run(&["solve", "--problem", "sm", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let record = write(dir.path(), "sm.json", &String::from_utf8_lossy(&out.stdout));
    let out = run(&["verify", "--input", &input, "--witness", &record]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn generated_files_parse_back_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let x3c = write(dir.path(), "toy.x3c", "universe: 3\nset: 1 2 3\n");
    for (gadget, problem) in [
        ("x3c2wm-maximin", "wm"),
        ("x3c2wm-copeland", "wm"),
        ("x3c2sm-copeland", "sm"),
        ("x3c2wm-bucklin", "wm"),
    ] {
        let out = run(&["gen", "--gadget", gadget, "--x3c", &x3c, "--audit"]);
        assert_eq!(out.status.code(), Some(0), "{gadget} generation");
        let audit = String::from_utf8_lossy(&out.stderr);
        assert!(audit.contains("\"passed\":true"), "{gadget} audit: {audit}");
        let file = write(
            dir.path(),
            &format!("{gadget}.election"),
            &String::from_utf8_lossy(&out.stdout),
        );
        // Parsing must succeed; solving the Bucklin/maximin gadgets here
        // would be slow, so use a tiny budget and accept a budget exit.
        let out = run(&[
            "solve",
            "--problem",
            problem,
            "--algo",
            "oracle",
            "--input",
            &file,
            "--budget",
            "2000",
        ]);
        assert!(
            matches!(out.status.code(), Some(0) | Some(2)),
            "{gadget} should parse cleanly, got {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn mcgarvey_and_scoregen_files_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let target = write(
        dir.path(),
        "target.margins",
        "candidates: a b c\nmargin: a b 2\nmargin: b c 4\n",
    );
    let out = run(&[
        "gen", "--gadget", "mcgarvey", "--target", &target, "--audit",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"passed\":true"));
    let profile = String::from_utf8_lossy(&out.stdout);
    assert_eq!(profile.matches("vote:").count(), 6, "2 + 4 paired votes");
    write(dir.path(), "mcg.election", &profile);

    let out = run(&[
        "gen", "--gadget", "scoregen", "--x", "1,0,-2", "--k", "2", "--audit",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"passed\":true"));

    let out = run(&["gen", "--gadget", "no-such-gadget"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pw2wm_gadgets_generate_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let pw = write(
        dir.path(),
        "pw.election",
        "candidates: a b c d\nvote: a > b > c > d\npvote: a > b\npreferred: a\n",
    );
    for gadget in ["pw2wm-kapproval", "pw2wm-kveto"] {
        let out = run(&[
            "gen", "--gadget", gadget, "--input", &pw, "--k", "2", "--audit",
        ]);
        assert_eq!(out.status.code(), Some(0), "{gadget}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("\"passed\":true"));
        let file = write(
            dir.path(),
            &format!("{gadget}.election"),
            &String::from_utf8_lossy(&out.stdout),
        );
        let out = run(&[
            "solve",
            "--problem",
            "wm",
            "--input",
            &file,
            "--budget",
            "500000",
        ]);
        assert!(matches!(out.status.code(), Some(0) | Some(2)));
    }
}

#[test]
fn crosscheck_is_deterministic_and_detects_injected_faults() {
    let a = run(&[
        "crosscheck",
        "--suite",
        "sm",
        "--trials",
        "40",
        "--seed",
        "9",
    ]);
    let b = run(&[
        "crosscheck",
        "--suite",
        "sm",
        "--trials",
        "40",
        "--seed",
        "9",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        a.stdout, b.stdout,
        "same seed must produce identical summaries"
    );

    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dumps");
    let out = run(&[
        "crosscheck",
        "--suite",
        "wm",
        "--trials",
        "5",
        "--seed",
        "1",
        "--inject-fault",
        "--dump-dir",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(5));
    let dumped = fs::read_dir(&dump).unwrap().count();
    assert!(
        dumped > 0,
        "mismatches must be dumped as reproducible files"
    );
    // Dumped instances parse back.
    let first = fs::read_dir(&dump).unwrap().next().unwrap().unwrap().path();
    let out = run(&[
        "solve",
        "--problem",
        "wm",
        "--input",
        first.to_str().unwrap(),
        "--budget",
        "100000",
    ]);
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
}

#[test]
fn crosscheck_rejects_out_of_scope_bounds() {
    let out = run(&[
        "crosscheck",
        "--suite",
        "sm",
        "--trials",
        "1",
        "--seed",
        "0",
        "--max-candidates",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

//! End-to-end checks of the command-line interface: outputs, exit codes,
//! determinism, and the documented workflows.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn backbone_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_backbone"))
}

fn example_path() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/five-node-example.tsv")
}

fn run(args: &[&str]) -> Output {
    backbone_bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn backbone_command_prints_the_measures() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "backbone",
        "--input",
        example_path(),
        "--operator",
        "sum",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("71.43%"), "{text}");
    assert!(text.contains("mean closure length = 4.9"), "{text}");
    assert!(dir.path().join("five-node-example.sum.backbone.tsv").exists());
    assert!(dir.path().join("five-node-example.summary.json").exists());

    let out = run(&[
        "backbone",
        "--input",
        example_path(),
        "--operator",
        "max",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("57.14%"), "{}", stdout(&out));
}

#[test]
fn outputs_are_byte_stable_across_runs() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for dir in [&d1, &d2] {
        let out = run(&[
            "backbone",
            "--input",
            example_path(),
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for name in ["five-node-example.sum.backbone.tsv", "five-node-example.summary.json"] {
        let a = fs::read(d1.path().join(name)).unwrap();
        let b = fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn outputs_match_the_committed_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    for op in ["sum", "max"] {
        let out = run(&[
            "backbone",
            "--input",
            example_path(),
            "--operator",
            op,
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in [
        "five-node-example.sum.backbone.tsv",
        "five-node-example.max.backbone.tsv",
        "five-node-example.summary.json",
    ] {
        let got = fs::read(dir.path().join(name)).unwrap();
        let want = fs::read(golden.join(name)).unwrap();
        assert_eq!(got, want, "{name} deviates from the golden snapshot");
    }
}

#[test]
fn compare_against_mst_flags_changed_pairs() {
    let out = run(&[
        "compare",
        "--input",
        example_path(),
        "--against",
        "mst",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["changed_pairs"], 1);
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));
}

#[test]
fn compare_against_own_backbone_changes_nothing() {
    let out = run(&[
        "compare",
        "--input",
        example_path(),
        "--against",
        "backbone",
        "--operator",
        "sum",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["changed_pairs"], 0);
    assert_eq!(report["disconnected_pairs"], 0);
    assert!(!stderr(&out).contains("warning"));
}

#[test]
fn compare_against_low_threshold_flags_disconnection() {
    let out = run(&[
        "compare",
        "--input",
        example_path(),
        "--against",
        "threshold",
        "--alpha",
        "4",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["connected"], false);
    assert!(stderr(&out).contains("disconnects"), "{}", stderr(&out));
}

#[test]
fn parse_errors_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "a b -1\n").unwrap();
    let out = run(&["backbone", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("negative weight"), "{}", stderr(&out));

    let out = run(&["backbone", "--input", "/nonexistent.tsv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn node_cap_violation_exits_with_code_two() {
    let out = run(&[
        "backbone",
        "--input",
        example_path(),
        "--mode",
        "full",
        "--node-cap",
        "2",
        "--out-dir",
        tempfile::tempdir().unwrap().path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn verify_suite_passes_on_the_example() {
    let dir = tempfile::tempdir().unwrap();
    let verdict = dir.path().join("verdict.json");
    let out = run(&[
        "verify",
        "--input",
        example_path(),
        "--samples",
        "10",
        "--out",
        verdict.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&verdict).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() > 10);
}

#[test]
fn histogram_reports_the_two_distortions() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("h.tsv");
    let out = run(&[
        "histogram",
        "--input",
        example_path(),
        "--operator",
        "sum",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("semi-triangular edges: 2 of 7"), "{text}");
    assert!(text.contains("max = 4.5"), "{text}");
    let body = fs::read_to_string(&out_path).unwrap();
    let binned: u64 = body
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(binned, 2);
}

#[test]
fn histogram_of_all_triangular_graph_is_empty_notice() {
    let dir = tempfile::tempdir().unwrap();
    let path_graph = dir.path().join("path.tsv");
    fs::write(&path_graph, "a b 1\nb c 2\nc d 3\n").unwrap();
    let out_path = dir.path().join("h.tsv");
    let out = run(&[
        "histogram",
        "--input",
        path_graph.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("no semi-triangular edges"), "{}", stderr(&out));
}

#[test]
fn dataset_list_and_fetch() {
    let out = run(&["dataset", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["net-science", "cond-mat", "c-elegans", "us-airports-500", "freeman"] {
        assert!(text.contains(name), "{text}");
    }
    assert!(text.contains("unavailable"), "{text}");

    // fetch into a writable cache populated with the bundled raw file
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    fs::copy(
        data.join("freeman-eies-messages.tsv"),
        dir.path().join("freeman-eies-messages.tsv"),
    )
    .unwrap();
    let out = run(&[
        "dataset",
        "fetch",
        "freeman",
        "--cache-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let emitted = stdout(&out).trim().to_string();
    assert!(Path::new(&emitted).exists());

    let out = run(&["dataset", "fetch", "no-such-dataset"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("registry"), "{}", stderr(&out));

    let out = run(&["dataset", "fetch", "primary-school"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("stub"), "{}", stderr(&out));
}

#[test]
fn dataset_input_runs_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "backbone",
        "--dataset",
        "freeman",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("nodes: 32  edges: 266"), "{}", stdout(&out));
}

#[test]
fn minkowski_needs_its_exponent() {
    let out = run(&["backbone", "--input", example_path(), "--operator", "minkowski"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--r"), "{}", stderr(&out));
}

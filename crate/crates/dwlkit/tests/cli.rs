//! End-to-end runs of the `dwlkit` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dwlkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwlkit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn write_wedges(dir: &Path) -> String {
    let path = dir.join("wedges.txt");
    fs::write(&path, "0 1 1.0\n1 2 2.0\n5 4 1.0\n4 3 2.0\n").unwrap();
    path.display().to_string()
}

#[test]
fn dwl_single_graph_reports_class_counts() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_wedges(dir.path());
    let out = dwlkit(&["dwl", "--k", "1", "--t", "4", "--rounds", "8", &graph], dir.path());
    let json = stdout_json(&out);
    assert_eq!(json["k"], 1);
    assert!(json["rounds"].as_array().unwrap().len() >= 2);
    assert_eq!(json["rounds"][0]["classes"], 1);
}

#[test]
fn dwl_two_graphs_reports_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    fs::write(&a, "0 1 1.0\n").unwrap();
    fs::write(&b, "0 1 2.0\n").unwrap();
    let out = dwlkit(
        &["dwl", "--k", "1", "--t", "3", "--rounds", "8", a.to_str().unwrap(), b.to_str().unwrap()],
        dir.path(),
    );
    let json = stdout_json(&out);
    assert_eq!(json["verdict"], "non_isomorphic");
    assert_eq!(json["round"], 1);
}

#[test]
fn encode_mite_emits_csv_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_wedges(dir.path());
    let out = dwlkit(
        &["encode", "mite", "--pair", "0,2", "--t", "4", "--k", "2", &graph],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 7); // header + 6 nodes
    assert_eq!(lines[0], "w,m0,m1,m2,m3");
    // Node 1 (the common neighbor) carries both finite intervals.
    let b_row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(b_row[0], "1");
    assert!(b_row[1].parse::<f64>().unwrap() > 0.0);
    assert!(b_row[3].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn split_and_metrics_commands() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let mut text = String::new();
    for i in 1..=10 {
        text.push_str(&format!("{} {} {}.0\n", i % 4, (i + 1) % 4, i));
    }
    fs::write(&graph, text).unwrap();
    let out = dwlkit(&["split", graph.to_str().unwrap()], dir.path());
    let json = stdout_json(&out);
    assert_eq!(json["train_range"], serde_json::json!([0, 6]));

    fs::write(dir.path().join("scores.txt"), "0.9\n0.2\n0.8\n0.1\n").unwrap();
    fs::write(dir.path().join("labels.txt"), "1\n0\n1\n0\n").unwrap();
    let out = dwlkit(&["metrics", "--scores", "scores.txt", "--labels", "labels.txt"], dir.path());
    let json = stdout_json(&out);
    assert_eq!(json["ap"], 1.0);
    assert_eq!(json["auc"], 1.0);
}

#[test]
fn suite_command_reports_properties() {
    let dir = tempfile::tempdir().unwrap();
    let out = dwlkit(
        &[
            "suite",
            "--trials",
            "25",
            "--seed",
            "3",
            "--searches",
            "3",
            "--dump-counterexamples",
            "ce",
        ],
        dir.path(),
    );
    let json = stdout_json(&out);
    let props = json["properties"].as_array().unwrap();
    assert_eq!(props.len(), 6);
    assert!(props.iter().all(|p| p["passed"] == true));
    // The search property's payload replays through the edge-list loader.
    let dumped = dir.path().join("ce/mite_counterexample_search_a.edges");
    let text = fs::read_to_string(dumped).unwrap();
    let g = dwlkit::temporal::parse_events(&text, dwlkit::temporal::GraphFormat::EdgeList).unwrap();
    assert_eq!(g.events().len(), 4);
}

#[test]
fn train_then_eval_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    // Small planted-triangle dataset.
    let g = dwlkit::harness::triangle_stream(20, 80, 7);
    fs::write(dir.path().join("tri.txt"), dwlkit::temporal::to_edge_list(&g)).unwrap();
    fs::write(
        dir.path().join("train.cfg"),
        "data=tri.txt\nformat=edge_list\nepochs=1\nbatch_size=64\nlr=0.003\n\
         neighbor_limit=4\npatch=2\nmite_k=2\nmite_dim=4\ntime_dim=4\naligned_dim=2\n\
         layers=1\nheads=1\nff_dim=8\nout_dim=2\nseed=5\n",
    )
    .unwrap();
    let out = dwlkit(&["train", "--config", "train.cfg", "--out", "weights"], dir.path());
    let json = stdout_json(&out);
    assert_eq!(json["epochs_run"], 1);
    assert!(dir.path().join("weights.json").exists());
    assert!(dir.path().join("weights.bin").exists());

    let out = dwlkit(&["eval", "--params", "weights", "--section", "test"], dir.path());
    let json = stdout_json(&out);
    let ap = json["ap"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&ap));
    assert_eq!(json["setting"], "transductive");
}

#[test]
fn parse_errors_surface_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.txt");
    fs::write(&graph, "0 1 1.0\n0 oops 2.0\n").unwrap();
    let out = dwlkit(&["dwl", "--k", "1", "--t", "3", graph.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

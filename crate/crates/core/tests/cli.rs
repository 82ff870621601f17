mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use framesel::binfmt::{self, StoredMatrix};
use framesel::pool::PoolManifest;
use serde_json::Value;
use tempfile::TempDir;

fn framesel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framesel"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn framesel")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn pool_subcommand() {
    let dir = TempDir::new().unwrap();
    let v = stdout_json(&framesel(dir.path(), &["pool", "--fps", "2", "--frames", "10"]));
    assert_eq!(v["seconds"], serde_json::json!([0, 1, 2, 3, 4]));

    let out = framesel(dir.path(), &["pool", "--fps", "25", "--frames", "30000", "--out", "m.json"]);
    assert!(out.status.success());
    let m = PoolManifest::read(&dir.path().join("m.json")).unwrap();
    assert_eq!(m.seconds.len(), 1000);
    assert_eq!(m.seconds[999], 1199);

    let out = framesel(dir.path(), &["pool", "--fps", "30", "--frames", "15"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).starts_with("error:4:"));
    assert!(stderr(&out).contains("empty pool"));
}

#[test]
fn select_relevance_only_on_three_candidates() {
    let dir = TempDir::new().unwrap();
    let manifest = common::three_candidate_fixture(dir.path());
    let m = manifest.to_str().unwrap();
    let v = stdout_json(&framesel(
        dir.path(),
        &["select", "--manifest", m, "--preset", "relevance_only", "--k", "2"],
    ));
    assert_eq!(v["positions"], serde_json::json!([2, 3]));
    assert_eq!(v["seconds"], serde_json::json!([1, 2]));
    assert_eq!(v["preset"]["name"], "relevance_only");
    assert_eq!(v["coverage_normalized"], false);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 9);

    let out = framesel(dir.path(), &["select", "--manifest", m, "--preset", "relevance_only", "--k", "0"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).starts_with("error:4:"));

    let out = framesel(dir.path(), &["select", "--manifest", m, "--preset", "bogus"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn select_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let manifest = common::three_candidate_fixture(dir.path());
    let m = manifest.to_str().unwrap();
    for (out, lazy) in [("a.json", false), ("b.json", false), ("c.json", true)] {
        let mut args = vec!["select", "--manifest", m, "--preset", "coverage_oriented", "--k", "2", "--out", out];
        if lazy {
            args.push("--lazy");
        }
        assert!(framesel(dir.path(), &args).status.success());
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());
    assert_eq!(a, fs::read(dir.path().join("c.json")).unwrap());
}

#[test]
fn corrupt_inputs_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let manifest = common::three_candidate_fixture(dir.path());
    let m = manifest.to_str().unwrap();

    let sem = dir.path().join("three.sem.bin");
    let good = fs::read(&sem).unwrap();
    let mut bad = good.clone();
    bad[..4].copy_from_slice(b"XXXX");
    fs::write(&sem, &bad).unwrap();
    let out = framesel(dir.path(), &["select", "--manifest", m, "--preset", "coverage_only"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    // Four semantic rows against a three-candidate pool.
    let rows = vec![vec![1.0f32, 0.0]; 4];
    binfmt::write_file(&sem, &StoredMatrix::from_rows(&rows).unwrap()).unwrap();
    let out = framesel(dir.path(), &["select", "--manifest", m, "--preset", "coverage_only"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error:3:"));
}

#[test]
fn compare_reports_both_rows() {
    let dir = TempDir::new().unwrap();
    let sem = common::duplicate_cluster_rows();
    let rel: Vec<Vec<f32>> = (0..sem.len()).map(|i| vec![1.0, i as f32 * 0.1]).collect();
    let manifest = common::write_fixture(dir.path(), "cluster", &rel, &[1.0, 0.0], &sem);
    let m = manifest.to_str().unwrap();
    let v = stdout_json(&framesel(
        dir.path(),
        &["compare", "--manifest", m, "--preset", "coverage_only", "--k", "3"],
    ));
    let g = v["greedy"]["coverage"].as_f64().unwrap();
    let u = v["uniform"]["coverage"].as_f64().unwrap();
    assert!(g > u, "greedy C {g} vs uniform C {u}");
    assert!(v["greedy"]["objective"].as_f64().unwrap() >= v["uniform"]["objective"].as_f64().unwrap() - 1e-9);
    assert_eq!(v["uniform_positions"], serde_json::json!([1, 5, 10]));
}

#[test]
fn oracle_and_props() {
    let dir = TempDir::new().unwrap();
    let out = framesel(dir.path(), &["oracle", "--n", "25"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("instance too large"));

    let out = framesel(dir.path(), &["oracle", "--n", "12", "--k", "4", "--trials", "300", "--quiet"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 300);
    for line in text.lines() {
        let r: Value = serde_json::from_str(line).unwrap();
        assert!(r["ratio"].as_f64().unwrap() >= 0.63212);
    }

    let out = framesel(dir.path(), &["props", "--trials", "500", "--seed", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["trials"], 500);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["failed"], 0, "{c}");
    }
    assert!(stderr(&out).contains("500/500"));
}

fn write_training_data(dir: &Path) {
    let tsv: String = common::keyword_corpus(50)
        .into_iter()
        .map(|(t, q)| format!("{t}\t{q}\n"))
        .collect();
    fs::write(dir.join("train.tsv"), tsv).unwrap();
    let mut csv = String::from("type,relevance_only,relevance_oriented,coverage_oriented,coverage_only\n");
    for (i, t) in framesel::router::DEFAULT_TYPES.iter().enumerate() {
        let mut row = [0.5, 0.5, 0.5, 0.5];
        row[i % 4] = 0.8;
        csv.push_str(&format!("{t},{},{},{},{}\n", row[0], row[1], row[2], row[3]));
    }
    fs::write(dir.join("acc.csv"), csv).unwrap();
}

#[test]
fn train_fit_route_and_auto_select() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write_training_data(d);

    let out = framesel(d, &["train-classifier", "--data", "train.tsv", "--eval", "train.tsv", "--out", "model.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let eval_line = stderr(&out).lines().find(|l| l.starts_with('{')).unwrap().to_string();
    let eval: Value = serde_json::from_str(&eval_line).unwrap();
    assert_eq!(eval["accuracy"], 1.0);

    let out = framesel(d, &["fit-routing", "--accuracies", "acc.csv", "--out", "routing.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table: Value = serde_json::from_str(&fs::read_to_string(d.join("routing.json")).unwrap()).unwrap();
    // count is the fourth type, so its best column is coverage_only.
    assert_eq!(table["mapping"]["count"], "coverage_only");
    assert_eq!(table["mapping"]["needle"], "relevance_oriented");

    let routed = stdout_json(&framesel(
        d,
        &["route", "--model", "model.json", "--routing", "routing.json", "--question", "how many times does it happen"],
    ));
    assert_eq!(routed["question_type"], "count");
    assert_eq!(routed["preset"]["name"], "coverage_only");

    let oracle = stdout_json(&framesel(d, &["route", "--routing", "routing.json", "--question-type", "needle", "--lambda", "0.25"]));
    assert_eq!(oracle["preset"]["beta"], 0.25);

    let manifest = common::three_candidate_fixture(d);
    let v = stdout_json(&framesel(
        d,
        &[
            "select", "--manifest", manifest.to_str().unwrap(), "--preset", "auto", "--model", "model.json",
            "--routing", "routing.json", "--question", "what is the total count of cars", "--k", "2",
        ],
    ));
    assert_eq!(v["preset"], routed["preset"]);

    let out = framesel(d, &["select", "--manifest", manifest.to_str().unwrap(), "--preset", "auto"]);
    assert_eq!(out.status.code(), Some(4));

    let out = framesel(d, &["route", "--routing", "routing.json", "--question-type", "unknown"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("routing gap"));
}

#[test]
fn fit_routing_rejects_missing_column() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("acc.csv"),
        "type,relevance_only,relevance_oriented,coverage_oriented\ncount,0.1,0.2,0.3\n",
    )
    .unwrap();
    let out = framesel(dir.path(), &["fit-routing", "--accuracies", "acc.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:2:"));
}

#[test]
fn batch_select_writes_one_file_per_video() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    common::three_candidate_fixture(d);
    let sem = common::duplicate_cluster_rows();
    let rel: Vec<Vec<f32>> = (0..sem.len()).map(|i| vec![1.0, i as f32]).collect();
    common::write_fixture(d, "cluster", &rel, &[0.0, 1.0], &sem);
    fs::write(d.join("list.txt"), "three.manifest.json\ncluster.manifest.json\n").unwrap();
    fs::create_dir(d.join("out")).unwrap();
    let out = framesel(
        d,
        &["select", "--batch", "list.txt", "--out-dir", "out", "--preset", "coverage_oriented", "--k", "2", "--quiet"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).is_empty());
    for id in ["three", "cluster"] {
        let v: Value = serde_json::from_str(&fs::read_to_string(d.join(format!("out/{id}.selection.json"))).unwrap()).unwrap();
        assert_eq!(v["video_id"], id);
        assert_eq!(v["positions"].as_array().unwrap().len(), 2);
    }
}

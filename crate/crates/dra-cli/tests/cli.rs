//! End-to-end tests of the `dra` binary: exit codes, file outputs and
//! determinism across thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn dra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, body: &str) {
    std::fs::write(path, body).unwrap();
}

const SYNTH: &str = r#"{
    "c": 4,
    "d": 10,
    "samples_per_class": 12,
    "variation_rank": 2,
    "variation_scale": 1.0,
    "noise_sigma": 0.05,
    "class_sep": 6.0,
    "seed": 3
}"#;

fn experiment_config(method: &str, reps: usize) -> String {
    format!(
        r#"{{
            "method": "{method}",
            "counts": {{"n_train": 3, "n_valid": 3, "n_test": 3}},
            "repetitions": {reps},
            "seed": 11,
            "dataset": {{"synth": {SYNTH}}}
        }}"#
    )
}

#[test]
fn synth_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("synth.json");
    write(&cfg, SYNTH);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (out, seed) in [(&a, None), (&b, None), (&c, Some("99"))] {
        let mut args = vec![
            "synth",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        assert!(dra(&args).status.success());
    }
    let (ba, bb, bc) = (
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        std::fs::read(&c).unwrap(),
    );
    assert_eq!(ba, bb);
    assert_ne!(ba, bc);
    let header = std::fs::read_to_string(&a).unwrap();
    assert!(header.starts_with("set_hint,class_id,f0,"));
    assert_eq!(header.lines().count(), 1 + 4 * 12);
}

#[test]
fn run_emits_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    write(&cfg, &experiment_config("DRA-PE-eig", 3));
    let out = dir.path().join("report.json");
    let res = dra(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["method"], "DRA-PE-eig");
    assert_eq!(report["config"]["t"], 4); // auto resolved to the class count
    assert_eq!(report["config"]["rho"], 1e-2);
    assert_eq!(report["per_repetition_accuracy"].as_array().unwrap().len(), 3);
    assert!(report["mean_rr"].as_f64().unwrap() >= 0.9);
}

#[test]
fn run_emits_csv_report_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    write(&cfg, &experiment_config("NFS", 2));
    let res = dra(["run", "--config", cfg.to_str().unwrap(), "--format", "csv"].as_ref());
    assert!(res.status.success());
    let body = String::from_utf8(res.stdout).unwrap();
    assert!(body.starts_with("repetition,accuracy\n"));
    assert!(body.contains("mean_rr,"));
}

#[test]
fn run_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    write(&cfg, &experiment_config("DRA-TE-exp", 3));
    let strip = |out: &Path| -> serde_json::Value {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
        let obj = v.as_object_mut().unwrap();
        obj.remove("train_time_s");
        obj.remove("test_time_s");
        v
    };
    let mut stripped = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("report-{threads}.json"));
        let res = dra(&[
            "--threads",
            threads,
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
        stripped.push(strip(&out));
    }
    assert_eq!(stripped[0], stripped[1]);
}

#[test]
fn bad_config_exits_2_and_missing_file_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(&cfg, "{\"method\": \"DRA-PE-eig\"");
    let res = dra(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));

    let res = dra(&["run", "--config", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn invalid_method_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    write(&cfg, &experiment_config("DRA-XX-eig", 2));
    let res = dra(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

/// Builds a train/valid/probe layout from the synthetic generator: the
/// first six samples of each class become train.csv/valid.csv and the
/// probe is drawn from the rest of one class.
fn classification_fixture(dir: &Path, probe_class: usize) {
    let cfg = dir.join("synth.json");
    write(&cfg, SYNTH);
    let full = dir.join("full.csv");
    assert!(dra(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        full.to_str().unwrap(),
    ])
    .status
    .success());

    let body = std::fs::read_to_string(&full).unwrap();
    let mut lines = body.lines();
    let header = lines.next().unwrap().to_string();
    let mut train = vec![header.clone()];
    let mut valid = vec![header.clone()];
    let mut probe = vec![header];
    let mut seen = std::collections::HashMap::<String, usize>::new();
    for line in lines {
        let class = line.split(',').nth(1).unwrap().to_string();
        let n = seen.entry(class.clone()).or_insert(0);
        if *n < 3 {
            train.push(line.to_string());
        } else if *n < 6 {
            valid.push(line.to_string());
        } else if class == probe_class.to_string() && *n < 9 {
            probe.push(line.to_string());
        }
        *n += 1;
    }
    write(&dir.join("train.csv"), &(train.join("\n") + "\n"));
    write(&dir.join("valid.csv"), &(valid.join("\n") + "\n"));
    write(&dir.join("probe.csv"), &(probe.join("\n") + "\n"));
}

#[test]
fn classify_recovers_the_probe_class() {
    let dir = tempfile::tempdir().unwrap();
    classification_fixture(dir.path(), 2);
    for method in ["NFS", "DLRC-baseline", "EuclidSelect-baseline", "DRA-PE-eig", "DRA-TE-exp"] {
        let res = dra(&[
            "classify",
            "--train",
            dir.path().to_str().unwrap(),
            "--probe",
            dir.path().join("probe.csv").to_str().unwrap(),
            "--method",
            method,
        ]);
        assert!(res.status.success(), "{method}: {}", String::from_utf8_lossy(&res.stderr));
        let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
        assert_eq!(v["predicted_label"], 2, "method {method}");
        assert_eq!(v["ratios"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn report_aggregates_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for (i, seed) in [("a", "11"), ("b", "42")] {
        let cfg = dir.path().join(format!("exp-{i}.json"));
        write(&cfg, &experiment_config("NFS", 2));
        let out = dir.path().join(format!("report-{i}.json"));
        assert!(dra(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ])
        .status
        .success());
        outs.push(out);
    }
    let merged = dir.path().join("merged.json");
    let res = dra(&[
        "report",
        outs[0].to_str().unwrap(),
        outs[1].to_str().unwrap(),
        "--out",
        merged.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&merged).unwrap()).unwrap();
    assert_eq!(v["config"]["repetitions"], 4);
    assert_eq!(v["per_repetition_accuracy"].as_array().unwrap().len(), 4);

    // aggregating reports of different methods is a config error
    let cfg = dir.path().join("exp-dlrc.json");
    write(&cfg, &experiment_config("DLRC-baseline", 2));
    let other = dir.path().join("report-dlrc.json");
    assert!(dra(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        other.to_str().unwrap(),
    ])
    .status
    .success());
    let res = dra(&[
        "report",
        outs[0].to_str().unwrap(),
        other.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
}

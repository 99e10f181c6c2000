//! End-to-end runs of the command-line binary.

use std::path::Path;
use std::process::Command;

fn kacd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kacd"))
}

#[test]
fn simulate_learn_score_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = kacd()
        .args(["simulate", "--nodes", "8", "--graphs", "1", "--datasets", "1"])
        .args(["--samples", "300", "--group", "2", "--seed", "7", "--out"])
        .arg(&sim)
        .output()
        .unwrap();
    assert!(out.status.success(), "simulate failed: {out:?}");
    assert!(sim.join("manifest.csv").exists());
    assert!(sim.join("dag_p8_g0.graph").exists());
    assert!(sim.join("data_p8_g0_d0_n300.csv").exists());
    assert!(sim.join("data_p8_g0_d0_n300.schema").exists());

    let learned = dir.path().join("learned.graph");
    let out = kacd()
        .args(["learn", "--algorithm", "pc", "--preset", "P9", "--alpha", "0.1"])
        .arg(sim.join("data_p8_g0_d0_n300.csv"))
        .arg("--out")
        .arg(&learned)
        .output()
        .unwrap();
    assert!(out.status.success(), "learn failed: {out:?}");
    assert!(learned.exists());

    let out = kacd()
        .arg("score")
        .arg(sim.join("dag_p8_g0.graph"))
        .arg(&learned)
        .output()
        .unwrap();
    assert!(out.status.success(), "score failed: {out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("extra,missing,wrong_mark,shd,normalized\n"));
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split(',').count(), 5);
}

#[test]
fn learn_fci_emits_pag() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(kacd()
        .args(["simulate", "--nodes", "6", "--samples", "200", "--seed", "3", "--out"])
        .arg(&sim)
        .status()
        .unwrap()
        .success());
    let learned = dir.path().join("pag.graph");
    assert!(kacd()
        .args(["learn", "--algorithm", "fci", "--preset", "P9"])
        .arg(sim.join("data_p6_g0_d0_n200.csv"))
        .arg("--out")
        .arg(&learned)
        .status()
        .unwrap()
        .success());
    let text = std::fs::read_to_string(&learned).unwrap();
    assert!(text.starts_with("#kind: pag"), "got {text}");
}

#[test]
fn identical_graphs_score_zero() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(kacd()
        .args(["simulate", "--nodes", "6", "--samples", "50", "--seed", "5", "--out"])
        .arg(&sim)
        .status()
        .unwrap()
        .success());
    let dag = sim.join("dag_p6_g0.graph");
    let out = kacd().arg("score").arg(&dag).arg(&dag).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\n0,0,0,0,0.000000"), "got {text}");
}

#[test]
fn usage_errors_exit_2() {
    let out = kacd().args(["learn", "--preset", "P42", "/nonexistent.csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let out = kacd().args(["bench", "--experiment", "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_data_exits_3() {
    let out = kacd().args(["learn", "/nonexistent.csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let out = kacd()
        .args(["score", "/nonexistent.a", "/nonexistent.b"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_supplies_flags_and_cli_wins() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(kacd()
        .args(["simulate", "--nodes", "6", "--samples", "100", "--seed", "9", "--out"])
        .arg(&sim)
        .status()
        .unwrap()
        .success());
    let data = sim.join("data_p6_g0_d0_n100.csv");

    // config alone sets the preset
    let conf = dir.path().join("kacd.conf");
    std::fs::write(&conf, "preset = P9\nalpha = 0.1\n").unwrap();
    let g1 = dir.path().join("g1.graph");
    assert!(kacd()
        .arg("learn")
        .arg(&data)
        .arg("--config")
        .arg(&conf)
        .arg("--out")
        .arg(&g1)
        .status()
        .unwrap()
        .success());

    // explicit flag beats the config value: P1's tiny sigma changes results
    let g2 = dir.path().join("g2.graph");
    assert!(kacd()
        .arg("learn")
        .arg(&data)
        .arg("--config")
        .arg(&conf)
        .args(["--preset", "P9", "--out"])
        .arg(&g2)
        .status()
        .unwrap()
        .success());
    let explicit = std::fs::read_to_string(&g2).unwrap();
    let from_conf = std::fs::read_to_string(&g1).unwrap();
    assert_eq!(explicit, from_conf, "same effective preset must agree");
}

#[test]
fn corr_prints_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(kacd()
        .args(["simulate", "--nodes", "5", "--samples", "60", "--seed", "2", "--out"])
        .arg(&sim)
        .status()
        .unwrap()
        .success());
    let out = kacd()
        .arg("corr")
        .arg(sim.join("data_p5_g0_d0_n60.csv"))
        .args(["--preset", "P9"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // header + 5 rows
    assert_eq!(text.lines().count(), 6, "got: {text}");
}

#[test]
fn bench_writes_separate_timing_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("bench");
    let out = kacd()
        .args(["bench", "--experiment", "1", "--seed", "3", "--presets", "P9", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "bench failed: {}", String::from_utf8_lossy(&out.stderr));
    let scores = std::fs::read_to_string(out_dir.join("scores.csv")).unwrap();
    assert!(!scores.lines().next().unwrap().contains("_ms"));
    let timings = std::fs::read_to_string(out_dir.join("timings.csv")).unwrap();
    assert!(timings.lines().next().unwrap().contains("corr_ms"));
    assert!(Path::new(&out_dir).join("summary.csv").exists());
}

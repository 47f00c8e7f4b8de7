//! End-to-end checks of the `chaoslab` binary: flag handling, exit codes,
//! file formats, and manifest replay.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaoslab"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn chaoslab");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn help_exits_zero_everywhere() {
    for sub in [
        None,
        Some("simulate"),
        Some("lyapunov"),
        Some("stability"),
        Some("dataset"),
        Some("train"),
        Some("eval"),
        Some("reproduce"),
    ] {
        let mut cmd = bin();
        if let Some(s) = sub {
            cmd.arg(s);
        }
        let out = cmd.arg("--help").output().unwrap();
        assert_eq!(out.status.code(), Some(0), "--help for {sub:?}");
        // every declared flag shows up in the help text
        if sub == Some("simulate") {
            let text = String::from_utf8_lossy(&out.stdout);
            for flag in ["--system", "--theta", "--damping", "--t-end", "--dt", "--emit-energy", "--out"] {
                assert!(text.contains(flag), "missing {flag} in simulate help");
            }
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["simulate", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["definitely-not-a-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    // wrong angle count for the system
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "simulate",
            "--system",
            "double",
            "--theta",
            "10,20,30",
            "--out",
        ])
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn simulate_row_count_and_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    run_ok(&[
        "simulate",
        "--system",
        "double",
        "--theta",
        "90,90",
        "--t-end",
        "10",
        "--dt",
        "0.001",
        "--out",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 10_002); // header + 10001 states
    assert!(text.starts_with("t,theta1,u1,theta2,u2\n"));

    let eq = dir.path().join("eq.csv");
    run_ok(&[
        "simulate",
        "--theta",
        "0,0",
        "--t-end",
        "0.05",
        "--dt",
        "0.001",
        "--out",
        eq.to_str().unwrap(),
    ]);
    for line in std::fs::read_to_string(&eq).unwrap().lines().skip(1) {
        let fields: Vec<f64> = line.split(',').skip(1).map(|f| f.parse().unwrap()).collect();
        assert!(fields.iter().all(|v| *v == 0.0), "nonzero state at equilibrium: {line}");
    }
}

#[test]
fn simulate_energy_column_monotone_under_damping() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("damped.csv");
    run_ok(&[
        "simulate",
        "--theta",
        "120,30",
        "--damping",
        "0.1,0.1",
        "--t-end",
        "2",
        "--dt",
        "0.001",
        "--emit-energy",
        "--out",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,theta1,u1,theta2,u2,energy\n"));
    let mut prev = f64::INFINITY;
    for line in text.lines().skip(1) {
        let energy: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(energy <= prev + 1e-9, "energy increased: {prev} -> {energy}");
        prev = energy;
    }
}

#[test]
fn manifest_replay_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    run_ok(&[
        "simulate",
        "--theta",
        "45,30",
        "--t-end",
        "0.5",
        "--dt",
        "0.001",
        "--out",
        csv.to_str().unwrap(),
    ]);
    let manifest = dir.path().join("run.manifest.json");
    assert!(manifest.exists(), "manifest not written");
    let original = std::fs::read(&csv).unwrap();
    std::fs::remove_file(&csv).unwrap();
    run_ok(&["--from-manifest", manifest.to_str().unwrap()]);
    let replayed = std::fs::read(&csv).unwrap();
    assert_eq!(original, replayed, "replay must be byte-identical");
}

#[test]
fn stability_prints_paper_eigenvalues() {
    let out = run_ok(&["stability", "--system", "double", "--point", "0,0"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("5.7873"), "missing fast frequency: {text}");
    assert!(text.contains("2.3971"), "missing slow frequency: {text}");
    assert!(text.contains("center/undamped-oscillator"), "{text}");

    let out = run_ok(&["stability", "--point", "180,180"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("saddle"), "{text}");

    // damping shifts the trace: classification becomes stable
    let out = run_ok(&["stability", "--point", "0,0", "--damping", "0.1,0.1"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("stable-node/focus"), "{text}");
}

#[test]
fn lyapunov_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("heat.csv");
    run_ok(&[
        "lyapunov",
        "--grid",
        "0:30:30",
        "--perturb",
        "0.1",
        "--duration",
        "0.3",
        "--dt",
        "0.001",
        "--out",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "theta1_deg,theta2_deg,lyapunov_per_s");
    assert_eq!(text.lines().count(), 5); // header + 2x2 cells
}

#[test]
fn dataset_train_eval_pipeline_timestep() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    run_ok(&[
        "dataset",
        "timestep",
        "--theta1",
        "120",
        "--vary",
        "0:0.2:0.1",
        "--holdout",
        "0.05",
        "--samples",
        "50",
        "--t-end",
        "1",
        "--friction",
        "--out",
        data.to_str().unwrap(),
    ]);
    let train_csv = std::fs::read_to_string(data.join("train.csv")).unwrap();
    assert_eq!(train_csv.lines().count(), 1 + 3 * 50); // 3 grid angles x 50 rows
    assert!(train_csv.starts_with("t,theta1_0_deg,theta2_0_deg,theta1,theta2\n"));
    let holdout_csv = std::fs::read_to_string(data.join("holdout.csv")).unwrap();
    assert_eq!(holdout_csv.lines().count(), 1 + 50);
    assert!(data.join("normalizer.json").exists());
    assert!(data.join("manifest.json").exists());

    let ckpt = dir.path().join("ar.ckpt.json");
    run_ok(&[
        "train",
        "--model",
        "ar",
        "--data",
        data.to_str().unwrap(),
        "--ar-order",
        "5",
        "--seed",
        "3",
        "--out",
        ckpt.to_str().unwrap(),
    ]);
    assert!(ckpt.exists());

    let metrics = dir.path().join("metrics.csv");
    let pred = dir.path().join("pred.csv");
    let plot = dir.path().join("plot.svg");
    run_ok(&[
        "eval",
        "--ckpt",
        ckpt.to_str().unwrap(),
        "--test",
        data.join("holdout.csv").to_str().unwrap(),
        "--metrics",
        metrics.to_str().unwrap(),
        "--pred-out",
        pred.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    let m = std::fs::read_to_string(&metrics).unwrap();
    assert!(m.starts_with("model,system,friction,protocol,test_condition,seed,rmse,r2\n"));
    assert!(m.lines().nth(1).unwrap().starts_with("AR,double,true,time-step,holdout[120;0.05],3,"));
    assert!(std::fs::read_to_string(&pred).unwrap().starts_with("t,actual_theta1,pred_theta1,"));
    assert!(plot.exists());
}

#[test]
fn dataset_train_eval_pipeline_window() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("wdata");
    run_ok(&[
        "dataset",
        "window",
        "--theta",
        "40,20",
        "--window",
        "10",
        "--t-end",
        "0.3",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(data.join("trajectory.csv").exists());

    let ckpt = dir.path().join("vrnn.ckpt.json");
    run_ok(&[
        "train",
        "--model",
        "vrnn",
        "--data",
        data.to_str().unwrap(),
        "--epochs",
        "1",
        "--hidden",
        "4",
        "--out",
        ckpt.to_str().unwrap(),
    ]);
    let out = run_ok(&[
        "eval",
        "--ckpt",
        ckpt.to_str().unwrap(),
        "--test",
        data.to_str().unwrap(),
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("rmse"), "{text}");
}

#[test]
fn chaoslab_out_env_prefixes_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "simulate",
            "--theta",
            "10,10",
            "--t-end",
            "0.05",
            "--dt",
            "0.001",
            "--out",
            "nested/traj.csv",
        ])
        .env("CHAOSLAB_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("nested/traj.csv").exists());
    assert!(dir.path().join("nested/traj.manifest.json").exists());
}

#[test]
fn reproduce_emits_matrix_and_heatmap() {
    // desk-scale smoke of the full matrix: 8 models, 1 seed, tiny settings
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("suite");
    run_ok(&[
        "reproduce",
        "--suite",
        "double-friction",
        "--samples",
        "40",
        "--epochs",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let metrics = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1 + 8, "8 metrics rows:\n{metrics}");
    assert!(out_dir.join("heatmap.csv").exists());
    assert!(out_dir.join("heatmap.svg").exists());
    assert!(out_dir.join("matrix.json").exists());
    assert!(out_dir.join("run.manifest.json").exists());
    let heat = std::fs::read_to_string(out_dir.join("heatmap.csv")).unwrap();
    assert_eq!(heat.lines().count(), 1 + 8);
    for kind in ["AR", "LINSGD", "FFNN", "VRNN", "LSTM", "GRU", "BIRNN", "STRNN"] {
        assert!(metrics.contains(kind), "missing {kind} in metrics");
    }

    let unknown = bin()
        .args(["reproduce", "--suite", "quadruple-friction", "--out"])
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn trajectory_csv_precision_survives_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "simulate",
            "--theta",
            "133.7,42.0",
            "--t-end",
            "0.2",
            "--dt",
            "0.001",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // 17 significant digits per value
    let text = std::fs::read_to_string(&a).unwrap();
    let sample = text.lines().nth(5).unwrap().split(',').nth(1).unwrap();
    assert!(sample.contains('e'), "expected scientific notation, got {sample}");
    let digits = sample
        .chars()
        .take_while(|c| *c != 'e')
        .filter(|c| c.is_ascii_digit())
        .count();
    assert_eq!(digits, 17, "got {digits} digits in {sample}");
}

#[test]
fn eval_missing_file_reports_cleanly() {
    let out = bin()
        .args(["eval", "--ckpt", "/nonexistent/ckpt.json", "--test", "/nonexistent/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dataset_rejects_colliding_holdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "dataset",
            "timestep",
            "--vary",
            "0:0.2:0.1",
            "--holdout",
            "0.1",
            "--samples",
            "10",
            "--t-end",
            "0.5",
            "--out",
        ])
        .arg(dir.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("collides"));
}

#[test]
fn svg_heatmap_from_lyapunov() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let svg = dir.path().join("h.svg");
    run_ok(&[
        "lyapunov",
        "--grid",
        "0:40:40",
        "--duration",
        "0.2",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    let content = std::fs::read_to_string(&svg).unwrap();
    assert!(content.starts_with("<svg"));
    assert!(content.trim_end().ends_with("</svg>"));
}

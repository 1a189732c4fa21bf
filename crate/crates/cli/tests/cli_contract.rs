//! Contract tests of the `ojj` binary: exit codes, artifact shapes,
//! error messages, and output determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU64, Ordering};

static DIR_COUNTER: AtomicU64 = AtomicU64::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let id = DIR_COUNTER.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!(
        "ojj-cli-test-{}-{tag}-{id}",
        std::process::id()
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run_ojj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ojj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn protocol_run_writes_expected_artifacts() {
    let dir = scratch_dir("protocol");
    let cfg = write_config(
        &dir,
        "p.json",
        r#"{"schema_version": 1, "kind": "protocol", "N": 16,
            "phi_grid": {"start": 0.0, "stop": 3.141592653589793, "points": 10}}"#,
    );
    let out_dir = dir.join("out");
    let output = run_ojj(&[
        "protocol",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");

    let csv = fs::read_to_string(out_dir.join("protocol.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "phi,delta_n_sim,delta_n_eq22,delta_n_exact"
    );
    assert_eq!(csv.lines().count(), 11);
    assert!(!csv.contains('\r'));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["scenario"], "protocol");
    assert!(summary["integrity"]["max_norm_drift"].is_number());
    assert!(summary["integrity"]["max_hermiticity_residual"].is_number());
    assert!(summary["provenance"]["config"]["N"].is_number());
    // plots are opt-in
    assert!(!out_dir.join("protocol.svg").exists());
}

#[test]
fn missing_n_exits_one_and_names_the_key() {
    let dir = scratch_dir("missing-n");
    let cfg = write_config(
        &dir,
        "p.json",
        r#"{"schema_version": 1, "kind": "protocol", "phi": 0.4}"#,
    );
    let output = run_ojj(&["protocol", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("`N`"), "stderr: {stderr}");
}

#[test]
fn unknown_key_exits_one() {
    let dir = scratch_dir("unknown-key");
    let cfg = write_config(
        &dir,
        "p.json",
        r#"{"schema_version": 1, "kind": "protocol", "N": 4, "phi": 0.4, "warp": 9}"#,
    );
    let output = run_ojj(&["protocol", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1);
    assert!(String::from_utf8_lossy(&output.stderr).contains("warp"));
}

#[test]
fn kind_subcommand_mismatch_exits_one() {
    let dir = scratch_dir("mismatch");
    let cfg = write_config(
        &dir,
        "p.json",
        r#"{"schema_version": 1, "kind": "protocol", "N": 4, "phi": 0.4}"#,
    );
    let output = run_ojj(&["bragg", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1);
}

#[test]
fn injected_non_hermitian_matrix_exits_two() {
    let dir = scratch_dir("inject");
    let cfg = write_config(
        &dir,
        "p.json",
        r#"{"schema_version": 1, "kind": "protocol", "N": 4, "phi": 0.4,
            "inject_non_hermitian": true}"#,
    );
    let output = run_ojj(&["protocol", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2, "{output:?}");
    assert!(String::from_utf8_lossy(&output.stderr).contains("integrity"));
}

#[test]
fn repeated_runs_are_byte_identical_outside_provenance() {
    let dir = scratch_dir("determinism");
    let cfg = write_config(
        &dir,
        "i.json",
        r#"{"schema_version": 1, "kind": "interference", "N": 8,
            "phi": 0.7853981633974483, "kappa": 1.0, "grid_points": 400,
            "threshold_fraction": 0.5}"#,
    );
    let mut csvs = Vec::new();
    let mut summaries = Vec::new();
    for run in 0..2 {
        let out_dir = dir.join(format!("out{run}"));
        let output = run_ojj(&[
            "interference",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 0, "{output:?}");
        csvs.push(fs::read(out_dir.join("interference.csv")).unwrap());
        let mut summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap())
                .unwrap();
        summary.as_object_mut().unwrap().remove("provenance");
        summaries.push(summary);
    }
    assert_eq!(csvs[0], csvs[1], "CSV output must be byte-identical");
    assert_eq!(summaries[0], summaries[1]);
}

#[test]
fn sweep_rows_sorted_and_parallel_equals_serial() {
    let dir = scratch_dir("sweep");
    // values deliberately unsorted
    let body = |parallel: bool| {
        format!(
            r#"{{"schema_version": 1, "kind": "sweep", "parameter": "N",
                "values": [8, 2, 4], "parallel": {parallel},
                "scenario": {{"kind": "protocol", "N": 2, "phi": 1.5707963267948966}}}}"#
        )
    };
    let mut outputs = Vec::new();
    for (tag, parallel) in [("ser", false), ("par", true)] {
        let cfg = write_config(&dir, &format!("s-{tag}.json"), &body(parallel));
        let out_dir = dir.join(format!("out-{tag}"));
        let output = run_ojj(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 0, "{output:?}");
        outputs.push(fs::read_to_string(out_dir.join("sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "serial vs parallel sweep CSV");

    let lines: Vec<&str> = outputs[0].lines().collect();
    assert_eq!(lines.len(), 4, "header + 3 rows");
    assert!(lines[0].starts_with("N,"));
    let first_col: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(first_col, vec![2.0, 4.0, 8.0], "rows sorted by sweep key");
}

#[test]
fn sweep_rejects_unknown_parameter_and_empty_values() {
    let dir = scratch_dir("sweep-bad");
    let cfg = write_config(
        &dir,
        "bad-param.json",
        r#"{"schema_version": 1, "kind": "sweep", "parameter": "towels",
            "values": [2], "scenario": {"kind": "protocol", "N": 2, "phi": 0.4}}"#,
    );
    let output = run_ojj(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1);
    assert!(String::from_utf8_lossy(&output.stderr).contains("towels"));

    let cfg = write_config(
        &dir,
        "empty.json",
        r#"{"schema_version": 1, "kind": "sweep", "parameter": "N",
            "values": [], "scenario": {"kind": "protocol", "N": 2, "phi": 0.4}}"#,
    );
    let output = run_ojj(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1);
}

#[test]
fn emit_plots_writes_svg() {
    let dir = scratch_dir("plots");
    let cfg = write_config(
        &dir,
        "b.json",
        r#"{"schema_version": 1, "kind": "bragg", "omega_pump": 1.0,
            "omega_probe": 1.0, "detuning": 19.0, "omega_k": 1.0,
            "scan": {"parameter": "nu", "start": 2.0, "stop": 6.0, "points": 21}}"#,
    );
    let out_dir = dir.join("out");
    let output = run_ojj(&[
        "bragg",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--emit-plots",
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    let svg = fs::read_to_string(out_dir.join("bragg.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let csv = fs::read_to_string(out_dir.join("bragg.csv")).unwrap();
    assert!(csv.starts_with("nu,transfer_probability,gamma_eff\n"));
}

#[test]
fn ring_scenario_reports_fit() {
    let dir = scratch_dir("ring");
    let cfg = write_config(
        &dir,
        "r.json",
        r#"{"schema_version": 1, "kind": "ring", "gamma_prime_1": 0.02,
            "gamma_prime_2": 0.02, "omega_k1": 1.0, "omega_k2": 1.0}"#,
    );
    let out_dir = dir.join("out");
    let output = run_ojj(&[
        "ring",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let rel = summary["results"]["relative_error"].as_f64().unwrap();
    assert!(rel < 0.05, "relative error {rel}");
    assert!(out_dir.join("ring_transfer.csv").exists());
}

#[test]
fn selftest_passes_and_prints_one_line_per_check() {
    let output = run_ojj(&["selftest"]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    for name in [
        "su2_algebra",
        "casimir",
        "unitarity",
        "energy_conservation",
        "number_conservation",
        "ode_norm_conservation",
        "sweep_determinism",
    ] {
        assert!(
            stdout.lines().any(|l| l.starts_with("PASS") && l.contains(name)),
            "missing PASS line for {name}\n{stdout}"
        );
    }
}

#[test]
fn shipped_example_configs_parse_and_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let dir = scratch_dir("shipped");
    for (file, subcommand) in [
        ("configs/protocol_n16.json", "protocol"),
        ("configs/ring_eps002.json", "ring"),
        ("configs/bragg_nu_scan.json", "bragg"),
    ] {
        let out_dir = dir.join(subcommand);
        let output = run_ojj(&[
            subcommand,
            "--config",
            root.join(file).to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 0, "{file}: {output:?}");
    }
}

use std::path::{Path, PathBuf};
use std::process::Command;

use hybrid_plane::junction::SpinIndependentCoupling;
use hybrid_plane::plane_green::SpinOrbitParams;
use hybrid_plane::scattering::{reflection_amplitude, ScatteringMomentum};
use num_complex::Complex64;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_hybrid-plane")).args(args).output().unwrap();
    (out.status.code().unwrap(), out.stdout)
}

/// Runs `subcommand` on a config into a temp file and returns (exit, data, sidecar).
fn run_to_file(subcommand: &str, config: &Path, format: &str, threads: &str) -> (i32, Vec<u8>, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join(format!("out.{format}"));
    let (code, _) = run(&[
        subcommand,
        "--config",
        config.to_str().unwrap(),
        "--format",
        format,
        "--threads",
        threads,
        "--out",
        out.to_str().unwrap(),
    ]);
    let data = std::fs::read(&out).unwrap_or_default();
    let meta = std::fs::read_to_string(dir.path().join(format!("out.{format}.meta.json"))).unwrap_or_default();
    (code, data, meta)
}

const GOLDEN: [(&str, &str, &str, &str); 6] = [
    ("reflect-sweep", "reflect_sweep.toml", "csv", "reflect_sweep.csv"),
    ("reflect-sweep", "reflect_sweep.toml", "json", "reflect_sweep.json"),
    ("bound-states", "bound_states.toml", "csv", "bound_states.csv"),
    ("green-plane", "green_plane.toml", "json", "green_plane.json"),
    ("green-renorm", "green_renorm.toml", "csv", "green_renorm.csv"),
    ("state-dump", "state_dump.toml", "csv", "state_dump.csv"),
];

#[test]
fn golden_outputs_are_reproduced_for_any_thread_count() {
    for (sub, config, format, golden) in GOLDEN {
        let expected = std::fs::read(data(golden)).unwrap();
        for threads in ["1", "8"] {
            let (code, bytes, meta) = run_to_file(sub, &data(config), format, threads);
            assert_eq!(code, 0, "{sub} {meta}");
            assert!(bytes == expected, "{golden} differs with {threads} threads");
            assert!(meta.contains("\"status\": \"ok\""));
        }
    }
}

#[test]
fn diagnostics_report_is_seed_deterministic() {
    let expected = std::fs::read(data("diagnostics_seed7.json")).unwrap();
    for threads in ["1", "8"] {
        let (code, bytes) = run(&["diagnostics", "--seed", "7", "--format", "json", "--threads", threads]);
        assert_eq!(code, 0);
        assert!(bytes == expected);
    }
}

#[test]
fn single_point_sweep_equals_library_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.toml");
    std::fs::write(
        &cfg,
        "task = \"reflect-sweep\"\n[spin_orbit]\nkind = \"dresselhaus\"\nkappa = 0.3\n[coupling]\nform = \"scalars\"\na = -0.5\nc = [0.2, 0.7]\nd = 1.5\n[grids]\nk = { values = [2.5] }\n",
    )
    .unwrap();
    let (code, bytes) = run(&["reflect-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = String::from_utf8(bytes).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    let r = reflection_amplitude(
        ScatteringMomentum::new(2.5).unwrap(),
        &SpinIndependentCoupling::new(-0.5, Complex64::new(0.2, 0.7), 1.5).unwrap(),
        &SpinOrbitParams::dresselhaus(0.3).unwrap(),
    )
    .unwrap();
    assert_eq!(row, vec![2.5, r.r.re, r.r.im, r.probability, r.transmission]);
}

#[test]
fn decoupled_sweep_is_unitary_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c0.toml");
    let text = std::fs::read_to_string(data("reflect_sweep.toml")).unwrap().replace("c = 1.0", "c = 0.0");
    std::fs::write(&cfg, text).unwrap();
    let (code, bytes) = run(&["reflect-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text.lines().count(), 101);
    for line in text.lines().skip(1) {
        let abs_r2: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((abs_r2 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn failures_are_reported_with_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(data("reflect_sweep.toml")).unwrap();
    let cases = [
        ("bad syntax", "task = [", 10, "config_syntax"),
        ("unknown key", &*base.replace("kappa = 1.0", "kappa = 1.0\nspin = 2"), 11, "config_schema"),
        ("empty grid", &*base.replace("count = 100", "count = 0"), 15, "empty_grid"),
        ("pole", &*base.replace("{ start = 0.1, stop = 10.0, count = 100 }", "{ values = [-1.0, 1.0] }"), 20, "compute.domain"),
    ];
    for (label, text, exit, code) in cases {
        let cfg = dir.path().join("bad.toml");
        std::fs::write(&cfg, text).unwrap();
        let (status, bytes, meta) = run_to_file("reflect-sweep", &cfg, "json", "1");
        assert_eq!(status, exit, "{label}");
        let report: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(report["status"], "error", "{label}");
        assert_eq!(report["error"]["code"], code, "{label}");
        assert!(meta.contains(code), "{label}");
    }
}

#[test]
fn subcommand_must_match_config_task() {
    let (code, _) = run(&["bound-states", "--config", data("reflect_sweep.toml").to_str().unwrap()]);
    assert_eq!(code, 11);
}

#[test]
fn bound_state_metadata_carries_both_reality_statements() {
    let (code, _, meta) = run_to_file("bound-states", &data("bound_states.toml"), "csv", "2");
    assert_eq!(code, 0);
    let meta: serde_json::Value = serde_json::from_str(&meta).unwrap();
    let region = &meta["metadata"]["reality_region"];
    assert!(region["measured"]["kappa_b_lower_edge"].is_number());
    assert_eq!(region["alternative_claim"]["consistent_with_samples"], false);
    assert_eq!(meta["metadata"]["duality_check_passed"], true);
}

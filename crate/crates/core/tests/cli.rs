use std::path::Path;
use std::process::{Command, Output};

use framelab::frames::Frame;
use framelab::SeqVec;

fn framelab(args: &[&str], config: Option<&Path>, out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_framelab"));
    cmd.args(args);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn list_builtins_names_required_frames() {
    let out = framelab(&["list-builtins"], None, None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["onb(d)", "doubled_onb(d)", "scaled_basis", "carleson", "riesz_perturbed"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn carleson_run_reports_bounds_excess_and_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "kind = \"carleson\"\n[parameters]\nalpha = 2.0\nK = 10\norbit_length = 80\n",
    );
    let out = framelab(&["carleson"], Some(&cfg), Some(&dir.path().join("out")));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("out"));
    assert_eq!(r["measured"]["excess"], 70);
    assert_eq!(r["measured"]["c_max"], 0.5);
    assert!(r["measured"]["frame_bounds"]["lower"].as_f64().unwrap() > 0.0);
    assert_eq!(r["passed"], true);
    let csv = std::fs::read_to_string(dir.path().join("out/bounds.csv")).unwrap();
    assert!(csv.starts_with("m,lower,upper,excess\n"));
    assert_eq!(csv.lines().count(), 81);
    Frame::from_json_str(&std::fs::read_to_string(dir.path().join("out/frame.json")).unwrap()).unwrap();
}

#[test]
fn approximate_run_from_json_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        r#"{"kind": "approximate", "parameters": {"frame": "onb(8)", "lambda": 1.4142135623730951, "j": 3}}"#,
    );
    let out = framelab(&["approximate"], Some(&cfg), Some(&dir.path().join("out")));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("out"));
    for c in r["measured"]["errors"].as_array().unwrap() {
        assert_eq!(c["passes"], true);
    }
    let csv = std::fs::read_to_string(dir.path().join("out/errors.csv")).unwrap();
    assert!(csv.starts_with("k,alpha_k,error_sq,error_bound,eps_over_2k\n"));
    let pipeline: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/pipeline.json")).unwrap()).unwrap();
    for key in ["schedule", "phi", "errors", "report"] {
        assert!(pipeline.get(key).is_some(), "{key}");
    }
}

#[test]
fn represent_onb_has_zero_residual_and_unit_norm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.toml", "[parameters]\nframe = \"onb(6)\"\n");
    let out = framelab(&["represent"], Some(&cfg), Some(&dir.path().join("out")));
    assert!(out.status.success());
    let r = report(&dir.path().join("out"));
    assert_eq!(r["measured"]["residual"], 0.0);
    assert_eq!(r["measured"]["norm"], 1.0);
}

#[test]
fn failing_invariant_gives_nonzero_exit_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let dup = Frame::new(
        "dup",
        vec![SeqVec::basis(1), SeqVec::basis(1), SeqVec::basis(2), SeqVec::basis(3)],
    )
    .unwrap();
    write(dir.path(), "dup.json", &dup.to_json_string().unwrap());
    let cfg = write(dir.path(), "r.toml", "[parameters]\nframe = \"dup.json\"\n");
    let out = framelab(&["represent"], Some(&cfg), Some(&dir.path().join("out")));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("FAIL kernel_shift_invariance"), "{stderr}");
    assert_eq!(report(&dir.path().join("out"))["passed"], false);
}

#[test]
fn invalid_config_is_a_usage_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[parameters]\nalpah = 2.0\n", "alpah"),
        ("[parameters]\nK = 1\n", "`K`"),
        ("[parameters]\nframe = \"onb(4)\"\n", "`frame`"),
        ("kind = \"represent\"\n", "`kind`"),
    ];
    for (i, (body, field)) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.toml"), body);
        let out = framelab(&["carleson"], Some(&cfg), Some(&dir.path().join("out")));
        assert_eq!(out.status.code(), Some(2), "{body}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.contains(field), "{stderr}");
    }
    let out = framelab(&["carleson"], Some(&dir.path().join("missing.toml")), None);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn seed_flag_overrides_config_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = 1\n[parameters]\nK = 6\norbit_length = 24\n");
    let run = |seed: &str, out: &str| {
        let o = framelab(
            &["carleson", "--seed", seed],
            Some(&cfg),
            Some(&dir.path().join(out)),
        );
        assert!(o.status.success());
        std::fs::read(dir.path().join(out).join("report.json")).unwrap()
    };
    let a = run("5", "a");
    let b = run("5", "b");
    let c = run("6", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let r: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["seed"], 5);
    assert!(dir.path().join("a/timing.json").exists());
}

#[test]
fn hypercyclic_and_diagnostics_runs_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "h.toml", "[parameters]\nframe = \"onb(10)\"\na = 2.0\nj = 3\n");
    let out = framelab(&["hypercyclic"], Some(&cfg), Some(&dir.path().join("h")));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("h/plan.json")).unwrap()).unwrap();
    assert_eq!(plan["alphas"][0], 0);

    let cfg = write(dir.path(), "d.toml", "[parameters]\nsections = [20, 200]\n");
    let out = framelab(&["diagnostics"], Some(&cfg), Some(&dir.path().join("d")));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("d/decay.csv")).unwrap();
    assert!(csv.starts_with("n,right_shift_norm,scaled_right_shift_norm\n"));
}

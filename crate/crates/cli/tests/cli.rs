use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sisrec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sisrec"))
        .args(args)
        .current_dir(dir)
        .env_remove("SISREC_THREADS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn synth_denoise_detect_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = sisrec(
        &["synth", "--s", "1", "--n", "54", "--sigma", "0", "--seed", "4", "--out", "obs.json", "--clean-out", "x.json"],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let obs = json(&d.join("obs.json"));
    assert_eq!(obs["re"].as_array().unwrap().len(), 109);

    for mode in ["core", "full", "causal"] {
        let out = sisrec(&["denoise", "--input", "obs.json", "--s", "1", "--mode", mode, "--out", "d.json"], d);
        assert!(out.status.success(), "{mode}: {}", String::from_utf8_lossy(&out.stderr));
        let est = json(&d.join("d.json"));
        assert_eq!(est["mode"], mode);
        assert!(est["trace_len"].as_u64().unwrap() > 0);
        assert!(est["filter_spectra"][0]["domain"] == "spectrum");
        // noiseless input: the estimate reproduces the observations
        let lo = est["xhat"]["lo"].as_i64().unwrap();
        let re = est["xhat"]["re"].as_array().unwrap();
        let truth = obs["re"].as_array().unwrap();
        for (i, v) in re.iter().enumerate() {
            let t = (lo + i as i64 + 54) as usize;
            assert!((v.as_f64().unwrap() - truth[t].as_f64().unwrap()).abs() < 1e-6, "{mode} at {i}");
        }
    }

    let out = sisrec(&["detect", "--input", "obs.json", "--s", "1", "--sigma", "1", "--delta", "0.1"], d);
    assert!(out.status.success());
    let verdict: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["reject"], false);
    assert!(verdict["threshold"].as_f64().unwrap() > verdict["statistic"].as_f64().unwrap());
}

#[test]
fn oracle_reports_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("spec.json"),
        r#"{"roots": [{"re": 1.0, "im": 0.0, "mult": 1}, {"re": 0.0, "im": 1.0, "mult": 1}]}"#,
    )
    .unwrap();
    for causal in [false, true] {
        let mut args = vec!["oracle", "--spec", "spec.json", "--m", "9", "--out", "o.json"];
        if causal {
            args.push("--causal");
        }
        let out = sisrec(&args, d);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let o = json(&d.join("o.json"));
        assert_eq!(o["causal"], causal);
        assert!(o["reproducing_error"].as_f64().unwrap() < 1e-7);
        let cert = &o["certificates"];
        for key in ["linf", "l2", "l1"] {
            assert!(cert[key].as_f64().unwrap() > 0.0);
        }
        if !causal {
            assert_eq!(o["within_budget"], true);
            assert_eq!(o["filter"]["lo"], -81);
        } else {
            assert_eq!(o["filter"]["lo"], 0);
        }
    }
}

#[test]
fn bench_writes_identical_csv_for_identical_configs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("cfg.json"),
        r#"{"trials": 5, "n_list": [27], "s_list": [1, 2], "sigma": 0.1, "delta": 0.2,
            "root_mode": "unit-circle", "seed": 11, "estimator_mode": "core", "out_path": "a.csv"}"#,
    )
    .unwrap();
    assert!(sisrec(&["bench", "--config", "cfg.json"], d).status.success());
    let out = sisrec(&["bench", "--config", "cfg.json", "--out", "b.csv", "--json", "r.json"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,n,s,sigma,mode,mse,converged");
    assert_eq!(lines.len(), 11);
    assert!(!text.contains('\r'));
    assert_eq!(json(&d.join("r.json"))["reports"].as_array().unwrap().len(), 2);

    // one thread gives the same bytes
    let single = Command::new(env!("CARGO_BIN_EXE_sisrec"))
        .args(["bench", "--config", "cfg.json", "--out", "c.csv"])
        .current_dir(d)
        .env("SISREC_THREADS", "1")
        .status()
        .unwrap();
    assert!(single.success());
    assert_eq!(text.as_bytes(), std::fs::read(d.join("c.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(sisrec(&["--help"], d).status.code(), Some(0));
    assert_eq!(sisrec(&["--version"], d).status.code(), Some(0));
    assert_eq!(sisrec(&["frobnicate"], d).status.code(), Some(1));
    assert_eq!(sisrec(&["denoise", "--s", "1"], d).status.code(), Some(1));
    assert_eq!(sisrec(&["denoise", "--input", "missing.json", "--s", "1"], d).status.code(), Some(1));

    let bad_threads = Command::new(env!("CARGO_BIN_EXE_sisrec"))
        .args(["check"])
        .current_dir(d)
        .env("SISREC_THREADS", "zero")
        .status()
        .unwrap();
    assert_eq!(bad_threads.code(), Some(1));

    // m = 4 is far from the large-m limit, so that check must fail
    std::fs::write(
        d.join("sizes.json"),
        r#"{"grid_sizes": [4], "draws": 2, "filter_m": [3], "max_order": 1, "hilbert_m": [4], "seed": 1}"#,
    )
    .unwrap();
    let failing = sisrec(&["check", "--sizes", "sizes.json", "--out", "rep.json"], d);
    assert_eq!(failing.status.code(), Some(2));
    let rep = json(&d.join("rep.json"));
    let failed: Vec<&str> = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["hilbert_limit_s2"]);

    let passing = sisrec(&["check"], d);
    assert_eq!(passing.status.code(), Some(0), "{}", String::from_utf8_lossy(&passing.stdout));
    assert!(String::from_utf8_lossy(&passing.stdout).contains("dirichlet_orthogonality"));
}

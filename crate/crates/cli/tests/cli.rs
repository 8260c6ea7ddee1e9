use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

const FAST: [&str; 6] = ["--ppd", "10", "--n-dir", "200", "--n-phase-bins", "90"];

fn srg_cert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srg-cert"))
        .args(args)
        .env_remove("SRG_CERT_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_model(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn with_fast<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(&FAST);
    v
}

#[test]
fn certified_pair_exits_zero_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();
    let r = srg_cert(&with_fast(&["check", "--h1", "bundled:h1", "--h2", "bundled:h2", "--method", "hull", "--out", out]));
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    let entries = manifest["artifacts"].as_array().unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e["path"].as_str().unwrap()).collect();
    for expected in ["verdict_hull.json", "margins_hull.csv", "nyquist.svg", "locus.csv", "srg_band_1.svg", "srg_band_2.svg"] {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
    for e in entries {
        let bytes = std::fs::read(out_dir.join(e["path"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(e["sha256"].as_str().unwrap(), digest);
    }
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("verdict_hull.json")).unwrap()).unwrap();
    assert_eq!(verdict["status"], "certified_stable");
    assert_eq!(verdict["run_config"]["method"], "hull");
}

#[test]
fn violated_pair_exits_two_for_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let h1 = write_model(dir.path(), "h1.tf", "dim 1\n[ -2/(s+1) ]\n");
    let h2 = write_model(dir.path(), "h2.tf", "dim 1\n[ 1 ]\n");
    for method in ["disk", "hull", "naive"] {
        let out = dir.path().join(method);
        let r = srg_cert(&with_fast(&["check", "--h1", &h1, "--h2", &h2, "--method", method, "--out", out.to_str().unwrap()]));
        assert_eq!(code(&r), 2, "{method}: {}", String::from_utf8_lossy(&r.stderr));
    }
}

#[test]
fn disk_never_certifies_where_hull_does_not() {
    let dir = tempfile::tempdir().unwrap();
    for (k, gain) in ["0.5", "3", "-0.5", "-3"].iter().enumerate() {
        let h1 = write_model(dir.path(), &format!("a{k}.tf"), "dim 2\n[ 1/(s+1), 0.5/(s+2) ; -0.3/(s+1), 2/(s+3) ]\n");
        let h2 = write_model(dir.path(), &format!("b{k}.tf"), &format!("dim 2\n[ {gain}, 0 ; 0, {gain} ]\n"));
        let run = |method: &str| {
            let out = dir.path().join(format!("{method}{k}"));
            code(&srg_cert(&with_fast(&["check", "--h1", &h1, "--h2", &h2, "--method", method, "--out", out.to_str().unwrap()])))
        };
        let (disk, hull) = (run("disk"), run("hull"));
        assert!(disk == 0 || disk == 2);
        assert!(!(disk == 0 && hull == 2), "gain {gain}: disk certified, hull did not");
    }
}

#[test]
fn usage_and_model_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let missing = dir.path().join("missing.tf");
    let r = srg_cert(&["check", "--h1", missing.to_str().unwrap(), "--h2", "bundled:h2", "--out", out]);
    assert_eq!(code(&r), 1);
    assert!(!r.stderr.is_empty());
    assert_eq!(code(&srg_cert(&["check", "--h1", "bundled:h1"])), 1);
    assert_eq!(code(&srg_cert(&["frobnicate"])), 1);
    assert_eq!(code(&srg_cert(&["check", "--h1", "bundled:h1", "--h2", "bundled:h2", "--method", "ellipse", "--out", out])), 1);
    assert_eq!(code(&srg_cert(&["check", "--h1", "bundled:h1", "--h2", "bundled:h2", "--omega-min", "5", "--omega-max", "1", "--out", out])), 1);
    let unstable = write_model(dir.path(), "u.tf", "dim 1\n[ 1/(s-1) ]\n");
    assert_eq!(code(&srg_cert(&with_fast(&["check", "--h1", &unstable, "--h2", "bundled:h2", "--out", out]))), 1);
    let garbage = write_model(dir.path(), "g.tf", "dim 1\n[ 1/(s+ ]\n");
    assert_eq!(code(&srg_cert(&with_fast(&["check", "--h1", &garbage, "--h2", &garbage, "--out", out]))), 1);
    assert_eq!(code(&srg_cert(&["--help"])), 0);
}

#[test]
fn thread_variable_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let r = Command::new(env!("CARGO_BIN_EXE_srg-cert"))
        .args(["eval", "--model", "bundled:h1", "--omega", "1", "--threads", "2", "--out", out.to_str().unwrap()])
        .env("SRG_CERT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&r), 1);
    let r = Command::new(env!("CARGO_BIN_EXE_srg-cert"))
        .args(["eval", "--model", "bundled:h1", "--omega", "1", "--threads", "0", "--out", out.to_str().unwrap()])
        .env("SRG_CERT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = out_dir.to_str().unwrap();
    let args = with_fast(&["check", "--h1", "bundled:h1", "--h2", "bundled:h2", "--method", "all", "--seed", "3", "--out", out]);
    assert_eq!(code(&srg_cert(&args)), 0);
    let first = std::fs::read(out_dir.join("manifest.json")).unwrap();
    let verdict = std::fs::read(out_dir.join("verdict_naive.json")).unwrap();
    assert_eq!(code(&srg_cert(&args)), 0);
    assert_eq!(first, std::fs::read(out_dir.join("manifest.json")).unwrap());
    assert_eq!(verdict, std::fs::read(out_dir.join("verdict_naive.json")).unwrap());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n_dir = 150\nseed = 5\nmethod = \"naive\"\n").unwrap();
    let out_dir = dir.path().join("o");
    let r = srg_cert(&[
        "check", "--h1", "bundled:h1", "--h2", "bundled:h2", "--config", cfg.to_str().unwrap(), "--seed", "8", "--ppd", "5",
        "--n-phase-bins", "90", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("verdict_naive.json")).unwrap()).unwrap();
    assert_eq!(v["run_config"]["n_dir"], 150);
    assert_eq!(v["run_config"]["seed"], 8);
    assert_eq!(v["run_config"]["points_per_decade"], 5);
}

#[test]
fn eval_writes_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let r = srg_cert(&["eval", "--model", "bundled:h3", "--omega", "2", "--n-dir", "100", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let csv = std::fs::read_to_string(out_dir.join("srg_cloud.csv")).unwrap();
    assert!(csv.starts_with("omega,re,im,sample_kind\n"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("eval.json")).unwrap()).unwrap();
    assert_eq!(v["response"].as_array().unwrap().len(), 3);
}

#[test]
fn nyquist_flags_encirclement() {
    let dir = tempfile::tempdir().unwrap();
    let h1 = write_model(dir.path(), "h1.tf", "dim 1\n[ 10/(s+1)^3 ]\n");
    let h2 = write_model(dir.path(), "h2.tf", "dim 1\n[ 1 ]\n");
    let out = dir.path().join("o");
    let r = srg_cert(&["nyquist", "--h1", &h1, "--h2", &h2, "--ppd", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&r), 2, "{}", String::from_utf8_lossy(&r.stderr));
    let r = srg_cert(&["nyquist", "--h1", "bundled:h1", "--h2", "bundled:h2", "--ppd", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("nyquist.json")).unwrap()).unwrap();
    assert_eq!(v["gnc"]["winding"], 0);
    assert_eq!(v["sufficient_gnc"]["pass"], true);
}

#[test]
fn plot_and_equiv_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plot");
    let r = srg_cert(&[
        "plot", "--h1", "bundled:h1", "--h2", "bundled:h2", "--ppd", "4", "--band", "0.001:1", "--band", "1:1000", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    for f in ["srg_h1.csv", "srg_h2.csv", "srg_band_1.svg", "srg_band_2.svg", "nyquist.svg", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let triples = std::fs::read_to_string(out.join("srg_h1.csv")).unwrap();
    assert!(triples.starts_with("omega,re,im\n"));

    let out = dir.path().join("equiv");
    let r = srg_cert(&["equiv", "--count", "3", "--ppd", "5", "--n-dir", "100", "--n-phase-bins", "60", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert!(matches!(code(&r), 0 | 2), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("equiv_report.json")).unwrap()).unwrap();
    assert_eq!(v["count"], 3);
    for key in ["seed", "agree", "disagree", "dead_band", "skipped_noninvertible", "worst_cases"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let csv = std::fs::read_to_string(out.join("equiv_pairs.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let r = srg_cert(&["equiv", "--soundness", "--count", "3", "--ppd", "5", "--n-dir", "100", "--n-phase-bins", "60", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
}

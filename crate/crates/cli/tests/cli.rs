use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn rotset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("rotset-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn golden_mean_indicator_interval() {
    let o = rotset(&["rotset", "--system", &data("gm.json"), "--potential", &data("ind1.json")]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout), "0\n0.5\n");
}

#[test]
fn entropy_matches_binary_entropy() {
    let o = rotset(&[
        "entropy",
        "--system",
        &data("full2.json"),
        "--potential",
        &data("ind1.json"),
        "--w",
        "0.9",
    ]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    let h2 = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
    assert!((v["H"].as_f64().unwrap() - h2).abs() < 1e-8);
    assert!((v["T_star"][0].as_f64().unwrap() - 9f64.ln()).abs() < 1e-6);
    assert_eq!(v["converged"], true);
}

#[test]
fn domain_errors_exit_one_with_json() {
    let o = rotset(&[
        "entropy",
        "--system",
        &data("full2.json"),
        "--potential",
        &data("ind1.json"),
        "--w",
        "1.5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["module"], "thermo");
    assert_eq!(e["operation"], "solve_rotation");
    assert_eq!(e["kind"], "NotInterior");
    assert!(e["message"].is_string());
}

#[test]
fn malformed_inputs_are_domain_errors() {
    let dir = scratch("malformed");
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"alphabet": 2, "transitions": [[1, 2], [1, 1]]}"#).unwrap();
    let o = rotset(&["rotset", "--system", bad.to_str().unwrap(), "--potential", &data("ind1.json")]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["module"], "sft");
    assert_eq!(e["kind"], "BadMatrixEntry");

    fs::write(&bad, "{not json").unwrap();
    let o = rotset(&["rotset", "--system", &data("full2.json"), "--potential", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["kind"], "Parse");

    let o = rotset(&["pressure", "--system", &data("full2.json"), "--potential", &data("ind1.json"), "--T", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["kind"], "DimensionMismatch");
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rotset(&["entropy", "--system", &data("full2.json")]).status.code(), Some(2));
    assert_eq!(rotset(&["no-such-command"]).status.code(), Some(2));
    // A Lipschitz sample needs a seed.
    assert_eq!(rotset(&["gallery", "example2", "--lipschitz-pairs", "5"]).status.code(), Some(2));
}

#[test]
fn negative_vectors_parse() {
    let o = rotset(&[
        "pressure",
        "--system",
        &data("full2.json"),
        "--potential",
        &data("planar.json"),
        "--T",
        "-1,-2",
    ]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["T"][0], -1.0);
    assert_eq!(v["T"][1], -2.0);
}

#[test]
fn support_rows_and_witnesses() {
    let o = rotset(&[
        "support",
        "--system",
        &data("full2.json"),
        "--potential",
        &data("planar.json"),
        "--u",
        "1,1",
        "--u",
        "-1,0",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u_1,u_2,value,witness,mean_1,mean_2");
    assert_eq!(lines[1], "1,1,2,1,1,1");
    assert_eq!(lines[2], "-1,0,0,0,0,0");
}

#[test]
fn census_bins_sum_to_trace() {
    let o = rotset(&[
        "perorbit",
        "census",
        "--system",
        &data("full2.json"),
        "--potential",
        &data("ind1.json"),
        "--n",
        "6",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let total: u64 = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 64);
}

#[test]
fn artifacts_are_deterministic() {
    let a = scratch("det-a");
    let b = scratch("det-b");
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = rotset(&[
            "--out",
            dir.to_str().unwrap(),
            "--threads",
            threads,
            "profile",
            "--system",
            &data("full2.json"),
            "--potential",
            &data("planar.json"),
            "--grid",
            "5",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["profile.csv", "profile.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let m: Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert!(m["files"]["profile.csv"]["sha256"].as_str().unwrap().len() == 64);
    assert_eq!(m["config"]["command"]["profile"]["grid"], 5);
    fs::remove_dir_all(a).unwrap();
    fs::remove_dir_all(b).unwrap();
}

#[test]
fn construct_exports_a_reusable_potential() {
    let dir = scratch("construct");
    let o = rotset(&[
        "--out",
        dir.to_str().unwrap(),
        "construct",
        "--boundary",
        &data("circle.json"),
        "--stages",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 2);
    assert!(certs.iter().all(|c| c["within_bounds"] == true));
    for f in ["system.json", "potential.json", "certificates.json", "construct.svg", "manifest.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    // The stage-1 potential feeds straight back into the other commands.
    let o = rotset(&[
        "rotset",
        "--system",
        dir.join("system.json").to_str().unwrap(),
        "--potential",
        dir.join("potential.json").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines() {
        let p: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(p[0].hypot(p[1]) <= 1.0 + 1e-9);
    }
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_prints_a_table() {
    let o = rotset(&["verify", "--quick", "--only", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("PASS  1"));
    assert!(text.contains("1 of 1 criteria passed"));
    assert_eq!(rotset(&["verify", "--only", "12"]).status.code(), Some(1));
}

use std::process::{Command, Output};

use covar::measures::{covar_geq, BivariateModel, Levels};

fn covar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covar")).args(args).output().unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn exit_codes() {
    let ok = covar(&["measure", "--family", "gaussian", "--rho", "0.5", "--alpha", "0.95", "--measure", "covar_eq"]);
    assert_eq!(ok.status.code(), Some(0));

    for bad in [
        &["measure", "--family", "gaussian", "--theta", "2", "--alpha", "0.95", "--measure", "covar_eq"][..],
        &["measure", "--family", "t3", "--rho", "0.5", "--nu", "1", "--alpha", "0.95", "--measure", "coes_geq"],
        &["measure", "--family", "gaussian", "--rho", "1.5", "--alpha", "0.95", "--measure", "covar_eq"],
        &["measure", "--family", "gaussian", "--rho", "0.5", "--alpha", "0.95", "--measure", "nope"],
        &["backtest", "--family", "t3", "--rho", "0.5", "--levels", "0.95"],
        &["frobnicate"],
    ] {
        let out = covar(bad);
        assert_eq!(out.status.code(), Some(1), "{bad:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }

    let diverge = covar(&[
        "measure", "--family", "gumbel_t3", "--theta", "50", "--alpha", "0.9999999999", "--beta", "0.9999999999999999",
        "--measure", "covar_eq",
    ]);
    assert_eq!(diverge.status.code(), Some(2), "{}", String::from_utf8_lossy(&diverge.stderr));

    assert_eq!(covar(&["--help"]).status.code(), Some(0));
}

#[test]
fn measure_json_matches_library() {
    let out = covar(&["measure", "--family", "t3", "--rho", "0.5", "--alpha", "0.95", "--beta", "0.99", "--measure", "covar_geq"]);
    let rec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let want = covar_geq(&BivariateModel::student_t(0.5, 3.0).unwrap(), Levels::new(0.95, 0.99).unwrap()).unwrap();
    assert_eq!(rec["value"].as_f64().unwrap(), want);
    assert_eq!(rec["measure"], "covar_geq");
}

#[test]
fn sweep_rows_follow_the_grid() {
    let out = covar(&["sweep", "--family", "gumbel_t3", "--theta", "1:3:0.1", "--alpha", "0.95", "--measure", "covar_geq,covar_eq"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# tool:"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 21);
    assert!(rows[20].starts_with("gumbel_t3,3,"));
}

#[test]
fn backtest_table_shape_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, format: &str| {
        let path = dir.path().join(name);
        let out = covar(&[
            "backtest", "--family", "gaussian", "--rho", "0,0.2,0.5,0.7,0.9", "--n", "20000", "--seed", "9",
            "--format", format, "-o", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(path).unwrap()
    };
    let a = run("a.csv", "csv");
    assert_eq!(data_rows(&a).len(), 40);
    assert!(a.contains("# seed: 9"));
    assert_eq!(a, run("b.csv", "csv"));

    let json: serde_json::Value = serde_json::from_str(&run("a.json", "json")).unwrap();
    let records = json.as_array().unwrap();
    assert_eq!(records.len(), 40);
    assert!(records.iter().all(|r| r["rng_algorithm"].is_string()));
}

#[test]
fn verify_and_cloud() {
    let out = covar(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cloud.csv");
    let out = covar(&["cloud", "--family", "t3", "--rho", "0.7", "--alpha", "0.95", "--n", "300", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(data_rows(&std::fs::read_to_string(path).unwrap()).len(), 300);
}

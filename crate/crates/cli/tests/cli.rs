use std::path::Path;
use std::process::{Command, Output};

fn fastrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastrate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/regret.csv");
    let status = fastrate(&[
        "regret",
        "--seed",
        "5",
        "--replicates",
        "2",
        "--set",
        "n_grid=10,100",
        "--out",
        out.to_str().unwrap(),
        "--check",
    ]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let rows = csv_rows(&out);
    assert!(rows[0].starts_with("stream,n,mean_regret"));
    assert_eq!(rows.len(), 1 + 3 * 2);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("nested/regret.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["config"]["seed"], 5);
    assert_eq!(meta["config"]["replicates"], 2);
    assert!(meta["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(meta["checks"][0]["passed"], true);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let s = fastrate(&[
            "rate",
            "--set",
            "distribution=separable",
            "--set",
            "learner=md",
            "--set",
            "n_grid=16,32,64",
            "--replicates",
            "4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(s.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn config_files_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("margin.cfg");
    std::fs::write(&flat, "# small margin run\nn_grid = 100\ngamma_grid = 0.1, 0.5\nholdout = 500\nrademacher_draws = 20\n").unwrap();
    let json = dir.path().join("margin.json");
    std::fs::write(
        &json,
        r#"{"experiment": "margin", "n_grid": [100], "gamma_grid": [0.1, 0.5], "holdout": 500, "rademacher_draws": 20}"#,
    )
    .unwrap();
    let a = fastrate(&["margin", "--config", flat.to_str().unwrap()]);
    let b = fastrate(&["margin", "--config", json.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 3);
}

#[test]
fn config_errors_exit_with_2() {
    assert_eq!(fastrate(&["nonsense"]).status.code(), Some(2));
    assert_eq!(fastrate(&["rate", "--set", "n_grid=64,32"]).status.code(), Some(2));
    assert_eq!(fastrate(&["rate", "--replicates", "0"]).status.code(), Some(2));
    assert_eq!(fastrate(&["rate", "--set", "learner=sgd"]).status.code(), Some(2));
    assert_eq!(fastrate(&["rate", "--config", "/definitely/missing.cfg"]).status.code(), Some(2));
    // absolute loss cannot drive a smooth learner
    assert_eq!(
        fastrate(&["rate", "--set", "distribution=hardA", "--set", "learner=md"]).status.code(),
        Some(2)
    );
}

#[test]
fn failed_check_exits_with_3_only_under_check() {
    let args = [
        "rate",
        "--set",
        "distribution=hardB:0.1",
        "--set",
        "n_grid=64,128,256",
        "--replicates",
        "5",
    ];
    assert_eq!(fastrate(&args).status.code(), Some(0));
    let mut with_check = args.to_vec();
    with_check.push("--check");
    let out = fastrate(&with_check);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL slope"));
}

use fastrate_core::harness::report::metadata_path;
use fastrate_core::harness::{emit, run, ExperimentConfig, ExperimentId, RateCurve};

fn small(id: ExperimentId, overrides: &[&str]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(id);
    cfg.seed = 11;
    cfg.replicates = 3;
    for o in overrides {
        cfg.apply_override(o).unwrap();
    }
    cfg.validate().unwrap();
    cfg
}

#[test]
fn emitted_csv_rebuilds_the_same_curve() {
    let cfg = small(ExperimentId::Rate, &["distribution=separable", "learner=md", "n_grid=16,64,256"]);
    let out = run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rate.csv");
    emit(&out, &path, cfg.to_json(), 0.0).unwrap();

    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, out.table.columns);
    let means: Vec<f64> = reader
        .records()
        .map(|r| r.unwrap()[header.iter().position(|c| c == "mean_excess").unwrap()].parse().unwrap())
        .collect();
    // 17 significant digits: exact round trip
    assert_eq!(means, out.table.column("mean_excess").unwrap());

    let curve = RateCurve::from_table("separable", &out.table).unwrap();
    assert_eq!(curve.rows.len(), 3);
    assert!(curve.rows.iter().all(|r| (r.bound.unwrap() - 2.0 / r.n as f64).abs() < 1e-15));
    assert!(metadata_path(&path).exists());
}

#[test]
fn every_experiment_runs_at_toy_size_and_is_reproducible() {
    let cases: [(ExperimentId, &[&str]); 6] = [
        (ExperimentId::Rate, &["distribution=hardA", "n_grid=8,16,32"]),
        (ExperimentId::Regret, &["n_grid=10,40"]),
        (ExperimentId::Stability, &["n_grid=32", "replicates=30"]),
        (ExperimentId::Sparse, &["n_grid=32,64", "base_dim=16", "l1_iters=200"]),
        (ExperimentId::Regime, &["n_grid=10,40", "d=5"]),
        (ExperimentId::Margin, &["n_grid=50", "holdout=200", "rademacher_draws=10"]),
    ];
    for (id, overrides) in cases {
        let cfg = small(id, overrides);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert!(!a.table.rows.is_empty(), "{id:?}");
        assert_eq!(a.table.to_csv_string().unwrap(), b.table.to_csv_string().unwrap(), "{id:?}");
        assert_eq!(a.experiment, id.name());
    }
}

#[test]
fn seed_changes_the_numbers() {
    let mut cfg = small(ExperimentId::Regret, &["n_grid=20", "streams=iid"]);
    let a = run(&cfg).unwrap().table;
    cfg.seed = 12;
    let b = run(&cfg).unwrap().table;
    assert_ne!(a.column("mean_regret").unwrap(), b.column("mean_regret").unwrap());
}

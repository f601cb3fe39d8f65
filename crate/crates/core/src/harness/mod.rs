//! Experiment configuration, runners and report emission.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, ExperimentId};
pub use experiments::{
    run, run_margin_experiment, run_rate_experiment, run_regime_experiment,
    run_regret_experiment, run_sparse_experiment, run_stability_experiment,
};
pub use report::{emit, fit_slope, Check, ExperimentOutput, RateCurve, RateRow, SlopeFit, Table};

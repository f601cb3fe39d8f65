//! Smoothness-adaptive learning rates for online and stochastic convex
//! optimization.
//!
//! The crate is organised around a handful of building blocks:
//!
//! * [`losses`]: scalar losses `φ(t, y)` with declared smoothness and
//!   runtime-checkable self-bounding properties.
//! * [`geometry`]: Euclidean and entropy mirror geometries, Bregman
//!   divergences and mirror steps.
//! * [`online`]: the online game loop, theory-prescribed step sizes and
//!   regret accounting.
//! * [`batch`]: regularized empirical risk minimization with a certified
//!   solver and the expected-stability probe.
//! * [`constructions`]: hard distributions with closed-form risks and exact
//!   empirical minimizers, plus the synthetic generators used by the harness.
//! * [`bounds`]: Rademacher complexity estimation and closed-form bound
//!   calculators.
//! * [`harness`]: experiment configs, runners and CSV/JSON emission.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod bounds;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod losses;
pub mod numeric;
pub mod online;
pub mod rng;
pub mod stats;

pub use batch::{lambda_for, solve_regularized_erm, theorem4_bound, Dataset, SolveReport};
pub use bounds::{BoundInputs, FunctionClass};
pub use constructions::{HardDistribution, RiskModel};
pub use error::{Error, Result};
pub use geometry::{Geometry, MirrorSetup};
pub use losses::LossSpec;
pub use online::{
    mirror_descent_stepsize, regret_bound, run_mirror_descent, stepsize_for, Instance,
    InstanceStream, OnlineTrace,
};

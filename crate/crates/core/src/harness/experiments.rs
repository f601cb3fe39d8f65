//! The six experiment runners.
//!
//! Replicate `j` at grid point `i` draws from the seed
//! `derive_seed(master, [tag(experiment), i, j])`. Distributions that are
//! fixed per grid point use the replicate slot `u64::MAX`. Jobs run on the
//! rayon pool and are collected in grid order, so output does not depend on
//! the thread count.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::batch::{
    lambda_for, linear_smoothness, solve_composite, solve_regularized_erm, stability_probe,
    theorem4_bound, Dataset, Objective, QuadraticObjective, SolverOptions,
};
use crate::bounds::{
    margin_bound, margin_bound_simplified, margin_empirical_error, BoundInputs, FunctionClass,
};
use crate::constructions::{
    permutation, GaussianRegime, HardDistribution, MarginData, RiskModel, SeparableSynthetic,
    SparseSynthetic, Variant,
};
use crate::error::{Error, Result};
use crate::geometry::{project_nonneg_l1_ball, Geometry, MirrorSetup};
use crate::losses::LossSpec;
use crate::numeric::{ball_least_squares, dot, norm2, ridge_solve};
use crate::online::{
    hindsight_least_squares, mirror_descent_stepsize, regret_bound, run_mirror_descent, Instance,
    InstanceStream,
};
use crate::rng::{derive_seed, rng_from, tag, Rng};
use crate::stats::mean_stderr;

use super::config::{ExperimentConfig, ExperimentId};
use super::report::{Cell, Check, CurveSummary, ExperimentOutput, RateCurve, Table};

/// Runs whichever experiment the config names.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.experiment {
        ExperimentId::Rate => run_rate_experiment(config),
        ExperimentId::Regret => run_regret_experiment(config),
        ExperimentId::Stability => run_stability_experiment(config),
        ExperimentId::Sparse => run_sparse_experiment(config),
        ExperimentId::Regime => run_regime_experiment(config),
        ExperimentId::Margin => run_margin_experiment(config),
    }
}

fn replicate_seed(config: &ExperimentConfig, i: usize, j: usize) -> u64 {
    derive_seed(config.seed, &[tag(config.experiment.name()), i as u64, j as u64])
}

fn grid_seed(config: &ExperimentConfig, i: usize) -> u64 {
    derive_seed(config.seed, &[tag(config.experiment.name()), i as u64, u64::MAX])
}

fn experiment_seed(config: &ExperimentConfig) -> u64 {
    derive_seed(config.seed, &[tag(config.experiment.name()), u64::MAX])
}

/// Evaluates `job(i, j)` for every grid point `i < points` and replicate
/// `j < replicates` in parallel; results come back grouped by `i`.
fn replicate_grid<T, F>(points: usize, replicates: usize, job: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(usize, usize) -> Result<T> + Sync,
{
    let flat: Vec<T> = (0..points * replicates)
        .into_par_iter()
        .map(|k| job(k / replicates, k % replicates))
        .collect::<Result<_>>()?;
    let mut it = flat.into_iter();
    Ok((0..points).map(|_| it.by_ref().take(replicates).collect()).collect())
}

fn solver_options(config: &ExperimentConfig) -> Result<SolverOptions> {
    let defaults = SolverOptions::default();
    Ok(SolverOptions {
        tol: config.get_f64("solver_tol", defaults.tol)?,
        max_iters: config.get_usize("max_iters", defaults.max_iters)?,
        record_history: false,
    })
}

fn fmt_slope(curve: &CurveSummary) -> String {
    match (&curve.fit, &curve.error) {
        (Some(fit), _) => format!("slope {:.4} over {} rows", fit.slope, fit.rows_used),
        (None, Some(e)) => format!("no fit: {e}"),
        (None, None) => "no fit".into(),
    }
}

fn slope_check(name: &str, curve: &CurveSummary, accept: impl Fn(f64) -> bool, band: &str) -> Option<Check> {
    curve
        .fit
        .map(|fit| Check::new(name, accept(fit.slope), format!("{} (want {band})", fmt_slope(curve))))
}

// ---------------------------------------------------------------- rate

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Learner {
    Erm,
    Regularized,
    MirrorDescent,
}

impl Learner {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "erm" => Ok(Learner::Erm),
            "regularized" => Ok(Learner::Regularized),
            "mirror_descent" | "md" => Ok(Learner::MirrorDescent),
            other => Err(Error::Config(format!("unknown learner `{other}`"))),
        }
    }
}

/// A rate-experiment distribution: one of the hard constructions or the
/// separable smooth synthetic.
#[derive(Debug, Clone)]
enum RateSource {
    Hard(HardDistribution),
    Separable(SeparableSynthetic),
}

impl RateSource {
    fn build(name: &str, n: usize, dim: usize, seed: u64) -> Result<Self> {
        if name == "separable" {
            Ok(RateSource::Separable(SeparableSynthetic::new(dim, seed)?))
        } else {
            Ok(RateSource::Hard(HardDistribution::from_name(name, n, seed)?))
        }
    }

    fn model(&self) -> &dyn RiskModel {
        match self {
            RateSource::Hard(h) => h,
            RateSource::Separable(s) => s,
        }
    }

    fn radius(&self) -> f64 {
        match self {
            RateSource::Hard(h) => h.class_radius(),
            RateSource::Separable(_) => 1.0,
        }
    }

    fn lower_bound(&self, n: usize) -> Option<f64> {
        match self {
            RateSource::Hard(h) => Some(h.lower_bound_value(n)),
            RateSource::Separable(_) => None,
        }
    }

    /// Exact ERM on a fresh sample of size `n`. Basis-vector constructions
    /// skip the dense features; the draws are the same.
    fn erm(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match self {
            RateSource::Hard(h) => match h.variant() {
                Variant::OneDimQuadLin { .. } => h.erm_exact(&h.sample(n, seed)?),
                _ => h.erm_from_coordinates(&h.sample_coordinates(n, seed)?),
            },
            RateSource::Separable(s) => {
                let (gram, rhs) = normal_equations(&s.sample(n, seed)?);
                Ok(ball_least_squares(&gram, &rhs, 1.0))
            }
        }
    }
}

/// `(XᵀX/n, Xᵀy/n)`
fn normal_equations(data: &Dataset) -> (DMatrix<f64>, DVector<f64>) {
    let n = data.len();
    let d = data.dim();
    let x = DMatrix::from_fn(n, d, |r, c| data.instances()[r].x[c]);
    let y = DVector::from_iterator(n, data.instances().iter().map(|z| z.y));
    let nf = n as f64;
    (x.tr_mul(&x) / nf, x.tr_mul(&y) / nf)
}

/// Excess risk of the configured learner on the configured distribution
/// across the n-grid.
///
/// Keys: `distribution` (`hardA`, `hardB:<σ>`, `hardC:<q>`, `separable`),
/// `learner` (`erm`, `regularized`, `mirror_descent`), `dim` for the
/// separable synthetic, `solver_tol`.
pub fn run_rate_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let dist_name = config.get_str("distribution", "hardA")?;
    let learner = Learner::parse(&config.get_str("learner", "erm")?)?;
    let dim = config.get_usize("dim", 10)?;
    let options = solver_options(config)?;

    let sources: Vec<Arc<RateSource>> = config
        .n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| RateSource::build(&dist_name, n, dim, grid_seed(config, i)).map(Arc::new))
        .collect::<Result<_>>()?;

    // (setup, step, bound) per grid point
    let mut plans = Vec::with_capacity(sources.len());
    for (source, &n) in sources.iter().zip(&config.n_grid) {
        let model = source.model();
        let loss = model.loss();
        let setup = MirrorSetup::euclidean_ball(model.dim(), source.radius())?;
        if learner != Learner::Erm && !loss.is_smooth() {
            return Err(Error::Incompatible(format!(
                "learner needs a smooth loss, `{}` uses {}",
                dist_name,
                loss.name()
            )));
        }
        let (step, bound) = match learner {
            Learner::Erm => (None, None),
            _ => {
                let h = linear_smoothness(loss, model.feature_sq_bound(Geometry::Euclidean))?;
                let lbar = model.bayes_risk();
                let f = setup.f_max();
                if learner == Learner::Regularized {
                    (Some(lambda_for(h, f, n, lbar)?), Some(theorem4_bound(h, f, n, lbar)?))
                } else {
                    (
                        Some(mirror_descent_stepsize(h, f, n, lbar)?),
                        Some(regret_bound(h, f, n, lbar)?),
                    )
                }
            }
        };
        plans.push((setup, step, bound));
    }

    let results = replicate_grid(config.n_grid.len(), config.replicates, |i, j| {
        let n = config.n_grid[i];
        let seed = replicate_seed(config, i, j);
        let source = &sources[i];
        let model = source.model();
        let (setup, step, _) = &plans[i];
        let w = match learner {
            Learner::Erm => source.erm(n, seed)?,
            Learner::Regularized => {
                let data = model.sample(n, seed)?;
                let lambda = step.expect("regularized plan carries lambda");
                solve_regularized_erm(setup, model.loss(), &data, lambda, options.tol)?.minimizer
            }
            Learner::MirrorDescent => {
                let src = Arc::clone(source);
                let stream = InstanceStream::iid(n, rng_from(seed), move |r: &mut Rng| {
                    src.model().sample_instance(r)
                });
                let eta = step.expect("mirror descent plan carries eta");
                run_mirror_descent(setup, model.loss(), stream, eta, &setup.default_start())?
                    .averaged_iterate()?
            }
        };
        model.excess_risk(&w)
    })?;

    let mut table = Table::new(&[
        "n",
        "dim",
        "mean_excess",
        "stderr",
        "min_excess",
        "bound",
        "lower_bound",
        "step",
    ]);
    for (i, excess) in results.iter().enumerate() {
        let n = config.n_grid[i];
        let (mean, se) = mean_stderr(excess);
        let min = excess.iter().copied().fold(f64::INFINITY, f64::min);
        table.push(vec![
            n.into(),
            sources[i].model().dim().into(),
            mean.into(),
            se.into(),
            min.into(),
            plans[i].2.into(),
            sources[i].lower_bound(n).into(),
            plans[i].1.into(),
        ]);
    }

    let curve = RateCurve::from_table(&dist_name, &table)?;
    let summary = CurveSummary::of(&curve);
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    if learner != Learner::Erm {
        let ok = curve
            .rows
            .iter()
            .all(|r| r.bound.is_some_and(|b| r.mean <= b + 2.0 * r.stderr));
        checks.push(Check::new("mean_within_bound", ok, "mean excess <= bound + 2 stderr on every row"));
    }
    let min_col = table.column("min_excess")?;
    // floors and slope bands are stated for exact ERM on the hard
    // constructions and for mirror descent on the separable synthetic
    match sources.first().map(|s| s.as_ref()) {
        Some(RateSource::Hard(h)) if learner == Learner::Erm => match h.variant() {
            Variant::AbsoluteSeparable { .. } => {
                let ok = curve
                    .rows
                    .iter()
                    .zip(&min_col)
                    .all(|(r, &m)| r.lower.is_some_and(|lb| m >= lb * (1.0 - 1e-12)));
                checks.push(Check::new("floor", ok, "every replicate excess >= 1/(2 sqrt n)"));
                checks.extend(slope_check("slope", &summary, |s| (-0.65..=-0.35).contains(&s), "[-0.65, -0.35]"));
            }
            Variant::GaussianSquared { .. } => {
                let ratios: Vec<f64> = curve
                    .rows
                    .iter()
                    .map(|r| r.mean / r.lower.unwrap_or(f64::NAN))
                    .collect();
                let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                checks.push(Check::new(
                    "floor",
                    ratios.iter().all(|&q| q >= 0.5),
                    format!("mean excess >= 0.5 sqrt(L*/n) on every row; smallest ratio {worst:.4}"),
                ));
                checks.extend(slope_check("slope", &summary, |s| (-0.65..=-0.35).contains(&s), "[-0.65, -0.35]"));
            }
            Variant::OneDimQuadLin { .. } => {}
        },
        Some(RateSource::Separable(_)) if learner == Learner::MirrorDescent => {
            checks.extend(slope_check("slope", &summary, |s| s <= -0.85, "<= -0.85"));
        }
        _ => {}
    }
    if summary.fit.is_none() {
        notes.push(format!("slope not checked: {}", fmt_slope(&summary)));
    }
    Ok(ExperimentOutput {
        experiment: ExperimentId::Rate.name().into(),
        table,
        curves: vec![summary],
        checks,
        notes,
    })
}

// -------------------------------------------------------------- regret

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StreamKind {
    Iid,
    Fixed,
    Adaptive,
}

impl StreamKind {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "iid" => Ok(StreamKind::Iid),
            "fixed" => Ok(StreamKind::Fixed),
            "adaptive" => Ok(StreamKind::Adaptive),
            other => Err(Error::Config(format!("unknown stream `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            StreamKind::Iid => "iid",
            StreamKind::Fixed => "fixed",
            StreamKind::Adaptive => "adaptive",
        }
    }
}

fn unit_sphere(d: usize, rng: &mut Rng) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm2(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn basis(d: usize, i: usize) -> Vec<f64> {
    let mut x = vec![0.0; d];
    x[i] = 1.0;
    x
}

struct RegretRun {
    regret: f64,
    lbar: f64,
    bound: f64,
}

/// Average regret of Euclidean mirror descent on `½(t − y)²` with
/// `F_max = 1` against the best comparator in hindsight (or the origin for
/// the adaptive stream), next to the regret bound evaluated at that
/// comparator's loss.
///
/// Keys: `streams` (any of `iid`, `fixed`, `adaptive`), `dim`, `noise`.
/// Every instance has `‖x‖ ≤ 1`, so `H = 1`; the runner verifies this on
/// the realized data.
pub fn run_regret_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let streams: Vec<StreamKind> = config
        .get_str_list("streams", &["iid", "fixed", "adaptive"])?
        .iter()
        .map(|s| StreamKind::parse(s))
        .collect::<Result<_>>()?;
    let dim = config.get_usize("dim", 5)?;
    let noise = config.get_f64("noise", 0.1)?;
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::Config(format!("`noise` must lie in [0, 1], got {noise}")));
    }
    let loss = LossSpec::squared();
    let setup = MirrorSetup::euclidean(dim, 1.0)?;
    let h = loss.smoothness()?;
    let f = setup.f_max();
    let radius = setup.radius();
    let target = Arc::new(unit_sphere(dim, &mut rng_from(experiment_seed(config))));

    let grid: Vec<(StreamKind, usize)> = streams
        .iter()
        .flat_map(|&s| config.n_grid.iter().map(move |&n| (s, n)))
        .collect();

    let results = replicate_grid(grid.len(), config.replicates, |i, j| -> Result<RegretRun> {
        let (kind, n) = grid[i];
        let seed = replicate_seed(config, i, j);
        let (trace, comparator, lbar) = match kind {
            StreamKind::Iid => {
                let target = Arc::clone(&target);
                let sample = move |rng: &mut Rng| {
                    let x = unit_sphere(target.len(), rng);
                    let eps = if noise > 0.0 {
                        use rand::Rng as _;
                        rng.random_range(-noise..=noise)
                    } else {
                        0.0
                    };
                    let y = dot(&target, &x) + eps;
                    Instance::new(x, y)
                };
                let mut rng = rng_from(seed);
                let drawn: Vec<Instance> = (0..n).map(|_| sample(&mut rng)).collect();
                let (u, lbar) = hindsight_least_squares(&drawn, &loss, radius)?;
                let eta = mirror_descent_stepsize(h, f, n, lbar)?;
                let stream = InstanceStream::iid(n, rng_from(seed), sample);
                (run_mirror_descent(&setup, &loss, stream, eta, &setup.default_start())?, u, lbar)
            }
            StreamKind::Fixed => {
                // an oblivious adversary: seeded coordinate order and signs, fixed up front
                use rand::Rng as _;
                let mut rng = rng_from(seed);
                let order = permutation(dim, &mut rng);
                let seq: Vec<Instance> = (0..n)
                    .map(|t| {
                        let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        Instance::new(basis(dim, order[t % dim]), y)
                    })
                    .collect();
                let (u, lbar) = hindsight_least_squares(&seq, &loss, radius)?;
                let eta = mirror_descent_stepsize(h, f, n, lbar)?;
                let stream = InstanceStream::fixed(seq);
                (run_mirror_descent(&setup, &loss, stream, eta, &setup.default_start())?, u, lbar)
            }
            StreamKind::Adaptive => {
                // push the label away from the current prediction on one coordinate
                let lbar = 0.5;
                let eta = mirror_descent_stepsize(h, f, n, lbar)?;
                let mut t = 0usize;
                let stream = InstanceStream::adaptive(n, move |w: &[f64]| {
                    let i = t % dim;
                    t += 1;
                    let y = if w[i] > 0.0 { -1.0 } else { 1.0 };
                    Instance::new(basis(dim, i), y)
                });
                let trace = run_mirror_descent(&setup, &loss, stream, eta, &setup.default_start())?;
                (trace, vec![0.0; dim], lbar)
            }
        };
        let max_sq = trace
            .instances()
            .iter()
            .map(|z| dot(&z.x, &z.x))
            .fold(0.0, f64::max);
        if max_sq > 1.0 + 1e-12 {
            return Err(Error::Incompatible(format!("feature norm² {max_sq} exceeds H = 1")));
        }
        Ok(RegretRun {
            regret: trace.average_regret(&comparator)?,
            lbar,
            bound: regret_bound(h, f, n, lbar)?,
        })
    })?;

    let mut table = Table::new(&[
        "stream",
        "n",
        "mean_regret",
        "max_regret",
        "mean_lbar",
        "mean_bound",
        "min_slack",
        "violations",
    ]);
    let mut total_violations = 0usize;
    for (i, runs) in results.iter().enumerate() {
        let (kind, n) = grid[i];
        let regrets: Vec<f64> = runs.iter().map(|r| r.regret).collect();
        let violations = runs.iter().filter(|r| r.regret > r.bound).count();
        total_violations += violations;
        let mean = |f: &dyn Fn(&RegretRun) -> f64| runs.iter().map(f).sum::<f64>() / runs.len() as f64;
        table.push(vec![
            kind.name().into(),
            n.into(),
            mean(&|r| r.regret).into(),
            regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max).into(),
            mean(&|r| r.lbar).into(),
            mean(&|r| r.bound).into(),
            runs.iter().map(|r| r.bound - r.regret).fold(f64::INFINITY, f64::min).into(),
            violations.into(),
        ]);
    }
    Ok(ExperimentOutput {
        experiment: ExperimentId::Regret.name().into(),
        table,
        curves: Vec::new(),
        checks: vec![Check::new(
            "regret_within_bound",
            total_violations == 0,
            format!("{total_violations} runs above the bound"),
        )],
        notes: vec!["comparator: best fixed predictor in hindsight on the ball (origin for adaptive)".into()],
    })
}

// ----------------------------------------------------------- stability

/// Replace-one stability of regularized ERM against `32H/(λn)·E L(ŵ)`.
///
/// Keys: `distribution` (default `hardB:0.1`), `lambda` (defaults to the
/// rate-optimal choice at `L̄ = L*`), `dim` for the separable synthetic.
pub fn run_stability_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let dist_name = config.get_str("distribution", "hardB:0.1")?;
    let dim = config.get_usize("dim", 10)?;
    let mut table = Table::new(&[
        "n",
        "lambda",
        "smoothness",
        "lhs_mean",
        "lhs_stderr",
        "rhs_mean",
        "rhs_stderr",
        "combined_stderr",
        "holds",
    ]);
    let mut all = true;
    for (i, &n) in config.n_grid.iter().enumerate() {
        let source = RateSource::build(&dist_name, n, dim, grid_seed(config, i))?;
        let model = source.model();
        let setup = MirrorSetup::euclidean_ball(model.dim(), source.radius())?;
        let lambda = if config.has("lambda") {
            config.get_f64("lambda", 0.0)?
        } else {
            let h = linear_smoothness(model.loss(), model.feature_sq_bound(Geometry::Euclidean))?;
            lambda_for(h, setup.f_max(), n, model.bayes_risk())?
        };
        let seed = derive_seed(config.seed, &[tag(ExperimentId::Stability.name()), i as u64]);
        let report = stability_probe(&setup, model, lambda, n, config.replicates, seed)?;
        all &= report.holds();
        table.push(vec![
            n.into(),
            report.lambda.into(),
            report.smoothness.into(),
            report.lhs_mean.into(),
            report.lhs_stderr.into(),
            report.rhs_mean.into(),
            report.rhs_stderr.into(),
            report.combined_stderr.into(),
            Cell::from(if report.holds() { "true" } else { "false" }),
        ]);
    }
    Ok(ExperimentOutput {
        experiment: ExperimentId::Stability.name().into(),
        table,
        curves: Vec::new(),
        checks: vec![Check::new("stability", all, "lhs_mean <= rhs_mean + 2 combined_stderr on every row")],
        notes: Vec::new(),
    })
}

// -------------------------------------------------------------- sparse

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SparseMethod {
    L1Erm,
    EntropyErm,
    EntropyMd,
}

impl SparseMethod {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "l1_erm" => Ok(SparseMethod::L1Erm),
            "entropy_erm" => Ok(SparseMethod::EntropyErm),
            "entropy_md" => Ok(SparseMethod::EntropyMd),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            SparseMethod::L1Erm => "l1_erm",
            SparseMethod::EntropyErm => "entropy_erm",
            SparseMethod::EntropyMd => "entropy_md",
        }
    }
}

/// Accelerated projected gradient for `min f(w)` over
/// `{w ≥ 0, Σw ≤ budget}`, with backtracking on the Lipschitz estimate.
pub fn l1_constrained_erm(objective: &dyn Objective, budget: f64, tol: f64, max_iters: usize) -> Vec<f64> {
    let d = objective.dim();
    let mut w = vec![0.0; d];
    let mut y = w.clone();
    let mut t = 1.0f64;
    let mut lip = 1.0f64;
    for _ in 0..max_iters {
        let (fy, gy) = objective.value_gradient(&y);
        let next = loop {
            let step: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| a - g / lip).collect();
            let cand = project_nonneg_l1_ball(&step, budget);
            let diff: Vec<f64> = cand.iter().zip(&y).map(|(a, b)| a - b).collect();
            let model = fy + dot(&gy, &diff) + 0.5 * lip * dot(&diff, &diff);
            if objective.value(&cand) <= model + 1e-15 * fy.abs().max(1.0) || lip > 1e12 {
                break cand;
            }
            lip *= 2.0;
        };
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let moved: Vec<f64> = next.iter().zip(&w).map(|(a, b)| a - b).collect();
        y = next.iter().zip(&moved).map(|(a, m)| a + (t - 1.0) / t_next * m).collect();
        let change = norm2(&moved);
        w = next;
        t = t_next;
        if change <= tol {
            break;
        }
    }
    w
}

/// Sparse linear prediction with `ℓ₁`-constrained ERM, entropy-regularized
/// ERM and single-pass entropy mirror descent on the doubled features.
///
/// Keys: `base_dim` (256), `k` (4), `amplitude` (`min(1, 2/√k)`), `noise`
/// (0), `budget` (`2√k`), `methods`, `solver_tol`, `max_iters`,
/// `l1_iters` (2000).
pub fn run_sparse_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let base = config.get_usize("base_dim", 256)?;
    let k = config.get_usize("k", 4)?;
    let amplitude = config.get_f64("amplitude", SparseSynthetic::default_amplitude(k))?;
    let noise = config.get_f64("noise", 0.0)?;
    let methods: Vec<SparseMethod> = config
        .get_str_list("methods", &["l1_erm", "entropy_erm", "entropy_md"])?
        .iter()
        .map(|m| SparseMethod::parse(m))
        .collect::<Result<_>>()?;
    let options = solver_options(config)?;
    let l1_iters = config.get_usize("l1_iters", 2000)?;

    let model = Arc::new(SparseSynthetic::new(base, k, amplitude, noise, experiment_seed(config))?);
    let budget = config.get_f64("budget", model.budget())?;
    let setup = MirrorSetup::entropy(model.dim(), budget)?;
    let loss = model.loss().clone();
    let h = linear_smoothness(&loss, model.feature_sq_bound(Geometry::Entropy))?;
    let f = setup.f_max();
    let lbar = model.bayes_risk();
    let d = model.dim() as f64;

    let grid: Vec<(SparseMethod, usize, usize)> = methods
        .iter()
        .flat_map(|&m| config.n_grid.iter().enumerate().map(move |(i, &n)| (m, i, n)))
        .collect();
    let results = replicate_grid(grid.len(), config.replicates, |g, j| {
        let (method, i, n) = grid[g];
        // the same sample for every method at (i, j)
        let seed = replicate_seed(config, i, j);
        let w = match method {
            SparseMethod::L1Erm => {
                let data = model.sample(n, seed)?;
                let obj = QuadraticObjective::from_dataset(&data, &loss, true)?;
                l1_constrained_erm(&obj, budget, options.tol, l1_iters)
            }
            SparseMethod::EntropyErm => {
                let data = model.sample(n, seed)?;
                let obj = QuadraticObjective::from_dataset(&data, &loss, true)?;
                let lambda = lambda_for(h, f, n, lbar)?;
                solve_composite(&setup, &obj, lambda, options)?.minimizer
            }
            SparseMethod::EntropyMd => {
                let src = Arc::clone(&model);
                let stream = InstanceStream::iid(n, rng_from(seed), move |r: &mut Rng| src.sample_instance(r));
                let eta = mirror_descent_stepsize(h, f, n, lbar)?;
                run_mirror_descent(&setup, &loss, stream, eta, &setup.default_start())?.averaged_iterate()?
            }
        };
        model.excess_risk(&w)
    })?;

    let mut table = Table::new(&["method", "n", "d", "k", "mean_excess", "stderr", "bound"]);
    let mut curves = Vec::new();
    for &method in &methods {
        let mut rows = Table::new(&["n", "mean_excess", "stderr"]);
        for (g, &(m, _, n)) in grid.iter().enumerate() {
            if m != method {
                continue;
            }
            let (mean, se) = mean_stderr(&results[g]);
            let kf = k as f64;
            let bound = kf * d.ln() / n as f64 + (kf * lbar * d.ln() / n as f64).sqrt();
            table.push(vec![
                method.name().into(),
                n.into(),
                model.dim().into(),
                k.into(),
                mean.into(),
                se.into(),
                bound.into(),
            ]);
            rows.push(vec![n.into(), mean.into(), se.into()]);
        }
        curves.push(CurveSummary::of(&RateCurve::from_table(method.name(), &rows)?));
    }

    let mut checks = vec![Check::new(
        "w0_feasible",
        model.w0_l1() <= budget * (1.0 + 1e-12),
        format!("|w0|_1 = {:.6} against B = {budget:.6}", model.w0_l1()),
    )];
    if let Some(c) = curves.iter().find(|c| c.label == SparseMethod::EntropyMd.name()) {
        checks.extend(slope_check("entropy_md_slope", c, |s| s <= -0.85, "<= -0.85"));
    }
    Ok(ExperimentOutput {
        experiment: ExperimentId::Sparse.name().into(),
        table,
        curves,
        checks,
        notes: vec![format!("excess measured against L(w0) = {lbar:.6e}")],
    })
}

// -------------------------------------------------------------- regime

const ENVELOPE_TERMS: [&str; 3] = ["B^2", "B^2/n+B*sigma/sqrt(n)", "d*sigma^2/n"];

/// Ridge regression on a Gaussian design against the envelope
/// `min(B², B²/n + Bσ/√n, dσ²/n)`.
///
/// Keys: `d` (50), `B` (5), `sigma` (0.5), `lambda_rule` (`oracle` picks
/// the best of `lambda_grid` per n by replicate mean; `theorem4` uses the
/// rate-optimal λ with `H = 2B²`, `F_max = ½`, `L̄ = σ²`), `lambda_grid`,
/// `envelope_factor` (8).
pub fn run_regime_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = config.get_usize("d", 50)?;
    let b = config.get_f64("B", 5.0)?;
    let sigma = config.get_f64("sigma", 0.5)?;
    let rule = config.get_str("lambda_rule", "oracle")?;
    let factor = config.get_f64("envelope_factor", 8.0)?;
    let default_grid: Vec<f64> = (0..13).map(|k| 10f64.powf(-4.0 + 0.5 * k as f64)).collect();
    let lambda_grid = config.get_f64_list("lambda_grid", &default_grid)?;
    if lambda_grid.is_empty() || lambda_grid.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Config("`lambda_grid` must hold positive values".into()));
    }
    let model = GaussianRegime::new(d, b, sigma, experiment_seed(config))?;

    let candidates: Vec<Vec<f64>> = config
        .n_grid
        .iter()
        .map(|&n| match rule.as_str() {
            "oracle" => Ok(lambda_grid.clone()),
            "theorem4" => Ok(vec![lambda_for(2.0 * b * b, 0.5, n, sigma * sigma)?]),
            other => Err(Error::Config(format!("unknown lambda_rule `{other}`"))),
        })
        .collect::<Result<_>>()?;

    let results = replicate_grid(config.n_grid.len(), config.replicates, |i, j| -> Result<Vec<f64>> {
        let data = model.sample(config.n_grid[i], replicate_seed(config, i, j))?;
        let (gram, rhs) = normal_equations(&data);
        candidates[i]
            .iter()
            .map(|&lambda| model.excess_risk(&ridge_solve(&gram, &rhs, lambda / 2.0)))
            .collect()
    })?;

    let mut table = Table::new(&[
        "n",
        "lambda",
        "mean_excess",
        "stderr",
        "envelope",
        "active_term",
        "ratio",
    ]);
    let mut worst = 0.0f64;
    for (i, reps) in results.iter().enumerate() {
        let n = config.n_grid[i];
        let per_lambda: Vec<(f64, f64)> = (0..candidates[i].len())
            .map(|c| mean_stderr(&reps.iter().map(|r| r[c]).collect::<Vec<_>>()))
            .collect();
        let best = (0..per_lambda.len())
            .min_by(|&a, &c| per_lambda[a].0.total_cmp(&per_lambda[c].0))
            .unwrap_or(0);
        let (mean, se) = per_lambda[best];
        let (env, term) = model.envelope(n);
        worst = worst.max(mean / env);
        table.push(vec![
            n.into(),
            candidates[i][best].into(),
            mean.into(),
            se.into(),
            env.into(),
            ENVELOPE_TERMS[term].into(),
            (mean / env).into(),
        ]);
    }
    Ok(ExperimentOutput {
        experiment: ExperimentId::Regime.name().into(),
        table,
        curves: Vec::new(),
        checks: vec![Check::new(
            "within_envelope",
            worst <= factor,
            format!("largest measured/envelope ratio {worst:.4} (want <= {factor})"),
        )],
        notes: vec![format!("lambda rule: {rule}")],
    })
}

// -------------------------------------------------------------- margin

/// Margin bound evaluated on a γ-grid for the normalized class-mean
/// classifier, against its holdout error.
///
/// Keys: `d` (5), `flip` (0.1), `gamma_grid`, `delta` (0.05), `K` (1e5),
/// `holdout` (10⁵ draws), `rademacher_draws` (200).
pub fn run_margin_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = config.get_usize("d", 5)?;
    let flip = config.get_f64("flip", 0.1)?;
    let gammas = config.get_f64_list("gamma_grid", &[0.05, 0.1, 0.2, 0.4, 0.8, 1.2])?;
    if gammas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("`gamma_grid` must be strictly increasing".into()));
    }
    let delta = config.get_f64("delta", 0.05)?;
    let k = config.get_f64("K", crate::bounds::DEFAULT_K)?;
    let holdout = config.get_usize("holdout", 100_000)?;
    let draws = config.get_usize("rademacher_draws", 200)?;
    let data_model = MarginData::new(d, flip, experiment_seed(config))?;
    let class = FunctionClass::l2_ball(1.0, d)?;
    // |⟨w, x⟩| ≤ ‖w‖‖x‖ = 1
    let b = 1.0;

    struct MarginRun {
        emp: Vec<f64>,
        rademacher: f64,
        holdout: f64,
        zero_one: f64,
    }
    let runs = replicate_grid(config.n_grid.len(), config.replicates, |i, j| -> Result<MarginRun> {
        let n = config.n_grid[i];
        let seed = replicate_seed(config, i, j);
        let data = data_model.sample(n, derive_seed(seed, &[0]))?;
        let mut w = vec![0.0; d];
        for z in data.instances() {
            w.iter_mut().zip(&z.x).for_each(|(wi, xi)| *wi += z.y * xi);
        }
        let norm = norm2(&w);
        if norm > 0.0 {
            w.iter_mut().for_each(|v| *v /= norm);
        }
        let scores: Vec<f64> = data.instances().iter().map(|z| dot(&w, &z.x)).collect();
        let labels: Vec<f64> = data.instances().iter().map(|z| z.y).collect();
        let xs: Vec<Vec<f64>> = data.instances().iter().map(|z| z.x.clone()).collect();
        Ok(MarginRun {
            emp: gammas
                .iter()
                .map(|&g| margin_empirical_error(&scores, &labels, g))
                .collect::<Result<_>>()?,
            rademacher: class.empirical_rademacher(&xs, draws, derive_seed(seed, &[1]))?.value,
            holdout: data_model.holdout_error(&w, holdout, derive_seed(seed, &[2]))?,
            zero_one: data_model.zero_one_error(&w)?,
        })
    })?;

    let mut table = Table::new(&[
        "n",
        "replicate",
        "gamma",
        "emp_margin_error",
        "rademacher",
        "rhs",
        "rhs_simplified",
        "holdout_error",
        "zero_one_error",
    ]);
    let mut covered = true;
    let mut monotone = true;
    for (i, reps) in runs.iter().enumerate() {
        let n = config.n_grid[i];
        for (j, run) in reps.iter().enumerate() {
            let inputs = |e: f64, g: f64| {
                BoundInputs::new()
                    .empirical(e)
                    .rademacher(run.rademacher)
                    .n(n as f64)
                    .delta(delta)
                    .k(k)
                    .margin(g)
                    .range_bound(b)
            };
            for (g, &gamma) in gammas.iter().enumerate() {
                let e = run.emp[g];
                let rhs = margin_bound(&inputs(e, gamma))?;
                covered &= rhs >= run.holdout;
                if g + 1 < gammas.len() {
                    monotone &= margin_bound(&inputs(e, gammas[g + 1]))? <= rhs;
                }
                table.push(vec![
                    n.into(),
                    j.into(),
                    gamma.into(),
                    e.into(),
                    run.rademacher.into(),
                    rhs.into(),
                    margin_bound_simplified(&inputs(e, gamma))?.into(),
                    run.holdout.into(),
                    run.zero_one.into(),
                ]);
            }
        }
    }
    Ok(ExperimentOutput {
        experiment: ExperimentId::Margin.name().into(),
        table,
        curves: Vec::new(),
        checks: vec![
            Check::new("rhs_covers_holdout", covered, "rhs >= holdout error on every row"),
            Check::new("rhs_monotone_in_gamma", monotone, "rhs nonincreasing in gamma at fixed empirical margin error"),
        ],
        notes: vec!["worst-case Rademacher complexity approximated by the empirical value on the sample".into()],
    })
}

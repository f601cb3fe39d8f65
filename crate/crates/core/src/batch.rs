//! Regularized empirical risk minimization `min_{w∈W} L̂(w) + λF(w)` with a
//! certified solver, the matching `λ` rule and the replace-one stability
//! probe.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::RiskModel;
use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::{Geometry, MirrorSetup};
use crate::losses::{LossKind, LossSpec};
use crate::numeric::{dot, sub};
use crate::online::Instance;
use crate::rng::{derive_seed, rng_from};
use crate::stats::mean_stderr;

/// A sample `z₁ … zₙ` with the seed and source it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    instances: Vec<Instance>,
    seed: u64,
    source: String,
}

impl Dataset {
    pub fn new(instances: Vec<Instance>, seed: u64, source: String) -> Result<Self> {
        let d = instances.first().ok_or(Error::Empty("dataset"))?.x.len();
        for z in &instances {
            check_dim(d, z.x.len())?;
        }
        Ok(Self {
            instances,
            seed,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.instances[0].x.len()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// `L̂(w) = (1/n) Σ φ(⟨w, xᵢ⟩, yᵢ)`
    pub fn empirical_loss(&self, loss: &LossSpec, w: &[f64]) -> f64 {
        self.instances.iter().map(|z| z.loss(loss, w)).sum::<f64>() / self.len() as f64
    }

    /// `∇L̂(w)`
    pub fn gradient(&self, loss: &LossSpec, w: &[f64]) -> Vec<f64> {
        self.value_gradient(loss, w).1
    }

    fn value_gradient(&self, loss: &LossSpec, w: &[f64]) -> (f64, Vec<f64>) {
        let mut g = vec![0.0; w.len()];
        let mut value = 0.0;
        for z in &self.instances {
            let t = dot(w, &z.x);
            value += loss.value(t, z.y);
            let slope = loss.derivative(t, z.y);
            if slope != 0.0 {
                for (gi, xi) in g.iter_mut().zip(&z.x) {
                    *gi += slope * xi;
                }
            }
        }
        let n = self.len() as f64;
        g.iter_mut().for_each(|v| *v /= n);
        (value / n, g)
    }

    /// Copy with instance `i` replaced by `z`.
    pub fn with_replaced(&self, i: usize, z: Instance) -> Result<Self> {
        if i >= self.len() {
            return Err(invalid("i", format!("index {i} out of range for n = {}", self.len())));
        }
        check_dim(self.dim(), z.x.len())?;
        let mut out = self.clone();
        out.instances[i] = z;
        Ok(out)
    }
}

fn check_inputs(h: f64, f_max: f64, n: usize, lbar: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("H", format!("must be positive, got {h}")));
    }
    if !(f_max > 0.0 && f_max.is_finite()) {
        return Err(invalid("F_max", format!("must be positive, got {f_max}")));
    }
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(lbar >= 0.0 && lbar.is_finite()) {
        return Err(invalid("Lbar", format!("must be non-negative, got {lbar}")));
    }
    Ok(())
}

/// `λ = 128H/n + √((128H/n)² + 128 H L̄ / (n F))` with `F = F_max`.
pub fn lambda_for(h: f64, f_max: f64, n: usize, lbar: f64) -> Result<f64> {
    check_inputs(h, f_max, n, lbar)?;
    let n = n as f64;
    let a = 128.0 * h / n;
    Ok(a + (a * a + 128.0 * h * lbar / (n * f_max)).sqrt())
}

/// `256 H F / n + √(2048 H F L̄ / n)` with `F = F_max`.
pub fn theorem4_bound(h: f64, f_max: f64, n: usize, lbar: f64) -> Result<f64> {
    check_inputs(h, f_max, n, lbar)?;
    let n = n as f64;
    let hf = h * f_max;
    Ok(256.0 * hf / n + (2048.0 * hf * lbar / n).sqrt())
}

/// Smoothness in `w` of `w ↦ φ(⟨w, x⟩, y)` measured in the geometry's norm:
/// `H_φ · sup ‖x‖*²`.
pub fn linear_smoothness(loss: &LossSpec, feature_sq_bound: f64) -> Result<f64> {
    Ok(loss.smoothness()? * feature_sq_bound)
}

/// A smooth convex data-fit term handed to the composite solver.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, w: &[f64]) -> f64;
    fn value_gradient(&self, w: &[f64]) -> (f64, Vec<f64>);
}

/// `L̂(w)` of a dataset under a loss.
pub struct EmpiricalObjective<'a> {
    pub loss: &'a LossSpec,
    pub data: &'a Dataset,
}

impl Objective for EmpiricalObjective<'_> {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.data.empirical_loss(self.loss, w)
    }

    fn value_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        self.data.value_gradient(self.loss, w)
    }
}

/// `c·(1/n) Σ (⟨w, xᵢ⟩ − yᵢ)²` through its Gram matrix, so each evaluation
/// costs `O(d²)` instead of `O(nd)`.
///
/// With `doubled`, the data carry features `(x, −x)` and the weights are
/// `(w⁺, w⁻)`; only the raw half is stored.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    gram: DMatrix<f64>,
    rhs: DVector<f64>,
    offset: f64,
    weight: f64,
    doubled: bool,
}

impl QuadraticObjective {
    pub fn from_dataset(data: &Dataset, loss: &LossSpec, doubled: bool) -> Result<Self> {
        let LossKind::Squared { weight } = loss.kind() else {
            return Err(Error::Incompatible(format!("quadratic objective needs a squared loss, got {}", loss.name())));
        };
        let d = if doubled { data.dim() / 2 } else { data.dim() };
        let n = data.len();
        let mut x = DMatrix::<f64>::zeros(n, d);
        let mut y = DVector::<f64>::zeros(n);
        for (r, z) in data.instances().iter().enumerate() {
            for c in 0..d {
                x[(r, c)] = z.x[c];
            }
            y[r] = z.y;
        }
        let nf = n as f64;
        Ok(Self {
            gram: x.tr_mul(&x) / nf,
            rhs: x.tr_mul(&y) / nf,
            offset: y.norm_squared() / nf,
            weight,
            doubled,
        })
    }

    fn raw(&self, w: &[f64]) -> DVector<f64> {
        if self.doubled {
            let d = self.rhs.len();
            DVector::from_iterator(d, (0..d).map(|i| w[i] - w[i + d]))
        } else {
            DVector::from_column_slice(w)
        }
    }
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        if self.doubled {
            2 * self.rhs.len()
        } else {
            self.rhs.len()
        }
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.value_gradient(w).0
    }

    fn value_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let v = self.raw(w);
        let gv = &self.gram * &v;
        let value = self.weight * (v.dot(&gv) - 2.0 * self.rhs.dot(&v) + self.offset);
        let g = (gv - &self.rhs) * (2.0 * self.weight);
        let mut grad: Vec<f64> = g.iter().copied().collect();
        if self.doubled {
            grad.extend(g.iter().map(|x| -x));
        }
        (value.max(0.0), grad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxIters,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub objective: f64,
    pub certificate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub minimizer: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Dual norm of the gradient-map residual at exit.
    pub certificate: f64,
    /// Certified upper bound on the objective gap, `certificate²/(2λ)`.
    pub gap_bound: f64,
    pub history: Vec<HistoryEntry>,
}

impl SolveReport {
    pub fn history_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.history)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Absolute tolerance on the certified objective gap.
    pub tol: f64,
    pub max_iters: usize,
    pub record_history: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 100_000,
            record_history: false,
        }
    }
}

/// Solves `min_{w∈W} L̂(w) + λF(w)` for linear prediction on `data`.
pub fn solve_regularized_erm(
    setup: &MirrorSetup,
    loss: &LossSpec,
    data: &Dataset,
    lambda: f64,
    tol: f64,
) -> Result<SolveReport> {
    let options = SolverOptions {
        tol,
        ..SolverOptions::default()
    };
    solve_regularized_erm_with(setup, loss, data, lambda, options)
}

pub fn solve_regularized_erm_with(
    setup: &MirrorSetup,
    loss: &LossSpec,
    data: &Dataset,
    lambda: f64,
    options: SolverOptions,
) -> Result<SolveReport> {
    loss.smoothness()?;
    if !loss.is_convex() {
        return Err(Error::NonConvexLoss(loss.name()));
    }
    check_dim(setup.dim(), data.dim())?;
    solve_composite(setup, &EmpiricalObjective { loss, data }, lambda, options)
}

/// Proximal step `argmin_{u∈W} ⟨g, u⟩ + λF(u) + D_F(u, w)/s`.
fn prox_step(setup: &MirrorSetup, w: &[f64], g: &[f64], lambda: f64, s: f64) -> Vec<f64> {
    let shrink = 1.0 + s * lambda;
    let u: Vec<f64> = match setup.geometry() {
        Geometry::Euclidean => w.iter().zip(g).map(|(wi, gi)| (wi - s * gi) / shrink).collect(),
        Geometry::Entropy => {
            let d = setup.dim() as f64;
            let b = setup.budget();
            w.iter()
                .zip(g)
                .map(|(wi, gi)| {
                    let dual = (wi * d).ln() + 1.0 - s * gi / b;
                    ((dual / shrink - 1.0).exp() / d).max(f64::MIN_POSITIVE)
                })
                .collect()
        }
    };
    setup.project(&u)
}

fn regularizer_gradient(setup: &MirrorSetup, w: &[f64]) -> Vec<f64> {
    match setup.geometry() {
        Geometry::Euclidean => w.to_vec(),
        Geometry::Entropy => {
            let d = setup.dim() as f64;
            w.iter().map(|x| setup.budget() * ((x * d).ln() + 1.0)).collect()
        }
    }
}

/// Composite Bregman-proximal gradient with backtracking on the step `s`
/// and termination on the strong-convexity certificate.
pub fn solve_composite(
    setup: &MirrorSetup,
    objective: &dyn Objective,
    lambda: f64,
    options: SolverOptions,
) -> Result<SolveReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    if !(options.tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    check_dim(setup.dim(), objective.dim())?;
    let total = |fit: f64, w: &[f64]| fit + lambda * setup.regularizer_value(w).unwrap_or(f64::INFINITY);

    let mut w = setup.default_start();
    let (mut fit, mut g) = objective.value_gradient(&w);
    let mut s = 1.0;
    let mut history = Vec::new();
    let mut certificate = f64::INFINITY;
    let mut iterations = 0;
    let mut termination = Termination::MaxIters;
    while iterations < options.max_iters {
        iterations += 1;
        let grad_f = regularizer_gradient(setup, &w);
        let (next, next_fit, next_g) = loop {
            let cand = prox_step(setup, &w, &g, lambda, s);
            let (cand_fit, cand_g) = objective.value_gradient(&cand);
            let breg = setup.bregman_divergence(&cand, &w).unwrap_or(0.0);
            let model = fit + dot(&g, &sub(&cand, &w)) + breg / s;
            if cand_fit <= model + 1e-14 * (1.0 + fit.abs()) || s < 1e-300 {
                break (cand, cand_fit, cand_g);
            }
            s *= 0.5;
        };
        // v = ∇f(w⁺) − ∇f(w) − (∇F(w⁺) − ∇F(w))/s lies in the subdifferential
        // of the constrained objective at w⁺
        let grad_next = regularizer_gradient(setup, &next);
        let v: Vec<f64> = (0..w.len())
            .map(|i| next_g[i] - g[i] - (grad_next[i] - grad_f[i]) / s)
            .collect();
        certificate = setup.dual_norm(&v);
        w = next;
        fit = next_fit;
        g = next_g;
        if options.record_history {
            history.push(HistoryEntry {
                iteration: iterations,
                objective: total(fit, &w),
                certificate,
            });
        }
        if certificate * certificate / (2.0 * lambda) <= options.tol {
            termination = Termination::Tolerance;
            break;
        }
        s *= 2.0;
    }
    Ok(SolveReport {
        objective: total(fit, &w),
        minimizer: w,
        iterations,
        termination,
        certificate,
        gap_bound: certificate * certificate / (2.0 * lambda),
        history,
    })
}

/// Monte Carlo estimate of both sides of the replace-one stability bound
/// `E[ℓ(ŵ⁽ⁱ⁾, zᵢ) − ℓ(ŵ, zᵢ)] ≤ 32H/(λn) · E[L(ŵ)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub lhs_mean: f64,
    pub lhs_stderr: f64,
    pub rhs_mean: f64,
    pub rhs_stderr: f64,
    pub combined_stderr: f64,
    pub smoothness: f64,
    pub lambda: f64,
    pub n: usize,
    pub replicates: usize,
}

impl StabilityReport {
    /// `lhs ≤ rhs + 2·combined stderr`
    pub fn holds(&self) -> bool {
        self.lhs_mean <= self.rhs_mean + 2.0 * self.combined_stderr
    }
}

/// Replicate `j` draws a sample of size `n`, a fresh `z′` and a uniform
/// index `i`, then solves on the sample and on the sample with `zᵢ ← z′`.
pub fn stability_probe(
    setup: &MirrorSetup,
    model: &dyn RiskModel,
    lambda: f64,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if replicates < 30 {
        return Err(invalid("replicates", format!("need at least 30, got {replicates}")));
    }
    let loss = model.loss();
    let h = linear_smoothness(loss, model.feature_sq_bound(setup.geometry()))?;
    let factor = 32.0 * h / (lambda * n as f64);
    let options = SolverOptions::default();
    let pairs: Vec<(f64, f64)> = (0..replicates as u64)
        .into_par_iter()
        .map(|j| -> Result<(f64, f64)> {
            let base = derive_seed(seed, &[j]);
            let data = model.sample(n, derive_seed(base, &[0]))?;
            let mut rng = rng_from(derive_seed(base, &[1]));
            let fresh = model.sample_instance(&mut rng);
            let i = rng.random_range(0..n);
            let w = solve_regularized_erm_with(setup, loss, &data, lambda, options)?.minimizer;
            let perturbed = data.with_replaced(i, fresh)?;
            let w_i = solve_regularized_erm_with(setup, loss, &perturbed, lambda, options)?.minimizer;
            let z = &data.instances()[i];
            Ok((z.loss(loss, &w_i) - z.loss(loss, &w), factor * model.risk(&w)?))
        })
        .collect::<Result<_>>()?;
    let lhs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let rhs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (lhs_mean, lhs_stderr) = mean_stderr(&lhs);
    let (rhs_mean, rhs_stderr) = mean_stderr(&rhs);
    Ok(StabilityReport {
        lhs_mean,
        lhs_stderr,
        rhs_mean,
        rhs_stderr,
        combined_stderr: lhs_stderr.hypot(rhs_stderr),
        smoothness: h,
        lambda,
        n,
        replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{HardDistribution, SeparableSynthetic};
    use crate::numeric::{ball_least_squares, norm2};
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn lambda_examples() {
        assert!((lambda_for(1.0, 1.0, 128, 0.0).unwrap() - 2.0).abs() < TOL);
        assert!((lambda_for(1.0, 1.0, 128, 1.0).unwrap() - (1.0 + 2f64.sqrt())).abs() < TOL);
        assert!(lambda_for(0.0, 1.0, 1, 0.0).is_err());
        assert!(lambda_for(1.0, 0.0, 1, 0.0).is_err());
    }

    #[test]
    fn theorem4_examples() {
        assert!((theorem4_bound(1.0, 1.0, 256, 0.0).unwrap() - 1.0).abs() < TOL);
        assert!((theorem4_bound(1.0, 1.0, 2048, 1.0).unwrap() - 1.125).abs() < TOL);
    }

    proptest! {
        #[test]
        fn lambda_rule_properties(h in 0.01f64..10.0, f in 0.01f64..100.0, n in 1usize..100_000, l in 0.0f64..5.0) {
            let lam = lambda_for(h, f, n, l).unwrap();
            prop_assert!(lam * n as f64 >= 128.0 * h * (1.0 - 1e-12));
            prop_assert!(lam * n as f64 > 32.0 * h);
            prop_assert!(lambda_for(h, f, n + 1, l).unwrap() <= lam);
            prop_assert!(lambda_for(h * 1.5, f, n, l).unwrap() >= lam);
            prop_assert!(lambda_for(h, f, n, l + 0.5).unwrap() >= lam);
        }
    }

    fn one_sample() -> Dataset {
        Dataset::new(vec![Instance::new(vec![1.0, 0.0, 0.0], 1.0)], 0, "hand".into()).unwrap()
    }

    #[test]
    fn hand_solution() {
        let setup = MirrorSetup::euclidean(3, 10.0).unwrap();
        let r = solve_regularized_erm(&setup, &LossSpec::squared(), &one_sample(), 1.0, 1e-12).unwrap();
        assert_eq!(r.termination, Termination::Tolerance);
        assert!((r.minimizer[0] - 0.5).abs() < 1e-6);
        assert!(r.minimizer[1].abs() < 1e-9 && r.minimizer[2].abs() < 1e-9);
    }

    #[test]
    fn heavy_regularization_goes_to_origin() {
        let setup = MirrorSetup::euclidean(3, 10.0).unwrap();
        let r = solve_regularized_erm(&setup, &LossSpec::squared(), &one_sample(), 1e6, 1e-12).unwrap();
        assert!(norm2(&r.minimizer) < 1e-5);
    }

    #[test]
    fn zero_gradient_stops_immediately() {
        let setup = MirrorSetup::euclidean(2, 1.0).unwrap();
        let data = Dataset::new(vec![Instance::new(vec![1.0, 2.0], 0.0); 3], 0, "zero".into()).unwrap();
        let r = solve_regularized_erm(&setup, &LossSpec::squared(), &data, 0.5, 1e-10).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.minimizer, vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_losses() {
        let setup = MirrorSetup::euclidean(3, 1.0).unwrap();
        assert!(matches!(
            solve_regularized_erm(&setup, &LossSpec::smooth_ramp(1.0).unwrap(), &one_sample(), 1.0, 1e-10),
            Err(Error::NonConvexLoss(_))
        ));
        assert!(matches!(
            solve_regularized_erm(&setup, &LossSpec::absolute(), &one_sample(), 1.0, 1e-10),
            Err(Error::NonSmoothLoss(_))
        ));
        assert!(solve_regularized_erm(&setup, &LossSpec::squared(), &one_sample(), 0.0, 1e-10).is_err());
    }

    #[test]
    fn matches_closed_form_on_random_quadratics() {
        let mut rng = rng_from(12);
        for trial in 0..40 {
            let d = 1 + trial % 5;
            let n = 1 + rng.random_range(0..12);
            let data: Vec<Instance> = (0..n)
                .map(|_| {
                    let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    Instance::new(x, rng.random_range(-3.0..3.0))
                })
                .collect();
            let data = Dataset::new(data, 0, "quad".into()).unwrap();
            let budget = rng.random_range(0.05..2.0);
            let lambda = rng.random_range(0.01..2.0);
            let setup = MirrorSetup::euclidean(d, budget).unwrap();
            let r = solve_regularized_erm(&setup, &LossSpec::squared(), &data, lambda, 1e-14).unwrap();
            // (XᵀX/n + λI) w = Xᵀy/n on the ball, via the Lagrangian
            let mut gram = DMatrix::<f64>::zeros(d, d);
            let mut rhs = DVector::<f64>::zeros(d);
            for z in data.instances() {
                let x = DVector::from_column_slice(&z.x);
                gram.ger(1.0 / n as f64, &x, &x, 1.0);
                rhs.axpy(z.y / n as f64, &x, 1.0);
            }
            let shifted = gram + DMatrix::identity(d, d) * lambda;
            let expected = ball_least_squares(&shifted, &rhs, setup.radius());
            for (a, b) in r.minimizer.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-6, "trial {trial}: {:?} vs {expected:?}", r.minimizer);
            }
        }
    }

    #[test]
    fn entropy_solver_is_certified_and_monotone() {
        let mut rng = rng_from(3);
        let data: Vec<Instance> = (0..40)
            .map(|_| {
                let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
                Instance::new(x, rng.random_range(-1.0..1.0))
            })
            .collect();
        let data = Dataset::new(data, 0, "ent".into()).unwrap();
        let setup = MirrorSetup::entropy(6, 2.0).unwrap();
        let options = SolverOptions {
            record_history: true,
            ..SolverOptions::default()
        };
        let r = solve_regularized_erm_with(&setup, &LossSpec::squared(), &data, 0.05, options).unwrap();
        assert_eq!(r.termination, Termination::Tolerance);
        assert!(setup.is_feasible(&r.minimizer));
        for pair in r.history.windows(2) {
            assert!(pair[1].objective <= pair[0].objective + 1e-12);
        }
        // no feasible point does better than the certified gap allows
        let obj = |w: &[f64]| data.empirical_loss(&LossSpec::squared(), w) + 0.05 * setup.regularizer_value(w).unwrap();
        for _ in 0..3000 {
            let v = setup.sample_point(&mut rng, false);
            assert!(obj(&v) >= r.objective - r.gap_bound - 1e-12);
        }
        let json = r.history_json().unwrap();
        assert!(json.starts_with("[{\"iteration\":1,"));
    }

    #[test]
    fn quadratic_objective_matches_empirical() {
        let model = crate::constructions::SparseSynthetic::new(8, 2, 0.5, 0.1, 1).unwrap();
        let data = model.sample(30, 2).unwrap();
        let loss = LossSpec::squared();
        let quad = QuadraticObjective::from_dataset(&data, &loss, true).unwrap();
        let emp = EmpiricalObjective { loss: &loss, data: &data };
        let w: Vec<f64> = (0..16).map(|i| 0.01 * i as f64).collect();
        let (a, ga) = quad.value_gradient(&w);
        let (b, gb) = emp.value_gradient(&w);
        assert!((a - b).abs() < 1e-12);
        assert!(ga.iter().zip(&gb).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn stability_probe_regimes() {
        let model = SeparableSynthetic::new(4, 1).unwrap();
        let setup = MirrorSetup::euclidean(4, 1.0).unwrap();
        let huge = stability_probe(&setup, &model, 1e6, 10, 30, 5).unwrap();
        assert!(huge.lhs_mean.abs() < 1e-6);
        assert!(huge.holds());
        let single = stability_probe(&setup, &model, 1.0, 1, 30, 6).unwrap();
        assert!(single.lhs_mean.is_finite());
        assert!(stability_probe(&setup, &model, 1.0, 10, 29, 6).is_err());

        let b = HardDistribution::gaussian_squared(0.1, 64, 2).unwrap();
        let setup = MirrorSetup::euclidean_ball(b.dim(), 1.0).unwrap();
        let h = linear_smoothness(b.loss(), 1.0).unwrap();
        let lambda = lambda_for(h, setup.f_max(), 64, b.l_star()).unwrap();
        let report = stability_probe(&setup, &b, lambda, 64, 40, 7).unwrap();
        assert!(report.holds(), "{report:?}");
    }
}

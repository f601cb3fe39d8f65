//! Synthetic generators with closed-form risks.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::batch::Dataset;
use crate::error::{check_dim, invalid, Result};
use crate::geometry::Geometry;
use crate::losses::LossSpec;
use crate::numeric::{dot, norm1, norm2};
use crate::online::Instance;
use crate::rng::{rng_from, Rng};

use super::{permutation, RiskModel};

fn unit_vector(d: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm2(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Noiseless linear regression: `x` uniform on the unit sphere,
/// `y = ⟨w*, x⟩` with `‖w*‖ = 1`, loss `½(t − y)²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableSynthetic {
    w_star: Vec<f64>,
    loss: LossSpec,
}

impl SeparableSynthetic {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        Ok(Self {
            w_star: unit_vector(dim, &mut rng_from(seed)),
            loss: LossSpec::squared(),
        })
    }
}

impl RiskModel for SeparableSynthetic {
    fn id(&self) -> String {
        "separable".into()
    }

    fn dim(&self) -> usize {
        self.w_star.len()
    }

    fn loss(&self) -> &LossSpec {
        &self.loss
    }

    fn sample_instance(&self, rng: &mut Rng) -> Instance {
        let x = unit_vector(self.dim(), rng);
        let y = dot(&x, &self.w_star);
        Instance::new(x, y)
    }

    /// `E ½⟨w − w*, x⟩² = ‖w − w*‖² / (2d)` since `E x xᵀ = I/d`.
    fn risk(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        let dist2: f64 = w.iter().zip(&self.w_star).map(|(a, b)| (a - b).powi(2)).sum();
        Ok(dist2 / (2.0 * self.dim() as f64))
    }

    fn bayes_risk(&self) -> f64 {
        0.0
    }

    fn comparator(&self) -> Vec<f64> {
        self.w_star.clone()
    }

    fn feature_sq_bound(&self, _geometry: Geometry) -> f64 {
        1.0
    }
}

/// Sparse linear target over uncorrelated features, presented with every
/// feature and its negation so that non-negative weights suffice.
///
/// Of the `base_dim` raw features, `k` form the support: in each draw
/// exactly one of them is active with a random sign. The others are
/// independent Rademacher signs. The target is `y = ⟨w⁰, x⟩ + ε` with
/// `w⁰ = ±amplitude` on the support and `ε` uniform on `[−noise, noise]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseSynthetic {
    base_dim: usize,
    support: Vec<usize>,
    w0: Vec<f64>,
    noise: f64,
    loss: LossSpec,
}

impl SparseSynthetic {
    pub fn new(base_dim: usize, k: usize, amplitude: f64, noise: f64, seed: u64) -> Result<Self> {
        if base_dim == 0 || k > base_dim {
            return Err(invalid("k", format!("need k <= d with d >= 1, got k = {k}, d = {base_dim}")));
        }
        if !(amplitude >= 0.0 && noise >= 0.0 && amplitude + noise <= 1.0) {
            return Err(invalid("amplitude", "need amplitude, noise >= 0 with sum at most 1"));
        }
        let mut rng = rng_from(seed);
        let mut support = permutation(base_dim, &mut rng);
        support.truncate(k);
        support.sort_unstable();
        let mut w0 = vec![0.0; base_dim];
        for &i in &support {
            w0[i] = if rng.random::<bool>() { amplitude } else { -amplitude };
        }
        let loss = LossSpec::squared();
        Ok(Self {
            base_dim,
            support,
            w0,
            noise,
            loss,
        })
    }

    /// Default amplitude `min(1, 2/√k)`, which puts `‖w⁰‖₁` at `2√k` once `k ≥ 4`.
    pub fn default_amplitude(k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            (2.0 / (k as f64).sqrt()).min(1.0)
        }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// The signed sparse target in raw coordinates.
    pub fn w0(&self) -> &[f64] {
        &self.w0
    }

    pub fn w0_l1(&self) -> f64 {
        norm1(&self.w0)
    }

    /// `‖w⁰‖₁` budget `2√k`.
    pub fn budget(&self) -> f64 {
        2.0 * (self.sparsity().max(1) as f64).sqrt()
    }

    /// Raw-coordinate weights represented by a doubled vector `(w⁺, w⁻)`.
    pub fn collapse(&self, w: &[f64]) -> Vec<f64> {
        let (pos, neg) = w.split_at(self.base_dim);
        pos.iter().zip(neg).map(|(a, b)| a - b).collect()
    }

    fn variance(&self, i: usize) -> f64 {
        if self.support.binary_search(&i).is_ok() {
            1.0 / self.support.len() as f64
        } else {
            1.0
        }
    }
}

impl RiskModel for SparseSynthetic {
    fn id(&self) -> String {
        format!("sparse:k={}", self.sparsity())
    }

    fn dim(&self) -> usize {
        2 * self.base_dim
    }

    fn loss(&self) -> &LossSpec {
        &self.loss
    }

    fn sample_instance(&self, rng: &mut Rng) -> Instance {
        let mut raw: Vec<f64> = (0..self.base_dim)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        if !self.support.is_empty() {
            for &i in &self.support {
                raw[i] = 0.0;
            }
            let j = self.support[rng.random_range(0..self.support.len())];
            raw[j] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        let mut y = dot(&raw, &self.w0);
        if self.noise > 0.0 {
            y += rng.random_range(-self.noise..=self.noise);
        }
        let mut x = raw.clone();
        x.extend(raw.iter().map(|v| -v));
        Instance::new(x, y)
    }

    /// `½ Σᵢ vᵢ eᵢ² + noise²/6` with `e = collapse(w) − w⁰`, where `vᵢ` is
    /// `1/k` on the support and `1` elsewhere.
    fn risk(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        let e = self.collapse(w);
        let quad: f64 = e
            .iter()
            .zip(&self.w0)
            .enumerate()
            .map(|(i, (a, b))| self.variance(i) * (a - b).powi(2))
            .sum();
        Ok(0.5 * quad + self.bayes_risk())
    }

    fn bayes_risk(&self) -> f64 {
        self.noise * self.noise / 6.0
    }

    fn comparator(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.w0.iter().map(|v| v.max(0.0)).collect();
        w.extend(self.w0.iter().map(|v| (-v).max(0.0)));
        w
    }

    fn feature_sq_bound(&self, geometry: Geometry) -> f64 {
        match geometry {
            Geometry::Entropy => 1.0,
            // one support coordinate plus every off-support coordinate, doubled
            Geometry::Euclidean => {
                let active = self.base_dim - self.sparsity() + usize::from(self.sparsity() > 0);
                2.0 * active as f64
            }
        }
    }
}

/// Gaussian design for the regime experiment: `x ~ N(0, (B²/d) I)` so that
/// `E‖x‖² = B²`, `y = ⟨w*, x⟩ + N(0, σ²)` with `‖w*‖ = 1`, loss `(t − y)²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianRegime {
    w_star: Vec<f64>,
    feature_scale: f64,
    sigma: f64,
    loss: LossSpec,
}

impl GaussianRegime {
    pub fn new(dim: usize, b: f64, sigma: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("d", "must be positive"));
        }
        if !(b > 0.0 && sigma >= 0.0) {
            return Err(invalid("B", "need B > 0 and sigma >= 0"));
        }
        Ok(Self {
            w_star: unit_vector(dim, &mut rng_from(seed)),
            feature_scale: b / (dim as f64).sqrt(),
            sigma,
            loss: LossSpec::weighted_squared(1.0)?,
        })
    }

    pub fn budget(&self) -> f64 {
        self.feature_scale * (self.dim() as f64).sqrt()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `min(B², B²/n + Bσ/√n, dσ²/n)` and the index of the active term.
    pub fn envelope(&self, n: usize) -> (f64, usize) {
        let b = self.budget();
        let n = n as f64;
        let terms = [
            b * b,
            b * b / n + b * self.sigma / n.sqrt(),
            self.dim() as f64 * self.sigma * self.sigma / n,
        ];
        let (idx, val) = terms
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, terms[0]));
        (val, idx)
    }
}

impl RiskModel for GaussianRegime {
    fn id(&self) -> String {
        "gaussian".into()
    }

    fn dim(&self) -> usize {
        self.w_star.len()
    }

    fn loss(&self) -> &LossSpec {
        &self.loss
    }

    fn sample_instance(&self, rng: &mut Rng) -> Instance {
        let x: Vec<f64> = (0..self.dim())
            .map(|_| self.feature_scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let noise: f64 = rng.sample(StandardNormal);
        let y = dot(&x, &self.w_star) + self.sigma * noise;
        Instance::new(x, y)
    }

    fn risk(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        let dist2: f64 = w.iter().zip(&self.w_star).map(|(a, b)| (a - b).powi(2)).sum();
        Ok(self.feature_scale.powi(2) * dist2 + self.sigma * self.sigma)
    }

    fn bayes_risk(&self) -> f64 {
        self.sigma * self.sigma
    }

    fn comparator(&self) -> Vec<f64> {
        self.w_star.clone()
    }

    /// Gaussian features are unbounded; this is `E‖x‖²`.
    fn feature_sq_bound(&self, _geometry: Geometry) -> f64 {
        self.budget().powi(2)
    }
}

/// Binary labels `sign⟨u, x⟩` flipped with probability `flip`, with `x`
/// uniform on the unit sphere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginData {
    u: Vec<f64>,
    flip: f64,
}

impl MarginData {
    pub fn new(dim: usize, flip: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("d", "must be positive"));
        }
        if !(0.0..0.5).contains(&flip) {
            return Err(invalid("flip", format!("must lie in [0, 0.5), got {flip}")));
        }
        Ok(Self {
            u: unit_vector(dim, &mut rng_from(seed)),
            flip,
        })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn sample_instance(&self, rng: &mut Rng) -> Instance {
        let x = unit_vector(self.dim(), rng);
        let clean = if dot(&x, &self.u) >= 0.0 { 1.0 } else { -1.0 };
        let y = if rng.random::<f64>() < self.flip { -clean } else { clean };
        Instance::new(x, y)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        let mut rng = rng_from(seed);
        let instances = (0..n).map(|_| self.sample_instance(&mut rng)).collect();
        Dataset::new(instances, seed, "margin".into())
    }

    /// `flip + (1 − 2·flip)·∠(w, u)/π`.
    pub fn zero_one_error(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        let n = norm2(w);
        if n == 0.0 {
            return Ok(0.5);
        }
        let cos = (dot(w, &self.u) / n).clamp(-1.0, 1.0);
        Ok(self.flip + (1.0 - 2.0 * self.flip) * cos.acos() / std::f64::consts::PI)
    }

    /// Holdout zero-one error on `draws` fresh points (`sign(0)` counts as
    /// an error).
    pub fn holdout_error(&self, w: &[f64], draws: usize, seed: u64) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        let mut rng = rng_from(seed);
        let wrong = (0..draws)
            .filter(|_| {
                let z = self.sample_instance(&mut rng);
                z.y * dot(w, &z.x) <= 0.0
            })
            .count();
        Ok(wrong as f64 / draws.max(1) as f64)
    }
}

//! Distributions with closed-form risk: the three lower-bound constructions
//! and the synthetic generators used by the experiments.

mod synthetic;

pub use synthetic::{GaussianRegime, MarginData, SeparableSynthetic, SparseSynthetic};

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::batch::Dataset;
use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::Geometry;
use crate::losses::{Interval, LossSpec};
use crate::numeric::{bisect_decreasing, golden_section, norm2};
use crate::online::Instance;
use crate::rng::{rng_from, Rng};
use crate::stats::mean_stderr;

/// A data distribution over `(x, y)` together with a loss, evaluated for
/// linear predictors `x ↦ ⟨w, x⟩`.
pub trait RiskModel: Send + Sync {
    fn id(&self) -> String;
    fn dim(&self) -> usize;
    fn loss(&self) -> &LossSpec;
    fn sample_instance(&self, rng: &mut Rng) -> Instance;

    fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let mut rng = rng_from(seed);
        let instances = (0..n).map(|_| self.sample_instance(&mut rng)).collect();
        Dataset::new(instances, seed, self.id())
    }

    /// `L(w) = E φ(⟨w, x⟩, y)`, in closed form.
    fn risk(&self, w: &[f64]) -> Result<f64>;

    /// `L* = inf_w L(w)` over the model's hypothesis class.
    fn bayes_risk(&self) -> f64;

    /// A predictor attaining `L*`.
    fn comparator(&self) -> Vec<f64>;

    /// `sup ‖x‖*²` in the dual norm of `geometry`.
    fn feature_sq_bound(&self, geometry: Geometry) -> f64;

    fn excess_risk(&self, w: &[f64]) -> Result<f64> {
        Ok(self.risk(w)? - self.bayes_risk())
    }
}

/// Monte Carlo estimate of `L(w)` from `draws` fresh samples, with its
/// standard error. Used when no closed form is available and to cross-check
/// the closed forms.
pub fn holdout_risk(model: &dyn RiskModel, w: &[f64], draws: usize, seed: u64) -> Result<(f64, f64)> {
    check_dim(model.dim(), w.len())?;
    if draws < 2 {
        return Err(invalid("draws", "need at least 2"));
    }
    let mut rng = rng_from(seed);
    let losses: Vec<f64> = (0..draws)
        .map(|_| model.sample_instance(&mut rng).loss(model.loss(), w))
        .collect();
    Ok(mean_stderr(&losses))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Variant {
    /// Absolute loss on `d = 2n` basis vectors, `y = rᵢ/√n`.
    AbsoluteSeparable { n_design: usize, signs: Vec<f64> },
    /// Squared loss on `d` basis vectors, `y ~ N(rᵢ/(2√d), σ²)`.
    GaussianSquared { sigma: f64, signs: Vec<f64> },
    /// One-dimensional quad-lin loss; `x = 1` w.p. `q` with `y = ±1`.
    OneDimQuadLin { q: f64, p: f64, n_design: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardDistribution {
    variant: Variant,
    loss: LossSpec,
    w_star: Vec<f64>,
    l_star: f64,
}

fn random_signs(d: usize, rng: &mut Rng) -> Vec<f64> {
    (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

impl HardDistribution {
    /// Construction A for sample size `n_design`; signs drawn from `seed`.
    pub fn absolute_separable(n_design: usize, seed: u64) -> Result<Self> {
        if n_design == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let d = 2 * n_design;
        let signs = random_signs(d, &mut rng_from(seed));
        let scale = 1.0 / (n_design as f64).sqrt();
        let w_star = signs.iter().map(|r| r * scale).collect();
        Ok(Self {
            variant: Variant::AbsoluteSeparable { n_design, signs },
            loss: LossSpec::absolute(),
            w_star,
            l_star: 0.0,
        })
    }

    /// Construction B with `d = ⌈√n/σ⌉`; needs `σ > 0`.
    pub fn gaussian_squared(sigma: f64, n_design: usize, seed: u64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be positive to size d, got {sigma}")));
        }
        if n_design == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let d = ((n_design as f64).sqrt() / sigma).ceil() as usize;
        Self::gaussian_squared_with_dim(sigma, d, seed)
    }

    /// Construction B with an explicit dimension; allows `σ = 0`.
    pub fn gaussian_squared_with_dim(sigma: f64, d: usize, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be non-negative, got {sigma}")));
        }
        if d == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        let signs = random_signs(d, &mut rng_from(seed));
        let scale = 0.5 / (d as f64).sqrt();
        let w_star = signs.iter().map(|r| r * scale).collect();
        let loss = LossSpec::weighted_squared(1.0)?;
        Ok(Self {
            variant: Variant::GaussianSquared { sigma, signs },
            loss,
            w_star,
            l_star: sigma * sigma,
        })
    }

    /// Construction C with `p = ½ + 0.2/√(qn)`.
    pub fn onedim_quadlin(q: f64, n_design: usize) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(invalid("q", format!("must lie in (0, 1], got {q}")));
        }
        if n_design == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let p = 0.5 + 0.2 / (q * n_design as f64).sqrt();
        if p > 1.0 {
            return Err(invalid("q", format!("p = {p} exceeds 1 for q = {q}, n = {n_design}")));
        }
        let loss = LossSpec::quadlin().with_domain(Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0));
        let mut dist = Self {
            variant: Variant::OneDimQuadLin { q, p, n_design },
            loss,
            w_star: vec![0.0],
            l_star: 0.0,
        };
        let w = golden_section(|w| dist.onedim_risk(w), -1.0, 1.0, 1e-12);
        dist.w_star = vec![w];
        dist.l_star = dist.onedim_risk(w);
        Ok(dist)
    }

    /// Parses `hardA`, `hardB:<sigma>` or `hardC:<q>` for sample size `n`.
    pub fn from_name(name: &str, n: usize, seed: u64) -> Result<Self> {
        let name = name.trim();
        if name == "hardA" {
            return Self::absolute_separable(n, seed);
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Config(format!("bad parameter in `{name}`: {e}")))
        };
        if let Some(s) = name.strip_prefix("hardB:") {
            return Self::gaussian_squared(parse(s)?, n, seed);
        }
        if let Some(s) = name.strip_prefix("hardC:") {
            return Self::onedim_quadlin(parse(s)?, n);
        }
        Err(Error::Config(format!("unknown distribution `{name}`")))
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn w_star(&self) -> &[f64] {
        &self.w_star
    }

    pub fn l_star(&self) -> f64 {
        self.l_star
    }

    /// `3/2 − 1/(2p)` for construction C, the closed-form population
    /// minimizer when it lies in `[½, 1]`.
    pub fn closed_form_minimizer(&self) -> Option<f64> {
        match self.variant {
            Variant::OneDimQuadLin { p, .. } => Some(1.5 - 0.5 / p),
            _ => None,
        }
    }

    fn onedim_risk(&self, w: f64) -> f64 {
        match self.variant {
            Variant::OneDimQuadLin { q, p, .. } => {
                q * (p * self.loss.value(w, 1.0) + (1.0 - p) * self.loss.value(w, -1.0))
            }
            _ => unreachable!("only construction C has a scalar risk"),
        }
    }

    /// Radius of the hypothesis class in `ℓ₂`.
    pub fn class_radius(&self) -> f64 {
        match self.variant {
            // L* = 0 needs every coordinate at rᵢ/√n
            Variant::AbsoluteSeparable { .. } => 2f64.sqrt(),
            _ => 1.0,
        }
    }

    /// The floor the construction is designed to force on the excess risk
    /// of any learner at sample size `n`.
    pub fn lower_bound_value(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.variant {
            Variant::AbsoluteSeparable { .. } => 0.5 / n.sqrt(),
            Variant::GaussianSquared { .. } => (self.l_star / n).sqrt(),
            Variant::OneDimQuadLin { .. } => (0.32 * self.l_star / n).sqrt(),
        }
    }

    /// Exact empirical risk minimizer over the hypothesis class.
    pub fn erm_exact(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        check_dim(self.dim(), data.dim())?;
        match &self.variant {
            Variant::AbsoluteSeparable { .. } | Variant::GaussianSquared { .. } => {
                let pairs = data
                    .instances()
                    .iter()
                    .map(|z| Ok((basis_index(&z.x)?, z.y)))
                    .collect::<Result<Vec<_>>>()?;
                self.erm_from_coordinates(&pairs)
            }
            Variant::OneDimQuadLin { .. } => {
                let loss = &self.loss;
                let objective = |w: f64| -> f64 {
                    data.instances().iter().map(|z| loss.value(w * z.x[0], z.y)).sum()
                };
                Ok(vec![golden_section(objective, -1.0, 1.0, 1e-10)])
            }
        }
    }

    /// One draw of a basis-vector construction as `(coordinate, target)`.
    fn draw_coordinate(&self, rng: &mut Rng) -> (usize, f64) {
        let i = rng.random_range(0..self.w_star.len());
        match &self.variant {
            Variant::GaussianSquared { sigma, .. } => {
                let noise: f64 = rng.sample(StandardNormal);
                (i, self.w_star[i] + sigma * noise)
            }
            _ => (i, self.w_star[i]),
        }
    }

    /// The sample `sample(n, seed)` would produce for constructions A and B,
    /// as `(coordinate, target)` pairs instead of dense basis vectors.
    pub fn sample_coordinates(&self, n: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
        if matches!(self.variant, Variant::OneDimQuadLin { .. }) {
            return Err(Error::Incompatible("construction C has no coordinate form".into()));
        }
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        let mut rng = rng_from(seed);
        Ok((0..n).map(|_| self.draw_coordinate(&mut rng)).collect())
    }

    /// [`HardDistribution::erm_exact`] on a coordinate-form sample.
    pub fn erm_from_coordinates(&self, pairs: &[(usize, f64)]) -> Result<Vec<f64>> {
        if pairs.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        let d = self.dim();
        if let Some(&(i, _)) = pairs.iter().find(|p| p.0 >= d) {
            return Err(invalid("coordinate", format!("{i} out of range for d = {d}")));
        }
        match &self.variant {
            Variant::AbsoluteSeparable { .. } => {
                // seen coordinates copy their (unique) target, the rest stay 0
                let mut w = vec![0.0; d];
                for &(i, y) in pairs {
                    w[i] = y;
                }
                Ok(w)
            }
            Variant::GaussianSquared { .. } => {
                let mut counts = vec![0.0; d];
                let mut sums = vec![0.0; d];
                for &(i, y) in pairs {
                    counts[i] += 1.0;
                    sums[i] += y;
                }
                let means: Vec<f64> = counts
                    .iter()
                    .zip(&sums)
                    .map(|(&c, &s)| if c > 0.0 { s / c } else { 0.0 })
                    .collect();
                if norm2(&means) <= 1.0 {
                    return Ok(means);
                }
                let n = pairs.len() as f64;
                let shrunk = |mu: f64| -> Vec<f64> {
                    counts
                        .iter()
                        .zip(&sums)
                        .map(|(&c, &s)| s / (c + mu * n))
                        .collect()
                };
                let hi = norm2(&sums) / n;
                let mu = bisect_decreasing(|mu| norm2(&shrunk(mu)) - 1.0, 0.0, hi, 1e-12);
                Ok(shrunk(mu))
            }
            Variant::OneDimQuadLin { .. } => {
                Err(Error::Incompatible("construction C has no coordinate form".into()))
            }
        }
    }
}

fn basis_index(x: &[f64]) -> Result<usize> {
    let mut nonzero = x.iter().enumerate().filter(|(_, v)| **v != 0.0);
    match (nonzero.next(), nonzero.next()) {
        (Some((i, 1.0)), None) => Ok(i),
        _ => Err(Error::Incompatible("expected a standard basis vector".into())),
    }
}

impl RiskModel for HardDistribution {
    fn id(&self) -> String {
        match &self.variant {
            Variant::AbsoluteSeparable { .. } => "hardA".into(),
            Variant::GaussianSquared { sigma, .. } => format!("hardB:{sigma}"),
            Variant::OneDimQuadLin { q, .. } => format!("hardC:{q}"),
        }
    }

    fn dim(&self) -> usize {
        self.w_star.len()
    }

    fn loss(&self) -> &LossSpec {
        &self.loss
    }

    fn sample_instance(&self, rng: &mut Rng) -> Instance {
        match &self.variant {
            Variant::AbsoluteSeparable { .. } | Variant::GaussianSquared { .. } => {
                let (i, y) = self.draw_coordinate(rng);
                let mut x = vec![0.0; self.w_star.len()];
                x[i] = 1.0;
                Instance::new(x, y)
            }
            Variant::OneDimQuadLin { q, p, .. } => {
                if rng.random::<f64>() < *q {
                    let y = if rng.random::<f64>() < *p { 1.0 } else { -1.0 };
                    Instance::new(vec![1.0], y)
                } else {
                    // x = 0 with target 0 costs nothing for any w
                    Instance::new(vec![0.0], 0.0)
                }
            }
        }
    }

    fn risk(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        Ok(match &self.variant {
            Variant::AbsoluteSeparable { .. } => {
                let d = self.dim() as f64;
                w.iter().zip(&self.w_star).map(|(a, b)| (a - b).abs()).sum::<f64>() / d
            }
            Variant::GaussianSquared { sigma, .. } => {
                let d = self.dim() as f64;
                let dist2: f64 = w.iter().zip(&self.w_star).map(|(a, b)| (a - b).powi(2)).sum();
                sigma * sigma + dist2 / d
            }
            Variant::OneDimQuadLin { .. } => self.onedim_risk(w[0]),
        })
    }

    fn bayes_risk(&self) -> f64 {
        self.l_star
    }

    fn comparator(&self) -> Vec<f64> {
        self.w_star.clone()
    }

    fn feature_sq_bound(&self, _geometry: Geometry) -> f64 {
        1.0
    }
}

/// Shuffled copy of `0..d`, handy for picking distinct coordinates.
pub(crate) fn permutation(d: usize, rng: &mut Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_form_matches_dense_sample() {
        for dist in [
            HardDistribution::absolute_separable(40, 3).unwrap(),
            HardDistribution::gaussian_squared(0.2, 40, 3).unwrap(),
        ] {
            let data = dist.sample(40, 17).unwrap();
            let pairs = dist.sample_coordinates(40, 17).unwrap();
            for (z, &(i, y)) in data.instances().iter().zip(&pairs) {
                assert_eq!(z.x[i], 1.0);
                assert_eq!(z.y, y);
            }
            assert_eq!(dist.erm_exact(&data).unwrap(), dist.erm_from_coordinates(&pairs).unwrap());
        }
        assert!(HardDistribution::onedim_quadlin(0.5, 10).unwrap().sample_coordinates(5, 1).is_err());
    }

    #[test]
    fn construction_a_support_and_risk() {
        let dist = HardDistribution::absolute_separable(100, 1).unwrap();
        assert_eq!(dist.dim(), 200);
        let data = dist.sample(100, 2).unwrap();
        for z in data.instances() {
            assert_eq!(z.x.iter().filter(|v| **v != 0.0).count(), 1);
            assert!((z.y.abs() - 0.1).abs() < 1e-15);
        }
        assert_eq!(dist.risk(dist.w_star()).unwrap(), 0.0);
        assert!((dist.risk(&vec![0.0; 200]).unwrap() - 0.1).abs() < 1e-15);
        assert!((dist.lower_bound_value(100) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn construction_a_erm_hand_case() {
        // n = 4, d = 8, four distinct coordinates seen
        let dist = HardDistribution::absolute_separable(4, 9).unwrap();
        let signs = match dist.variant() {
            Variant::AbsoluteSeparable { signs, .. } => signs.clone(),
            _ => unreachable!(),
        };
        let instances = [0usize, 3, 5, 6]
            .iter()
            .map(|&i| {
                let mut x = vec![0.0; 8];
                x[i] = 1.0;
                Instance::new(x, signs[i] / 2.0)
            })
            .collect();
        let data = Dataset::new(instances, 0, "hand".into()).unwrap();
        let w = dist.erm_exact(&data).unwrap();
        assert!((dist.risk(&w).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(data.empirical_loss(dist.loss(), &w), 0.0);
        assert!(norm2(&w) <= 1.0 + 1e-15);
    }

    #[test]
    fn construction_a_floor_holds_exactly() {
        for n in [1usize, 5, 32, 200] {
            for seed in 0..10 {
                let dist = HardDistribution::absolute_separable(n, seed).unwrap();
                let data = dist.sample(n, seed + 100).unwrap();
                let w = dist.erm_exact(&data).unwrap();
                let seen = w.iter().filter(|v| **v != 0.0).count();
                let d = dist.dim();
                let floor = (d - seen) as f64 / (d as f64 * (n as f64).sqrt());
                let risk = dist.risk(&w).unwrap();
                assert!((risk - floor).abs() < 1e-12);
                assert!(risk >= dist.lower_bound_value(n));
                assert_eq!(data.empirical_loss(dist.loss(), &w), 0.0);
            }
        }
    }

    #[test]
    fn construction_b_examples() {
        let dist = HardDistribution::gaussian_squared(0.1, 100, 3).unwrap();
        assert_eq!(dist.dim(), 100);
        assert!((norm2(dist.w_star()) - 0.5).abs() < 1e-12);
        assert!((dist.risk(dist.w_star()).unwrap() - 0.01).abs() < 1e-15);
        assert!((dist.lower_bound_value(100) - 0.01).abs() < 1e-15);
        assert!(HardDistribution::gaussian_squared(0.0, 100, 3).is_err());

        let noiseless = HardDistribution::gaussian_squared_with_dim(0.0, 6, 4).unwrap();
        let data = noiseless.sample(20, 5).unwrap();
        let w = noiseless.erm_exact(&data).unwrap();
        for z in data.instances() {
            let i = basis_index(&z.x).unwrap();
            assert_eq!(z.y, noiseless.w_star()[i]);
            assert!((w[i] - noiseless.w_star()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn construction_b_erm_matches_projected_gradient() {
        for seed in 0..20 {
            let d = 1 + (seed as usize % 4);
            let dist = HardDistribution::gaussian_squared_with_dim(1.5, d, seed).unwrap();
            let data = dist.sample(7, seed + 50).unwrap();
            let w = dist.erm_exact(&data).unwrap();
            // oracle: projected gradient on the empirical objective
            let mut v = vec![0.0; d];
            for _ in 0..200_000 {
                let g = data.gradient(dist.loss(), &v);
                for (vi, gi) in v.iter_mut().zip(&g) {
                    *vi -= 0.05 * gi;
                }
                let n = norm2(&v);
                if n > 1.0 {
                    v.iter_mut().for_each(|x| *x /= n);
                }
            }
            for (a, b) in w.iter().zip(&v) {
                assert!((a - b).abs() < 1e-6, "seed {seed}: {w:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn construction_c_examples() {
        let dist = HardDistribution::onedim_quadlin(1.0, 100).unwrap();
        let data = dist.sample(100_000, 6).unwrap();
        let p = 0.5 + 0.2 / 10.0;
        assert!(data.instances().iter().all(|z| z.x[0] == 1.0));
        let frac = data.instances().iter().filter(|z| z.y == 1.0).count() as f64 / 100_000.0;
        assert!((frac - p).abs() <= 3.0 * (p * (1.0 - p) / 100_000.0).sqrt());

        assert!(HardDistribution::onedim_quadlin(0.0, 10).is_err());
        assert!(HardDistribution::onedim_quadlin(1.5, 10).is_err());
        assert!(HardDistribution::onedim_quadlin(0.001, 10).is_err());

        let neg = Dataset::new(vec![Instance::new(vec![1.0], -1.0); 5], 0, "neg".into()).unwrap();
        assert!(dist.erm_exact(&neg).unwrap()[0] <= -0.5);
        let lb = dist.lower_bound_value(100);
        assert!((lb - (0.32 * dist.l_star() / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn construction_c_minimizer_agrees_with_grid_and_closed_form() {
        for (q, n) in [(1.0, 100), (0.5, 30), (0.2, 1000), (1.0, 1)] {
            let dist = HardDistribution::onedim_quadlin(q, n).unwrap();
            let grid_best = (0..=1_000_000)
                .map(|k| -1.0 + 2.0 * k as f64 / 1e6)
                .min_by(|a, b| dist.risk(&[*a]).unwrap().total_cmp(&dist.risk(&[*b]).unwrap()))
                .unwrap();
            assert!((dist.w_star()[0] - grid_best).abs() < 1e-6);
            let cf = dist.closed_form_minimizer().unwrap();
            if (0.5..=1.0).contains(&cf) {
                assert!((dist.w_star()[0] - cf).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn construction_c_erm_matches_grid() {
        let dist = HardDistribution::onedim_quadlin(0.7, 50).unwrap();
        for seed in 0..5 {
            let data = dist.sample(50, seed).unwrap();
            let w = dist.erm_exact(&data).unwrap()[0];
            let obj = |v: f64| data.empirical_loss(dist.loss(), &[v]);
            let best = (0..=1_000_000)
                .map(|k| -1.0 + 2.0 * k as f64 / 1e6)
                .map(obj)
                .fold(f64::INFINITY, f64::min);
            assert!(obj(w) <= best + 1e-9);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_closed_forms() {
        let models: Vec<Box<dyn RiskModel>> = vec![
            Box::new(HardDistribution::absolute_separable(10, 1).unwrap()),
            Box::new(HardDistribution::gaussian_squared(0.3, 25, 2).unwrap()),
            Box::new(HardDistribution::onedim_quadlin(0.6, 40).unwrap()),
        ];
        for model in &models {
            let mut rng = rng_from(17);
            let w: Vec<f64> = (0..model.dim())
                .map(|_| rng.random_range(-0.3..0.3))
                .collect();
            let exact = model.risk(&w).unwrap();
            let (mc, se) = holdout_risk(model.as_ref(), &w, 1_000_000, 99).unwrap();
            assert!((mc - exact).abs() <= 3.0 * se, "{}: {mc} vs {exact} ± {se}", model.id());
        }
    }

    #[test]
    fn names() {
        assert_eq!(HardDistribution::from_name("hardA", 5, 0).unwrap().id(), "hardA");
        assert_eq!(HardDistribution::from_name("hardB:0.1", 64, 0).unwrap().dim(), 80);
        assert_eq!(HardDistribution::from_name("hardC:0.5", 64, 0).unwrap().dim(), 1);
        assert!(HardDistribution::from_name("hardD", 5, 0).is_err());
        assert!(HardDistribution::from_name("hardB:x", 5, 0).is_err());
    }
}

//! Rademacher complexity of linear classes and closed-form generalization
//! bound calculators. All logarithms are natural.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::numeric::{norm2, norm_inf};
use crate::rng::rng_from;
use crate::stats::mean_stderr;

/// Largest sample size handled by exhaustive sign enumeration.
pub const EXACT_LIMIT: usize = 20;

/// Default numeric constant in front of the bound terms.
pub const DEFAULT_K: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    L2Ball,
    L1Ball,
}

/// `{x ↦ ⟨w, x⟩ : ‖w‖ ≤ B}` in `ℓ₂` or `ℓ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionClass {
    pub kind: ClassKind,
    pub budget: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub value: f64,
    /// Zero for exact enumeration.
    pub stderr: f64,
    pub exact: bool,
}

impl FunctionClass {
    pub fn l2_ball(budget: f64, dim: usize) -> Result<Self> {
        Self::new(ClassKind::L2Ball, budget, dim)
    }

    pub fn l1_ball(budget: f64, dim: usize) -> Result<Self> {
        Self::new(ClassKind::L1Ball, budget, dim)
    }

    pub fn new(kind: ClassKind, budget: f64, dim: usize) -> Result<Self> {
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(invalid("B", format!("must be positive, got {budget}")));
        }
        if dim == 0 {
            return Err(invalid("d", "must be positive"));
        }
        Ok(Self { kind, budget, dim })
    }

    /// `sup_h (1/n)|Σ σᵢ h(xᵢ)|` given `s = Σ σᵢ xᵢ`.
    fn sup(&self, s: &[f64], n: usize) -> f64 {
        let dual = match self.kind {
            ClassKind::L2Ball => norm2(s),
            ClassKind::L1Ball => norm_inf(s),
        };
        self.budget * dual / n as f64
    }

    fn check_sample(&self, xs: &[Vec<f64>]) -> Result<()> {
        if xs.is_empty() {
            return Err(Error::Empty("sample"));
        }
        xs.iter().try_for_each(|x| check_dim(self.dim, x.len()))
    }

    /// Exact `E_σ` by enumerating sign vectors in Gray-code order. Only half
    /// the cube is visited since `σ` and `−σ` give the same supremum.
    pub fn rademacher_exact(&self, xs: &[Vec<f64>]) -> Result<f64> {
        self.check_sample(xs)?;
        let n = xs.len();
        if n > EXACT_LIMIT {
            return Err(invalid("n", format!("exact enumeration limited to n <= {EXACT_LIMIT}, got {n}")));
        }
        // σ₁ = +1 fixed, the rest start at −1
        let mut s = xs[0].clone();
        for x in &xs[1..] {
            for (a, b) in s.iter_mut().zip(x) {
                *a -= b;
            }
        }
        let mut signs = vec![-1.0; n];
        let mut total = self.sup(&s, n);
        let count: u64 = 1 << (n - 1);
        for k in 1..count {
            // bit that changes between gray(k-1) and gray(k)
            let j = k.trailing_zeros() as usize + 1;
            signs[j] = -signs[j];
            let step = 2.0 * signs[j];
            for (a, b) in s.iter_mut().zip(&xs[j]) {
                *a += step * b;
            }
            total += self.sup(&s, n);
        }
        Ok(total / count as f64)
    }

    pub fn rademacher_monte_carlo(&self, xs: &[Vec<f64>], draws: usize, seed: u64) -> Result<(f64, f64)> {
        self.check_sample(xs)?;
        if draws < 2 {
            return Err(invalid("draws", format!("need at least 2 sign draws, got {draws}")));
        }
        let mut rng = rng_from(seed);
        let mut s = vec![0.0; self.dim];
        let values: Vec<f64> = (0..draws)
            .map(|_| {
                s.iter_mut().for_each(|v| *v = 0.0);
                for x in xs {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    for (a, b) in s.iter_mut().zip(x) {
                        *a += sign * b;
                    }
                }
                self.sup(&s, xs.len())
            })
            .collect();
        Ok(mean_stderr(&values))
    }

    /// Exact when `n ≤ 20`, Monte Carlo with `draws` sign vectors otherwise.
    pub fn empirical_rademacher(&self, xs: &[Vec<f64>], draws: usize, seed: u64) -> Result<RademacherEstimate> {
        if xs.len() <= EXACT_LIMIT {
            Ok(RademacherEstimate {
                value: self.rademacher_exact(xs)?,
                stderr: 0.0,
                exact: true,
            })
        } else {
            let (value, stderr) = self.rademacher_monte_carlo(xs, draws, seed)?;
            Ok(RademacherEstimate {
                value,
                stderr,
                exact: false,
            })
        }
    }

    /// `B · sup‖xᵢ‖ / √n`, the classical upper bound for the `ℓ₂` class.
    pub fn l2_upper_bound(&self, xs: &[Vec<f64>]) -> f64 {
        let r = xs.iter().map(|x| norm2(x)).fold(0.0, f64::max);
        self.budget * r / (xs.len() as f64).sqrt()
    }
}

/// Inputs for the bound calculators; each calculator names the fields it
/// needs and reports the first missing one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// `L̂(h)`, `êrr_γ` or `L*` depending on the calculator.
    pub empirical: Option<f64>,
    pub smoothness: Option<f64>,
    pub range_bound: Option<f64>,
    pub rademacher: Option<f64>,
    pub n: Option<f64>,
    pub delta: Option<f64>,
    pub k: f64,
    pub margin: Option<f64>,
    pub lipschitz: Option<f64>,
}

impl Default for BoundInputs {
    fn default() -> Self {
        Self {
            empirical: None,
            smoothness: None,
            range_bound: None,
            rademacher: None,
            n: None,
            delta: None,
            k: DEFAULT_K,
            margin: None,
            lipschitz: None,
        }
    }
}

fn need(v: Option<f64>, name: &'static str) -> Result<f64> {
    let v = v.ok_or(Error::MissingField(name))?;
    if v.is_nan() {
        return Err(invalid(name, "is NaN"));
    }
    Ok(v)
}

impl BoundInputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn empirical(mut self, v: f64) -> Self {
        self.empirical = Some(v);
        self
    }

    pub fn smoothness(mut self, v: f64) -> Self {
        self.smoothness = Some(v);
        self
    }

    pub fn range_bound(mut self, v: f64) -> Self {
        self.range_bound = Some(v);
        self
    }

    pub fn rademacher(mut self, v: f64) -> Self {
        self.rademacher = Some(v);
        self
    }

    pub fn n(mut self, v: f64) -> Self {
        self.n = Some(v);
        self
    }

    pub fn delta(mut self, v: f64) -> Self {
        self.delta = Some(v);
        self
    }

    pub fn k(mut self, v: f64) -> Self {
        self.k = v;
        self
    }

    pub fn margin(mut self, v: f64) -> Self {
        self.margin = Some(v);
        self
    }

    pub fn lipschitz(mut self, v: f64) -> Self {
        self.lipschitz = Some(v);
        self
    }

    fn delta_checked(&self) -> Result<f64> {
        let delta = need(self.delta, "delta")?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
        }
        Ok(delta)
    }

    fn n_checked(&self) -> Result<f64> {
        let n = need(self.n, "n")?;
        if n < 1.0 {
            return Err(invalid("n", format!("must be at least 1, got {n}")));
        }
        Ok(n)
    }

    fn k_checked(&self) -> Result<f64> {
        if !(self.k > 0.0) {
            return Err(invalid("K", "must be positive"));
        }
        Ok(self.k)
    }

    /// `log(log(4b/γ)/δ)`, defined when `4b/γ > e`.
    fn margin_log_term(&self) -> Result<(f64, f64)> {
        let gamma = need(self.margin, "margin")?;
        let b = need(self.range_bound, "range_bound")?;
        if !(gamma > 0.0) {
            return Err(invalid("margin", format!("must be positive, got {gamma}")));
        }
        let ratio = 4.0 * b / gamma;
        if ratio <= std::f64::consts::E {
            return Err(Error::MarginTooLarge);
        }
        Ok((gamma, (ratio.ln() / self.delta_checked()?).ln()))
    }
}

/// `L̂ + K[√L̂(√H log^1.5 n · R + √(b log(1/δ)/n)) + H log³ n · R² + b log(1/δ)/n]`
pub fn theorem1_bound(inputs: &BoundInputs) -> Result<f64> {
    let l = need(inputs.empirical, "empirical")?;
    let h = need(inputs.smoothness, "smoothness")?;
    let b = need(inputs.range_bound, "range_bound")?;
    let r = need(inputs.rademacher, "rademacher")?;
    let n = inputs.n_checked()?;
    let delta = inputs.delta_checked()?;
    let k = inputs.k_checked()?;
    let log_n = n.ln();
    let conf = b * (1.0 / delta).ln() / n;
    let root = l.sqrt() * (h.sqrt() * log_n.powf(1.5) * r + conf.sqrt());
    Ok(l + k * (root + h * log_n.powi(3) * r * r + conf))
}

/// Margin bound holding uniformly over `γ > 0`:
/// `ê + K[√ê((log^1.5 n/γ)R + √(c/n)) + (log³ n/γ²)R² + c/n]` with
/// `c = log(log(4b/γ)/δ)`.
pub fn margin_bound(inputs: &BoundInputs) -> Result<f64> {
    let e = need(inputs.empirical, "empirical")?;
    let r = need(inputs.rademacher, "rademacher")?;
    let n = inputs.n_checked()?;
    let k = inputs.k_checked()?;
    let (gamma, c) = inputs.margin_log_term()?;
    let log_n = n.ln();
    let root = e.sqrt() * (log_n.powf(1.5) / gamma * r + (c / n).sqrt());
    Ok(e + k * (root + log_n.powi(3) / (gamma * gamma) * r * r + c / n))
}

/// `1.01 ê + K(2 log³ n/γ² · R² + 2c/n)`, the simplified margin bound.
pub fn margin_bound_simplified(inputs: &BoundInputs) -> Result<f64> {
    let e = need(inputs.empirical, "empirical")?;
    let r = need(inputs.rademacher, "rademacher")?;
    let n = inputs.n_checked()?;
    let k = inputs.k_checked()?;
    let (gamma, c) = inputs.margin_log_term()?;
    Ok(1.01 * e + k * (2.0 * n.ln().powi(3) / (gamma * gamma) * r * r + 2.0 * c / n))
}

/// `L* + 2 D R_n`
pub fn lipschitz_excess_bound(inputs: &BoundInputs) -> Result<f64> {
    let l = need(inputs.empirical, "empirical")?;
    let d = need(inputs.lipschitz, "lipschitz")?;
    let r = need(inputs.rademacher, "rademacher")?;
    Ok(l + 2.0 * d * r)
}

/// `(1/n) Σ 1[yᵢ sᵢ < γ]`
pub fn margin_empirical_error(scores: &[f64], labels: &[f64], gamma: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Empty("scores"));
    }
    check_dim(scores.len(), labels.len())?;
    if let Some(y) = labels.iter().find(|y| **y != 1.0 && **y != -1.0) {
        return Err(invalid("labels", format!("must be ±1, got {y}")));
    }
    let errors = scores.iter().zip(labels).filter(|(s, y)| *s * *y < gamma).count();
    Ok(errors as f64 / scores.len() as f64)
}

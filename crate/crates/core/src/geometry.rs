//! Mirror geometries: a constraint set `W`, a 1-strongly convex regularizer
//! `F` on it, and the matching primal/dual norms.
//!
//! * Euclidean: `F(w) = ½‖w‖₂²` on the ball `‖w‖₂ ≤ √2·B`, so `F ≤ B²` on `W`.
//! * Entropy: `F(w) = B Σᵢ w[i] ln(d·w[i]) + B²/e` on
//!   `{w ≥ 0, ‖w‖₁ ≤ B}` (requires `B ≥ 1`), 1-strongly convex for `‖·‖₁`.

use std::f64::consts::E;

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::numeric::{dot, norm1, norm2, norm_inf, sub};
use crate::rng::{rng_from, Rng};

/// Relative slack allowed when testing membership in `W`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Euclidean,
    Entropy,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean",
            Geometry::Entropy => "entropy",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim() {
            "euclidean" => Ok(Geometry::Euclidean),
            "entropy" => Ok(Geometry::Entropy),
            other => Err(Error::Config(format!("unknown geometry `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorSetup {
    geometry: Geometry,
    dim: usize,
    budget: f64,
    f_max: f64,
}

impl MirrorSetup {
    pub fn euclidean(dim: usize, budget: f64) -> Result<Self> {
        Self::new(Geometry::Euclidean, dim, budget)
    }

    pub fn entropy(dim: usize, budget: f64) -> Result<Self> {
        Self::new(Geometry::Entropy, dim, budget)
    }

    pub fn new(geometry: Geometry, dim: usize, budget: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(invalid("budget", format!("must be positive, got {budget}")));
        }
        let f_max = match geometry {
            Geometry::Euclidean => budget * budget,
            Geometry::Entropy => {
                if budget < 1.0 {
                    return Err(invalid(
                        "budget",
                        format!("entropy geometry needs B >= 1, got {budget}"),
                    ));
                }
                // attained at a vertex B·eᵢ
                budget * budget * (budget * dim as f64).ln() + budget * budget / E
            }
        };
        Ok(Self {
            geometry,
            dim,
            budget,
            f_max,
        })
    }

    /// Euclidean setup whose ball has the given radius (`B = radius/√2`).
    pub fn euclidean_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::euclidean(dim, radius / 2f64.sqrt())
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// `sup F` over the constraint set.
    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    /// Radius of `W` in the primal norm.
    pub fn radius(&self) -> f64 {
        match self.geometry {
            Geometry::Euclidean => 2f64.sqrt() * self.budget,
            Geometry::Entropy => self.budget,
        }
    }

    pub fn primal_norm(&self, v: &[f64]) -> f64 {
        match self.geometry {
            Geometry::Euclidean => norm2(v),
            Geometry::Entropy => norm1(v),
        }
    }

    pub fn dual_norm(&self, v: &[f64]) -> f64 {
        match self.geometry {
            Geometry::Euclidean => norm2(v),
            Geometry::Entropy => norm_inf(v),
        }
    }

    /// Starting point: the origin (Euclidean) or the uniform vector `B/d`.
    pub fn default_start(&self) -> Vec<f64> {
        match self.geometry {
            Geometry::Euclidean => vec![0.0; self.dim],
            Geometry::Entropy => vec![self.budget / self.dim as f64; self.dim],
        }
    }

    pub fn check_feasible(&self, w: &[f64]) -> Result<()> {
        check_dim(self.dim, w.len())?;
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::InfeasiblePoint);
        }
        if self.geometry == Geometry::Entropy {
            if let Some(i) = w.iter().position(|&x| x < 0.0) {
                return Err(Error::NegativeCoordinate(i));
            }
        }
        if self.primal_norm(w) > self.radius() * (1.0 + FEASIBILITY_TOL) {
            return Err(Error::InfeasiblePoint);
        }
        Ok(())
    }

    pub fn is_feasible(&self, w: &[f64]) -> bool {
        self.check_feasible(w).is_ok()
    }

    /// `F(w)`; the entropy form uses natural logs and `0 ln 0 = 0`.
    pub fn regularizer_value(&self, w: &[f64]) -> Result<f64> {
        self.check_feasible(w)?;
        Ok(self.regularizer_unchecked(w))
    }

    fn regularizer_unchecked(&self, w: &[f64]) -> f64 {
        match self.geometry {
            Geometry::Euclidean => 0.5 * dot(w, w),
            Geometry::Entropy => {
                let d = self.dim as f64;
                let s: f64 = w
                    .iter()
                    .filter(|&&x| x > 0.0)
                    .map(|&x| x * (x * d).ln())
                    .sum();
                self.budget * s + self.budget * self.budget / E
            }
        }
    }

    /// `∇F(w)`. For entropy every coordinate must be strictly positive.
    pub fn regularizer_gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check_feasible(w)?;
        match self.geometry {
            Geometry::Euclidean => Ok(w.to_vec()),
            Geometry::Entropy => {
                if let Some(i) = w.iter().position(|&x| x == 0.0) {
                    return Err(Error::BoundaryGradient(i));
                }
                let d = self.dim as f64;
                Ok(w.iter().map(|&x| self.budget * ((x * d).ln() + 1.0)).collect())
            }
        }
    }

    /// `F(w) − F(w′) − ⟨∇F(w′), w − w′⟩`.
    pub fn bregman_divergence(&self, w: &[f64], w_ref: &[f64]) -> Result<f64> {
        self.check_feasible(w)?;
        let grad = self.regularizer_gradient(w_ref)?;
        let diff = sub(w, w_ref);
        let value = self.regularizer_unchecked(w)
            - self.regularizer_unchecked(w_ref)
            - dot(&grad, &diff);
        Ok(value.max(0.0))
    }

    /// Bregman projection of an unconstrained point onto `W`: radial scaling
    /// onto the ball, or rescaling onto `‖w‖₁ ≤ B` for entropy (`u ≥ 0`).
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        let norm = self.primal_norm(u);
        let radius = self.radius();
        if norm <= radius {
            u.to_vec()
        } else {
            let s = radius / norm;
            u.iter().map(|x| x * s).collect()
        }
    }

    /// One mirror-descent step
    /// `argmin_{u∈W} ⟨η g − ∇F(w), u⟩ + F(u)`.
    ///
    /// Euclidean: `Π_W(w − η g)`. Entropy: `w[i]·exp(−η g[i]/B)` followed by
    /// the rescaling projection. Zero entropy coordinates stay zero.
    pub fn mirror_step(&self, w: &[f64], g: &[f64], eta: f64) -> Result<Vec<f64>> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(invalid("eta", format!("must be positive, got {eta}")));
        }
        self.check_feasible(w)?;
        check_dim(self.dim, g.len())?;
        let unconstrained: Vec<f64> = match self.geometry {
            // ∇F is the identity, so the dual point is already primal
            Geometry::Euclidean => w.iter().zip(g).map(|(x, gi)| x - eta * gi).collect(),
            Geometry::Entropy => {
                let scale = eta / self.budget;
                w.iter()
                    .zip(g)
                    .map(|(x, gi)| x * (-scale * gi).exp())
                    .collect()
            }
        };
        Ok(self.project(&unconstrained))
    }

    /// Draws a random point of `W`. With `interior`, entropy points have every
    /// coordinate strictly positive; otherwise sparse points and vertices also
    /// show up.
    pub fn sample_point(&self, rng: &mut Rng, interior: bool) -> Vec<f64> {
        match self.geometry {
            Geometry::Euclidean => {
                let dir: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
                let n = norm2(&dir).max(f64::MIN_POSITIVE);
                let r = self.radius() * rng.random::<f64>().powf(1.0 / self.dim as f64);
                dir.iter().map(|x| x * r / n).collect()
            }
            Geometry::Entropy => {
                let mode = if interior { 0 } else { rng.random_range(0..4) };
                let mut w: Vec<f64> = (0..self.dim).map(|_| Exp1.sample(rng)).collect();
                match mode {
                    1 => {
                        // sparse support
                        for x in w.iter_mut() {
                            if rng.random::<f64>() < 0.5 {
                                *x = 0.0;
                            }
                        }
                    }
                    2 => {
                        let i = rng.random_range(0..self.dim);
                        w.iter_mut().enumerate().for_each(|(j, x)| *x = if i == j { 1.0 } else { 0.0 });
                    }
                    _ => {}
                }
                let total: f64 = w.iter().sum();
                if total == 0.0 {
                    return vec![0.0; self.dim];
                }
                let mass = if mode == 2 {
                    self.budget
                } else {
                    self.budget * (1.0 - rng.random::<f64>())
                };
                w.iter().map(|x| x * mass / total).collect()
            }
        }
    }

    /// Minimum over `trials` random feasible pairs of
    /// `F(w) − F(w′) − ⟨∇F(w′), w − w′⟩ − ½‖w − w′‖²` (primal norm).
    pub fn probe_strong_convexity(&self, trials: usize, seed: u64) -> Result<f64> {
        if trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        let mut rng = rng_from(seed);
        let mut min = f64::INFINITY;
        for _ in 0..trials {
            let w = self.sample_point(&mut rng, false);
            let w_ref = self.sample_point(&mut rng, true);
            let grad = self.regularizer_gradient(&w_ref)?;
            let diff = sub(&w, &w_ref);
            let norm = self.primal_norm(&diff);
            let slack = self.regularizer_unchecked(&w)
                - self.regularizer_unchecked(&w_ref)
                - dot(&grad, &diff)
                - 0.5 * norm * norm;
            min = min.min(slack);
        }
        Ok(min)
    }
}

/// Projected online gradient descent step `Π_ball(w − η g)` written as an
/// explicit nearest-point projection onto the Euclidean ball.
pub fn projected_gradient_step(w: &[f64], g: &[f64], eta: f64, radius: f64) -> Vec<f64> {
    let mut u: Vec<f64> = w.iter().zip(g).map(|(x, gi)| x - eta * gi).collect();
    let n = norm2(&u);
    if n > radius {
        // nearest point on the sphere lies along the ray through u
        let shrink = (n - radius) / n;
        for x in u.iter_mut() {
            *x -= shrink * *x;
        }
    }
    u
}

/// Euclidean projection onto `{w ≥ 0, Σ w ≤ budget}`.
pub fn project_nonneg_l1_ball(u: &[f64], budget: f64) -> Vec<f64> {
    let clipped: Vec<f64> = u.iter().map(|x| x.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= budget {
        return clipped;
    }
    // simplex projection: find θ with Σ max(uᵢ − θ, 0) = budget
    let mut sorted = clipped.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - budget) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    clipped.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn construction_rules() {
        assert!(MirrorSetup::entropy(4, 0.5).is_err());
        assert!(MirrorSetup::euclidean(0, 1.0).is_err());
        assert!(MirrorSetup::euclidean(3, 0.0).is_err());
        let e = MirrorSetup::euclidean(3, 2.0).unwrap();
        assert_eq!(e.f_max(), 4.0);
        assert!((e.radius() - 2.0 * 2f64.sqrt()).abs() < TOL);
        let h = MirrorSetup::entropy(8, 2.0).unwrap();
        assert!((h.f_max() - (4.0 * 16f64.ln() + 4.0 / E)).abs() < TOL);
    }

    #[test]
    fn regularizer_examples() {
        let e = MirrorSetup::euclidean(2, 5.0).unwrap();
        assert_eq!(e.regularizer_value(&[3.0, 4.0]).unwrap(), 12.5);
        let h = MirrorSetup::entropy(2, 1.0).unwrap();
        assert!((h.regularizer_value(&[0.5, 0.5]).unwrap() - 1.0 / E).abs() < TOL);
        assert!((h.regularizer_value(&[1.0, 0.0]).unwrap() - (2f64.ln() + 1.0 / E)).abs() < TOL);
        assert!(matches!(
            h.regularizer_value(&[-0.1, 0.5]),
            Err(Error::NegativeCoordinate(0))
        ));
        assert!(matches!(
            h.regularizer_value(&[0.8, 0.8]),
            Err(Error::InfeasiblePoint)
        ));
        assert!(matches!(
            e.regularizer_value(&[10.0, 0.0]),
            Err(Error::InfeasiblePoint)
        ));
    }

    #[test]
    fn entropy_fmax_is_the_supremum() {
        let h = MirrorSetup::entropy(5, 1.7).unwrap();
        let mut rng = rng_from(3);
        let mut best = 0.0f64;
        for _ in 0..5000 {
            let w = h.sample_point(&mut rng, false);
            let v = h.regularizer_value(&w).unwrap();
            assert!(v >= 0.0);
            best = best.max(v);
        }
        let vertex = {
            let mut w = vec![0.0; 5];
            w[2] = 1.7;
            h.regularizer_value(&w).unwrap()
        };
        assert!((vertex - h.f_max()).abs() < 1e-12);
        assert!(best <= h.f_max() + 1e-12);
    }

    #[test]
    fn dual_norm_examples() {
        let e = MirrorSetup::euclidean(2, 1.0).unwrap();
        let h = MirrorSetup::entropy(2, 1.0).unwrap();
        assert_eq!(e.dual_norm(&[3.0, 4.0]), 5.0);
        assert_eq!(h.dual_norm(&[3.0, -7.0]), 7.0);
        assert_eq!(e.dual_norm(&[0.0, 0.0]), 0.0);
        assert_eq!(h.dual_norm(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn mirror_step_examples() {
        let e = MirrorSetup::euclidean_ball(2, 1.0).unwrap();
        let w = e.mirror_step(&[1.0, 0.0], &[1.0, 0.0], 0.5).unwrap();
        assert!(close(&w, &[0.5, 0.0], TOL));
        let w = e.mirror_step(&[1.0, 0.0], &[-1.0, 0.0], 1.0).unwrap();
        assert!(close(&w, &[1.0, 0.0], TOL));

        let h = MirrorSetup::entropy(2, 1.0).unwrap();
        let w = h.mirror_step(&[0.5, 0.5], &[0.0, 4f64.ln()], 1.0).unwrap();
        assert!(close(&w, &[0.5, 0.125], TOL));

        assert!(e.mirror_step(&[0.0, 0.0], &[1.0, 0.0], 0.0).is_err());
        assert!(e.mirror_step(&[5.0, 0.0], &[1.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn entropy_step_rescales_and_keeps_zeros() {
        let h = MirrorSetup::entropy(3, 1.0).unwrap();
        let w = h.mirror_step(&[0.5, 0.5, 0.0], &[-1.0, -1.0, -5.0], 1.0).unwrap();
        assert_eq!(w[2], 0.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < TOL);
        assert!((w[0] - 0.5).abs() < TOL);
    }

    #[test]
    fn bregman_examples() {
        let e = MirrorSetup::euclidean(2, 1.0).unwrap();
        assert_eq!(e.bregman_divergence(&[0.3, 0.2], &[0.3, 0.2]).unwrap(), 0.0);
        assert!((e.bregman_divergence(&[1.0, 0.0], &[0.0, 0.0]).unwrap() - 0.5).abs() < TOL);
        let h = MirrorSetup::entropy(2, 1.0).unwrap();
        let d = h.bregman_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((d - 2f64.ln()).abs() < TOL);
        assert!(matches!(
            h.bregman_divergence(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::BoundaryGradient(1))
        ));
    }

    #[test]
    fn bregman_matches_kl_form() {
        // B Σ [w ln(w/w′) − w + w′] written independently
        let h = MirrorSetup::entropy(6, 2.5).unwrap();
        let mut rng = rng_from(11);
        for _ in 0..200 {
            let w = h.sample_point(&mut rng, false);
            let v = h.sample_point(&mut rng, true);
            let kl: f64 = w
                .iter()
                .zip(&v)
                .map(|(&a, &b)| if a > 0.0 { a * (a / b).ln() - a + b } else { b })
                .sum::<f64>()
                * 2.5;
            let d = h.bregman_divergence(&w, &v).unwrap();
            assert!((d - kl).abs() < 1e-9 * (1.0 + kl), "{d} vs {kl}");
        }
    }

    #[test]
    fn strong_convexity_examples() {
        let e = MirrorSetup::euclidean(4, 1.0).unwrap();
        assert!(e.probe_strong_convexity(500, 1).unwrap().abs() < 1e-12);
        let h = MirrorSetup::entropy(8, 1.0).unwrap();
        assert!(h.probe_strong_convexity(10_000, 2).unwrap() >= -1e-9);
        let h2 = MirrorSetup::entropy(2, 1.0).unwrap();
        let d = h2.bregman_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((d - 0.5 - (2f64.ln() - 0.5)).abs() < TOL);
        assert!(d - 0.5 > 0.19);
        assert!(h.probe_strong_convexity(0, 1).is_err());
    }

    #[test]
    fn bregman_dominates_half_norm_squared() {
        for setup in [
            MirrorSetup::euclidean(5, 1.3).unwrap(),
            MirrorSetup::entropy(5, 1.3).unwrap(),
        ] {
            let mut rng = rng_from(5);
            for _ in 0..2000 {
                let w = setup.sample_point(&mut rng, false);
                let v = setup.sample_point(&mut rng, true);
                let n = setup.primal_norm(&sub(&w, &v));
                assert!(setup.bregman_divergence(&w, &v).unwrap() >= 0.5 * n * n - 1e-9);
            }
        }
    }

    #[test]
    fn euclidean_step_agrees_with_projected_gradient() {
        let e = MirrorSetup::euclidean(4, 0.8).unwrap();
        let mut rng = rng_from(9);
        for _ in 0..1000 {
            let w = e.sample_point(&mut rng, false);
            let g: Vec<f64> = (0..4).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect();
            let eta = rng.random_range(0.01..2.0);
            let a = e.mirror_step(&w, &g, eta).unwrap();
            let b = projected_gradient_step(&w, &g, eta, e.radius());
            assert!(close(&a, &b, 1e-14), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn mirror_step_first_order_optimality() {
        for setup in [
            MirrorSetup::euclidean(4, 1.0).unwrap(),
            MirrorSetup::entropy(4, 1.5).unwrap(),
        ] {
            let mut rng = rng_from(21);
            for _ in 0..100 {
                let w = setup.sample_point(&mut rng, true);
                let g: Vec<f64> = (0..4).map(|_| 4.0 * rng.sample::<f64, _>(StandardNormal)).collect();
                let eta = rng.random_range(0.05..1.0);
                let next = setup.mirror_step(&w, &g, eta).unwrap();
                assert!(setup.is_feasible(&next));
                let gw = setup.regularizer_gradient(&w).unwrap();
                let gn = setup.regularizer_gradient(&next).unwrap();
                let lin: Vec<f64> = (0..4).map(|i| eta * g[i] - gw[i] + gn[i]).collect();
                for _ in 0..100 {
                    let other = setup.sample_point(&mut rng, false);
                    assert!(dot(&lin, &sub(&other, &next)) >= -1e-8);
                }
            }
        }
    }

    #[test]
    fn nonneg_l1_projection() {
        let p = project_nonneg_l1_ball(&[0.2, -1.0, 0.3], 1.0);
        assert_eq!(p, vec![0.2, 0.0, 0.3]);
        let p = project_nonneg_l1_ball(&[2.0, 1.0, -3.0], 1.0);
        assert!(close(&p, &[1.0, 0.0, 0.0], TOL));
        let p = project_nonneg_l1_ball(&[0.9, 0.8, 0.1], 1.0);
        assert!(close(&p, &[0.55, 0.45, 0.0], TOL));
    }
}

//! Scalar losses `φ(t, y)` with smoothness metadata.
//!
//! A loss is *H-smooth* when its derivative in `t` is `H`-Lipschitz. For a
//! non-negative smooth loss the derivative is controlled by the value,
//! `|φ′(t)| ≤ √(4 H φ(t))`, and differences of values obey
//! `(φ(t) − φ(r))² ≤ 6 H (φ(t) + φ(r)) (t − r)²`. Both facts are exposed as
//! residual functions so they can be checked at runtime.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `points` equally spaced values covering both endpoints.
    pub fn grid(&self, points: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.width() / (points.max(2) - 1) as f64;
        (0..points.max(2)).map(move |k| {
            if k + 1 == points.max(2) {
                self.hi
            } else {
                self.lo + k as f64 * step
            }
        })
    }
}

pub const DEFAULT_T_DOMAIN: Interval = Interval::new(-4.0, 4.0);
pub const DEFAULT_Y_DOMAIN: Interval = Interval::new(-1.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LossKind {
    /// `weight · (t − y)²`
    Squared { weight: f64 },
    /// Cosine bridge from 1 to 0 applied to the margin `y·t`.
    SmoothRamp { gamma: f64 },
    /// `(t − y)²` near the target, `|t − y| − ¼` away from it.
    QuadLin,
    /// `|t − y|`
    Absolute,
}

/// A scalar loss together with its declared domain, smoothness and range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    kind: LossKind,
    t_domain: Interval,
    y_domain: Interval,
    range_bound: f64,
}

impl LossSpec {
    fn build(kind: LossKind) -> Self {
        let mut loss = Self {
            kind,
            t_domain: DEFAULT_T_DOMAIN,
            y_domain: DEFAULT_Y_DOMAIN,
            range_bound: 0.0,
        };
        loss.range_bound = loss.grid_max(|t, y| loss.value(t, y).abs());
        loss
    }

    /// `½ (t − y)²`, 1-smooth.
    pub fn squared() -> Self {
        Self::build(LossKind::Squared { weight: 0.5 })
    }

    /// `weight · (t − y)²`, `2·weight`-smooth.
    pub fn weighted_squared(weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(invalid("weight", format!("must be positive, got {weight}")));
        }
        Ok(Self::build(LossKind::Squared { weight }))
    }

    /// Smooth ramp with margin `gamma`; smoothness `π²/(2γ²)`.
    pub fn smooth_ramp(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be positive, got {gamma}")));
        }
        Ok(Self::build(LossKind::SmoothRamp { gamma }))
    }

    /// Piecewise quadratic/linear loss; 2-smooth and C¹ at `|t − y| = ½`.
    pub fn quadlin() -> Self {
        Self::build(LossKind::QuadLin)
    }

    /// `|t − y|`; not smooth, subgradient uses `sign(0) = 0`.
    pub fn absolute() -> Self {
        Self::build(LossKind::Absolute)
    }

    /// Parses `squared`, `squared2`, `ramp:<gamma>`, `quadlin` or `absolute`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "squared" => Ok(Self::squared()),
            "squared2" => Self::weighted_squared(1.0),
            "quadlin" => Ok(Self::quadlin()),
            "absolute" => Ok(Self::absolute()),
            _ => {
                if let Some(g) = name.strip_prefix("ramp:") {
                    let gamma = g
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("bad ramp margin `{g}`: {e}")))?;
                    Self::smooth_ramp(gamma)
                } else {
                    Err(Error::Config(format!("unknown loss `{name}`")))
                }
            }
        }
    }

    /// Replaces the declared domain and recomputes the range bound.
    pub fn with_domain(mut self, t_domain: Interval, y_domain: Interval) -> Self {
        self.t_domain = t_domain;
        self.y_domain = y_domain;
        self.range_bound = self.grid_max(|t, y| self.value(t, y).abs());
        self
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn name(&self) -> String {
        match self.kind {
            LossKind::Squared { weight: 0.5 } => "squared".into(),
            LossKind::Squared { weight: 1.0 } => "squared2".into(),
            LossKind::Squared { weight } => format!("squared*{weight}"),
            LossKind::SmoothRamp { gamma } => format!("ramp:{gamma}"),
            LossKind::QuadLin => "quadlin".into(),
            LossKind::Absolute => "absolute".into(),
        }
    }

    pub fn t_domain(&self) -> Interval {
        self.t_domain
    }

    pub fn y_domain(&self) -> Interval {
        self.y_domain
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, LossKind::Absolute)
    }

    /// Convex in `t` for every `y`.
    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, LossKind::SmoothRamp { .. })
    }

    pub fn value(&self, t: f64, y: f64) -> f64 {
        match self.kind {
            LossKind::Squared { weight } => weight * (t - y) * (t - y),
            LossKind::SmoothRamp { gamma } => ramp_value(y * t, gamma),
            LossKind::QuadLin => {
                let r = (t - y).abs();
                if r <= 0.5 {
                    r * r
                } else {
                    r - 0.25
                }
            }
            LossKind::Absolute => (t - y).abs(),
        }
    }

    /// Derivative with respect to the prediction `t`.
    pub fn derivative(&self, t: f64, y: f64) -> f64 {
        match self.kind {
            LossKind::Squared { weight } => 2.0 * weight * (t - y),
            LossKind::SmoothRamp { gamma } => y * ramp_derivative(y * t, gamma),
            LossKind::QuadLin => (2.0 * (t - y)).clamp(-1.0, 1.0),
            LossKind::Absolute => {
                let r = t - y;
                if r > 0.0 {
                    1.0
                } else if r < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Declared smoothness `H`. Errors for the absolute loss.
    pub fn smoothness(&self) -> Result<f64> {
        match self.kind {
            LossKind::Squared { weight } => Ok(2.0 * weight),
            LossKind::SmoothRamp { gamma } => Ok(PI * PI / (2.0 * gamma * gamma)),
            LossKind::QuadLin => Ok(2.0),
            LossKind::Absolute => Err(Error::NonSmoothLoss(self.name())),
        }
    }

    /// `sup |φ|` over the declared domain.
    pub fn range_bound(&self) -> f64 {
        self.range_bound
    }

    /// `sup |φ′|` over the declared domain (the Lipschitz constant `D`).
    pub fn lipschitz_bound(&self) -> f64 {
        self.grid_max(|t, y| self.derivative(t, y).abs())
    }

    fn grid_max(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut best = 0.0f64;
        for y in self.y_domain.grid(201) {
            for t in self.t_domain.grid(1601) {
                best = best.max(f(t, y));
            }
        }
        best
    }

    fn require_smooth(&self) -> Result<f64> {
        self.smoothness()
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn ramp_value(u: f64, gamma: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= gamma {
        0.0
    } else {
        0.5 * (1.0 + (PI * u / gamma).cos())
    }
}

fn ramp_derivative(u: f64, gamma: f64) -> f64 {
    if u <= 0.0 || u >= gamma {
        0.0
    } else {
        -0.5 * PI / gamma * (PI * u / gamma).sin()
    }
}

/// `√(4 H φ(t, y)) − |φ′(t, y)|`, non-negative for every smooth non-negative loss.
pub fn self_bound_residual(loss: &LossSpec, t: f64, y: f64) -> Result<f64> {
    let h = loss.require_smooth()?;
    Ok((4.0 * h * loss.value(t, y)).sqrt() - loss.derivative(t, y).abs())
}

/// `6 H (φ(t) + φ(r)) (t − r)² − (φ(t) − φ(r))²` at target `y`.
pub fn pair_bound_residual(loss: &LossSpec, t: f64, r: f64, y: f64) -> Result<f64> {
    let h = loss.require_smooth()?;
    let (ft, fr) = (loss.value(t, y), loss.value(r, y));
    Ok(6.0 * h * (ft + fr) * (t - r) * (t - r) - (ft - fr) * (ft - fr))
}

/// Largest difference quotient of the derivative between adjacent points of a
/// `grid_points`-point grid in `t` (for 21 targets across the `y` domain).
///
/// Adjacent pairs suffice: on a line, the quotient between distant points is
/// a weighted average of adjacent quotients.
pub fn probe_smoothness(loss: &LossSpec, grid_points: usize) -> Result<f64> {
    loss.require_smooth()?;
    if grid_points < 10 {
        return Err(invalid("grid_points", format!("need at least 10, got {grid_points}")));
    }
    let ts: Vec<f64> = loss.t_domain.grid(grid_points).collect();
    let mut best = 0.0f64;
    for y in loss.y_domain.grid(21) {
        let mut prev = (ts[0], loss.derivative(ts[0], y));
        for &t in &ts[1..] {
            let d = loss.derivative(t, y);
            best = best.max((d - prev.1).abs() / (t - prev.0));
            prev = (t, d);
        }
    }
    Ok(best)
}

/// The built-in smooth losses at their default domains.
pub fn builtin_smooth() -> Vec<LossSpec> {
    vec![
        LossSpec::squared(),
        LossSpec::weighted_squared(1.0).expect("positive weight"),
        LossSpec::quadlin(),
        LossSpec::smooth_ramp(1.0).expect("positive margin"),
        LossSpec::smooth_ramp(0.25).expect("positive margin"),
    ]
}

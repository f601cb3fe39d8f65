//! The online game: the player commits to `wᵢ`, the stream reveals `zᵢ`,
//! the player pays `φ(⟨wᵢ, xᵢ⟩, yᵢ)` and takes a mirror step.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::MirrorSetup;
use crate::losses::{LossKind, LossSpec};
use crate::numeric::{ball_least_squares, dot};
use crate::rng::Rng;

/// One labelled example for linear prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Instance {
    pub fn new(x: Vec<f64>, y: f64) -> Self {
        Self { x, y }
    }

    pub fn loss(&self, loss: &LossSpec, w: &[f64]) -> f64 {
        loss.value(dot(w, &self.x), self.y)
    }

    /// `φ′(⟨w, x⟩, y) · x`
    pub fn gradient(&self, loss: &LossSpec, w: &[f64]) -> Vec<f64> {
        let slope = loss.derivative(dot(w, &self.x), self.y);
        self.x.iter().map(|xi| slope * xi).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamMode {
    FixedSequence,
    IidSampler,
    Adaptive,
}

type Sampler = Box<dyn FnMut() -> Instance + Send>;
type Adversary = Box<dyn FnMut(&[f64]) -> Instance + Send>;

enum Source {
    Fixed(std::vec::IntoIter<Instance>),
    Iid(Sampler),
    Adaptive(Adversary),
}

/// Supplies `zᵢ` round by round. Adaptive suppliers see only the current
/// iterate, never the past instances or any RNG owned by the game.
pub struct InstanceStream {
    rounds: usize,
    source: Source,
}

impl std::fmt::Debug for InstanceStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InstanceStream")
            .field("rounds", &self.rounds)
            .field("mode", &self.mode())
            .finish()
    }
}

impl InstanceStream {
    /// A predetermined sequence played in order, one instance per round.
    pub fn fixed(instances: Vec<Instance>) -> Self {
        Self {
            rounds: instances.len(),
            source: Source::Fixed(instances.into_iter()),
        }
    }

    /// A predetermined sequence that is asked to last `rounds` rounds; a
    /// short sequence surfaces as [`Error::StreamExhausted`].
    pub fn fixed_for(instances: Vec<Instance>, rounds: usize) -> Self {
        Self {
            rounds,
            source: Source::Fixed(instances.into_iter()),
        }
    }

    /// `rounds` i.i.d. draws from `sample`, driven by an owned RNG.
    pub fn iid<S>(rounds: usize, mut rng: Rng, mut sample: S) -> Self
    where
        S: FnMut(&mut Rng) -> Instance + Send + 'static,
    {
        Self {
            rounds,
            source: Source::Iid(Box::new(move || sample(&mut rng))),
        }
    }

    /// An adversary that picks `zᵢ` after seeing `wᵢ`.
    pub fn adaptive<A>(rounds: usize, adversary: A) -> Self
    where
        A: FnMut(&[f64]) -> Instance + Send + 'static,
    {
        Self {
            rounds,
            source: Source::Adaptive(Box::new(adversary)),
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn mode(&self) -> StreamMode {
        match self.source {
            Source::Fixed(_) => StreamMode::FixedSequence,
            Source::Iid(_) => StreamMode::IidSampler,
            Source::Adaptive(_) => StreamMode::Adaptive,
        }
    }

    fn next(&mut self, round: usize, w: &[f64]) -> Result<Instance> {
        match &mut self.source {
            Source::Fixed(it) => it.next().ok_or(Error::StreamExhausted(round)),
            Source::Iid(sample) => Ok(sample()),
            Source::Adaptive(adversary) => Ok(adversary(w)),
        }
    }
}

/// Per-round record of a finished game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OnlineTrace {
    iterates: Vec<Vec<f64>>,
    instances: Vec<Instance>,
    losses: Vec<f64>,
    eta: f64,
    setup: MirrorSetup,
    loss: LossSpec,
}

/// JSON shape of one round in [`OnlineTrace::to_json`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: f64,
    pub loss: f64,
}

impl OnlineTrace {
    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    pub fn iterates(&self) -> &[Vec<f64>] {
        &self.iterates
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn setup(&self) -> &MirrorSetup {
        &self.setup
    }

    pub fn loss(&self) -> &LossSpec {
        &self.loss
    }

    /// Average loss paid by the player.
    pub fn average_loss(&self) -> f64 {
        self.losses.iter().sum::<f64>() / self.len() as f64
    }

    /// Average loss of a fixed predictor on the realized instances.
    pub fn comparator_loss(&self, w_star: &[f64]) -> Result<f64> {
        self.setup.check_feasible(w_star)?;
        let total: f64 = self.instances.iter().map(|z| z.loss(&self.loss, w_star)).sum();
        Ok(total / self.len() as f64)
    }

    /// `(1/n) Σ ℓ(wᵢ, zᵢ) − (1/n) Σ ℓ(w*, zᵢ)`; may be negative.
    pub fn average_regret(&self, w_star: &[f64]) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::Empty("trace"));
        }
        Ok(self.average_loss() - self.comparator_loss(w_star)?)
    }

    /// Coordinate-wise mean of `w₁ … wₙ`.
    pub fn averaged_iterate(&self) -> Result<Vec<f64>> {
        averaged(&self.iterates)
    }

    /// One record per round.
    pub fn rounds(&self) -> Vec<RoundRecord> {
        (0..self.len())
            .map(|i| RoundRecord {
                round: i + 1,
                w: self.iterates[i].clone(),
                x: self.instances[i].x.clone(),
                y: self.instances[i].y,
                loss: self.losses[i],
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.rounds())?)
    }
}

pub(crate) fn averaged(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = points.first().ok_or(Error::Empty("trace"))?;
    let mut mean = vec![0.0; first.len()];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v;
        }
    }
    let n = points.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}

fn check_rate_inputs(h: f64, f_max: f64, n: usize, lbar: f64) -> Result<()> {
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

/// `η = 1 / (H F + √(H² F² + H F n L̄))` with `F = F_max`.
pub fn stepsize_for(h: f64, f_max: f64, n: usize, lbar: f64) -> Result<f64> {
    check_rate_inputs(h, f_max, n, lbar)?;
    let hf = h * f_max;
    Ok(1.0 / (hf + (hf * hf + hf * n as f64 * lbar).sqrt()))
}

/// Step size used by the runners: `F_max · stepsize_for(...)`.
///
/// The literal formula is stated for a domain normalized to `F_max = 1`;
/// scaling by `F_max` maps it back and recovers the regret bound for any
/// `F_max`. The two agree when `F_max = 1`.
pub fn mirror_descent_stepsize(h: f64, f_max: f64, n: usize, lbar: f64) -> Result<f64> {
    Ok(f_max * stepsize_for(h, f_max, n, lbar)?)
}

/// `4 H F / n + 2 √(H F L̄ / n)` with `F = F_max`.
pub fn regret_bound(h: f64, f_max: f64, n: usize, lbar: f64) -> Result<f64> {
    check_rate_inputs(h, f_max, n, lbar)?;
    let n = n as f64;
    Ok(4.0 * h * f_max / n + 2.0 * (h * f_max * lbar / n).sqrt())
}

/// Plays `stream` with mirror descent from `w1` using a fixed step `eta`.
pub fn run_mirror_descent(
    setup: &MirrorSetup,
    loss: &LossSpec,
    mut stream: InstanceStream,
    eta: f64,
    w1: &[f64],
) -> Result<OnlineTrace> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    setup.check_feasible(w1)?;
    let n = stream.rounds();
    let mut iterates = Vec::with_capacity(n);
    let mut instances = Vec::with_capacity(n);
    let mut losses = Vec::with_capacity(n);
    let mut w = w1.to_vec();
    for round in 0..n {
        let z = stream.next(round, &w)?;
        check_dim(setup.dim(), z.x.len())?;
        losses.push(z.loss(loss, &w));
        let next = if round + 1 < n {
            let g = z.gradient(loss, &w);
            Some(setup.mirror_step(&w, &g, eta)?)
        } else {
            None
        };
        iterates.push(std::mem::take(&mut w));
        instances.push(z);
        if let Some(next) = next {
            w = next;
        }
    }
    Ok(OnlineTrace {
        iterates,
        instances,
        losses,
        eta,
        setup: setup.clone(),
        loss: loss.clone(),
    })
}

/// Best fixed predictor in hindsight for a weighted squared loss on a
/// Euclidean ball, with its average loss.
pub fn hindsight_least_squares(
    instances: &[Instance],
    loss: &LossSpec,
    radius: f64,
) -> Result<(Vec<f64>, f64)> {
    if !matches!(loss.kind(), LossKind::Squared { .. }) {
        return Err(Error::Incompatible(format!(
            "hindsight comparator needs a squared loss, got {}",
            loss.name()
        )));
    }
    let first = instances.first().ok_or(Error::Empty("instances"))?;
    let d = first.x.len();
    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    for z in instances {
        check_dim(d, z.x.len())?;
        let x = DVector::from_column_slice(&z.x);
        gram.ger(1.0, &x, &x, 1.0);
        rhs.axpy(z.y, &x, 1.0);
    }
    let w = ball_least_squares(&gram, &rhs, radius);
    let avg = instances.iter().map(|z| z.loss(loss, &w)).sum::<f64>() / instances.len() as f64;
    Ok((w, avg))
}

/// Outcome of trying a geometric ladder of `L̄` guesses on a fixed sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoublingReport {
    /// `(L̄ guess, average regret)` for every candidate tried.
    pub candidates: Vec<(f64, f64)>,
    /// Smallest guess that turned out to upper-bound the comparator loss.
    pub best_feasible: Option<f64>,
    pub comparator_loss: f64,
}

/// Heuristic for an unknown `L̄*`: runs `L̄ = base·2ᵏ` for `k = 0..steps`
/// (plus `L̄ = 0`) and reports which guesses were valid after the fact.
/// This is a tuning aid; the regret guarantee only covers a valid `L̄`
/// fixed in advance.
pub fn doubling_search(
    setup: &MirrorSetup,
    loss: &LossSpec,
    instances: &[Instance],
    h: f64,
    w_star: &[f64],
    base: f64,
    steps: usize,
) -> Result<DoublingReport> {
    if instances.is_empty() {
        return Err(Error::Empty("instances"));
    }
    let n = instances.len();
    let comparator_loss =
        instances.iter().map(|z| z.loss(loss, w_star)).sum::<f64>() / n as f64;
    let mut candidates = Vec::with_capacity(steps + 1);
    let mut best_feasible = None;
    let guesses = std::iter::once(0.0).chain((0..steps).map(|k| base * 2f64.powi(k as i32)));
    for lbar in guesses {
        let eta = mirror_descent_stepsize(h, setup.f_max(), n, lbar)?;
        let trace = run_mirror_descent(
            setup,
            loss,
            InstanceStream::fixed(instances.to_vec()),
            eta,
            &setup.default_start(),
        )?;
        candidates.push((lbar, trace.average_regret(w_star)?));
        if best_feasible.is_none() && lbar >= comparator_loss {
            best_feasible = Some(lbar);
        }
    }
    Ok(DoublingReport {
        candidates,
        best_feasible,
        comparator_loss,
    })
}

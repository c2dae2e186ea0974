//! Picard iteration `x_{n+1} = T x_n` with convergence diagnostics.
//!
//! The engine stops when the residual `d(x_n, x_{n+1})` drops below the
//! tolerance and the trailing `cauchy_window` iterates are pairwise within
//! the tolerance. Weight flags `alpha(x_n, x_{n+1}) >= 1` are recorded when a
//! weight is attached but never stop the iteration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::metric::Metric;
use crate::verify::ChainCertificate;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;
pub const DEFAULT_CAUCHY_WINDOW: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    DomainError,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxIterations => "max_iterations",
            Status::DomainError => "domain_error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig<P> {
    pub start: P,
    /// Bound on the residual `d(x_n, x_{n+1})`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Number of trailing iterates that must be pairwise within tolerance.
    pub cauchy_window: usize,
}

impl<P> IterationConfig<P> {
    pub fn new(start: P) -> Self {
        Self {
            start,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            cauchy_window: DEFAULT_CAUCHY_WINDOW,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_cauchy_window(mut self, cauchy_window: usize) -> Self {
        self.cauchy_window = cauchy_window;
        self
    }

    /// Same settings, different start.
    pub fn restart<Q>(&self, start: Q) -> IterationConfig<Q> {
        IterationConfig {
            start,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            cauchy_window: self.cauchy_window,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::arg(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations < 1 {
            return Err(Error::arg("max_iterations must be at least 1"));
        }
        if self.cauchy_window < 2 {
            return Err(Error::arg("cauchy_window must be at least 2"));
        }
        Ok(())
    }
}

/// The recorded orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<P> {
    pub iterates: Vec<P>,
    /// `residuals[n] = d(x_n, x_{n+1})`.
    pub residuals: Vec<f64>,
    /// `alpha_flags[n] = alpha(x_n, x_{n+1}) >= 1`, when a weight was attached.
    pub alpha_flags: Option<Vec<bool>>,
    /// Largest pairwise distance among the trailing window ending at `x_{n+1}`.
    pub cauchy_window_max: Vec<f64>,
    pub status: Status,
    pub tolerance: f64,
}

impl<P> IterationTrace<P> {
    fn start(x0: P, tolerance: f64, with_alpha: bool) -> Self {
        Self {
            iterates: vec![x0],
            residuals: Vec::new(),
            alpha_flags: with_alpha.then(Vec::new),
            cauchy_window_max: Vec::new(),
            status: Status::MaxIterations,
            tolerance,
        }
    }

    /// Whether every recorded step was admitted by the weight. `None` when no
    /// weight was attached.
    pub fn orbital(&self) -> Option<bool> {
        self.alpha_flags.as_ref().map(|f| f.iter().all(|b| *b))
    }

    pub fn residual_monotone(&self, slack: Slack) -> Result<MonotoneVerdict> {
        residual_monotone(&self.residuals, slack)
    }

    pub fn rate_estimate(&self) -> Option<f64> {
        rate_estimate(&self.residuals)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult<P> {
    /// The newest iterate `x_{n+1} = T x_n`.
    pub point: P,
    /// `d(point, T point)`, recomputed.
    pub residual: f64,
    /// Index `n` of the last recorded residual `d(x_n, x_{n+1})`. On
    /// convergence it is the first step passing the stopping rule.
    pub iterations: usize,
    pub trace: IterationTrace<P>,
}

impl<P> FixedPointResult<P> {
    pub fn status(&self) -> Status {
        self.trace.status
    }

    pub fn converged(&self) -> bool {
        self.trace.status == Status::Converged
    }
}

/// An iteration that stopped on an error, with the trace up to that point.
#[derive(Debug, Clone)]
pub struct IterationFailure<P> {
    pub error: Error,
    pub trace: IterationTrace<P>,
}

impl<P> fmt::Display for IterationFailure<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iteration stopped after {} steps: {}", self.trace.residuals.len(), self.error)
    }
}

impl<P: fmt::Debug> std::error::Error for IterationFailure<P> {}

impl<P> From<IterationFailure<P>> for Error {
    fn from(f: IterationFailure<P>) -> Self {
        f.error
    }
}

/// Runs Picard iteration without a weight.
pub fn iterate<P, T, M>(
    map: &T,
    metric: &M,
    cfg: &IterationConfig<P>,
) -> Result<FixedPointResult<P>, IterationFailure<P>>
where
    P: Clone,
    T: SelfMap<P> + ?Sized,
    M: Metric<P> + ?Sized,
{
    run(map, metric, None::<&fn(&P, &P) -> f64>, cfg)
}

/// Runs Picard iteration, recording `alpha(x_n, x_{n+1}) >= 1` at every step.
pub fn iterate_with_alpha<P, T, M, A>(
    map: &T,
    metric: &M,
    alpha: &A,
    cfg: &IterationConfig<P>,
) -> Result<FixedPointResult<P>, IterationFailure<P>>
where
    P: Clone,
    T: SelfMap<P> + ?Sized,
    M: Metric<P> + ?Sized,
    A: Alpha<P> + ?Sized,
{
    run(map, metric, Some(alpha), cfg)
}

fn run<P, T, M, A>(
    map: &T,
    metric: &M,
    alpha: Option<&A>,
    cfg: &IterationConfig<P>,
) -> Result<FixedPointResult<P>, IterationFailure<P>>
where
    P: Clone,
    T: SelfMap<P> + ?Sized,
    M: Metric<P> + ?Sized,
    A: Alpha<P> + ?Sized,
{
    let mut trace = IterationTrace::start(cfg.start.clone(), cfg.tolerance, alpha.is_some());
    let fail = |mut trace: IterationTrace<P>, error: Error| {
        trace.status = Status::DomainError;
        Err(IterationFailure { error, trace })
    };
    if let Err(e) = cfg.validate() {
        return Err(IterationFailure { error: e, trace });
    }
    if !metric.contains(&cfg.start) {
        return fail(trace, Error::domain("start point lies outside the metric domain"));
    }

    for n in 0..cfg.max_iterations {
        let current = &trace.iterates[n];
        let next = match map.apply(current) {
            Ok(p) => p,
            Err(e) => return fail(trace, e),
        };
        if !metric.contains(&next) {
            return fail(trace, Error::domain(format!("iterate {} lies outside the metric domain", n + 1)));
        }
        let residual = metric.distance(current, &next);
        if !(residual.is_finite() && residual >= 0.0) {
            return fail(trace, Error::domain(format!("distance undefined between iterates {n} and {}", n + 1)));
        }
        if let (Some(a), Some(flags)) = (alpha, trace.alpha_flags.as_mut()) {
            flags.push(a.admits(current, &next));
        }
        trace.iterates.push(next);
        trace.residuals.push(residual);

        let len = trace.iterates.len();
        let window = &trace.iterates[len - cfg.cauchy_window.min(len)..];
        let mut wmax = 0.0f64;
        for (i, a) in window.iter().enumerate() {
            for b in &window[i + 1..] {
                wmax = wmax.max(metric.distance(a, b));
            }
        }
        trace.cauchy_window_max.push(wmax);

        if residual < cfg.tolerance && wmax < cfg.tolerance {
            trace.status = Status::Converged;
            break;
        }
    }

    // The newest iterate is returned; its residual costs one more evaluation
    // that is not part of the trace.
    let point = trace.iterates.last().expect("trace holds the start").clone();
    let residual = match map.apply(&point) {
        Ok(image) if metric.contains(&image) => metric.distance(&point, &image),
        Ok(_) => return fail(trace, Error::domain("image of the returned point lies outside the metric domain")),
        Err(e) => return fail(trace, e),
    };
    let iterations = trace.residuals.len() - 1;
    Ok(FixedPointResult { point, residual, iterations, trace })
}

/// Allowed growth between consecutive residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slack {
    /// For tabulated maps.
    Exact,
    /// `r_{n+1} <= r_n * (1 + rel)`, for floating evaluation.
    Relative(f64),
}

/// Slack used for maps evaluated in floating point.
pub const FLOAT_SLACK: Slack = Slack::Relative(1e-14);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonotoneVerdict {
    pub pass: bool,
    pub first_offending: Option<usize>,
}

/// Checks that residuals never increase beyond the slack.
pub fn residual_monotone(residuals: &[f64], slack: Slack) -> Result<MonotoneVerdict> {
    if residuals.len() < 2 {
        return Err(Error::arg(format!("need at least 2 residuals, got {}", residuals.len())));
    }
    let rel = match slack {
        Slack::Exact => 0.0,
        Slack::Relative(r) => r,
    };
    let first_offending = residuals.windows(2).position(|w| w[1] > w[0] + w[0].abs() * rel).map(|i| i + 1);
    Ok(MonotoneVerdict { pass: first_offending.is_none(), first_offending })
}

/// Geometric mean of the last few successive residual ratios, skipping
/// steps with a zero residual. `None` with fewer than two positive residuals.
pub fn rate_estimate(residuals: &[f64]) -> Option<f64> {
    const TRAILING: usize = 5;
    let positive: Vec<f64> = residuals.iter().copied().filter(|r| *r > 0.0 && r.is_finite()).collect();
    if positive.len() < 2 {
        return None;
    }
    let ratios: Vec<f64> = positive.windows(2).map(|w| w[1] / w[0]).collect();
    let tail = &ratios[ratios.len().saturating_sub(TRAILING)..];
    let log_mean = tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64;
    Some(log_mean.exp())
}

/// Gap sequence `d(T^n x, T^n y)` for `n = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapDecay {
    pub gaps: Vec<f64>,
    /// `alpha(x, y) >= 1`; when false the decay is not predicted.
    pub hypothesis_holds: bool,
    pub nonincreasing: bool,
    /// The final gap is zero or below the initial one.
    pub decaying: bool,
}

pub fn orbital_gap_decay<P, T, M, A>(map: &T, metric: &M, x: &P, y: &P, alpha: &A, steps: usize) -> Result<GapDecay>
where
    P: Clone,
    T: SelfMap<P> + ?Sized,
    M: Metric<P> + ?Sized,
    A: Alpha<P> + ?Sized,
{
    let hypothesis_holds = alpha.admits(x, y);
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut gaps = Vec::with_capacity(steps + 1);
    gaps.push(metric.distance(&a, &b));
    for _ in 0..steps {
        a = map.apply(&a)?;
        b = map.apply(&b)?;
        gaps.push(metric.distance(&a, &b));
    }
    let nonincreasing = gaps.windows(2).all(|w| w[1] <= w[0]);
    let last = *gaps.last().unwrap_or(&0.0);
    let decaying = last == 0.0 || last < gaps[0];
    Ok(GapDecay { gaps, hypothesis_holds, nonincreasing, decaying })
}

/// Simultaneous orbits of every node of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConvergence<P> {
    /// `orbits[i][n] = T^n z_i`.
    pub orbits: Vec<Vec<P>>,
    /// `link_gaps[i - 1][n] = d(T^n z_{i-1}, T^n z_i)`.
    pub link_gaps: Vec<Vec<f64>>,
    /// `d(z_0, T z_0) <= fixed_tolerance`.
    pub anchor_fixed: bool,
    /// Largest link gap after the last step.
    pub terminal_gap_max: f64,
    /// Sum of terminal link gaps; bounds `d(T^n z_n, z_0)` when `z_0` is fixed.
    pub terminal_distance_bound: f64,
}

pub fn chain_convergence<P, T, M, A>(
    map: &T,
    metric: &M,
    chain: &ChainCertificate<P>,
    alpha: &A,
    steps: usize,
    fixed_tolerance: f64,
) -> Result<ChainConvergence<P>>
where
    P: Clone,
    T: SelfMap<P> + ?Sized,
    M: Metric<P> + ?Sized,
    A: Alpha<P> + ?Sized,
{
    chain.validate(alpha)?;
    if chain.nodes.is_empty() {
        return Err(Error::arg("chain has no nodes"));
    }
    let mut orbits: Vec<Vec<P>> = chain.nodes.iter().map(|z| vec![z.clone()]).collect();
    for _ in 0..steps {
        for orbit in orbits.iter_mut() {
            let next = map.apply(orbit.last().expect("orbit is nonempty"))?;
            orbit.push(next);
        }
    }
    let link_gaps: Vec<Vec<f64>> =
        orbits.windows(2).map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| metric.distance(a, b)).collect()).collect();
    let anchor = &chain.nodes[0];
    let anchor_fixed = metric.distance(anchor, &map.apply(anchor)?) <= fixed_tolerance;
    let terminal: Vec<f64> = link_gaps.iter().map(|g| *g.last().expect("gap sequence is nonempty")).collect();
    Ok(ChainConvergence {
        orbits,
        link_gaps,
        anchor_fixed,
        terminal_gap_max: terminal.iter().copied().fold(0.0, f64::max),
        terminal_distance_bound: terminal.iter().sum(),
    })
}

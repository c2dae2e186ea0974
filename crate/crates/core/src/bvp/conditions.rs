//! Sample-level checks of the hypotheses on the source term `f`, the gauge
//! `phi` and the comparator `xi`. An empty violation list means no
//! violation among the supplied samples, nothing more.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::alpha::Alpha;
use crate::bvp::grid::GridFunction;
use crate::bvp::kernel::LIPSCHITZ_BOUND;
use crate::bvp::operator::IntegralOperator;
use crate::error::Result;
use crate::relation::BoolMatrix;
use crate::verify::{check_n_transitive, TransitivityReport};

/// Label carried by every report in this module.
pub const SAMPLE_LEVEL: &str = "sample-level";

/// Caveat attached to source-term checks.
pub const MEASURE_ZERO_CAVEAT: &str =
    "samples cannot distinguish a bound exceeded only on a measure-zero set of t from a genuine failure";

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A nondecreasing `phi : [0, inf) -> [0, inf)`, optionally with a witness
/// `eps -> delta(eps)` for the Meir-Keeler implication.
#[derive(Clone)]
pub struct GaugeFunction {
    eval: Fn1,
    delta_witness: Option<Fn1>,
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeFunction").field("delta_witness", &self.delta_witness.is_some()).finish()
    }
}

impl GaugeFunction {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), delta_witness: None }
    }

    pub fn with_delta(mut self, delta: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.delta_witness = Some(Arc::new(delta));
        self
    }

    /// `phi(u) = k u`; for `0 < k < 1` the witness is `delta(eps) = eps (1 - k) / k`.
    pub fn linear(k: f64) -> Self {
        let g = Self::new(move |u| k * u);
        if k > 0.0 && k < 1.0 {
            g.with_delta(move |eps| eps * (1.0 - k) / k)
        } else {
            g
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    pub fn has_witness(&self) -> bool {
        self.delta_witness.is_some()
    }
}

/// A comparator `xi : R^2 -> R`.
#[derive(Clone)]
pub struct ComparatorFunction {
    eval: Fn2,
}

impl fmt::Debug for ComparatorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ComparatorFunction")
    }
}

impl ComparatorFunction {
    pub fn new(eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval) }
    }

    /// `xi(a, b) = b - a`, for a start below its image.
    pub fn forward() -> Self {
        Self::new(|a, b| b - a)
    }

    /// `xi(a, b) = a - b`, for a start above its image.
    pub fn reverse() -> Self {
        Self::new(|a, b| a - b)
    }

    pub fn eval(&self, a: f64, b: f64) -> f64 {
        (self.eval)(a, b)
    }

    /// `inf_t xi(x(t), y(t)) >= 0` over grid nodes.
    pub fn holds_on(&self, x: &GridFunction, y: &GridFunction) -> bool {
        x.grid() == y.grid() && x.values().iter().zip(y.values()).all(|(a, b)| self.eval(*a, *b) >= 0.0)
    }
}

/// `alpha(x, y) = 1` when `xi(x(t), y(t)) >= 0` at every node, else 0.
#[derive(Debug, Clone)]
pub struct ComparatorAlpha(pub ComparatorFunction);

impl Alpha<GridFunction> for ComparatorAlpha {
    fn eval(&self, x: &GridFunction, y: &GridFunction) -> f64 {
        if self.0.holds_on(x, y) {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum K1Bound {
    /// `f(t, b) - f(t, a) < 0`
    Lower,
    /// `f(t, b) - f(t, a) > 9 sqrt(3) phi(b - a)`
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct K1Violation {
    pub sample: usize,
    pub bound: K1Bound,
    pub difference: f64,
    pub limit: f64,
}

/// `0 <= f(t, b) - f(t, a) <= 9 sqrt(3) phi(b - a)` on samples `(t, a, b)`.
/// Samples with `a > b` are checked with the arguments swapped.
pub fn check_k1(f: impl Fn(f64, f64) -> f64, phi: &GaugeFunction, samples: &[(f64, f64, f64)]) -> Vec<K1Violation> {
    let mut out = Vec::new();
    for (k, &(t, a, b)) in samples.iter().enumerate() {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let difference = f(t, b) - f(t, a);
        let limit = LIPSCHITZ_BOUND * phi.eval(b - a);
        if !(difference >= 0.0) {
            out.push(K1Violation { sample: k, bound: K1Bound::Lower, difference, limit: 0.0 });
        } else if difference > limit {
            out.push(K1Violation { sample: k, bound: K1Bound::Upper, difference, limit });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct J2Violation {
    pub sample: usize,
    pub difference: f64,
    pub limit: f64,
}

/// Samples `(t, a, b)` with `xi(a, b) >= 0` but `|f(t, a) - f(t, b)| > 9 sqrt(3) phi(|a - b|)`.
pub fn check_j2(
    f: impl Fn(f64, f64) -> f64,
    xi: &ComparatorFunction,
    phi: &GaugeFunction,
    samples: &[(f64, f64, f64)],
) -> Vec<J2Violation> {
    samples
        .iter()
        .enumerate()
        .filter(|(_, &(_, a, b))| xi.eval(a, b) >= 0.0)
        .filter_map(|(k, &(t, a, b))| {
            let difference = (f(t, a) - f(t, b)).abs();
            let limit = LIPSCHITZ_BOUND * phi.eval((a - b).abs());
            (!(difference <= limit)).then_some(J2Violation { sample: k, difference, limit })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeViolation {
    pub epsilon: f64,
    pub u: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeReport {
    pub scope: &'static str,
    pub nondecreasing: bool,
    /// Index into the sorted `u` samples where `phi` first decreases.
    pub first_decrease: Option<usize>,
    pub used_witness: bool,
    /// Per epsilon: the witness delta, or the largest sampled delta that
    /// worked; `None` on a violation.
    pub delta_estimates: Vec<Option<f64>>,
    pub violations: Vec<GaugeViolation>,
}

impl GaugeReport {
    pub fn passes(&self) -> bool {
        self.nondecreasing && self.violations.is_empty()
    }
}

/// Checks `phi` is nondecreasing on `u_samples` and that
/// `eps <= u < eps + delta(eps)` implies `phi(u) < eps`. Without a witness
/// the largest working delta is probed, with `u = eps` always tried.
pub fn gauge_mk_check(phi: &GaugeFunction, epsilon_grid: &[f64], u_samples: &[f64]) -> GaugeReport {
    let mut us: Vec<f64> = u_samples.iter().copied().filter(|u| u.is_finite() && *u >= 0.0).collect();
    us.sort_by(f64::total_cmp);
    us.dedup();
    let values: Vec<f64> = us.iter().map(|&u| phi.eval(u)).collect();
    let first_decrease = values.windows(2).position(|w| w[1] < w[0]).map(|i| i + 1);

    let mut delta_estimates = Vec::with_capacity(epsilon_grid.len());
    let mut violations = Vec::new();
    for &eps in epsilon_grid {
        match &phi.delta_witness {
            Some(delta) => {
                let d = delta(eps);
                let mut bad: Vec<GaugeViolation> = std::iter::once(eps)
                    .chain(us.iter().copied().filter(|&u| u >= eps && u < eps + d))
                    .filter_map(|u| {
                        let value = phi.eval(u);
                        (!(value < eps)).then_some(GaugeViolation { epsilon: eps, u, value })
                    })
                    .collect();
                if !(d > 0.0) {
                    bad.push(GaugeViolation { epsilon: eps, u: eps, value: d });
                }
                delta_estimates.push(bad.is_empty().then_some(d));
                violations.extend(bad);
            }
            None => {
                let mut window: Vec<f64> = us.iter().copied().filter(|&u| u > eps).collect();
                window.insert(0, eps);
                let umax = *window.last().expect("window holds eps");
                match window.iter().find(|&&u| !(phi.eval(u) < eps)) {
                    None => delta_estimates.push(Some(eps.max(umax - eps))),
                    Some(&u) if u > eps => delta_estimates.push(Some(u - eps)),
                    Some(&u) => {
                        delta_estimates.push(None);
                        violations.push(GaugeViolation { epsilon: eps, u, value: phi.eval(u) });
                    }
                }
            }
        }
    }
    GaugeReport {
        scope: SAMPLE_LEVEL,
        nondecreasing: first_decrease.is_none(),
        first_decrease,
        used_witness: phi.has_witness(),
        delta_estimates,
        violations,
    }
}

/// N-transitivity of `{(a, b) : xi(a, b) >= 0}` over sampled reals.
pub fn check_j1(xi: &ComparatorFunction, reals: &[f64], n: usize) -> TransitivityReport {
    let rel = BoolMatrix::from_fn(reals.len(), |i, j| xi.eval(reals[i], reals[j]) >= 0.0);
    check_n_transitive(&rel, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct J3Report {
    pub scope: &'static str,
    /// Candidate pairs `(i, j)` satisfying the premise.
    pub premises: usize,
    /// Pairs whose premise holds but whose images break it.
    pub violations: Vec<(usize, usize)>,
}

/// For candidate pairs with `xi(x, y) >= 0` at every node, checks the same
/// for `(Tx, Ty)`.
pub fn check_j3<F: Fn(f64, f64) -> f64>(
    xi: &ComparatorFunction,
    op: &IntegralOperator<F>,
    candidates: &[GridFunction],
) -> Result<J3Report> {
    let images = candidates.iter().map(|x| op.apply_to(x)).collect::<Result<Vec<_>>>()?;
    let mut premises = 0;
    let mut violations = Vec::new();
    for i in 0..candidates.len() {
        for j in 0..candidates.len() {
            if xi.holds_on(&candidates[i], &candidates[j]) {
                premises += 1;
                if !xi.holds_on(&images[i], &images[j]) {
                    violations.push((i, j));
                }
            }
        }
    }
    Ok(J3Report { scope: SAMPLE_LEVEL, premises, violations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct J4Report {
    pub scope: &'static str,
    /// Candidates `x0` with `xi(x0(t), (T x0)(t)) >= 0` at every node.
    pub admissible_starts: Vec<usize>,
}

impl J4Report {
    pub fn holds(&self) -> bool {
        !self.admissible_starts.is_empty()
    }
}

pub fn check_j4<F: Fn(f64, f64) -> f64>(
    xi: &ComparatorFunction,
    op: &IntegralOperator<F>,
    candidates: &[GridFunction],
) -> Result<J4Report> {
    let mut admissible_starts = Vec::new();
    for (k, x) in candidates.iter().enumerate() {
        if xi.holds_on(x, &op.apply_to(x)?) {
            admissible_starts.push(k);
        }
    }
    Ok(J4Report { scope: SAMPLE_LEVEL, admissible_starts })
}

/// How a pair of candidates was linked.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum J5Link {
    Direct,
    /// Through `z = max(x, y)`.
    MaxFunction,
    /// Through `z = min(x, y)`.
    MinFunction,
    /// Through the listed candidates.
    Candidates(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct J5Report {
    pub scope: &'static str,
    /// One entry per unordered candidate pair `(i, j)`, `i < j`.
    pub links: Vec<(usize, usize, Option<J5Link>)>,
}

impl J5Report {
    pub fn holds(&self) -> bool {
        self.links.iter().all(|l| l.2.is_some())
    }
}

/// Looks for a comparator chain between every two candidates: directly,
/// through the pointwise max or min, or through other candidates.
pub fn check_j5(xi: &ComparatorFunction, candidates: &[GridFunction]) -> Result<J5Report> {
    let n = candidates.len();
    let linked = |a: &GridFunction, b: &GridFunction| xi.holds_on(a, b) || xi.holds_on(b, a);
    let adjacency = BoolMatrix::from_fn(n, |i, j| i != j && linked(&candidates[i], &candidates[j]));
    let mut links = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (&candidates[i], &candidates[j]);
            let link = if adjacency.get(i, j) {
                Some(J5Link::Direct)
            } else if let Some(kind) = through(xi, x, y, &x.max_with(y)?, J5Link::MaxFunction) {
                Some(kind)
            } else if let Some(kind) = through(xi, x, y, &x.min_with(y)?, J5Link::MinFunction) {
                Some(kind)
            } else {
                bfs(&adjacency, i, j).map(J5Link::Candidates)
            };
            links.push((i, j, link));
        }
    }
    Ok(J5Report { scope: SAMPLE_LEVEL, links })
}

fn through(
    xi: &ComparatorFunction,
    x: &GridFunction,
    y: &GridFunction,
    z: &GridFunction,
    kind: J5Link,
) -> Option<J5Link> {
    let ok = |a: &GridFunction, b: &GridFunction| xi.holds_on(a, b) || xi.holds_on(b, a);
    (ok(x, z) && ok(z, y)).then_some(kind)
}

fn bfs(adjacency: &BoolMatrix, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = adjacency.len();
    let mut parent = vec![usize::MAX; n];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for (v, p) in parent.iter_mut().enumerate() {
            if adjacency.get(u, v) && *p == usize::MAX {
                *p = u;
                queue.push_back(v);
            }
        }
    }
    None
}

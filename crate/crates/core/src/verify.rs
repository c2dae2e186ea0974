//! Falsifiers for the contraction hypotheses on finite samples.
//!
//! Every check here can only refute: an empty violation list means "no
//! violation at sample resolution", never a proof.

use std::collections::VecDeque;

use serde::Serialize;

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::metric::{Metric, SampledSpace};
use crate::picard::IterationTrace;
use crate::relation::BoolMatrix;

/// Default cap on the number of distinct distances used as an epsilon grid.
pub const DEFAULT_EPSILON_CAP: usize = 64;

/// A sampled pair `(x_i, x_j)` with `alpha(x_i, x_j) * d(T x_i, T x_j) >= d(x_i, x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairViolation {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub weighted_image_distance: f64,
}

fn images<P, M, T>(space: &SampledSpace<P, M>, map: &T) -> Result<Vec<P>>
where
    M: Metric<P>,
    T: SelfMap<P> + ?Sized,
{
    space
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let image = map.apply(p).map_err(|e| Error::domain(format!("map fails at sample point {i}: {e}")))?;
            if space.metric().contains(&image) {
                Ok(image)
            } else {
                Err(Error::domain(format!("image of sample point {i} lies outside the metric domain")))
            }
        })
        .collect()
}

/// Every ordered pair `x != y` breaking `alpha(x, y) d(Tx, Ty) < d(x, y)`.
pub fn check_strict_contraction<P, M, T, A>(
    space: &SampledSpace<P, M>,
    map: &T,
    alpha: &A,
) -> Result<Vec<PairViolation>>
where
    M: Metric<P>,
    T: SelfMap<P> + ?Sized,
    A: Alpha<P> + ?Sized,
{
    let img = images(space, map)?;
    let metric = space.metric();
    let mut out = Vec::new();
    for i in 0..space.len() {
        for j in 0..space.len() {
            if i == j {
                continue;
            }
            let distance = space.distance(i, j);
            let weighted = alpha.eval(space.point(i), space.point(j)) * metric.distance(&img[i], &img[j]);
            if weighted >= distance {
                out.push(PairViolation { i, j, distance, weighted_image_distance: weighted });
            }
        }
    }
    Ok(out)
}

/// A pair refuting the Meir-Keeler implication at a given epsilon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MkViolation {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub weighted_image_distance: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MkProbeReport {
    pub sample_size: usize,
    pub epsilon_grid: Vec<f64>,
    /// Largest sampled delta for which the implication held; `None` where
    /// the probe found a violation.
    pub delta_estimates: Vec<Option<f64>>,
    pub violations: Vec<MkViolation>,
}

impl MkProbeReport {
    pub fn violated(&self) -> bool {
        !self.violations.is_empty()
    }

    /// Epsilons at which a violation was recorded, ascending.
    pub fn violated_epsilons(&self) -> Vec<f64> {
        self.epsilon_grid.iter().zip(&self.delta_estimates).filter(|(_, d)| d.is_none()).map(|(e, _)| *e).collect()
    }
}

/// Sorted distinct positive pairwise distances, thinned to at most `cap`
/// evenly spread values (smallest and largest kept).
pub fn default_epsilon_grid<P, M: Metric<P>>(space: &SampledSpace<P, M>, cap: usize) -> Vec<f64> {
    let mut d: Vec<f64> = Vec::new();
    for i in 0..space.len() {
        for j in i + 1..space.len() {
            let v = space.distance(i, j);
            if v > 0.0 && v.is_finite() {
                d.push(v);
            }
        }
    }
    d.sort_by(f64::total_cmp);
    d.dedup();
    thin(d, cap)
}

fn thin(values: Vec<f64>, cap: usize) -> Vec<f64> {
    if cap == 0 {
        return Vec::new();
    }
    if values.len() <= cap {
        return values;
    }
    if cap == 1 {
        return vec![values[0]];
    }
    let last = values.len() - 1;
    let mut picked: Vec<f64> = (0..cap).map(|k| values[k * last / (cap - 1)]).collect();
    picked.dedup();
    picked
}

struct ProbePair {
    i: usize,
    j: usize,
    distance: f64,
    weighted: f64,
}

/// Probes `eps <= d(x, y) < eps + delta  =>  alpha(x, y) d(Tx, Ty) < eps`.
///
/// For each epsilon the candidate deltas are `{d(x, y) - eps : d(x, y) > eps}`
/// together with `eps` itself. The reported estimate is the largest candidate
/// for which every sampled ordered pair in the window satisfies the
/// implication. When even the smallest candidate fails, the offending pairs
/// are recorded as violations.
pub fn probe_meir_keeler<P, M, T, A>(
    space: &SampledSpace<P, M>,
    map: &T,
    alpha: &A,
    epsilon_grid: &[f64],
) -> Result<MkProbeReport>
where
    M: Metric<P>,
    T: SelfMap<P> + ?Sized,
    A: Alpha<P> + ?Sized,
{
    if epsilon_grid.is_empty() {
        return Err(Error::arg("epsilon grid is empty"));
    }
    if epsilon_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::arg("epsilon grid must hold positive finite values"));
    }
    if epsilon_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("epsilon grid must be strictly increasing"));
    }

    let img = images(space, map)?;
    let metric = space.metric();
    let n = space.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairs.push(ProbePair {
                    i,
                    j,
                    distance: space.distance(i, j),
                    weighted: alpha.eval(space.point(i), space.point(j)) * metric.distance(&img[i], &img[j]),
                });
            }
        }
    }
    pairs.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    let max_distance = pairs.last().map_or(0.0, |p| p.distance);

    let mut delta_estimates = Vec::with_capacity(epsilon_grid.len());
    let mut violations = Vec::new();
    for &eps in epsilon_grid {
        let start = pairs.partition_point(|p| p.distance < eps);
        let window = &pairs[start..];
        let smallest = window.iter().find(|p| p.distance > eps).map_or(eps, |p| (p.distance - eps).min(eps));
        match window.iter().find(|p| p.weighted >= eps) {
            None => delta_estimates.push(Some(eps.max(max_distance - eps))),
            Some(bad) if bad.distance > eps => delta_estimates.push(Some(bad.distance - eps)),
            Some(_) => {
                delta_estimates.push(None);
                violations.extend(
                    window.iter().take_while(|p| p.distance < eps + smallest).filter(|p| p.weighted >= eps).map(|p| {
                        MkViolation {
                            i: p.i,
                            j: p.j,
                            distance: p.distance,
                            weighted_image_distance: p.weighted,
                            epsilon: eps,
                        }
                    }),
                );
            }
        }
    }
    violations.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)).then(a.epsilon.total_cmp(&b.epsilon)));

    Ok(MkProbeReport { sample_size: n, epsilon_grid: epsilon_grid.to_vec(), delta_estimates, violations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityViolation {
    /// Index into the supplied pair list.
    pub index: usize,
    pub alpha_pair: f64,
    pub alpha_image: f64,
}

/// Pairs with `alpha(x, y) >= 1` whose images have `alpha(Tx, Ty) < 1`.
pub fn check_admissible<P, T, A>(pairs: &[(P, P)], map: &T, alpha: &A) -> Result<Vec<AdmissibilityViolation>>
where
    T: SelfMap<P> + ?Sized,
    A: Alpha<P> + ?Sized,
{
    let mut out = Vec::new();
    for (index, (x, y)) in pairs.iter().enumerate() {
        let alpha_pair = alpha.eval(x, y);
        if alpha_pair < 1.0 {
            continue;
        }
        let alpha_image = alpha.eval(&map.apply(x)?, &map.apply(y)?);
        if alpha_image < 1.0 {
            out.push(AdmissibilityViolation { index, alpha_pair, alpha_image });
        }
    }
    Ok(out)
}

/// Every ordered pair of sample points, for use with [`check_admissible`].
pub fn all_pairs<P: Clone>(points: &[P]) -> Vec<(P, P)> {
    points.iter().flat_map(|x| points.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityReport {
    pub n: usize,
    pub passes: bool,
    /// Indices `x_0 .. x_{N+1}` with every link related but `(x_0, x_{N+1})` not.
    pub counterexample: Option<Vec<usize>>,
}

/// N-transitivity of a relation: every chain of `N + 1` related links has
/// related endpoints, i.e. `R^(N+1)` is contained in `R`.
pub fn check_n_transitive(rel: &BoolMatrix, n: usize) -> TransitivityReport {
    let size = rel.len();
    let mut powers = vec![BoolMatrix::identity(size)];
    for k in 1..=n + 1 {
        let next = powers[k - 1].compose(rel);
        let dead = next.is_zero();
        powers.push(next);
        if dead {
            return TransitivityReport { n, passes: true, counterexample: None };
        }
    }
    let top = &powers[n + 1];
    let offender =
        (0..size).flat_map(|i| (0..size).map(move |j| (i, j))).find(|&(i, j)| top.get(i, j) && !rel.get(i, j));
    let Some((first, last)) = offender else {
        return TransitivityReport { n, passes: true, counterexample: None };
    };

    let mut chain = vec![first];
    let mut cur = first;
    for step in 0..=n {
        let remaining = n - step;
        cur = (0..size)
            .find(|&m| rel.get(cur, m) && powers[remaining].get(m, last))
            .expect("a witness exists because the power relation holds");
        chain.push(cur);
    }
    TransitivityReport { n, passes: false, counterexample: Some(chain) }
}

/// Row form of [`check_n_transitive`]; fails on non-square input.
pub fn check_n_transitive_rows(rows: &[Vec<bool>], n: usize) -> Result<TransitivityReport> {
    Ok(check_n_transitive(&BoolMatrix::from_rows(rows)?, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkDirection {
    /// `alpha(z_{i-1}, z_i) >= 1`
    Forward,
    /// `alpha(z_i, z_{i-1}) >= 1`
    Backward,
    Both,
}

impl LinkDirection {
    fn of(forward: bool, backward: bool) -> Option<Self> {
        match (forward, backward) {
            (true, true) => Some(Self::Both),
            (true, false) => Some(Self::Forward),
            (false, true) => Some(Self::Backward),
            (false, false) => None,
        }
    }
}

/// A path `z_0, ..., z_n` whose consecutive points are comparable under the weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCertificate<P> {
    pub nodes: Vec<P>,
    pub directions: Vec<LinkDirection>,
}

impl<P> ChainCertificate<P> {
    pub fn from_nodes<A: Alpha<P> + ?Sized>(nodes: Vec<P>, alpha: &A) -> Result<Self> {
        let directions = nodes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                LinkDirection::of(alpha.admits(&w[0], &w[1]), alpha.admits(&w[1], &w[0]))
                    .ok_or_else(|| Error::arg(format!("link {} of the chain is not comparable", i + 1)))
            })
            .collect::<Result<_>>()?;
        Ok(Self { nodes, directions })
    }

    /// Order of the chain (number of links).
    pub fn order(&self) -> usize {
        self.directions.len()
    }

    /// Checks that every recorded direction holds under `alpha`.
    pub fn validate<A: Alpha<P> + ?Sized>(&self, alpha: &A) -> Result<()> {
        if self.directions.len() + 1 != self.nodes.len() {
            return Err(Error::arg("chain directions do not match its links"));
        }
        for (i, (w, dir)) in self.nodes.windows(2).zip(&self.directions).enumerate() {
            let fwd = alpha.admits(&w[0], &w[1]);
            let bwd = alpha.admits(&w[1], &w[0]);
            let ok = match dir {
                LinkDirection::Forward => fwd,
                LinkDirection::Backward => bwd,
                LinkDirection::Both => fwd && bwd,
            };
            if !ok {
                return Err(Error::arg(format!("link {} of the chain does not hold as recorded", i + 1)));
            }
        }
        Ok(())
    }
}

/// Components of the comparability graph of a sampled space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityReport {
    /// Component index of each sample point.
    pub component_of: Vec<usize>,
    /// Sample indices per component, in discovery order.
    pub components: Vec<Vec<usize>>,
    #[serde(skip)]
    admits: BoolMatrix,
}

impl ConnectivityReport {
    pub fn connected(&self) -> bool {
        self.components.len() <= 1
    }

    /// Shortest chain of sample indices from `from` to `to`, or `None` when
    /// they lie in different components.
    pub fn chain_indices(&self, from: usize, to: usize) -> Result<Option<Vec<usize>>> {
        let n = self.component_of.len();
        if from >= n || to >= n {
            return Err(Error::arg(format!("queried point outside the sample of {n} points")));
        }
        if self.component_of[from] != self.component_of[to] {
            return Ok(None);
        }
        let mut parent = vec![usize::MAX; n];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for (v, p) in parent.iter_mut().enumerate() {
                if *p == usize::MAX && (self.admits.get(u, v) || self.admits.get(v, u)) {
                    *p = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Ok(Some(path))
    }

    pub fn certificate<P: Clone, M>(
        &self,
        space: &SampledSpace<P, M>,
        from: usize,
        to: usize,
    ) -> Result<Option<ChainCertificate<P>>> {
        Ok(self.chain_indices(from, to)?.map(|path| {
            let directions = path
                .windows(2)
                .map(|w| {
                    LinkDirection::of(self.admits.get(w[0], w[1]), self.admits.get(w[1], w[0]))
                        .expect("breadth-first links are comparable")
                })
                .collect();
            ChainCertificate { nodes: path.iter().map(|&i| space.point(i).clone()).collect(), directions }
        }))
    }
}

/// Builds the undirected graph with an edge where `alpha >= 1` in either
/// direction and returns its connected components.
pub fn check_connected<P, M, A>(space: &SampledSpace<P, M>, alpha: &A) -> ConnectivityReport
where
    A: Alpha<P> + ?Sized,
{
    let n = space.len();
    let admits = BoolMatrix::from_fn(n, |i, j| alpha.admits(space.point(i), space.point(j)));
    let mut component_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for root in 0..n {
        if component_of[root] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![root];
        component_of[root] = id;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for (v, c) in component_of.iter_mut().enumerate() {
                if *c == usize::MAX && (admits.get(u, v) || admits.get(v, u)) {
                    *c = id;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        components.push(members);
    }
    ConnectivityReport { component_of, components, admits }
}

/// Trace indices `n` with `alpha(x_n, limit) >= 1`.
///
/// A diagnostic only: regularity concerns infinite orbits and cannot be
/// certified from a finite trace.
pub fn check_regular_on_trace<P, A: Alpha<P> + ?Sized>(trace: &IterationTrace<P>, limit: &P, alpha: &A) -> Vec<usize> {
    trace.iterates.iter().enumerate().filter(|(_, x)| alpha.admits(x, limit)).map(|(n, _)| n).collect()
}

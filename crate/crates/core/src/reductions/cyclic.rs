use serde::Serialize;

use crate::alpha::CyclicFamily;
use crate::error::{Error, Result};
use crate::map::{Fallible, SelfMap};
use crate::metric::Metric;
use crate::picard::{iterate_with_alpha, FixedPointResult, IterationConfig, IterationFailure, IterationTrace};

/// A point of `A_i` whose image misses `A_{i+1}`. Set indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclicViolation {
    pub sample: usize,
    pub set: usize,
}

/// Every sampled `x` in some `A_i` with `Tx` outside `A_{i+1}`.
pub fn check_cyclic_invariance<P, T>(map: &T, family: &CyclicFamily<P>, samples: &[P]) -> Result<Vec<CyclicViolation>>
where
    T: SelfMap<P> + ?Sized,
{
    let mut out = Vec::new();
    for (k, x) in samples.iter().enumerate() {
        let sets = family.sets_containing(x);
        if sets.is_empty() {
            return Err(Error::domain(format!("sample point {k} belongs to no set of the family")));
        }
        let image = map.apply(x)?;
        for i in sets {
            if !family.contains(family.next(i), &image) {
                out.push(CyclicViolation { sample: k, set: i });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CyclicResult<P> {
    pub result: FixedPointResult<P>,
    /// `membership[i]`: `A_{i+1}` holds the returned point or one of its next
    /// few orbit points lying within the iteration tolerance of it.
    pub membership: Vec<bool>,
    pub in_intersection: bool,
    /// Sets containing each iterate, zero-based.
    pub orbit_sets: Vec<Vec<usize>>,
    /// `x_n` lies in `A_{1+n}` (wrapping) for every recorded iterate.
    pub follows_rotation: bool,
    /// Orbit steps `x_n -> x_{n+1}` leaving the next set, as `(n, set)`.
    pub invariance_violations: Vec<CyclicViolation>,
}

impl<P> CyclicResult<P> {
    /// When the solve did not land in every set, the sample cannot tell
    /// failing hypotheses from a resolution that is too coarse.
    pub fn caveat(&self) -> Option<&'static str> {
        (!(self.result.converged() && self.in_intersection)).then_some(
            "no fixed point in the intersection was found: either the hypotheses fail or the resolution is too coarse",
        )
    }
}

/// Picard iteration for a map rotating a cyclic family, started in `A_1`.
///
/// Records the cyclic indicator along the orbit and reports where the
/// returned point and every iterate sit in the family.
pub fn solve_cyclic<P, T, M>(
    map: &T,
    metric: &M,
    family: &CyclicFamily<P>,
    cfg: &IterationConfig<P>,
) -> Result<CyclicResult<P>, IterationFailure<P>>
where
    P: Clone,
    T: SelfMap<P> + ?Sized,
    M: Metric<P>,
{
    if !family.contains(0, &cfg.start) {
        return Err(IterationFailure { error: Error::arg("start point is not in A_1"), trace: empty_trace(cfg) });
    }
    let guarded = Fallible(|x: &P| {
        let image = map.apply(x)?;
        if family.sets_containing(&image).is_empty() {
            return Err(Error::domain("orbit escaped the union of the family"));
        }
        Ok(image)
    });
    let alpha = family.alpha();
    let result = iterate_with_alpha(&guarded, metric, &alpha, cfg)?;

    let n_sets = family.len();
    // A set counts as reached when the point itself or one of its next
    // `n_sets` orbit points lies in it within the iteration tolerance.
    let mut witnesses = vec![result.point.clone()];
    for _ in 0..n_sets {
        match map.apply(witnesses.last().expect("nonempty")) {
            Ok(p) => witnesses.push(p),
            Err(_) => break,
        }
    }
    let membership: Vec<bool> = (0..n_sets)
        .map(|i| witnesses.iter().any(|w| family.contains(i, w) && metric.distance(&result.point, w) < cfg.tolerance))
        .collect();
    let orbit_sets: Vec<Vec<usize>> = result.trace.iterates.iter().map(|x| family.sets_containing(x)).collect();
    let follows_rotation = orbit_sets.iter().enumerate().all(|(n, sets)| sets.contains(&(n % n_sets)));
    let invariance_violations = result
        .trace
        .iterates
        .windows(2)
        .enumerate()
        .flat_map(|(n, w)| {
            orbit_sets[n]
                .iter()
                .filter(|&&i| !family.contains(family.next(i), &w[1]))
                .map(move |&i| CyclicViolation { sample: n, set: i })
                .collect::<Vec<_>>()
        })
        .collect();

    Ok(CyclicResult {
        in_intersection: membership.iter().all(|b| *b),
        membership,
        orbit_sets,
        follows_rotation,
        invariance_violations,
        result,
    })
}

fn empty_trace<P: Clone>(cfg: &IterationConfig<P>) -> IterationTrace<P> {
    IterationTrace {
        iterates: vec![cfg.start.clone()],
        residuals: Vec::new(),
        alpha_flags: Some(Vec::new()),
        cauchy_window_max: Vec::new(),
        status: crate::picard::Status::DomainError,
        tolerance: cfg.tolerance,
    }
}

//! Pair weights `alpha(x, y) >= 0` and the adapters that build them from
//! relations, orders and cyclic families of sets.
//!
//! A pair is *admitted* when `alpha(x, y) >= 1`. The comparison is exact:
//! weights are caller-supplied and no tolerance is applied.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relation::Relation;

/// A nonnegative weight on ordered pairs of points.
pub trait Alpha<P> {
    fn eval(&self, x: &P, y: &P) -> f64;

    fn admits(&self, x: &P, y: &P) -> bool {
        self.eval(x, y) >= 1.0
    }
}

impl<P, F: Fn(&P, &P) -> f64> Alpha<P> for F {
    fn eval(&self, x: &P, y: &P) -> f64 {
        self(x, y)
    }
}

impl<P> Alpha<P> for Box<dyn Alpha<P> + '_> {
    fn eval(&self, x: &P, y: &P) -> f64 {
        (**self).eval(x, y)
    }
}

/// Borrows a weight where an owned one is expected.
#[derive(Debug)]
pub struct AlphaRef<'a, A: ?Sized>(pub &'a A);

impl<A: ?Sized> Clone for AlphaRef<'_, A> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<A: ?Sized> Copy for AlphaRef<'_, A> {}

impl<P, A: Alpha<P> + ?Sized> Alpha<P> for AlphaRef<'_, A> {
    fn eval(&self, x: &P, y: &P) -> f64 {
        self.0.eval(x, y)
    }
}

/// The same weight on every pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantAlpha(pub f64);

impl<P> Alpha<P> for ConstantAlpha {
    fn eval(&self, _x: &P, _y: &P) -> f64 {
        self.0
    }
}

/// `e^(x - y)` when `x >= y`, otherwise 0.
///
/// Admits exactly the pairs with `x >= y`, so a map is admissible for this
/// weight if and only if it is nondecreasing.
pub fn alpha_exponential(x: f64, y: f64) -> f64 {
    if x >= y {
        (x - y).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExponentialAlpha;

impl Alpha<f64> for ExponentialAlpha {
    fn eval(&self, x: &f64, y: &f64) -> f64 {
        alpha_exponential(*x, *y)
    }
}

/// Indicator of a relation: 1 where it holds, 0 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationAlpha<R>(pub R);

impl<P, R: Relation<P>> Alpha<P> for RelationAlpha<R> {
    fn eval(&self, x: &P, y: &P) -> f64 {
        if self.0.holds(x, y) {
            1.0
        } else {
            0.0
        }
    }
}

pub fn alpha_from_relation<R>(rel: R) -> RelationAlpha<R> {
    RelationAlpha(rel)
}

/// Boundary tolerance used by [`Interval`] unless overridden.
pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Membership predicate for one set of a cyclic family.
pub trait MemberSet<P> {
    fn contains(&self, p: &P) -> bool;
}

impl<P, F: Fn(&P) -> bool> MemberSet<P> for F {
    fn contains(&self, p: &P) -> bool {
        self(p)
    }
}

/// Closed interval `[lo, hi]`, widened by a boundary tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, tolerance: DEFAULT_BOUNDARY_TOLERANCE }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

impl MemberSet<f64> for Interval {
    fn contains(&self, p: &f64) -> bool {
        *p >= self.lo - self.tolerance && *p <= self.hi + self.tolerance
    }
}

/// An ordered family `A_1, ..., A_N` with wrapping successor `A_{N+1} = A_1`.
pub struct CyclicFamily<P> {
    sets: Vec<Arc<dyn MemberSet<P> + Send + Sync>>,
}

impl<P> Clone for CyclicFamily<P> {
    fn clone(&self) -> Self {
        Self { sets: self.sets.clone() }
    }
}

impl<P> fmt::Debug for CyclicFamily<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclicFamily").field("len", &self.sets.len()).finish()
    }
}

impl<P> CyclicFamily<P> {
    pub fn new(sets: Vec<Arc<dyn MemberSet<P> + Send + Sync>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::arg("cyclic family needs at least one set"));
        }
        Ok(Self { sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Index of the set following `i` (zero-based, wrapping).
    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.sets.len()
    }

    pub fn contains(&self, i: usize, p: &P) -> bool {
        self.sets[i % self.sets.len()].contains(p)
    }

    /// Zero-based indices of every set containing `p`.
    pub fn sets_containing(&self, p: &P) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| self.sets[i].contains(p)).collect()
    }

    /// Checks that every set meets the sample and every sample point lies in
    /// some set.
    pub fn validate_on(&self, sample: &[P]) -> Result<()> {
        for i in 0..self.sets.len() {
            if !sample.iter().any(|p| self.sets[i].contains(p)) {
                return Err(Error::domain(format!("set A_{} is empty on the sample", i + 1)));
            }
        }
        if let Some(k) = sample.iter().position(|p| self.sets_containing(p).is_empty()) {
            return Err(Error::domain(format!("sample point {k} belongs to no set of the family")));
        }
        Ok(())
    }
}

impl CyclicFamily<f64> {
    pub fn intervals(bounds: &[(f64, f64)], tolerance: f64) -> Result<Self> {
        Self::new(
            bounds
                .iter()
                .map(|&(lo, hi)| {
                    Arc::new(Interval::new(lo, hi).with_tolerance(tolerance)) as Arc<dyn MemberSet<f64> + Send + Sync>
                })
                .collect(),
        )
    }
}

/// Indicator of `R = union of A_i x A_{i+1}`.
#[derive(Debug, Clone)]
pub struct CyclicAlpha<P> {
    family: CyclicFamily<P>,
}

impl<P> CyclicAlpha<P> {
    pub fn family(&self) -> &CyclicFamily<P> {
        &self.family
    }

    pub fn holds(&self, x: &P, y: &P) -> bool {
        (0..self.family.len()).any(|i| self.family.contains(i, x) && self.family.contains(self.family.next(i), y))
    }
}

impl<P> Alpha<P> for CyclicAlpha<P> {
    fn eval(&self, x: &P, y: &P) -> f64 {
        if self.holds(x, y) {
            1.0
        } else {
            0.0
        }
    }
}

/// Builds the cyclic indicator after checking the family against the sample
/// that is supposed to make up their union.
pub fn alpha_from_cyclic<P>(family: &CyclicFamily<P>, sample: &[P]) -> Result<CyclicAlpha<P>> {
    family.validate_on(sample)?;
    Ok(CyclicAlpha { family: family.clone() })
}

impl<P> CyclicFamily<P> {
    /// The cyclic indicator without a sample check.
    pub fn alpha(&self) -> CyclicAlpha<P> {
        CyclicAlpha { family: self.clone() }
    }
}

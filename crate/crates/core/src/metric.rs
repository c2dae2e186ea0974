//! Sampled metric spaces.
//!
//! A [`SampledSpace`] is a finite list of points together with a distance
//! supplied through the [`Metric`] trait. The built-in metrics cover the real
//! line, finite tables of distances, sup-distance on sampled vectors and the
//! averaged product distance used for coupled problems.

use std::fmt;

use crate::error::{Error, Result};

/// A distance on points of type `P`.
pub trait Metric<P> {
    fn distance(&self, a: &P, b: &P) -> f64;

    /// Whether the distance is defined at `p`. Maps producing points outside
    /// this set raise a domain error.
    fn contains(&self, _p: &P) -> bool {
        true
    }
}

impl<P, M: Metric<P> + ?Sized> Metric<P> for &M {
    fn distance(&self, a: &P, b: &P) -> f64 {
        (**self).distance(a, b)
    }

    fn contains(&self, p: &P) -> bool {
        (**self).contains(p)
    }
}

/// `|x - y|` on finite reals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RealLine;

impl Metric<f64> for RealLine {
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }

    fn contains(&self, p: &f64) -> bool {
        p.is_finite()
    }
}

/// Maximum absolute coordinate difference between equal-length vectors.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SupNorm;

impl Metric<Vec<f64>> for SupNorm {
    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        sup_distance(a, b)
    }

    fn contains(&self, p: &Vec<f64>) -> bool {
        p.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::NAN;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// A tabulated distance on point indices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from row-major entries. Fails when the table is not square.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::arg(format!("distance table has {} entries, expected {}", entries.len(), n * n)));
        }
        Ok(Self { n, entries })
    }

    /// Tabulates `metric` over `points`.
    pub fn from_points<P, M: Metric<P>>(points: &[P], metric: &M) -> Self {
        let n = points.len();
        let mut entries = Vec::with_capacity(n * n);
        for a in points {
            for b in points {
                entries.push(metric.distance(a, b));
            }
        }
        Self { n, entries }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

impl Metric<usize> for DistanceMatrix {
    fn distance(&self, a: &usize, b: &usize) -> f64 {
        if *a >= self.n || *b >= self.n {
            return f64::NAN;
        }
        self.entries[a * self.n + b]
    }

    fn contains(&self, p: &usize) -> bool {
        *p < self.n
    }
}

/// `D((x, y), (u, v)) = (d(x, u) + d(y, v)) / 2` on the pair space.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProductMetric<M>(pub M);

impl<P, M: Metric<P>> Metric<(P, P)> for ProductMetric<M> {
    fn distance(&self, a: &(P, P), b: &(P, P)) -> f64 {
        0.5 * (self.0.distance(&a.0, &b.0) + self.0.distance(&a.1, &b.1))
    }

    fn contains(&self, p: &(P, P)) -> bool {
        self.0.contains(&p.0) && self.0.contains(&p.1)
    }
}

/// Lifts a base distance to the pair space.
pub fn product_metric<M>(base: M) -> ProductMetric<M> {
    ProductMetric(base)
}

/// Relative slack allowed in the triangle inequality to absorb roundoff.
pub const TRIANGLE_SLACK: f64 = 1e-12;

/// A finite sample of points with a distance on them.
#[derive(Debug, Clone)]
pub struct SampledSpace<P, M> {
    points: Vec<P>,
    metric: M,
}

impl<P, M> SampledSpace<P, M> {
    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &P {
        &self.points[i]
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<P, M: Metric<P>> SampledSpace<P, M> {
    /// Builds the space after checking every metric axiom on the sample.
    ///
    /// This is cubic in the sample size. Use [`SampledSpace::trusted`] for
    /// large samples of a distance already known to be a metric.
    pub fn new(points: Vec<P>, metric: M) -> Result<Self> {
        let space = Self::trusted(points, metric)?;
        space.validate()?;
        Ok(space)
    }

    /// Builds the space, only checking that every point lies in the domain.
    pub fn trusted(points: Vec<P>, metric: M) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !metric.contains(p)) {
            return Err(Error::domain(format!("sample point {i} lies outside the metric domain")));
        }
        Ok(Self { points, metric })
    }

    /// Checks identity, positivity, symmetry and the triangle inequality on
    /// every sampled pair and triple, naming the first offender.
    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        let d = |i: usize, j: usize| self.metric.distance(&self.points[i], &self.points[j]);
        for i in 0..n {
            let dii = d(i, i);
            if dii != 0.0 {
                return Err(Error::MetricAxiom(format!("d(p{i}, p{i}) = {dii} is not zero")));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dij = d(i, j);
                if !(dij.is_finite() && dij >= 0.0) {
                    return Err(Error::MetricAxiom(format!("d(p{i}, p{j}) = {dij} is not a nonnegative real")));
                }
                if dij == 0.0 {
                    return Err(Error::MetricAxiom(format!("distinct points p{i} and p{j} are at distance 0")));
                }
                if dij != d(j, i) {
                    return Err(Error::MetricAxiom(format!("d(p{i}, p{j}) != d(p{j}, p{i})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = d(i, j);
                for k in 0..n {
                    let bound = dij + d(j, k);
                    let dik = d(i, k);
                    if dik > bound * (1.0 + TRIANGLE_SLACK) {
                        return Err(Error::MetricAxiom(format!(
                            "triangle inequality fails on (p{i}, p{j}, p{k}): {dik} > {bound}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(&self.points[i], &self.points[j])
    }
}

impl SampledSpace<f64, RealLine> {
    /// Real sample with the absolute-value distance. Duplicate points are rejected.
    pub fn real(points: Vec<f64>) -> Result<Self> {
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MetricAxiom(format!("point {} is sampled twice", w[0])));
        }
        Self::trusted(points, RealLine)
    }

    /// `count` evenly spaced points on `[lo, hi]`, endpoints included.
    pub fn real_uniform(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return Err(Error::arg("uniform sample needs count >= 2 and lo < hi"));
        }
        let step = (hi - lo) / (count - 1) as f64;
        Self::real((0..count).map(|i| lo + step * i as f64).collect())
    }
}

/// Compact textual form of a point, used in trace exports.
pub trait PointRepr {
    fn repr(&self) -> String;
}

impl PointRepr for f64 {
    fn repr(&self) -> String {
        format!("{self}")
    }
}

impl PointRepr for usize {
    fn repr(&self) -> String {
        format!("{self}")
    }
}

impl<A: PointRepr, B: PointRepr> PointRepr for (A, B) {
    fn repr(&self) -> String {
        format!("({};{})", self.0.repr(), self.1.repr())
    }
}

impl PointRepr for Vec<f64> {
    fn repr(&self) -> String {
        VecSummary(self).to_string()
    }
}

struct VecSummary<'a>(&'a [f64]);

impl fmt::Display for VecSummary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max = self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        write!(f, "vec[{}] sup={}", self.0.len(), max)
    }
}

pub(crate) fn vec_summary(values: &[f64]) -> String {
    VecSummary(values).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_metric_averages() {
        let d = product_metric(RealLine);
        assert_eq!(d.distance(&(0.0, 0.0), &(2.0, 4.0)), 3.0);
        assert_eq!(d.distance(&(1.5, -2.0), &(1.5, -2.0)), 0.0);
    }

    #[test]
    fn duplicate_real_points_rejected() {
        let err = SampledSpace::real(vec![0.0, 1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::MetricAxiom(_)));
    }

    #[test]
    fn non_finite_point_rejected() {
        assert!(matches!(SampledSpace::real(vec![0.0, f64::NAN]), Err(Error::Domain(_))));
    }

    #[test]
    fn asymmetric_table_names_pair() {
        let dm = DistanceMatrix::new(2, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        let err = SampledSpace::new(vec![0usize, 1], dm).unwrap_err();
        assert_eq!(err, Error::MetricAxiom("d(p0, p1) != d(p1, p0)".into()));
    }

    #[test]
    fn triangle_violation_names_triple() {
        // d(0,2) = 5 > d(0,1) + d(1,2) = 2
        let dm = DistanceMatrix::new(3, vec![0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0]).unwrap();
        let err = SampledSpace::new(vec![0usize, 1, 2], dm).unwrap_err();
        match err {
            Error::MetricAxiom(msg) => assert!(msg.contains("(p0, p1, p2)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_distance_between_distinct_points() {
        let dm = DistanceMatrix::new(2, vec![0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(SampledSpace::new(vec![0usize, 1], dm).is_err());
    }

    #[test]
    fn non_square_table_rejected() {
        assert!(DistanceMatrix::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn uniform_sample_endpoints() {
        let s = SampledSpace::real_uniform(0.0, 4.0, 5).unwrap();
        assert_eq!(s.points(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.distance(0, 4), 4.0);
    }
}

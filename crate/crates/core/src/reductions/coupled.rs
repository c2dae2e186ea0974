use serde::Serialize;

use crate::alpha::{Alpha, AlphaRef};
use crate::error::Result;
use crate::map::{CoupledMap, CoupledRef, SelfMap};
use crate::metric::{Metric, ProductMetric};
use crate::picard::{iterate, iterate_with_alpha, FixedPointResult, IterationConfig, IterationFailure};
use crate::relation::Relation;
use crate::verify::check_regular_on_trace;

/// `T(x, y) = (F(x, y), F(y, x))`. Fixed points of `T` are exactly the
/// coupled fixed points of `F`.
#[derive(Debug, Clone, Copy)]
pub struct LiftedMap<F>(pub F);

impl<P, F: CoupledMap<P>> SelfMap<(P, P)> for LiftedMap<F> {
    fn apply(&self, p: &(P, P)) -> Result<(P, P)> {
        Ok((self.0.apply(&p.0, &p.1), self.0.apply(&p.1, &p.0)))
    }
}

pub fn lift_coupled<F>(f: F) -> LiftedMap<F> {
    LiftedMap(f)
}

/// `beta((x, y), (u, v)) = min(alpha((x, y), (u, v)), alpha((v, u), (y, x)))`.
#[derive(Debug, Clone, Copy)]
pub struct BetaAlpha<A>(pub A);

impl<P: Clone, A: Alpha<(P, P)>> Alpha<(P, P)> for BetaAlpha<A> {
    fn eval(&self, a: &(P, P), b: &(P, P)) -> f64 {
        let swapped_b = (b.1.clone(), b.0.clone());
        let swapped_a = (a.1.clone(), a.0.clone());
        self.0.eval(a, b).min(self.0.eval(&swapped_b, &swapped_a))
    }
}

pub fn beta_from_alpha<A>(alpha: A) -> BetaAlpha<A> {
    BetaAlpha(alpha)
}

/// `alpha((x, y), (u, v)) = min(alpha0(x, u), alpha0(v, y))`.
#[derive(Debug, Clone, Copy)]
pub struct PairAlpha<A>(pub A);

impl<P, A: Alpha<P>> Alpha<(P, P)> for PairAlpha<A> {
    fn eval(&self, a: &(P, P), b: &(P, P)) -> f64 {
        self.0.eval(&a.0, &b.0).min(self.0.eval(&b.1, &a.1))
    }
}

pub fn alpha_from_alpha0<A>(alpha0: A) -> PairAlpha<A> {
    PairAlpha(alpha0)
}

/// `P(x, y) = x`, the identity for s-composition.
#[derive(Debug, Clone, Copy, Default)]
pub struct Projection;

impl<P: Clone> CoupledMap<P> for Projection {
    fn apply(&self, x: &P, _y: &P) -> P {
        x.clone()
    }
}

/// `(G * F)(x, y) = G(F(x, y), F(y, x))`.
#[derive(Debug, Clone, Copy)]
pub struct SComposed<G, F> {
    pub outer: G,
    pub inner: F,
}

impl<P, G: CoupledMap<P>, F: CoupledMap<P>> CoupledMap<P> for SComposed<G, F> {
    fn apply(&self, x: &P, y: &P) -> P {
        self.outer.apply(&self.inner.apply(x, y), &self.inner.apply(y, x))
    }
}

pub fn s_compose<G, F>(outer: G, inner: F) -> SComposed<G, F> {
    SComposed { outer, inner }
}

/// The s-power `F^0 = P`, `F^(n+1) = F * F^n`.
///
/// Built literally from nested s-compositions, so one evaluation costs
/// `2^n` calls of `F`. For large `n` iterate [`lift_coupled`] instead.
pub fn s_power<P, F>(f: F, n: usize) -> Box<dyn CoupledMap<P>>
where
    P: Clone + 'static,
    F: CoupledMap<P> + Clone + 'static,
{
    let mut acc: Box<dyn CoupledMap<P>> = Box::new(Projection);
    for _ in 0..n {
        acc = Box::new(s_compose(f.clone(), acc));
    }
    acc
}

/// Outcome of a coupled solve.
#[derive(Debug, Clone)]
pub struct CoupledResult<P> {
    pub x_star: P,
    pub y_star: P,
    /// `d(x*, y*) < 2 * tolerance`: both coordinates within tolerance of one point.
    pub diagonal: bool,
    /// `(d(x*, F(x*, y*)), d(y*, F(y*, x*)))`.
    pub coupled_residuals: (f64, f64),
    /// `beta(start, T start) >= 1`, when a weight was supplied. Reported, not enforced.
    pub start_condition: Option<bool>,
    /// Trace indices with `beta((x_n, y_n), (x*, y*)) >= 1` (diagnostic).
    pub regular_indices: Option<Vec<usize>>,
    pub result: FixedPointResult<(P, P)>,
}

/// Solves for a coupled fixed point by iterating the lift under the
/// averaged product distance. A pair-space weight, when given, is turned
/// into `beta` and recorded along the orbit.
pub fn solve_coupled<P, F, M>(
    f: &F,
    metric: &M,
    alpha: Option<&dyn Alpha<(P, P)>>,
    cfg: &IterationConfig<(P, P)>,
) -> Result<CoupledResult<P>, IterationFailure<(P, P)>>
where
    P: Clone,
    F: CoupledMap<P> + ?Sized,
    M: Metric<P>,
{
    let lifted = LiftedMap(CoupledRef(f));
    let product = ProductMetric(metric);
    let (result, start_condition, regular_indices) = match alpha {
        Some(a) => {
            let beta = BetaAlpha(AlphaRef(a));
            let start = &cfg.start;
            let image = lifted.apply(start).expect("lift is total");
            let cond = beta.admits(start, &image);
            let result = iterate_with_alpha(&lifted, &product, &beta, cfg)?;
            let limit = result.point.clone();
            let idx = check_regular_on_trace(&result.trace, &limit, &beta);
            (result, Some(cond), Some(idx))
        }
        None => (iterate(&lifted, &product, cfg)?, None, None),
    };
    let (x, y) = result.point.clone();
    let coupled_residuals = (metric.distance(&x, &f.apply(&x, &y)), metric.distance(&y, &f.apply(&y, &x)));
    let diagonal = metric.distance(&x, &y) < 2.0 * cfg.tolerance;
    Ok(CoupledResult { x_star: x, y_star: y, diagonal, coupled_residuals, start_condition, regular_indices, result })
}

/// Sample indices `(x1, x2, y1, y2)` breaking the mixed monotone property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MixedMonotoneViolation {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
}

/// Every sampled 4-tuple with `x1 <= x2`, `y1 >= y2` but
/// `F(x1, y1) <= F(x2, y2)` failing. `order` is assumed to be a partial order.
pub fn mixed_monotone_check<P, F, R>(f: &F, order: &R, samples: &[P]) -> Vec<MixedMonotoneViolation>
where
    F: CoupledMap<P> + ?Sized,
    R: Relation<P> + ?Sized,
{
    let n = samples.len();
    let table: Vec<P> = (0..n * n).map(|k| f.apply(&samples[k / n], &samples[k % n])).collect();
    let mut out = Vec::new();
    for x1 in 0..n {
        for x2 in 0..n {
            if !order.holds(&samples[x1], &samples[x2]) {
                continue;
            }
            for y1 in 0..n {
                for y2 in 0..n {
                    if !order.holds(&samples[y2], &samples[y1]) {
                        continue;
                    }
                    if !order.holds(&table[x1 * n + y1], &table[x2 * n + y2]) {
                        out.push(MixedMonotoneViolation { x1, x2, y1, y2 });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::{alpha_exponential, ConstantAlpha, ExponentialAlpha};
    use crate::metric::RealLine;
    use crate::picard::Status;
    use crate::relation::RealOrder;

    fn quarter(x: &f64, y: &f64) -> f64 {
        (x - y) / 4.0
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_coupled(quarter).apply(&(1.0, 3.0)).unwrap(), (-0.5, 0.5));
        assert_eq!(lift_coupled(|x: &f64, _: &f64| *x).apply(&(2.0, 7.0)).unwrap(), (2.0, 7.0));
        assert_eq!(lift_coupled(|_: &f64, _: &f64| 4.0).apply(&(2.0, 7.0)).unwrap(), (4.0, 4.0));
    }

    #[test]
    fn beta_examples() {
        let one = beta_from_alpha(ConstantAlpha(1.0));
        assert_eq!(one.eval(&(0.0, 1.0), &(2.0, 3.0)), 1.0);

        // alpha = 2 on ((x, y), (u, v)) = ((0, 1), (2, 3)), 0.5 on ((3, 2), (1, 0))
        let a = |p: &(f64, f64), _: &(f64, f64)| if p.0 == 0.0 { 2.0 } else { 0.5 };
        assert_eq!(beta_from_alpha(a).eval(&(0.0, 1.0), &(2.0, 3.0)), 0.5);
    }

    #[test]
    fn alpha0_examples() {
        assert_eq!(alpha_from_alpha0(ConstantAlpha(1.0)).eval(&(1.0, 2.0), &(3.0, 0.0)), 1.0);
        let a = alpha_from_alpha0(ExponentialAlpha);
        assert_eq!(a.eval(&(1.0, 2.0), &(3.0, 0.0)), 0.0);
        let e2 = alpha_exponential(3.0, 1.0);
        assert_eq!(a.eval(&(3.0, 2.0), &(1.0, 4.0)), e2);
        assert_eq!(e2, 2f64.exp());
    }

    #[test]
    fn s_power_two_is_eighth() {
        let f2 = s_power(quarter, 2);
        for (x, y) in [(1.0, 3.0), (8.0, 0.0), (-2.0, 6.0)] {
            assert_eq!(f2.apply(&x, &y), (x - y) / 8.0);
        }
        assert_eq!(s_power(quarter, 0).apply(&5.0, &1.0), 5.0);
    }

    #[test]
    fn coupled_quarter_difference() {
        let cfg = IterationConfig::new((1.0, 3.0));
        let r = solve_coupled(&quarter, &RealLine, Some(&ConstantAlpha(1.0)), &cfg).unwrap();
        assert!(r.result.converged());
        assert!(r.x_star.abs() < 1e-10 && r.y_star.abs() < 1e-10);
        assert!(r.diagonal);
        assert_eq!(r.start_condition, Some(true));
    }

    #[test]
    fn coupled_constant_one_step() {
        let r = solve_coupled(&|_: &f64, _: &f64| 2.0, &RealLine, None, &IterationConfig::new((0.0, 5.0))).unwrap();
        assert_eq!((r.x_star, r.y_star), (2.0, 2.0));
        assert_eq!(r.result.iterations, 1);
    }

    #[test]
    fn coupled_projection_every_pair_fixed() {
        let r = solve_coupled(&|x: &f64, _: &f64| *x, &RealLine, None, &IterationConfig::new((1.0, 2.0))).unwrap();
        assert_eq!(r.result.status(), Status::Converged);
        assert_eq!((r.x_star, r.y_star, r.result.residual), (1.0, 2.0, 0.0));
        assert!(!r.diagonal);
    }

    #[test]
    fn mixed_monotone_examples() {
        let s = [-1.0, 0.0, 0.5, 1.0];
        assert!(mixed_monotone_check(&quarter, &RealOrder, &s).is_empty());
        let v = mixed_monotone_check(&|_: &f64, y: &f64| *y, &RealOrder, &[0.0, 1.0]);
        assert!(v.contains(&MixedMonotoneViolation { x1: 0, x2: 0, y1: 1, y2: 0 }));
        assert!(mixed_monotone_check(&|_: &f64, _: &f64| 3.0, &RealOrder, &s).is_empty());
    }
}

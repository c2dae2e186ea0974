//! Weights induced by a partial order.

use serde::Serialize;

use crate::alpha::RelationAlpha;
use crate::reductions::PairAlpha;
use crate::relation::Relation;

/// Indicator of `x <= y`.
pub fn order_alpha<R>(order: R) -> RelationAlpha<R> {
    RelationAlpha(order)
}

/// Indicator of `x <= u` and `v <= y` on pairs.
pub fn coupled_order_alpha<R>(order: R) -> PairAlpha<RelationAlpha<R>> {
    PairAlpha(RelationAlpha(order))
}

/// First sampled failure of a partial-order axiom, by sample index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum OrderViolation {
    Reflexive { a: usize },
    Antisymmetric { a: usize, b: usize },
    Transitive { a: usize, b: usize, c: usize },
}

/// Checks reflexivity, antisymmetry and transitivity on a sample. Distinct
/// indices are assumed to be distinct points.
pub fn check_partial_order<P, R: Relation<P> + ?Sized>(order: &R, samples: &[P]) -> Option<OrderViolation> {
    let n = samples.len();
    let holds: Vec<bool> = (0..n * n).map(|k| order.holds(&samples[k / n], &samples[k % n])).collect();
    let h = |i: usize, j: usize| holds[i * n + j];
    if let Some(a) = (0..n).find(|&a| !h(a, a)) {
        return Some(OrderViolation::Reflexive { a });
    }
    for a in 0..n {
        for b in a + 1..n {
            if h(a, b) && h(b, a) {
                return Some(OrderViolation::Antisymmetric { a, b });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if !h(a, b) {
                continue;
            }
            if let Some(c) = (0..n).find(|&c| h(b, c) && !h(a, c)) {
                return Some(OrderViolation::Transitive { a, b, c });
            }
        }
    }
    None
}

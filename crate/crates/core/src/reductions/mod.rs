//! Structural reductions onto the single-map engine: coupled fixed points
//! through the pair-space lift, relation and order presets, and cyclic
//! families of sets.

mod coupled;
mod cyclic;
pub mod order;

pub use coupled::{
    alpha_from_alpha0, beta_from_alpha, lift_coupled, mixed_monotone_check, s_compose, s_power, solve_coupled,
    BetaAlpha, CoupledResult, LiftedMap, MixedMonotoneViolation, PairAlpha, Projection, SComposed,
};
pub use cyclic::{check_cyclic_invariance, solve_cyclic, CyclicResult, CyclicViolation};
pub use order::{check_partial_order, coupled_order_alpha, order_alpha, OrderViolation};

//! The third-order boundary value problem `x''' + f(t, x) = 0`,
//! `x(0) = x(1) = x''(0) = 0`, solved as the fixed point of its Green's
//! function integral operator on a uniform grid.

pub mod conditions;
mod grid;
mod kernel;
mod operator;
mod quadrature;
mod solve;

pub use grid::{GridFunction, UniformGrid, GRID_UNIFORMITY_TOLERANCE};
pub use kernel::{greens_kernel, row_integral_exact, LIPSCHITZ_BOUND, ROW_INTEGRAL_MAX};
pub use operator::{integral_operator, IntegralOperator};
pub use quadrature::{kernel_row_integral, simpson, simpson_rule, QuadratureSpec};
pub use solve::{solve_bvp, BvpReport, BvpSolution, DEFAULT_GRID_NODES};

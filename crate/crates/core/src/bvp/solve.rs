use serde::Serialize;

use crate::bvp::grid::{GridFunction, UniformGrid};
use crate::bvp::operator::IntegralOperator;
use crate::bvp::quadrature::QuadratureSpec;
use crate::error::Error;
use crate::metric::SupNorm;
use crate::picard::{iterate, FixedPointResult, IterationConfig, IterationFailure, Status};

/// Default node count of the solution grid.
pub const DEFAULT_GRID_NODES: usize = 201;

/// Diagnostics of a BVP solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvpReport {
    pub grid_nodes: usize,
    pub quadrature_subintervals: usize,
    pub tolerance: f64,
    pub status: Status,
    pub iterations: usize,
    /// `max_i |x_i - (Tx)_i|` at the returned solution.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub boundary_left: f64,
    pub boundary_right: f64,
    /// Second derivative at 0 from the one-sided stencil `(2, -5, 4, -1) / h^2`.
    pub second_derivative_at_zero: f64,
    /// Estimate of `sup_t |x(t)| - max_i |x_i|` for the final step, `max |second difference| / 8`.
    pub metric_resolution: f64,
    pub rate_estimate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub result: FixedPointResult<GridFunction>,
    pub report: BvpReport,
}

/// Picard iteration of the integral operator under the max-over-nodes
/// distance, started from `cfg.start`, which must live on `grid`.
pub fn solve_bvp<F>(
    f: F,
    grid: &UniformGrid,
    quad: &QuadratureSpec,
    cfg: &IterationConfig<GridFunction>,
) -> Result<BvpSolution, IterationFailure<GridFunction>>
where
    F: Fn(f64, f64) -> f64,
{
    let op = IntegralOperator::new(f, *grid, *quad);
    if cfg.start.grid() != grid {
        return Err(IterationFailure {
            error: Error::arg("start function is not on the solution grid"),
            trace: crate::picard::IterationTrace {
                iterates: vec![cfg.start.clone()],
                residuals: Vec::new(),
                alpha_flags: None,
                cauchy_window_max: Vec::new(),
                status: Status::DomainError,
                tolerance: cfg.tolerance,
            },
        });
    }
    let result = iterate(&op, &SupNorm, cfg)?;
    let report = report(&result, grid, quad, cfg.tolerance);
    Ok(BvpSolution { result, report })
}

fn report(
    result: &FixedPointResult<GridFunction>,
    grid: &UniformGrid,
    quad: &QuadratureSpec,
    tolerance: f64,
) -> BvpReport {
    let x = result.point.values();
    let h = grid.spacing();
    let second_derivative_at_zero =
        if x.len() >= 4 { (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / (h * h) } else { f64::NAN };
    let last_step: Vec<f64> = match result.trace.iterates.len() {
        0 | 1 => vec![0.0; x.len()],
        len => {
            let a = result.trace.iterates[len - 2].values();
            let b = result.trace.iterates[len - 1].values();
            a.iter().zip(b).map(|(p, q)| q - p).collect()
        }
    };
    let metric_resolution = last_step.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).fold(0.0, f64::max) / 8.0;
    BvpReport {
        grid_nodes: grid.node_count(),
        quadrature_subintervals: quad.subintervals(),
        tolerance,
        status: result.status(),
        iterations: result.iterations,
        residual: result.residual,
        residual_history: result.trace.residuals.clone(),
        boundary_left: x[0],
        boundary_right: x[x.len() - 1],
        second_derivative_at_zero,
        metric_resolution,
        rate_estimate: result.trace.rate_estimate(),
    }
}

use crate::bvp::grid::{GridFunction, UniformGrid};
use crate::bvp::kernel::kernel;
use crate::bvp::quadrature::QuadratureSpec;
use crate::error::{Error, Result};
use crate::map::SelfMap;

/// `(Tx)(t) = int_0^1 G(t, s) f(s, x(s)) ds` on a uniform grid.
///
/// Each row is a Simpson rule split at `s = t_i`. Off-grid quadrature nodes
/// take `f(s, x(s))` from a local cubic Lagrange interpolant of its node
/// values, so one application is a matrix-vector product with a weight
/// matrix fixed at construction.
pub struct IntegralOperator<F> {
    f: F,
    grid: UniformGrid,
    quad: QuadratureSpec,
    weights: Vec<f64>,
}

impl<F: Fn(f64, f64) -> f64> IntegralOperator<F> {
    pub fn new(f: F, grid: UniformGrid, quad: QuadratureSpec) -> Self {
        let n = grid.node_count();
        let mut weights = vec![0.0; n * n];
        // Rows 0 and m stay zero: G vanishes at t = 0 and t = 1.
        for i in 1..grid.intervals() {
            let t = grid.node(i);
            let row = &mut weights[i * n..(i + 1) * n];
            for (s, w) in quad.split_rule(t) {
                let g = w * kernel(t, s);
                for (j, l) in interpolation_weights(&grid, s) {
                    row[j] += g * l;
                }
            }
        }
        Self { f, grid, quad, weights }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Row-major `(m + 1) x (m + 1)` matrix `W` with `(Tx)_i = sum_j W_ij f(t_j, x_j)`.
    pub fn weight_matrix(&self) -> &[f64] {
        &self.weights
    }

    /// `f(t_j, x_j)` at every node; a non-finite value is a numeric error
    /// naming the node.
    pub fn source_values(&self, x: &GridFunction) -> Result<Vec<f64>> {
        if x.grid() != &self.grid {
            return Err(Error::arg("grid function does not match the operator grid"));
        }
        x.values()
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let t = self.grid.node(j);
                let fv = (self.f)(t, v);
                if fv.is_finite() {
                    Ok(fv)
                } else {
                    Err(Error::Numeric(format!("f(t, x(t)) = {fv} at node {j} (t = {t})")))
                }
            })
            .collect()
    }

    pub fn apply_to(&self, x: &GridFunction) -> Result<GridFunction> {
        let g = self.source_values(x)?;
        let n = self.grid.node_count();
        let mut out: Vec<f64> =
            self.weights.chunks(n).map(|row| row.iter().zip(&g).map(|(w, v)| w * v).sum()).collect();
        out[0] = 0.0;
        out[n - 1] = 0.0;
        GridFunction::new(self.grid, out)
    }
}

impl<F: Fn(f64, f64) -> f64> SelfMap<GridFunction> for IntegralOperator<F> {
    fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        self.apply_to(x)
    }
}

/// One application of the integral operator. Builds the weight matrix on
/// every call; hold an [`IntegralOperator`] to apply it repeatedly.
pub fn integral_operator(f: impl Fn(f64, f64) -> f64, x: &GridFunction, quad: &QuadratureSpec) -> Result<GridFunction> {
    IntegralOperator::new(f, *x.grid(), *quad).apply_to(x)
}

/// Lagrange weights at `s` over the (up to) four nodes nearest to it. A
/// point within roundoff of a node gets that node alone.
pub(crate) fn interpolation_weights(grid: &UniformGrid, s: f64) -> Vec<(usize, f64)> {
    let m = grid.intervals();
    let pos = s * m as f64;
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return vec![(nearest.clamp(0.0, m as f64) as usize, 1.0)];
    }
    let cell = (pos.floor() as usize).min(m - 1);
    let width = 4.min(m + 1);
    let start = cell.saturating_sub(1).min(m + 1 - width);
    let stencil: Vec<usize> = (start..start + width).collect();
    stencil
        .iter()
        .map(|&j| {
            let tj = grid.node(j);
            let l = stencil
                .iter()
                .filter(|&&k| k != j)
                .map(|&k| {
                    let tk = grid.node(k);
                    (s - tk) / (tj - tk)
                })
                .product::<f64>();
            (j, l)
        })
        .collect()
}

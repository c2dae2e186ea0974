//! Independent checks on the linear-source boundary value problem and on
//! the row-integral maximum, beyond what the grid itself resolves.

use mkfix::bvp::{kernel_row_integral, solve_bvp, GridFunction, QuadratureSpec, UniformGrid};
use mkfix::picard::IterationConfig;

const SQRT3_OVER_27: f64 = 0.064_150_029_909_958_41;

/// Plain Nystrom matrix of the kernel on the grid by the trapezoid rule. Its
/// spectral radius approximates that of the continuous integral operator.
fn trapezoid_kernel(m: usize) -> Vec<Vec<f64>> {
    let h = 1.0 / m as f64;
    let green = |t: f64, s: f64| if s <= t { (1.0 - t) * (t - s * s) / 2.0 } else { t * (1.0 - s).powi(2) / 2.0 };
    (0..=m)
        .map(|i| {
            (0..=m)
                .map(|j| {
                    let w = if j == 0 || j == m { h / 2.0 } else { h };
                    w * green(i as f64 * h, j as f64 * h)
                })
                .collect()
        })
        .collect()
}

fn spectral_radius(k: &[Vec<f64>]) -> f64 {
    let n = k.len();
    let mut v = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = k.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let norm = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        lambda = norm;
        v = w.into_iter().map(|x| x / norm).collect();
    }
    lambda
}

/// The residual ratio of the linear-source solve settles at the spectral
/// radius of `9 K`, which is well below the `9 sqrt(3) / 27` Lipschitz bound.
#[test]
fn residual_ratio_tracks_spectral_radius() {
    let rho = 9.0 * spectral_radius(&trapezoid_kernel(200));
    let grid = UniformGrid::with_nodes(201).unwrap();
    let quad = QuadratureSpec::new(200).unwrap();
    let sol = solve_bvp(|_, x| 9.0 * x + 1.0, &grid, &quad, &IterationConfig::new(GridFunction::zeros(grid))).unwrap();
    let r = &sol.result.trace.residuals;
    let ratios: Vec<f64> = r.windows(2).rev().take(5).map(|w| w[1] / w[0]).collect();
    let ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((ratio - rho).abs() < 0.01 * rho, "ratio {ratio}, 9 rho(K) = {rho}");
    assert!(ratio < 9.0 * SQRT3_OVER_27);
}

/// Golden-section search on the quadrature row integral recovers the
/// off-grid maximum at `t = 1/sqrt(3)`.
#[test]
fn refined_row_integral_maximum() {
    let quad = QuadratureSpec::new(200).unwrap();
    let f = |t: f64| kernel_row_integral(t, &quad).unwrap();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.5, 0.65);
    while b - a > 1e-10 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let t = (a + b) / 2.0;
    assert!((f(t) - SQRT3_OVER_27).abs() < 1e-12);
    assert!((t - 1.0 / 3f64.sqrt()).abs() < 1e-5);
}

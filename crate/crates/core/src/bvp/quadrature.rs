use serde::Serialize;

use crate::bvp::kernel::kernel;
use crate::error::{Error, Result};

/// Composite Simpson density: a panel of length `L` gets the smallest even
/// count of at least `L * subintervals` subintervals, and never fewer than 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    subintervals: usize,
}

impl QuadratureSpec {
    /// `subintervals` is the count over the whole of `[0, 1]` and must be even.
    pub fn new(subintervals: usize) -> Result<Self> {
        if subintervals < 2 || subintervals % 2 == 1 {
            return Err(Error::arg(format!("quadrature needs an even subinterval count >= 2, got {subintervals}")));
        }
        Ok(Self { subintervals })
    }

    pub fn subintervals(&self) -> usize {
        self.subintervals
    }

    /// Subinterval count for a panel of the given length; 0 for an empty panel.
    pub fn panel_count(&self, length: f64) -> usize {
        if length <= 0.0 {
            return 0;
        }
        let raw = (length * self.subintervals as f64 - 1e-9).ceil().max(2.0) as usize;
        raw + raw % 2
    }

    /// Simpson nodes and weights for `int_0^1 g(s) ds` split at `s = t`.
    pub fn split_rule(&self, t: f64) -> Vec<(f64, f64)> {
        let mut rule = Vec::new();
        for (a, b) in [(0.0, t), (t, 1.0)] {
            let n = self.panel_count(b - a);
            if n > 0 {
                rule.extend(simpson_rule(a, b, n).expect("panel count is even"));
            }
        }
        rule
    }
}

/// Nodes and weights of composite Simpson with `n` subintervals on `[a, b]`.
pub fn simpson_rule(a: f64, b: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::arg(format!("Simpson needs an even positive subinterval count, got {n}")));
    }
    let h = (b - a) / n as f64;
    Ok((0..=n)
        .map(|k| {
            let s = if k == n { b } else { a + h * k as f64 };
            let c = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (s, c * h / 3.0)
        })
        .collect())
}

pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<f64> {
    Ok(simpson_rule(a, b, n)?.into_iter().map(|(s, w)| w * f(s)).sum())
}

/// `int_0^1 G(t, s) ds` by Simpson split at the kernel seam `s = t`.
///
/// Both branches are quadratic in `s`, so the result is exact up to roundoff.
pub fn kernel_row_integral(t: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::arg(format!("row integral at t = {t} outside [0, 1]")));
    }
    Ok(quad.split_rule(t).into_iter().map(|(s, w)| w * kernel(t, s)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::kernel::{row_integral_exact, ROW_INTEGRAL_MAX};

    #[test]
    fn odd_counts_rejected() {
        assert!(matches!(QuadratureSpec::new(201), Err(Error::Argument(_))));
        assert!(QuadratureSpec::new(0).is_err());
        assert!(simpson(|s| s, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|s| s * s * s - 2.0 * s, 0.0, 2.0, 2).unwrap();
        assert!((v - 0.0).abs() < 1e-15);
    }

    #[test]
    fn panel_counts() {
        let q = QuadratureSpec::new(200).unwrap();
        assert_eq!(q.panel_count(0.0), 0);
        assert_eq!(q.panel_count(0.001), 2);
        assert_eq!(q.panel_count(0.5), 100);
        assert_eq!(q.panel_count(101.0 / 200.0), 102);
    }

    #[test]
    fn row_integral_values() {
        let q = QuadratureSpec::new(200).unwrap();
        assert_eq!(kernel_row_integral(0.0, &q).unwrap(), 0.0);
        assert!((kernel_row_integral(0.5, &q).unwrap() - 0.0625).abs() < 1e-15);
        let t = 1.0 / 3f64.sqrt();
        assert!((kernel_row_integral(t, &q).unwrap() - ROW_INTEGRAL_MAX).abs() < 1e-15);
        for k in 0..=37 {
            let t = k as f64 / 37.0;
            assert!((kernel_row_integral(t, &q).unwrap() - row_integral_exact(t)).abs() < 1e-15);
        }
    }
}

use crate::error::{Error, Result};

/// `sqrt(3) / 27`, the maximum over `[0, 1]` of `(t - t^3) / 6`, attained at `t = 1 / sqrt(3)`.
pub const ROW_INTEGRAL_MAX: f64 = 0.064_150_029_909_958_41;

/// `9 sqrt(3)`, the reciprocal of [`ROW_INTEGRAL_MAX`].
pub const LIPSCHITZ_BOUND: f64 = 15.588_457_268_119_896;

/// Green's function of `x''' + f = 0`, `x(0) = x(1) = x''(0) = 0`.
pub fn greens_kernel(t: f64, s: f64) -> Result<f64> {
    if !((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s)) {
        return Err(Error::arg(format!("kernel arguments ({t}, {s}) outside [0, 1]^2")));
    }
    Ok(kernel(t, s))
}

pub(crate) fn kernel(t: f64, s: f64) -> f64 {
    if s <= t {
        0.5 * (1.0 - t) * (t - s * s)
    } else {
        0.5 * t * (1.0 - s) * (1.0 - s)
    }
}

/// `(t - t^3) / 6`, the exact value of `int_0^1 G(t, s) ds`.
pub fn row_integral_exact(t: f64) -> f64 {
    (t - t * t * t) / 6.0
}

//! Central finite-difference validation helpers.
//!
//! Used by the test suites to verify that analytic Jacobians, gradients, and
//! Hessians supplied by the problem definitions agree with numeric
//! differentiation. Step sizes follow `h = 1e-6 * max(1, |x|)` per coordinate.

use nalgebra::{SMatrix, SVector};

fn step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Central-difference Jacobian of `f: R^N -> R^R` at `x`.
pub fn jacobian<const R: usize, const N: usize>(
    f: impl Fn(&SVector<f64, N>) -> SVector<f64, R>,
    x: &SVector<f64, N>,
) -> SMatrix<f64, R, N> {
    let mut jac = SMatrix::<f64, R, N>::zeros();
    for j in 0..N {
        let h = step(x[j]);
        let mut hi = *x;
        let mut lo = *x;
        hi[j] += h;
        lo[j] -= h;
        let col = (f(&hi) - f(&lo)) / (2.0 * h);
        jac.set_column(j, &col);
    }
    jac
}

/// Central-difference gradient of a scalar function at `x`.
pub fn gradient<const N: usize>(
    f: impl Fn(&SVector<f64, N>) -> f64,
    x: &SVector<f64, N>,
) -> SVector<f64, N> {
    let mut g = SVector::<f64, N>::zeros();
    for j in 0..N {
        let h = step(x[j]);
        let mut hi = *x;
        let mut lo = *x;
        hi[j] += h;
        lo[j] -= h;
        g[j] = (f(&hi) - f(&lo)) / (2.0 * h);
    }
    g
}

/// Relative error between an analytic matrix and its finite-difference
/// counterpart: `max|A - B| / max(1, max|A|)`.
pub fn relative_error<const R: usize, const C: usize>(
    analytic: &SMatrix<f64, R, C>,
    numeric: &SMatrix<f64, R, C>,
) -> f64 {
    let diff = (analytic - numeric).abs().max();
    let scale = analytic.abs().max().max(1.0);
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Vector2};

    #[test]
    fn jacobian_matches_analytic_on_polynomial() {
        let f = |x: &Vector2<f64>| Vector2::new(x[0] * x[0] + x[1], 3.0 * x[0] * x[1]);
        let x = Vector2::new(1.3, -0.7);
        let jac = jacobian(f, &x);
        let exact = Matrix2::new(2.0 * x[0], 1.0, 3.0 * x[1], 3.0 * x[0]);
        assert!(relative_error(&exact, &jac) < 1e-8);
    }

    #[test]
    fn gradient_matches_analytic_on_quadratic() {
        let f = |x: &Vector2<f64>| x[0] * x[0] + 2.0 * x[0] * x[1];
        let x = Vector2::new(0.4, 2.0);
        let g = gradient(f, &x);
        let exact = Vector2::new(2.0 * x[0] + 2.0 * x[1], 2.0 * x[0]);
        assert!((g - exact).abs().max() < 1e-8);
    }
}

//! Small numerical helpers shared by the solvers and the estimators.

use nalgebra::{DMatrix, DVector};

/// Result of a least-squares polynomial fit in one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    /// Coefficients, constant term first.
    pub coeffs: Vec<f64>,
    /// Standard errors of the coefficients.
    pub stderr: Vec<f64>,
    /// Root-mean-square residual.
    pub rms: f64,
}

impl PolyFit {
    pub fn intercept(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn slope(&self) -> f64 {
        self.coeffs.get(1).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }
}

/// Least-squares fit of `y = sum_k c_k u^k`, `k < terms`.
///
/// Returns `None` when there are fewer points than terms or the design
/// matrix is rank deficient.
pub fn poly_fit(u: &[f64], y: &[f64], terms: usize) -> Option<PolyFit> {
    assert_eq!(u.len(), y.len());
    let n = u.len();
    if terms == 0 || n < terms {
        return None;
    }
    // Scale the abscissa to [-1, 1]-ish for conditioning.
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let a = DMatrix::from_fn(n, terms, |i, k| (u[i] / scale).powi(k as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= smax * 1e-13 {
        return None;
    }
    let x = svd.solve(&b, 0.0).ok()?;
    let resid = &a * &x - &b;
    let rss = resid.norm_squared();
    let dof = n.saturating_sub(terms);
    let sigma2 = if dof > 0 { rss / dof as f64 } else { 0.0 };
    let ata = a.transpose() * &a;
    let cov = ata.try_inverse()?;
    let coeffs = (0..terms).map(|k| x[k] / scale.powi(k as i32)).collect();
    let stderr = (0..terms)
        .map(|k| (sigma2 * cov[(k, k)]).max(0.0).sqrt() / scale.powi(k as i32))
        .collect();
    Some(PolyFit {
        coeffs,
        stderr,
        rms: (rss / n as f64).sqrt(),
    })
}

/// Slope of the least-squares line through `(ln x, ln y)`.
///
/// Points with non-positive coordinates are skipped; `None` when fewer than
/// three remain.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    if lx.len() < 3 {
        return None;
    }
    poly_fit(&lx, &ly, 2).map(|f| f.slope())
}

/// Lagrange interpolation through `(xs, ys)` evaluated at `x`.
pub fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut total = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (k, &xk) in xs.iter().enumerate() {
            if k != i {
                w *= (x - xk) / (xi - xk);
            }
        }
        total += w * yi;
    }
    total
}

/// Cubic (four-point) interpolation on sorted samples, extrapolating from
/// the end stencils outside the sampled range.
pub fn cubic_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    assert!(n >= 1);
    if n <= 4 {
        return lagrange(xs, ys, x);
    }
    let p = xs.partition_point(|&v| v <= x);
    let lo = p.saturating_sub(2).min(n - 4);
    lagrange(&xs[lo..lo + 4], &ys[lo..lo + 4], x)
}

/// Value at `x0` of the least-squares line through the given points.
pub fn linear_extrapolate(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    match poly_fit(xs, ys, 2) {
        Some(f) => f.eval(x0),
        None => ys.iter().sum::<f64>() / ys.len() as f64,
    }
}

/// Median of a non-empty slice.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fit_recovers_exact_polynomial() {
        let u: Vec<f64> = (1..=8).map(|k| 1.0 / (100.0 + 10.0 * k as f64)).collect();
        let y: Vec<f64> = u.iter().map(|v| 0.3 - 2.0 * v + 5.0 * v * v).collect();
        let f = poly_fit(&u, &y, 3).unwrap();
        assert_abs_diff_eq!(f.intercept(), 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(f.slope(), -2.0, epsilon = 1e-7);
        assert!(f.stderr[0] < 1e-10);
    }

    #[test]
    fn fit_rejects_underdetermined() {
        assert!(poly_fit(&[1.0, 2.0], &[0.0, 1.0], 3).is_none());
        assert!(poly_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0], 2).is_none());
    }

    #[test]
    fn loglog_of_power_law() {
        let x = [8.0, 16.0, 32.0, 64.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-2.0)).collect();
        assert_abs_diff_eq!(loglog_slope(&x, &y).unwrap(), -2.0, epsilon = 1e-12);
        assert!(loglog_slope(&x[..2], &y[..2]).is_none());
    }

    #[test]
    fn cubic_is_exact_on_cubics() {
        let xs: Vec<f64> = (0..10).map(|i| 0.3 * i as f64).collect();
        let f = |x: f64| 1.0 - x + 0.5 * x * x - 0.25 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for &x in &[-0.2, 0.05, 1.37, 2.69, 3.0] {
            assert_abs_diff_eq!(cubic_interp(&xs, &ys, x), f(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn extrapolation_and_median() {
        assert_abs_diff_eq!(
            linear_extrapolate(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0], 0.0),
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}

//! Grid construction and simple regression helpers used by the verification
//! routines.

/// `n` logarithmically spaced points on `[a, b]`, inclusive. Requires
/// `0 < a < b` and `n >= 2`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` linearly spaced points on `[a, b]`, inclusive.
pub fn lin_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Secant slope between the first and last sample, useful when the
/// relationship is exactly linear and regression noise is unwanted.
pub fn endpoint_slope(x: &[f64], y: &[f64]) -> f64 {
    assert!(x.len() >= 2 && x.len() == y.len());
    (y[y.len() - 1] - y[0]) / (x[x.len() - 1] - x[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_grid_endpoints_and_monotone() {
        let g = log_grid(1e-2, 1e6, 33);
        assert_relative_eq!(g[0], 1e-2, max_relative = 1e-12);
        assert_relative_eq!(g[32], 1e6, max_relative = 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|&v| 3.25 * v - 1.5).collect();
        let (m, b) = linear_fit(&x, &y);
        assert_relative_eq!(m, 3.25, max_relative = 1e-12);
        assert_relative_eq!(b, -1.5, max_relative = 1e-10);
    }
}

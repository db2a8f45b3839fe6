//! Shared simple-regression kernel. Both the global exponential fit and the
//! rolling-window estimator go through [`fit_line`] so that a window spanning
//! the whole series reproduces the global slope bit for bit.

/// Slope and intercept of an ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Line {
    pub slope: f64,
    pub intercept: f64,
}

/// Two-pass (mean-centered) OLS of `ys` on `xs`.
///
/// Caller guarantees `xs.len() == ys.len() >= 2` and at least two distinct
/// `xs`, so the denominator is strictly positive.
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> Line {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(xs.len() >= 2);

    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }

    let slope = sxy / sxx;
    Line {
        slope,
        intercept: mean_y - slope * mean_x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let line = fit_line(&xs, &ys);
        assert!((line.slope - 2.5).abs() < 1e-12);
        assert!((line.intercept + 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_input_gives_zero_slope() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [4.0, 4.0, 4.0];
        let line = fit_line(&xs, &ys);
        assert_eq!(line.slope, 0.0);
        assert_eq!(line.intercept, 4.0);
    }
}

//! Mono-exponential growth fitting.
//!
//! The model is `value(t) = g0 * exp(lambda * t)`. Fitting is ordinary
//! least squares on `ln(value)` against `t` (the spreadsheet-trendline
//! convention), solved in closed form with mean-centered sums. The
//! per-year rate constant `lambda` converts to a compounding annual
//! growth fraction via `r = exp(lambda) - 1`.

use thiserror::Error;

use crate::ols;
use crate::series::AnnualSeries;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 2 observations to fit, got {0}")]
    TooFewPoints(usize),
    #[error("growth fraction must exceed -1, got {0}")]
    RateOutOfRange(f64),
}

/// Result of a log-linear exponential fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    /// Per-year rate constant (slope of `ln(value)` vs `t`).
    pub lambda: f64,
    /// Fitted value at `t = 0` (`exp` of the OLS intercept).
    pub g0: f64,
    /// Coefficient of determination of the OLS fit on the log scale.
    pub r2_log: f64,
    /// `1 - SSR/SST` on the original scale against the fitted curve.
    /// Can go negative for badly shaped data.
    pub r2_linear: f64,
    /// Number of points fitted.
    pub n: usize,
}

impl ExpFit {
    /// Evaluate the fitted curve: `g0 * exp(lambda * t)`.
    /// At `t = 0` this returns `g0` exactly.
    pub fn predict(&self, t: f64) -> f64 {
        self.g0 * (self.lambda * t).exp()
    }

    /// Annual growth fraction equivalent to this fit's rate constant.
    pub fn rate(&self) -> f64 {
        lambda_to_rate(self.lambda)
    }
}

/// Closed-form OLS fit of `ln(value) = intercept + lambda * t`.
///
/// Deterministic for identical input. A constant series short-circuits to
/// `lambda = 0`, `g0 = value` with both R² equal to 1 (zero residual,
/// zero variance convention).
pub fn fit_exponential(series: &AnnualSeries) -> Result<ExpFit, FitError> {
    let obs = series.observations();
    let n = obs.len();
    if n < 2 {
        return Err(FitError::TooFewPoints(n));
    }

    // All-equal values make both SST terms vanish; the OLS solution is the
    // constant itself, so report it exactly instead of round-tripping
    // through exp(ln(v)).
    if obs.iter().all(|o| o.value == obs[0].value) {
        return Ok(ExpFit {
            lambda: 0.0,
            g0: obs[0].value,
            r2_log: 1.0,
            r2_linear: 1.0,
            n,
        });
    }

    let ts: Vec<f64> = obs.iter().map(|o| f64::from(o.t)).collect();
    let ln_ys: Vec<f64> = obs.iter().map(|o| o.value.ln()).collect();
    let line = ols::fit_line(&ts, &ln_ys);
    let g0 = line.intercept.exp();

    let r2_log = r_squared(&ln_ys, |i| line.intercept + line.slope * ts[i]);
    let fitted = |i: usize| g0 * (line.slope * ts[i]).exp();
    let r2_linear = {
        let ys: Vec<f64> = obs.iter().map(|o| o.value).collect();
        r_squared(&ys, fitted)
    };

    Ok(ExpFit {
        lambda: line.slope,
        g0,
        // Algebra keeps the log-scale R² in [0, 1]; rounding can nudge it out.
        r2_log: r2_log.clamp(0.0, 1.0),
        r2_linear: r2_linear.min(1.0),
        n,
    })
}

fn r_squared(ys: &[f64], fitted: impl Fn(usize) -> f64) -> f64 {
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let mut ssr = 0.0;
    let mut sst = 0.0;
    for (i, &y) in ys.iter().enumerate() {
        let e = y - fitted(i);
        ssr += e * e;
        let d = y - mean;
        sst += d * d;
    }
    if sst == 0.0 {
        return if ssr == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ssr / sst
}

/// Convert a per-year rate constant to the annual growth fraction
/// `r = exp(lambda) - 1`.
pub fn lambda_to_rate(lambda: f64) -> f64 {
    lambda.exp_m1()
}

/// Convert an annual growth fraction to the per-year rate constant
/// `lambda = ln(1 + r)`. Requires `r > -1`.
pub fn rate_to_lambda(rate: f64) -> Result<f64, FitError> {
    if rate <= -1.0 {
        return Err(FitError::RateOutOfRange(rate));
    }
    Ok(rate.ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_series(first_year: i32, n: usize, g0: f64, lambda: f64) -> AnnualSeries {
        let pairs: Vec<(i32, f64)> = (0..n)
            .map(|t| (first_year + t as i32, g0 * (lambda * t as f64).exp()))
            .collect();
        AnnualSeries::from_year_values("synthetic", &pairs).unwrap()
    }

    /// Independent oracle: raw-moment OLS plus squared Pearson correlation,
    /// kept deliberately different from the mean-centered production path.
    fn oracle_ols(ts: &[f64], ys: &[f64]) -> (f64, f64, f64) {
        let n = ts.len() as f64;
        let sx: f64 = ts.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = ts.iter().map(|x| x * x).sum();
        let syy: f64 = ys.iter().map(|y| y * y).sum();
        let sxy: f64 = ts.iter().zip(ys).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        let corr = (n * sxy - sx * sy)
            / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        (slope, intercept, corr * corr)
    }

    #[test]
    fn recovers_noiseless_exponential() {
        let s = exp_series(2001, 19, 3.0, 0.05);
        let fit = fit_exponential(&s).unwrap();
        assert!((fit.lambda - 0.05).abs() < 1e-9, "lambda = {}", fit.lambda);
        assert!((fit.g0 - 3.0).abs() < 1e-9, "g0 = {}", fit.g0);
        assert!((fit.r2_log - 1.0).abs() < 1e-12);
        assert!((fit.r2_linear - 1.0).abs() < 1e-12);
        assert_eq!(fit.n, 19);

        // Cross-check slope and intercept against the raw-moment oracle.
        let ts: Vec<f64> = s.observations().iter().map(|o| f64::from(o.t)).collect();
        let ln_ys: Vec<f64> = s.observations().iter().map(|o| o.value.ln()).collect();
        let (slope, intercept, r2) = oracle_ols(&ts, &ln_ys);
        assert!((fit.lambda - slope).abs() < 1e-12);
        assert!((fit.g0 - intercept.exp()).abs() < 1e-9);
        assert!((fit.r2_log - r2).abs() < 1e-9);
    }

    #[test]
    fn constant_series_uses_zero_variance_convention() {
        let pairs: Vec<(i32, f64)> = (0..=10).map(|t| (2000 + t, 5.0)).collect();
        let s = AnnualSeries::from_year_values("flat", &pairs).unwrap();
        let fit = fit_exponential(&s).unwrap();
        assert_eq!(fit.lambda, 0.0);
        assert_eq!(fit.g0, 5.0);
        assert_eq!(fit.r2_log, 1.0);
        assert_eq!(fit.r2_linear, 1.0);
    }

    #[test]
    fn unit_rate_exponential() {
        let e = std::f64::consts::E;
        let pairs = [(2000, 1.0), (2001, e), (2002, e * e), (2003, e * e * e)];
        let s = AnnualSeries::from_year_values("e", &pairs).unwrap();
        let fit = fit_exponential(&s).unwrap();
        assert!((fit.lambda - 1.0).abs() < 1e-12);
        assert!((fit.g0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_errors() {
        let pairs = [(2000, 1.0)];
        let s = AnnualSeries::from_year_values("one", &pairs).unwrap();
        assert_eq!(fit_exponential(&s).unwrap_err(), FitError::TooFewPoints(1));
    }

    #[test]
    fn predict_at_zero_returns_g0_exactly() {
        let fit = ExpFit {
            lambda: 0.0555,
            g0: 7.5805,
            r2_log: 1.0,
            r2_linear: 1.0,
            n: 19,
        };
        assert_eq!(fit.predict(0.0), 7.5805);
    }

    #[test]
    fn predict_flat_and_growing() {
        let flat = ExpFit {
            lambda: 0.0,
            g0: 5.0,
            r2_log: 1.0,
            r2_linear: 1.0,
            n: 3,
        };
        assert_eq!(flat.predict(7.0), 5.0);
        assert_eq!(flat.predict(-3.0), 5.0);

        let grow = ExpFit {
            lambda: 0.05,
            g0: 3.0,
            r2_log: 1.0,
            r2_linear: 1.0,
            n: 3,
        };
        assert!((grow.predict(10.0) - 3.0 * 0.5f64.exp()).abs() < 1e-12);
        assert!((grow.predict(10.0) - 4.946163812100385).abs() < 1e-9);
    }

    #[test]
    fn rate_conversions_match_closed_forms() {
        assert_eq!(lambda_to_rate(0.0), 0.0);
        assert!((lambda_to_rate(0.0555) - 0.0571).abs() < 5e-5);
        assert!((lambda_to_rate(0.0878) - 0.0918).abs() < 5e-5);
        assert_eq!(rate_to_lambda(0.0).unwrap(), 0.0);
        assert!((rate_to_lambda(0.0571).unwrap() - 0.0555).abs() < 1e-4);
    }

    #[test]
    fn rate_to_lambda_rejects_at_or_below_minus_one() {
        assert!(rate_to_lambda(-1.0).is_err());
        assert!(rate_to_lambda(-1.5).is_err());
    }

    #[test]
    fn conversion_round_trip() {
        for &r in &[-0.5, 0.1, 2.0] {
            let back = lambda_to_rate(rate_to_lambda(r).unwrap());
            assert!((back - r).abs() < 1e-15, "round trip {r} -> {back}");
        }
    }
}

//! Windowed local rate-constant estimation.
//!
//! `rolling_lambda` slides a fixed window over the series and fits the
//! log-linear slope inside each window, giving the local "velocity" of the
//! growth process as a function of time. First differences of the local
//! slopes give its "acceleration". Windows are independent, so with the
//! `parallel` feature they are evaluated on the rayon thread pool;
//! [`rolling_lambda_seq`] is the single-threaded path and produces bitwise
//! identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::ols;
use crate::series::AnnualSeries;

#[derive(Debug, Error, PartialEq)]
pub enum RollingError {
    #[error("window {window} out of range (need 2 <= window <= {n})")]
    WindowOutOfRange { window: usize, n: usize },
}

/// Local slope of `ln(value)` at the center of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityPoint {
    /// Midpoint of the window, `(t_first + t_last) / 2`; half-years occur
    /// for even windows.
    pub t_center: f64,
    /// OLS slope of `ln(value)` vs `t` within the window, per year.
    pub local_lambda: f64,
}

/// First difference of consecutive local slopes, per year squared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelPoint {
    pub t_mid: f64,
    pub dlambda_dt: f64,
}

/// Windowed local-lambda sequence plus its finite-difference derivative.
///
/// For an `n`-point series and window `w`: `points.len() == n - w + 1`
/// and `accel.len() == points.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingVelocity {
    pub window: usize,
    pub points: Vec<VelocityPoint>,
    pub accel: Vec<AccelPoint>,
}

/// Rolling local-lambda estimation; parallel over windows when the
/// `parallel` feature is enabled.
pub fn rolling_lambda(series: &AnnualSeries, window: usize) -> Result<RollingVelocity, RollingError> {
    let (ts, ln_ys) = validate(series, window)?;
    let count = ts.len() - window + 1;

    #[cfg(feature = "parallel")]
    let points: Vec<VelocityPoint> = (0..count)
        .into_par_iter()
        .map(|i| window_point(&ts, &ln_ys, i, window))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let points: Vec<VelocityPoint> = (0..count)
        .map(|i| window_point(&ts, &ln_ys, i, window))
        .collect();

    Ok(assemble(window, points))
}

/// Single-threaded reference path; identical results to [`rolling_lambda`].
pub fn rolling_lambda_seq(
    series: &AnnualSeries,
    window: usize,
) -> Result<RollingVelocity, RollingError> {
    let (ts, ln_ys) = validate(series, window)?;
    let count = ts.len() - window + 1;
    let points: Vec<VelocityPoint> = (0..count)
        .map(|i| window_point(&ts, &ln_ys, i, window))
        .collect();
    Ok(assemble(window, points))
}

fn validate(series: &AnnualSeries, window: usize) -> Result<(Vec<f64>, Vec<f64>), RollingError> {
    let n = series.len();
    if window < 2 || window > n {
        return Err(RollingError::WindowOutOfRange { window, n });
    }
    let ts = series.observations().iter().map(|o| f64::from(o.t)).collect();
    let ln_ys = series.observations().iter().map(|o| o.value.ln()).collect();
    Ok((ts, ln_ys))
}

fn window_point(ts: &[f64], ln_ys: &[f64], start: usize, window: usize) -> VelocityPoint {
    let end = start + window;
    let line = ols::fit_line(&ts[start..end], &ln_ys[start..end]);
    VelocityPoint {
        t_center: (ts[start] + ts[end - 1]) / 2.0,
        local_lambda: line.slope,
    }
}

fn assemble(window: usize, points: Vec<VelocityPoint>) -> RollingVelocity {
    let accel = points
        .windows(2)
        .map(|pair| AccelPoint {
            t_mid: (pair[0].t_center + pair[1].t_center) / 2.0,
            dlambda_dt: (pair[1].local_lambda - pair[0].local_lambda)
                / (pair[1].t_center - pair[0].t_center),
        })
        .collect();
    RollingVelocity {
        window,
        points,
        accel,
    }
}

//! Growth analysis for annual time series: mono-exponential fitting,
//! entropy lines (`lambda * t`) and their sign-combination algebra,
//! rolling-window velocity/acceleration, and manifest-driven dataset
//! acquisition with a local cache.
//!
//! The crate is pure value semantics throughout; the only side effects
//! live in [`datasource`] (filesystem cache, optional HTTP). With the
//! default `parallel` feature, rolling windows and manifest entries are
//! evaluated on the rayon thread pool; without it everything runs
//! sequentially with identical results.

pub mod datasource;
pub mod entropy;
pub mod expfit;
pub mod rolling;
pub mod series;

mod ols;

pub use entropy::{enumerate_hypotheses, EntropyLine, HypothesisResult, Sign};
pub use expfit::{fit_exponential, lambda_to_rate, rate_to_lambda, ExpFit};
pub use rolling::{rolling_lambda, rolling_lambda_seq, RollingVelocity};
pub use series::{align, AnnualSeries};

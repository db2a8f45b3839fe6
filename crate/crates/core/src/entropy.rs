//! Entropy lines and their algebra.
//!
//! A fitted exponential `g0 * exp(lambda * t)` induces the entropy line
//! `t -> lambda * t`, normalized to 0 at the reference year (`g0` is
//! deliberately discarded). Lines add and subtract through their slopes,
//! which turns multiplicative/divisive relations between the original
//! series into linear sign combinations. [`enumerate_hypotheses`]
//! exhaustively scores every such combination of a small component set
//! against a target line, ranking by the absolute residual slope.

use thiserror::Error;

use crate::expfit::ExpFit;

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("empty term list")]
    EmptyTerms,
    #[error("empty component list")]
    EmptyComponents,
    #[error("at most 4 components supported for exhaustive enumeration, got {0}")]
    TooManyComponents(usize),
    #[error("velocity ratio is undefined for a zero-slope combination")]
    ZeroSlopeCombination,
}

/// Per-component sign in a combination. `Zero` drops the component,
/// letting the enumeration discover that it is irrelevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Minus, Sign::Zero, Sign::Plus];

    pub fn factor(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Zero => 0.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Plus => "+",
        }
    }
}

/// A labeled linear entropy function `t -> lambda * t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyLine {
    pub label: String,
    pub lambda: f64,
}

impl EntropyLine {
    pub fn new(label: impl Into<String>, lambda: f64) -> Self {
        Self {
            label: label.into(),
            lambda,
        }
    }

    /// Entropy value at time `t`; exactly 0 at `t = 0`.
    pub fn value_at(&self, t: f64) -> f64 {
        self.lambda * t
    }
}

/// The entropy line of a fit: slope `lambda`, intercept 0.
pub fn entropy_line(fit: &ExpFit, label: impl Into<String>) -> EntropyLine {
    EntropyLine::new(label, fit.lambda)
}

/// Signed sum of entropy lines: `lambda_out = sum(sign_i * lambda_i)`.
///
/// The label concatenates the operand labels with their signs; `Zero`
/// terms contribute nothing and are omitted from the label.
pub fn combine(terms: &[(Sign, &EntropyLine)]) -> Result<EntropyLine, EntropyError> {
    if terms.is_empty() {
        return Err(EntropyError::EmptyTerms);
    }
    let mut lambda = 0.0;
    let mut label = String::new();
    for &(sign, line) in terms {
        lambda += sign.factor() * line.lambda;
        match sign {
            Sign::Zero => {}
            Sign::Plus => {
                if label.is_empty() {
                    label.push_str(&line.label);
                } else {
                    label.push_str(&format!(" + {}", line.label));
                }
            }
            Sign::Minus => {
                if label.is_empty() {
                    label.push_str(&format!("-{}", line.label));
                } else {
                    label.push_str(&format!(" - {}", line.label));
                }
            }
        }
    }
    if label.is_empty() {
        label.push('0');
    }
    Ok(EntropyLine::new(label, lambda))
}

/// Residual slope `lambda_target - lambda_combo`: the per-year constant
/// that, multiplied by `t`, closes the gap between a combination and the
/// target line.
pub fn residual_constant(target: &EntropyLine, combo: &EntropyLine) -> f64 {
    target.lambda - combo.lambda
}

/// `lambda_target / lambda_combo`, the fraction of the combination's
/// growth velocity realized by the target. Undefined for a zero-slope
/// combination.
pub fn velocity_ratio(target: &EntropyLine, combo: &EntropyLine) -> Result<f64, EntropyError> {
    if combo.lambda == 0.0 {
        return Err(EntropyError::ZeroSlopeCombination);
    }
    Ok(target.lambda / combo.lambda)
}

/// One scored sign combination of the component lines.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisResult {
    /// Label of the target line.
    pub target: String,
    /// One sign per component, in component order; never all `Zero`.
    pub signs: Vec<Sign>,
    /// `sum(sign_i * lambda_i)` over the components.
    pub combined_lambda: f64,
    /// `lambda_target - combined_lambda`.
    pub delta: f64,
    /// `lambda_target / combined_lambda`; `None` when the combination
    /// has zero slope.
    pub velocity_ratio: Option<f64>,
}

impl HypothesisResult {
    /// Ranking key: magnitude of the residual slope.
    pub fn abs_delta(&self) -> f64 {
        self.delta.abs()
    }

    /// Number of components actually used.
    pub fn support(&self) -> usize {
        self.signs.iter().filter(|s| **s != Sign::Zero).count()
    }
}

/// Score every sign vector in `{-1, 0, +1}^k` except all-zero against the
/// target, sorted ascending by `|delta|`, ties broken by fewer nonzero
/// signs, then by lexicographic sign vector.
///
/// The enumeration is the brute force: with `k <= 4` there are at most 80
/// vectors.
pub fn enumerate_hypotheses(
    target: &EntropyLine,
    components: &[EntropyLine],
) -> Result<Vec<HypothesisResult>, EntropyError> {
    let k = components.len();
    if k == 0 {
        return Err(EntropyError::EmptyComponents);
    }
    if k > 4 {
        return Err(EntropyError::TooManyComponents(k));
    }

    let total = 3usize.pow(k as u32);
    let mut results = Vec::with_capacity(total - 1);
    for code in 0..total {
        let signs = decode_signs(code, k);
        if signs.iter().all(|s| *s == Sign::Zero) {
            continue;
        }
        let combined_lambda = signs
            .iter()
            .zip(components)
            .map(|(s, c)| s.factor() * c.lambda)
            .sum::<f64>();
        let delta = target.lambda - combined_lambda;
        let velocity_ratio = if combined_lambda == 0.0 {
            None
        } else {
            Some(target.lambda / combined_lambda)
        };
        results.push(HypothesisResult {
            target: target.label.clone(),
            signs,
            combined_lambda,
            delta,
            velocity_ratio,
        });
    }

    results.sort_by(|a, b| {
        a.abs_delta()
            .total_cmp(&b.abs_delta())
            .then_with(|| a.support().cmp(&b.support()))
            .then_with(|| a.signs.cmp(&b.signs))
    });
    Ok(results)
}

/// Base-3 digits of `code`, most significant digit = first component, so
/// ascending `code` enumerates sign vectors in lexicographic order.
fn decode_signs(code: usize, k: usize) -> Vec<Sign> {
    let mut signs = vec![Sign::Zero; k];
    let mut rest = code;
    for i in (0..k).rev() {
        signs[i] = Sign::ALL[rest % 3];
        rest /= 3;
    }
    signs
}

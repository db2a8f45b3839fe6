//! Table/CSV rendering. Every number printed here is a pure formatting of
//! a value computed by the library; nothing is recomputed at render time.

use entrovel_core::entropy::{HypothesisResult, Sign};
use entrovel_core::expfit::ExpFit;

/// Fixed-point rendering with `dp` decimals, rounding half away from zero.
/// Never prints a negative zero.
pub fn fixed(x: f64, dp: usize) -> String {
    let scale = 10f64.powi(dp as i32);
    let scaled = (x * scale).round();
    if !scaled.is_finite() || scaled.abs() >= 9e15 {
        return format!("{x:.dp$}");
    }
    let int = scaled as i64;
    if int == 0 {
        return if dp == 0 {
            "0".to_string()
        } else {
            format!("0.{:0dp$}", 0)
        };
    }
    let sign = if int < 0 { "-" } else { "" };
    let mag = int.unsigned_abs();
    if dp == 0 {
        return format!("{sign}{mag}");
    }
    let base = 10u64.pow(dp as u32);
    format!("{sign}{}.{:0dp$}", mag / base, mag % base)
}

/// Fraction as a percentage with 1 decimal: `0.057069` -> `"5.7%"`.
pub fn pct1(fraction: f64) -> String {
    format!("{}%", fixed(fraction * 100.0, 1))
}

/// Fraction as a whole percentage: `0.8939` -> `"89%"`.
pub fn pct0(fraction: f64) -> String {
    format!("{}%", fixed(fraction * 100.0, 0))
}

/// Rate constants are rendered at 4 decimals throughout.
pub fn lambda4(lambda: f64) -> String {
    fixed(lambda, 4)
}

/// High-precision fixed rendering for the machine-readable CSV output.
pub fn precise(x: f64) -> String {
    fixed(x, 10)
}

/// Column-aligned plain-text table. The last column is never padded, so
/// lines carry no trailing whitespace.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: Vec<S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: Vec<S>) {
        let cells: Vec<String> = cells.into_iter().map(Into::into).collect();
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let cols = self.headers.len();
        let mut widths = vec![0usize; cols];
        for (i, h) in self.headers.iter().enumerate() {
            widths[i] = h.chars().count();
        }
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let emit = |cells: &[String], out: &mut String| {
            for (i, cell) in cells.iter().enumerate() {
                if i + 1 == cols {
                    out.push_str(cell);
                } else {
                    out.push_str(cell);
                    for _ in cell.chars().count()..widths[i] + 2 {
                        out.push(' ');
                    }
                }
            }
            out.push('\n');
        };
        emit(&self.headers, &mut out);
        for row in &self.rows {
            emit(row, &mut out);
        }
        out
    }
}

/// Minimal CSV writer with RFC-style quoting where needed.
pub fn csv_line(fields: &[String]) -> String {
    let mut out = String::new();
    for (i, field) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if field.contains(',') || field.contains('"') || field.contains('\n') {
            out.push('"');
            out.push_str(&field.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(field);
        }
    }
    out.push('\n');
    out
}

/// One fitted series: id, the fit, and its precomputed growth fraction.
#[derive(Debug, Clone)]
pub struct FitSummary {
    pub id: String,
    pub fit: ExpFit,
    pub rate: f64,
}

/// Everything a hypothesis/compare report renders: fits, rendered entropy
/// equations, ranked hypothesis rows, figure descriptors.
#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub fits: Vec<FitSummary>,
    pub entropy_equations: Vec<String>,
    pub hypotheses: Vec<HypothesisRow>,
    pub figures: Vec<FigureSpec>,
}

/// One ranked hypothesis plus its precomputed derived values.
#[derive(Debug, Clone)]
pub struct HypothesisRow {
    pub result: HypothesisResult,
    /// Human form of the sign vector, e.g. `money - gdp`.
    pub combination: String,
    /// `exp(delta) - 1`: the residual as a multiplicative annual factor.
    pub delta_rate: f64,
    /// Paper-style equation for this row.
    pub equation: String,
}

/// Descriptor for one line of an overlay figure.
#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub label: String,
    pub lambda: f64,
    /// Rendered dashed because an earlier line has the same slope.
    pub dashed: bool,
}

/// `Info Ent (money) = 0.0555 × t`
pub fn entropy_equation(label: &str, lambda: f64) -> String {
    format!("Info Ent ({label}) = {} × t", lambda4(lambda))
}

/// `Info Ent (sp500) = Info Ent (money) - Info Ent (gdp) ± 0.0000 = 0.0358 × t`
pub fn hypothesis_equation(
    target_label: &str,
    target_lambda: f64,
    signs: &[Sign],
    component_labels: &[String],
    delta: f64,
) -> String {
    let mut rhs = String::new();
    for (sign, label) in signs.iter().zip(component_labels) {
        match sign {
            Sign::Zero => {}
            Sign::Plus => {
                if rhs.is_empty() {
                    rhs.push_str(&format!("Info Ent ({label})"));
                } else {
                    rhs.push_str(&format!(" + Info Ent ({label})"));
                }
            }
            Sign::Minus => {
                if rhs.is_empty() {
                    rhs.push_str(&format!("-Info Ent ({label})"));
                } else {
                    rhs.push_str(&format!(" - Info Ent ({label})"));
                }
            }
        }
    }
    let magnitude = lambda4(delta.abs());
    let constant = if lambda4(delta) == "0.0000" {
        format!("± {magnitude}")
    } else if delta < 0.0 {
        format!("- {magnitude}")
    } else {
        format!("+ {magnitude}")
    };
    format!(
        "Info Ent ({target_label}) = {rhs} {constant} = {} × t",
        lambda4(target_lambda)
    )
}

/// `money - gdp` from a sign vector; omitted components do not appear.
pub fn combination_label(signs: &[Sign], component_labels: &[String]) -> String {
    let mut out = String::new();
    for (sign, label) in signs.iter().zip(component_labels) {
        match sign {
            Sign::Zero => {}
            Sign::Plus => {
                if out.is_empty() {
                    out.push_str(label);
                } else {
                    out.push_str(&format!(" + {label}"));
                }
            }
            Sign::Minus => {
                if out.is_empty() {
                    out.push_str(&format!("-{label}"));
                } else {
                    out.push_str(&format!(" - {label}"));
                }
            }
        }
    }
    out
}

/// Compact sign-vector spelling for CSV output: one of `+-0` per component.
pub fn signs_code(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.symbol()).collect::<Vec<_>>().join("")
}

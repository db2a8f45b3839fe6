//! Minimal deterministic SVG figures: fixed 800x500 canvas, fixed margins,
//! fixed palette. No plotting library; the output is plain shapes, so
//! golden files stay byte-stable.

use entrovel_core::expfit::ExpFit;
use entrovel_core::rolling::RollingVelocity;
use entrovel_core::series::AnnualSeries;

use crate::render::{fixed, FigureSpec};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// Mapping from data coordinates to pixels within a plot rectangle.
/// `x_px` is strictly increasing and `y_px` strictly decreasing in the
/// data, and every value inside the data window lands inside the plot.
struct Axes {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    log_y: bool,
    top: f64,
    bottom: f64,
}

impl Axes {
    fn new(xs: &[f64], ys: &[f64], log_y: bool, top: f64, bottom: f64) -> Self {
        let (mut x_min, mut x_max) = min_max(xs);
        let (mut y_min, mut y_max) = min_max(ys);
        if log_y {
            y_min = y_min.log10();
            y_max = y_max.log10();
        }
        pad(&mut x_min, &mut x_max);
        pad(&mut y_min, &mut y_max);
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
            log_y,
            top,
            bottom,
        }
    }

    fn x_px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y_px(&self, y: f64) -> f64 {
        let y = if self.log_y { y.log10() } else { y };
        self.bottom - (y - self.y_min) / (self.y_max - self.y_min) * (self.bottom - self.top)
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// 5% headroom on each side; degenerate (flat) ranges get a unit of slack.
fn pad(lo: &mut f64, hi: &mut f64) {
    let span = *hi - *lo;
    if span <= 0.0 {
        *lo -= 0.5;
        *hi += 0.5;
    } else {
        *lo -= 0.05 * span;
        *hi += 0.05 * span;
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a >= 1000.0 {
        fixed(v, 0)
    } else if a >= 10.0 {
        fixed(v, 1)
    } else {
        fixed(v, 3)
    }
}

struct Svg {
    body: String,
}

impl Svg {
    fn new() -> Self {
        let mut body = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        body.push_str("<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n");
        Self { body }
    }

    fn title(&mut self, text: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
            px(MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0),
            escape(text)
        ));
    }

    fn frame(&mut self, axes: &Axes, x_label: &str, y_label: &str) {
        let left = MARGIN_LEFT;
        let right = WIDTH - MARGIN_RIGHT;
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\"/>\n",
            px(left),
            px(axes.top),
            px(right - left),
            px(axes.bottom - axes.top)
        ));
        // 5 evenly spaced ticks per axis
        for i in 0..5 {
            let frac = i as f64 / 4.0;
            let xv = axes.x_min + frac * (axes.x_max - axes.x_min);
            let xp = axes.x_px(xv);
            self.body.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n",
                px(xp),
                px(axes.bottom),
                px(axes.bottom + 5.0)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                px(xp),
                px(axes.bottom + 18.0),
                fmt_tick(xv)
            ));

            let yv = axes.y_min + frac * (axes.y_max - axes.y_min);
            let yp = axes.bottom - frac * (axes.bottom - axes.top);
            self.body.push_str(&format!(
                "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#000000\"/>\n",
                px(yp),
                px(left - 5.0),
                px(left)
            ));
            let label = if axes.log_y {
                fmt_tick(10f64.powf(yv))
            } else {
                fmt_tick(yv)
            };
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                px(left - 8.0),
                px(yp + 4.0),
                label
            ));
        }
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            px(left + (right - left) / 2.0),
            px(axes.bottom + 38.0),
            escape(x_label)
        ));
        self.body.push_str(&format!(
            "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            px((axes.top + axes.bottom) / 2.0),
            px((axes.top + axes.bottom) / 2.0),
            escape(y_label)
        ));
    }

    fn polyline(&mut self, points: &[(f64, f64)], color: &str, dashed: bool) {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", px(x), px(y)))
            .collect();
        let dash = if dashed {
            " stroke-dasharray=\"6,4\""
        } else {
            ""
        };
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>\n",
            coords.join(" ")
        ));
    }

    fn circles(&mut self, points: &[(f64, f64)], color: &str) {
        for &(x, y) in points {
            self.body.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                px(x),
                px(y)
            ));
        }
    }

    fn legend(&mut self, entries: &[(String, &str, bool)]) {
        let x = WIDTH - MARGIN_RIGHT + 12.0;
        for (i, (label, color, dashed)) in entries.iter().enumerate() {
            let y = MARGIN_TOP + 18.0 + 20.0 * i as f64;
            let dash = if *dashed {
                " stroke-dasharray=\"6,4\""
            } else {
                ""
            };
            self.body.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>\n",
                px(x),
                px(y),
                px(x + 24.0),
                px(y)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                px(x + 30.0),
                px(y + 4.0),
                escape(label)
            ));
        }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Observed points plus the fitted curve; semilog when `scale` is `Log`.
pub fn fit_figure(series: &AnnualSeries, fit: &ExpFit, scale: Scale) -> String {
    let xs: Vec<f64> = series.observations().iter().map(|o| f64::from(o.t)).collect();
    let observed: Vec<f64> = series.observations().iter().map(|o| o.value).collect();

    // Sample the curve densely; include the curve values in the y-domain so
    // it also stays inside the plot.
    let t_first = xs[0];
    let t_last = xs[xs.len() - 1];
    let steps = 200;
    let curve: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let t = t_first + (t_last - t_first) * i as f64 / steps as f64;
            (t, fit.predict(t))
        })
        .collect();
    let mut all_y = observed.clone();
    all_y.extend(curve.iter().map(|&(_, v)| v));

    let axes = Axes::new(
        &xs,
        &all_y,
        scale == Scale::Log,
        MARGIN_TOP,
        HEIGHT - MARGIN_BOTTOM,
    );
    let mut svg = Svg::new();
    svg.title(&format!("{} — exponential fit", series.name()));
    svg.frame(
        &axes,
        &format!("t (years since {})", series.reference_year()),
        if scale == Scale::Log { "value (log scale)" } else { "value" },
    );
    let curve_px: Vec<(f64, f64)> = curve
        .iter()
        .map(|&(t, v)| (axes.x_px(t), axes.y_px(v)))
        .collect();
    svg.polyline(&curve_px, PALETTE[1], false);
    let obs_px: Vec<(f64, f64)> = xs
        .iter()
        .zip(&observed)
        .map(|(&t, &v)| (axes.x_px(t), axes.y_px(v)))
        .collect();
    svg.circles(&obs_px, PALETTE[0]);
    svg.legend(&[
        ("observed".to_string(), PALETTE[0], false),
        ("fitted".to_string(), PALETTE[1], false),
    ]);
    svg.finish()
}

/// Entropy lines `lambda * t` over `t in [0, t_max]`; lines that coincide
/// with an earlier one are dashed so both stay visible.
pub fn overlay_figure(lines: &[FigureSpec], t_max: f64) -> String {
    let xs = [0.0, t_max];
    let mut ys: Vec<f64> = vec![0.0];
    ys.extend(lines.iter().map(|l| l.lambda * t_max));

    let axes = Axes::new(&xs, &ys, false, MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    let mut svg = Svg::new();
    svg.title("entropy lines");
    svg.frame(&axes, "t (years)", "information entropy");
    let mut legend: Vec<(String, &str, bool)> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts = [
            (axes.x_px(0.0), axes.y_px(0.0)),
            (axes.x_px(t_max), axes.y_px(line.lambda * t_max)),
        ];
        svg.polyline(&pts, color, line.dashed);
        legend.push((format!("{} ({})", line.label, fixed(line.lambda, 4)), color, line.dashed));
    }
    svg.legend(&legend);
    svg.finish()
}

/// Two stacked panels: local lambda over window centers, and its first
/// difference.
pub fn rolling_figure(name: &str, rv: &RollingVelocity) -> String {
    let mid = HEIGHT / 2.0;
    let mut svg = Svg::new();
    svg.title(&format!("{name} — rolling velocity (window {})", rv.window));

    let vx: Vec<f64> = rv.points.iter().map(|p| p.t_center).collect();
    let vy: Vec<f64> = rv.points.iter().map(|p| p.local_lambda).collect();
    let top_axes = Axes::new(&vx, &vy, false, MARGIN_TOP, mid - 20.0);
    svg.frame(&top_axes, "", "local lambda");
    let pts: Vec<(f64, f64)> = vx
        .iter()
        .zip(&vy)
        .map(|(&x, &y)| (top_axes.x_px(x), top_axes.y_px(y)))
        .collect();
    svg.polyline(&pts, PALETTE[0], false);
    svg.circles(&pts, PALETTE[0]);

    if !rv.accel.is_empty() {
        let ax: Vec<f64> = rv.accel.iter().map(|a| a.t_mid).collect();
        let ay: Vec<f64> = rv.accel.iter().map(|a| a.dlambda_dt).collect();
        let bottom_axes = Axes::new(&ax, &ay, false, mid + 30.0, HEIGHT - MARGIN_BOTTOM);
        svg.frame(&bottom_axes, "t (years)", "dlambda/dt");
        let pts: Vec<(f64, f64)> = ax
            .iter()
            .zip(&ay)
            .map(|(&x, &y)| (bottom_axes.x_px(x), bottom_axes.y_px(y)))
            .collect();
        svg.polyline(&pts, PALETTE[3], false);
        svg.circles(&pts, PALETTE[3]);
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use entrovel_core::expfit::fit_exponential;

    fn sample_series() -> AnnualSeries {
        let pairs: Vec<(i32, f64)> = (0..19)
            .map(|t| (2001 + t, 7.5805 * (0.0555 * f64::from(t)).exp()))
            .collect();
        AnnualSeries::from_year_values("money", &pairs).unwrap()
    }

    fn extract_points(svg: &str) -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        for part in svg.split("<circle ") {
            if let (Some(cx), Some(cy)) = (attr(part, "cx"), attr(part, "cy")) {
                pts.push((cx, cy));
            }
        }
        for part in svg.split("points=\"").skip(1) {
            let coords = part.split('"').next().unwrap();
            for pair in coords.split(' ') {
                let mut it = pair.split(',');
                if let (Some(x), Some(y)) = (it.next(), it.next()) {
                    pts.push((x.parse().unwrap(), y.parse().unwrap()));
                }
            }
        }
        pts
    }

    fn attr(fragment: &str, name: &str) -> Option<f64> {
        let marker = format!("{name}=\"");
        let start = fragment.find(&marker)? + marker.len();
        let rest = &fragment[start..];
        let end = rest.find('"')?;
        rest[..end].parse().ok()
    }

    #[test]
    fn fit_figure_keeps_every_point_in_viewport() {
        let s = sample_series();
        let fit = fit_exponential(&s).unwrap();
        for scale in [Scale::Linear, Scale::Log] {
            let svg = fit_figure(&s, &fit, scale);
            let pts = extract_points(&svg);
            assert!(!pts.is_empty());
            for (x, y) in pts {
                assert!((0.0..=WIDTH).contains(&x), "x {x} outside viewport");
                assert!((0.0..=HEIGHT).contains(&y), "y {y} outside viewport");
            }
        }
    }

    #[test]
    fn x_mapping_is_strictly_monotone() {
        let axes = Axes::new(&[0.0, 18.0], &[1.0, 5.0], false, MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=18 {
            let p = axes.x_px(i as f64);
            assert!(p > prev);
            prev = p;
        }
        let mut prev_y = f64::INFINITY;
        for i in 1..=5 {
            let p = axes.y_px(i as f64);
            assert!(p < prev_y, "y_px must decrease as data grows");
            prev_y = p;
        }
    }

    #[test]
    fn overlay_marks_coincident_lines_dashed() {
        let lines = vec![
            FigureSpec {
                label: "a".into(),
                lambda: 0.05,
                dashed: false,
            },
            FigureSpec {
                label: "b".into(),
                lambda: 0.05,
                dashed: true,
            },
        ];
        let svg = overlay_figure(&lines, 18.0);
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn labels_are_escaped() {
        let pairs: Vec<(i32, f64)> = (0..3).map(|t| (2000 + t, 1.0 + t as f64)).collect();
        let s = AnnualSeries::from_year_values("a<b&c", &pairs).unwrap();
        let fit = fit_exponential(&s).unwrap();
        let svg = fit_figure(&s, &fit, Scale::Linear);
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(!svg.contains("a<b&c"));
    }
}

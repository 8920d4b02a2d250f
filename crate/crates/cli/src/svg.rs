//! Minimal self-contained SVG line and scatter plots.
//!
//! Output depends only on the input values, so the same data always gives
//! the same bytes.

use std::fmt::Write;

use antipt_core::ObservableSeries;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvgError {
    #[error("nothing to plot: {0}")]
    Empty(String),
    #[error("non-finite value in series `{0}`")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line,
    Points,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub mark: Mark,
}

impl Curve {
    pub fn line(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            mark: Mark::Line,
        }
    }

    pub fn points(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            mark: Mark::Points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
}

impl PlotStyle {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 720,
            height: 450,
        }
    }

    /// Time axis in units of `1/J`.
    pub fn versus_time(title: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self::new(title, "time t (1/J)", y_label)
    }
}

/// Which column of an [`ObservableSeries`] to draw.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Norm2,
    Probability,
    Fidelity(String),
}

/// One curve from a recorded series. Unknown fidelity targets give an
/// empty curve.
pub fn observable_curve(series: &ObservableSeries, quantity: &Quantity, name: impl Into<String>) -> Curve {
    let ys: &[f64] = match quantity {
        Quantity::Norm2 => &series.norm2,
        Quantity::Probability => &series.probability,
        Quantity::Fidelity(target) => series.fidelity_series(target).unwrap_or(&[]),
    };
    Curve::line(name, series.times.iter().copied().zip(ys.iter().copied()).collect())
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Padded data range and tick positions.
fn axis(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let (lo, hi) = if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    };
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil();
    let last = (hi / step).floor();
    let ticks = (first as i64..=last as i64).map(|k| k as f64 * step).collect();
    (lo, hi, ticks)
}

fn tick_label(x: f64, step: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().max(step);
    if !(1e-3..1e5).contains(&mag) {
        let digits = ((x.abs().log10().floor() - step.log10().floor()).max(0.0) as usize).min(6);
        return format!("{x:.digits$e}");
    }
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{x:.decimals$}")
}

/// Renders `curves` into a standalone SVG document.
pub fn emit_svg(curves: &[Curve], style: &PlotStyle) -> Result<String, SvgError> {
    if curves.is_empty() {
        return Err(SvgError::Empty("no curves".into()));
    }
    for c in curves {
        if c.points.is_empty() {
            return Err(SvgError::Empty(format!("curve `{}` has no points", c.name)));
        }
        if c.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(SvgError::NonFinite(c.name.clone()));
        }
    }
    let all = curves.iter().flat_map(|c| c.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1, xticks) = axis(x0, x1);
    let (y0, y1, yticks) = axis(y0, y1);

    let w = style.width as f64;
    let h = style.height as f64;
    let pw = w - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = h - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, style.width, style.height);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(&style.title)
    );

    // axes frame and ticks
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        MARGIN_LEFT, MARGIN_TOP, pw, ph
    );
    let xstep = nice_step(x1 - x0);
    for &t in &xticks {
        let px = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + ph,
            MARGIN_TOP + ph + 5.0,
            MARGIN_TOP + ph + 19.0,
            tick_label(t, xstep)
        );
    }
    let ystep = nice_step(y1 - y0);
    for &t in &yticks {
        let py = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT,
            MARGIN_LEFT - 8.0,
            py + 4.0,
            tick_label(t, ystep)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        h - 14.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        MARGIN_TOP + ph / 2.0,
        MARGIN_TOP + ph / 2.0,
        escape(&style.y_label)
    );

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if c.mark == Mark::Line && c.points.len() > 1 {
            let mut pts = String::new();
            for (k, &(x, y)) in c.points.iter().enumerate() {
                if k > 0 {
                    pts.push(' ');
                }
                let _ = write!(pts, "{:.2},{:.2}", sx(x), sy(y));
            }
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>"#
            );
        } else {
            for &(x, y) in &c.points {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
        }
    }

    // legend, top right inside the frame
    let lx = MARGIN_LEFT + pw - 170.0;
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ly = MARGIN_TOP + 16.0 + 16.0 * i as f64;
        if c.mark == Mark::Line && c.points.len() > 1 {
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                ly - 4.0,
                lx + 20.0,
                ly - 4.0
            );
        } else {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, lx + 10.0, ly - 4.0);
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 26.0, escape(&c.name));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(600.0), 200.0);
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(nice_step(0.03), 0.01);
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick_label(200.0, 100.0), "200");
        assert_eq!(tick_label(0.4, 0.2), "0.4");
        assert_eq!(tick_label(0.0, 0.2), "0");
        assert_eq!(tick_label(2e-6, 1e-6), "2e-6");
        assert_eq!(tick_label(2.5e-6, 5e-7), "2.5e-6");
    }

    #[test]
    fn degenerate_range_is_padded() {
        let (lo, hi, ticks) = axis(1.0, 1.0);
        assert!(lo < 1.0 && hi > 1.0);
        assert!(!ticks.is_empty());
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}

//! Minimal SVG line charts for the scenario outputs.
//!
//! Plots never affect the CSV/JSON artifacts; they are a convenience
//! rendering of the same numbers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub file_name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut x0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
    }
    if !x0.is_finite() || x0 == x1 {
        x0 -= 0.5;
        x1 = x0 + 1.0;
    }
    if !y0.is_finite() || y0 == y1 {
        y0 -= 0.5;
        y1 = y0 + 1.0;
    }
    (x0, x1, y0, y1)
}

pub fn render(spec: &PlotSpec) -> String {
    let (x0, x1, y0, y1) = bounds(&spec.series);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut out = String::new();
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = write!(out, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = write!(
        out,
        r##"<text x="{}" y="24" font-size="16" text-anchor="middle" font-family="sans-serif">{}</text>"##,
        WIDTH / 2.0,
        spec.title
    );
    // axes
    let _ = write!(
        out,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##
    );
    // ticks
    for k in 0..=5 {
        let fx = x0 + (x1 - x0) * k as f64 / 5.0;
        let fy = y0 + (y1 - y0) * k as f64 / 5.0;
        let px = sx(fx);
        let py = sy(fy);
        let _ = write!(
            out,
            r##"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="#333"/>"##,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        );
        let _ = write!(
            out,
            r##"<text x="{px}" y="{}" font-size="11" text-anchor="middle" font-family="sans-serif">{fx:.3}</text>"##,
            HEIGHT - MARGIN_B + 18.0
        );
        let _ = write!(
            out,
            r##"<line x1="{}" y1="{py}" x2="{MARGIN_L}" y2="{py}" stroke="#333"/>"##,
            MARGIN_L - 5.0
        );
        let _ = write!(
            out,
            r##"<text x="{}" y="{}" font-size="11" text-anchor="end" font-family="sans-serif">{fy:.3}</text>"##,
            MARGIN_L - 8.0,
            py + 4.0
        );
    }
    let _ = write!(
        out,
        r##"<text x="{}" y="{}" font-size="13" text-anchor="middle" font-family="sans-serif">{}</text>"##,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0,
        spec.x_label
    );
    let _ = write!(
        out,
        r##"<text x="16" y="{}" font-size="13" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 16 {})">{}</text>"##,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        spec.y_label
    );
    // series
    for (i, s) in spec.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = write!(
            out,
            r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
        let ly = MARGIN_T + 16.0 * (i as f64 + 1.0);
        let _ = write!(
            out,
            r##"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"##,
            MARGIN_L + plot_w - 150.0,
            MARGIN_L + plot_w - 125.0
        );
        let _ = write!(
            out,
            r##"<text x="{}" y="{}" font-size="12" font-family="sans-serif">{}</text>"##,
            MARGIN_L + plot_w - 118.0,
            ly + 4.0,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write(spec: &PlotSpec, dir: &Path) -> std::io::Result<()> {
    fs::write(dir.join(&spec.file_name), render(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_valid_looking_svg() {
        let spec = PlotSpec {
            file_name: "x.svg".into(),
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "s".into(),
                points: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)],
            }],
        };
        let svg = render(&spec);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn degenerate_ranges_do_not_divide_by_zero() {
        let spec = PlotSpec {
            file_name: "x.svg".into(),
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "s".into(),
                points: vec![(1.0, 3.0), (1.0, 3.0)],
            }],
        };
        let svg = render(&spec);
        assert!(!svg.contains("NaN"));
    }
}

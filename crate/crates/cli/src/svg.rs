//! Minimal self-contained SVG polyline plots for the figure datasets.
//!
//! CSV is the canonical output; these plots are a convenience for eyeballing
//! the curves without external tooling, so the emitter stays deliberately
//! small: fixed palette, one polyline per series, axes with ticks, legend.

use lagbs::figures::Figure;
use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
];

/// Render one figure as a standalone SVG document.
pub fn render(figure: &Figure) -> String {
    let points = figure.series.iter().flat_map(|s| s.points.iter());
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() || x_lo == x_hi {
        (x_lo, x_hi) = (0.0, 1.0);
    }
    if !y_lo.is_finite() || y_lo == y_hi {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    let y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w,
            MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h,
        )
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{MARGIN_LEFT}\" y=\"24\" font-size=\"16\">{}</text>",
        figure.name
    );

    // Axes box.
    let _ = writeln!(
        out,
        "  <rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>"
    );

    // Ticks and grid labels.
    for i in 0..=5 {
        let f = f64::from(i) / 5.0;
        let x = x_lo + f * (x_hi - x_lo);
        let y = y_lo + f * (y_hi - y_lo);
        let (px, _) = to_px(x, y_lo);
        let (_, py) = to_px(x_lo, y);
        let x_axis_y = MARGIN_TOP + plot_h;
        let _ = writeln!(
            out,
            "  <line x1=\"{px:.2}\" y1=\"{x_axis_y:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>",
            x_axis_y + 5.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x:.2}</text>",
            x_axis_y + 20.0
        );
        let _ = writeln!(
            out,
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{MARGIN_LEFT}\" y2=\"{py:.2}\" stroke=\"#333\"/>",
            MARGIN_LEFT - 5.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{y:.2}</text>",
            MARGIN_LEFT - 9.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">s</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );

    // Series polylines.
    for (idx, series) in figure.series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut coords = String::new();
        for &(x, y) in &series.points {
            let (px, py) = to_px(x, y);
            let _ = write!(coords, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            out,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            coords.trim_end()
        );
        // Legend entry.
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let ly = MARGIN_TOP + 14.0 + 20.0 * idx as f64;
        let _ = writeln!(
            out,
            "  <line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 22.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            lx + 28.0,
            ly + 4.0,
            series.label
        );
    }

    out.push_str("</svg>\n");
    out
}

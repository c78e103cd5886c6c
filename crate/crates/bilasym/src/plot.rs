//! Dot plots of score distributions, one panel per score.
//!
//! Each panel shows the group hypothesized more asymmetric in the top
//! band and the reference group in the bottom band, over a shared
//! horizontal axis. Values are binned and stacked; every subject
//! contributes exactly one dot. Output is plain SVG 1.1 text (no
//! external resources) or an ASCII sketch, both byte-deterministic.

use crate::error::{Error, Result};

/// One score panel: two groups of score values plus labels.
#[derive(Debug, Clone)]
pub struct DotPlotPanel {
    pub title: String,
    pub group1_name: String,
    pub group2_name: String,
    pub group1: Vec<f64>,
    pub group2: Vec<f64>,
}

const SVG_WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 170.0;
const MARGIN_X: f64 = 110.0;
const DOT_RADIUS: f64 = 4.0;
const BIN_COUNT: usize = 48;
const GROUP2_FILL: &str = "#c0533e";
const GROUP1_FILL: &str = "#3e6ec0";

fn check_panel(panel: &DotPlotPanel) -> Result<()> {
    if panel.group1.is_empty() || panel.group2.is_empty() {
        return Err(Error::EmptyInput {
            what: "dot plot values",
        });
    }
    for v in panel.group1.iter().chain(&panel.group2) {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "dot plot value",
            });
        }
    }
    Ok(())
}

/// Axis range covering both groups, widened when degenerate.
fn axis_range(panel: &DotPlotPanel) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in panel.group1.iter().chain(&panel.group2) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn bin_of(v: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let t = (v - lo) / (hi - lo);
    ((t * bins as f64) as usize).min(bins - 1)
}

/// Bin counts in input order; the per-value stack height is returned so a
/// renderer can place one dot per subject deterministically.
fn stack_values(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(usize, usize)> {
    let mut heights = vec![0usize; bins];
    values
        .iter()
        .map(|&v| {
            let b = bin_of(v, lo, hi, bins);
            let h = heights[b];
            heights[b] += 1;
            (b, h)
        })
        .collect()
}

/// Renders the panels as a single standalone SVG document.
pub fn dot_plot_svg(panels: &[DotPlotPanel]) -> Result<String> {
    if panels.is_empty() {
        return Err(Error::EmptyInput {
            what: "dot plot panels",
        });
    }
    for panel in panels {
        check_panel(panel)?;
    }
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{SVG_WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {SVG_WIDTH} {height}\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{SVG_WIDTH}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    ));
    let plot_w = SVG_WIDTH - 2.0 * MARGIN_X;
    for (i, panel) in panels.iter().enumerate() {
        let top = PANEL_HEIGHT * i as f64;
        let (lo, hi) = axis_range(panel);
        let x_of = |v: f64| MARGIN_X + (v - lo) / (hi - lo) * plot_w;
        let axis_y = top + PANEL_HEIGHT - 30.0;
        let band2_base = top + 80.0; // group 2, upper band
        let band1_base = axis_y - 6.0; // group 1, lower band

        svg.push_str(&format!(
            "<text x=\"{MARGIN_X}\" y=\"{:.2}\" font-family=\"sans-serif\" \
             font-size=\"14\" fill=\"#000000\">{}</text>\n",
            top + 18.0,
            xml_escape(&panel.title)
        ));
        for (name, base, fill) in [
            (&panel.group2_name, band2_base, GROUP2_FILL),
            (&panel.group1_name, band1_base, GROUP1_FILL),
        ] {
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" \
                 font-size=\"12\" text-anchor=\"end\" fill=\"{fill}\">{}</text>\n",
                MARGIN_X - 10.0,
                base - 1.0,
                xml_escape(name)
            ));
        }
        for (values, base, fill) in [
            (&panel.group2, band2_base, GROUP2_FILL),
            (&panel.group1, band1_base, GROUP1_FILL),
        ] {
            for (bin, level) in stack_values(values, lo, hi, BIN_COUNT) {
                let cx = MARGIN_X + (bin as f64 + 0.5) / BIN_COUNT as f64 * plot_w;
                let cy = base - DOT_RADIUS - 2.0 * DOT_RADIUS * level as f64;
                svg.push_str(&format!(
                    "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{DOT_RADIUS}\" fill=\"{fill}\"/>\n"
                ));
            }
        }
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_X}\" y1=\"{axis_y:.2}\" x2=\"{:.2}\" y2=\"{axis_y:.2}\" \
             stroke=\"#000000\" stroke-width=\"1\"/>\n",
            MARGIN_X + plot_w
        ));
        for v in [lo, (lo + hi) / 2.0, hi] {
            let x = x_of(v);
            svg.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{axis_y:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
                 stroke=\"#000000\" stroke-width=\"1\"/>\n",
                axis_y + 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" \
                 font-size=\"11\" text-anchor=\"middle\" fill=\"#000000\">{v:.4}</text>\n",
                axis_y + 18.0
            ));
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// ASCII sketch of one panel: binned counts per group (digits, '+' for
/// ten or more, '.' for empty bins) over a labeled axis.
pub fn dot_plot_ascii(panel: &DotPlotPanel, bins: usize) -> Result<String> {
    check_panel(panel)?;
    let bins = bins.max(8);
    let (lo, hi) = axis_range(panel);
    let label_w = panel.group1_name.len().max(panel.group2_name.len());
    let mut text = format!("{}\n", panel.title);
    for (name, values) in [
        (&panel.group2_name, &panel.group2),
        (&panel.group1_name, &panel.group1),
    ] {
        let mut counts = vec![0usize; bins];
        for &v in values.iter() {
            counts[bin_of(v, lo, hi, bins)] += 1;
        }
        let row: String = counts
            .iter()
            .map(|&c| match c {
                0 => '.',
                1..=9 => char::from(b'0' + c as u8),
                _ => '+',
            })
            .collect();
        text.push_str(&format!("{name:>label_w$} |{row}|\n"));
    }
    text.push_str(&format!(
        "{:>label_w$} |{:<width$}{:>rest$}|\n",
        "",
        format!("{lo:.4}"),
        format!("{hi:.4}"),
        width = bins / 2,
        rest = bins - bins / 2,
    ));
    Ok(text)
}

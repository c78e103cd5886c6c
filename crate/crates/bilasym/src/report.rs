//! Report emission: CSV and JSON rows, and plain-text summary tables.
//!
//! All output is deterministic: floats use shortest round-trip encoding
//! in CSV/JSON, fixed four-decimal formatting in text tables, and rows
//! are emitted in the order they are given. Writing the same data twice
//! yields byte-identical output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::{significance_stars, ComparisonRow};

/// Output encoding for tabular reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One subject score value.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreRow {
    pub subject: String,
    pub group: String,
    pub score: String,
    pub value: f64,
}

/// One subject feature value.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureRow {
    pub subject: String,
    pub group: String,
    pub feature: String,
    pub kind: String,
    pub value: f64,
}

/// One feature weight. Deserializable so a weight dump can be fed back
/// in through --weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightRow {
    pub feature: String,
    pub weight: f64,
    pub source: String,
}

/// One feature row of a selection report.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionRow {
    pub feature: String,
    pub statistic: f64,
    pub critical_value: f64,
    pub lower_bound: f64,
    pub selected: bool,
    pub zero_variance: bool,
}

/// Full selection report (JSON form; the CSV form flattens to rows).
#[derive(Debug, Clone, Serialize)]
pub struct SelectionReport {
    pub group1: String,
    pub group2: String,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
    pub resampling: String,
    pub max_statistic: f64,
    pub critical_value: f64,
    pub features: Vec<SelectionRow>,
}

/// Writes rows as CSV with a header derived from the row type.
pub fn write_csv<S: Serialize>(rows: &[S], out: &mut dyn Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(vec![]);
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    out.write_all(&bytes)?;
    Ok(())
}

/// Writes any serializable value as pretty JSON plus a trailing newline.
pub fn write_json<S: Serialize>(value: &S, out: &mut dyn Write) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Footnote attached to every table that marks p-values with stars.
pub const STAR_FOOTNOTE: &str =
    "(*) significant at the 5% significance level, (**) at 1%, (***) at 0.1%";

/// Four decimals for moderate p-values, scientific for tiny ones.
pub fn format_p_value(p: f64) -> String {
    if p >= 0.001 {
        format!("{p:.4}")
    } else {
        format!("{p:.2e}")
    }
}

/// "0.0194 (*)" style cell; stars are computed from the unrounded value.
pub fn p_with_stars(p: f64) -> String {
    let stars = significance_stars(p);
    if stars.is_empty() {
        format_p_value(p)
    } else {
        format!("{} ({})", format_p_value(p), stars)
    }
}

fn render_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.chars().count());
        }
    }
    let mut text = String::new();
    let emit = |text: &mut String, cells: &[String]| {
        for (c, cell) in cells.iter().enumerate() {
            if c > 0 {
                text.push_str("  ");
            }
            if c == 0 {
                // Label column is left-aligned, value columns right-aligned.
                text.push_str(cell);
                for _ in cell.chars().count()..widths[c] {
                    text.push(' ');
                }
            } else {
                for _ in cell.chars().count()..widths[c] {
                    text.push(' ');
                }
                text.push_str(cell);
            }
        }
        while text.ends_with(' ') {
            text.pop();
        }
        text.push('\n');
    };
    emit(&mut text, headers);
    let rule: usize = widths.iter().sum::<usize>() + 2 * (cols - 1);
    text.push_str(&"-".repeat(rule));
    text.push('\n');
    for row in rows {
        emit(&mut text, row);
    }
    text
}

/// Per-frame comparison table for one score: each row is a frame, the
/// columns give the group hypothesized more asymmetric first (mean, sd),
/// then the reference group (mean, sd), then the one-sided statistic and
/// its p-value with significance stars.
pub fn format_group_comparison_table(
    score_label: &str,
    frames: &[String],
    rows: &[ComparisonRow],
) -> String {
    assert_eq!(frames.len(), rows.len(), "one comparison row per frame");
    let first = rows.first().expect("at least one frame");
    let headers: Vec<String> = vec![
        "frame".into(),
        format!("{} mean", first.group2),
        format!("{} sd", first.group2),
        format!("{} mean", first.group1),
        format!("{} sd", first.group1),
        "t".into(),
        "p".into(),
    ];
    let body: Vec<Vec<String>> = frames
        .iter()
        .zip(rows)
        .map(|(frame, row)| {
            vec![
                frame.clone(),
                format!("{:.4}", row.group2_mean),
                format!("{:.4}", row.group2_sd),
                format!("{:.4}", row.group1_mean),
                format!("{:.4}", row.group1_sd),
                format!("{:.4}", row.statistic),
                p_with_stars(row.p_value),
            ]
        })
        .collect();
    let mut text = format!("score: {score_label}\n");
    text.push_str(&render_table(&headers, &body));
    text.push_str(STAR_FOOTNOTE);
    text.push('\n');
    text
}

/// Score-by-frame grid of p-values with significance stars.
pub fn format_p_grid(
    score_labels: &[String],
    frames: &[String],
    p_values: &[Vec<f64>],
) -> String {
    assert_eq!(score_labels.len(), p_values.len(), "one row per score");
    let mut headers: Vec<String> = vec!["score".into()];
    headers.extend(frames.iter().cloned());
    let body: Vec<Vec<String>> = score_labels
        .iter()
        .zip(p_values)
        .map(|(label, row)| {
            assert_eq!(row.len(), frames.len(), "one p-value per frame");
            let mut cells = vec![label.clone()];
            cells.extend(row.iter().map(|&p| p_with_stars(p)));
            cells
        })
        .collect();
    let mut text = render_table(&headers, &body);
    text.push_str(STAR_FOOTNOTE);
    text.push('\n');
    text
}

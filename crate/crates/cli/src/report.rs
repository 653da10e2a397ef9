//! CSV report writers: header row, 17-significant-digit floats, LF endings.

use gfamix::io::{atomic_write, format_f64};
use gfamix::{EvalReport, Result};
use std::path::Path;

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}

pub fn trace_rows(trace: &[f64]) -> Vec<Vec<String>> {
    trace
        .iter()
        .enumerate()
        .map(|(i, &e)| vec![(i + 1).to_string(), format_f64(e)])
        .collect()
}

/// One row per (size, repeat) with the draw's AUC.
pub fn eval_rows(report: &EvalReport) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (si, &size) in report.train_sizes.iter().enumerate() {
        for (rep, &auc) in report.auc_per_draw[si].iter().enumerate() {
            rows.push(vec![size.to_string(), (rep + 1).to_string(), format_f64(auc)]);
        }
    }
    rows
}

/// One row per size: classifier, mean AUC, then the per-draw AUCs.
pub fn compare_rows(name: &str, report: &EvalReport) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (si, &size) in report.train_sizes.iter().enumerate() {
        let mut row = vec![
            size.to_string(),
            name.to_string(),
            format_f64(report.auc_mean[si]),
        ];
        row.extend(report.auc_per_draw[si].iter().map(|&a| format_f64(a)));
        rows.push(row);
    }
    rows
}

/// One row per (size, repeat) listing the drawn indices.
pub fn draw_rows(report: &EvalReport) -> Vec<Vec<String>> {
    let join = |idx: &[usize]| {
        idx.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut rows = Vec::new();
    for (si, &size) in report.train_sizes.iter().enumerate() {
        for (rep, draw) in report.draws[si].iter().enumerate() {
            rows.push(vec![
                size.to_string(),
                (rep + 1).to_string(),
                join(&draw.train),
                join(&draw.test),
            ]);
        }
    }
    rows
}

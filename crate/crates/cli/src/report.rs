//! Experiment reports: the per-dataset verdict table and the per-`K` metrics.
//!
//! The verdict columns follow the usual layout of a validity comparison table
//! (dataset, sizes, then one chosen `K` per index) with PSFD and the raw
//! `FB/FW` ratio appended. Numbers are serialized with Rust's shortest
//! round-trip formatting, so a value read back from a CSV is bit-identical
//! to the one the library computed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use vtsfd_core::{Index, KSweepResult, RuleVerdicts, VisualTsfd};

use crate::error::{HarnessError, Result};

/// Column order of `report.csv` and `report.txt`.
pub const REPORT_COLUMNS: [&str; 13] = [
    "dataset",
    "n_points",
    "n_clusters",
    "V_PC",
    "V_CL",
    "FB",
    "V_FCH",
    "V_FS",
    "V_XB",
    "Elbow_TSFD",
    "Visual_TSFD",
    "PSFD",
    "V_FRatio",
];

/// Column order of `metrics_<dataset>.csv`.
pub const METRIC_COLUMNS: [&str; 18] = [
    "K",
    "FW",
    "FB",
    "FI",
    "V_PC",
    "V_CL",
    "V_FRatio",
    "V_FCH",
    "V_FS",
    "V_XB",
    "SFD",
    "TSFD",
    "PSFD",
    "angle_deg",
    "iterations",
    "converged",
    "restart_seed",
    "note",
];

/// Text placed in the elbow column when the range has fewer than three `K`.
pub const INSUFFICIENT_RANGE: &str = "insufficient range";

/// Indices reported as single argmax/argmin verdicts, in column order.
const VERDICT_COLUMNS: [Index; 6] = [Index::Pc, Index::Cl, Index::Fb, Index::Fch, Index::Fs, Index::Xb];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub dataset: String,
    pub n: usize,
    /// Number of distinct labels, when the dataset is labeled.
    pub true_clusters: Option<usize>,
    pub verdicts: RuleVerdicts,
    /// Elbow of the TSFD curve, or why it could not be computed.
    pub elbow_tsfd: std::result::Result<usize, String>,
    pub visual: VisualTsfd,
    pub sweep: KSweepResult,
}

impl ExperimentReport {
    /// Argmax or argmin verdict of one index.
    pub fn verdict(&self, index: Index) -> usize {
        self.verdicts.get(index)
    }

    pub fn visual_candidates(&self) -> String {
        self.visual
            .candidates
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// One report row, aligned with [`REPORT_COLUMNS`].
    pub fn row(&self) -> Vec<String> {
        let mut row = vec![
            self.dataset.clone(),
            self.n.to_string(),
            self.true_clusters.map(|c| c.to_string()).unwrap_or_default(),
        ];
        row.extend(VERDICT_COLUMNS.iter().map(|&i| self.verdict(i).to_string()));
        row.push(match &self.elbow_tsfd {
            Ok(k) => k.to_string(),
            Err(_) => INSUFFICIENT_RANGE.to_string(),
        });
        row.push(self.visual_candidates());
        row.push(self.verdict(Index::Psfd).to_string());
        row.push(self.verdict(Index::FRatio).to_string());
        row
    }

    /// Per-`K` metric rows, aligned with [`METRIC_COLUMNS`]. A `K` whose fit
    /// failed keeps its row with empty values and the failure in `note`.
    pub fn metric_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for k in self.sweep.k_min..=self.sweep.k_max {
            let mut row = vec![k.to_string()];
            if let Some(e) = self.sweep.entries.get(&k) {
                let r = &e.report;
                let values = [
                    r.inertia.fw,
                    r.inertia.fb,
                    r.inertia.fi,
                    r.v_pc,
                    r.v_cl,
                    r.v_fratio,
                    r.v_fch,
                    r.v_fs,
                    r.v_xb,
                    r.sfd,
                    r.tsfd,
                    r.psfd,
                    self.visual.angles[&k],
                ];
                row.extend(values.iter().map(|v| v.to_string()));
                row.push(e.fit.iterations_run.to_string());
                row.push(e.fit.converged.to_string());
                row.push(e.fit.seed.to_string());
                row.push(r.xb_note.clone().unwrap_or_default());
            } else {
                row.extend(std::iter::repeat_n(String::new(), METRIC_COLUMNS.len() - 2));
                row.push(self.sweep.failures.get(&k).cloned().unwrap_or_default());
            }
            rows.push(row);
        }
        rows
    }

    /// Diagnostics worth surfacing next to the table.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if let Err(reason) = &self.elbow_tsfd {
            notes.push(format!("{}: Elbow_TSFD: {reason}", self.dataset));
        }
        for (k, reason) in &self.sweep.failures {
            notes.push(format!("{}: K={k} failed: {reason}", self.dataset));
        }
        for (k, e) in &self.sweep.entries {
            if let Some(note) = &e.report.xb_note {
                notes.push(format!("{}: K={k} V_XB=inf: {note}", self.dataset));
            }
            if !e.fit.converged {
                notes.push(format!(
                    "{}: K={k} stopped at the iteration cap ({} iterations)",
                    self.dataset, e.fit.iterations_run
                ));
            }
        }
        if !self.visual.monotonicity_violations.is_empty() {
            let ks: Vec<String> = self.visual.monotonicity_violations.iter().map(|k| k.to_string()).collect();
            notes.push(format!(
                "{}: diagonal angle grows at K={} (local optimum or overfit)",
                self.dataset,
                ks.join(",")
            ));
        }
        notes
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_write_error(path, e))?;
    w.write_record(header).map_err(|e| csv_write_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_write_error(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn csv_write_error(path: &Path, e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::io(path, io),
        other => HarnessError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_metrics_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    write_csv(path, &METRIC_COLUMNS, &report.metric_rows())
}

pub fn write_report_csv(reports: &[ExperimentReport], path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = reports.iter().map(ExperimentReport::row).collect();
    write_csv(path, &REPORT_COLUMNS, &rows)
}

/// Plain-text table with space-padded columns, followed by any notes.
pub fn render_report_text(reports: &[ExperimentReport]) -> String {
    let rows: Vec<Vec<String>> = reports.iter().map(ExperimentReport::row).collect();
    let widths: Vec<usize> = (0..REPORT_COLUMNS.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(REPORT_COLUMNS[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[&str]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, w))| if c == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        padded.join("  ").trim_end().to_string()
    };

    let mut out = String::new();
    let _ = writeln!(out, "{}", line(&REPORT_COLUMNS));
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    let _ = writeln!(out, "{}", "-".repeat(total));
    for r in &rows {
        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
        let _ = writeln!(out, "{}", line(&cells));
    }
    let notes: Vec<String> = reports.iter().flat_map(ExperimentReport::notes).collect();
    if !notes.is_empty() {
        out.push('\n');
        for n in notes {
            let _ = writeln!(out, "note: {n}");
        }
    }
    out
}

pub fn write_report_text(reports: &[ExperimentReport], path: &Path) -> Result<()> {
    fs::write(path, render_report_text(reports)).map_err(|e| HarnessError::io(path, e))
}

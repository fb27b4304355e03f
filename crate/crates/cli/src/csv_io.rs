//! Dataset CSV ingestion and export.
//!
//! Input: one header row, comma-delimited, numeric feature columns and an
//! optional label column picked by name. Labels that are all integers are
//! kept as-is; otherwise each distinct label string is numbered from 1 in
//! order of first appearance.

use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use vtsfd_core::Dataset;

use crate::error::{HarnessError, Result};

pub fn load_csv(path: &Path, label_column: Option<&str>) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |line: u64, message: String| HarnessError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let headers = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .clone();
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| parse_err(1, format!("label column '{name}' not in header")))?,
        ),
        None => None,
    };
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|i| Some(*i) != label_idx).collect();
    if feature_cols.is_empty() {
        return Err(parse_err(1, "no feature columns".into()));
    }

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        for &c in &feature_cols {
            let field = &record[c];
            let v: f64 = field.parse().map_err(|_| {
                parse_err(line, format!("column '{}': '{field}' is not a number", &headers[c]))
            })?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("column '{}': non-finite value", &headers[c])));
            }
            values.push(v);
        }
        if let Some(l) = label_idx {
            raw_labels.push(record[l].to_string());
        }
    }
    if values.is_empty() {
        return Err(HarnessError::EmptyDataset {
            path: path.to_path_buf(),
        });
    }

    let labels = label_idx.map(|_| encode_labels(&raw_labels));
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let data = Dataset::new(values, feature_cols.len(), labels)?.with_meta("name", name);
    if data.distinct_point_count() < 2 {
        return Err(HarnessError::IdenticalPoints {
            path: path.to_path_buf(),
        });
    }
    Ok(data)
}

fn encode_labels(raw: &[String]) -> Vec<i64> {
    let parsed: Option<Vec<i64>> = raw.iter().map(|s| s.parse().ok()).collect();
    if let Some(ints) = parsed {
        return ints;
    }
    let mut codes: HashMap<&str, i64> = HashMap::new();
    raw.iter()
        .map(|s| {
            let next = codes.len() as i64 + 1;
            *codes.entry(s.as_str()).or_insert(next)
        })
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::io(path, io),
        kind => HarnessError::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// Writes `x1..xd` feature columns and, when present, a trailing `label` column.
pub fn write_dataset_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    if data.labels().is_some() {
        header.push("label".into());
    }
    writer.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (i, p) in data.points().enumerate() {
        let mut row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        if let Some(labels) = data.labels() {
            row.push(labels[i].to_string());
        }
        writer.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| HarnessError::io(path, e))
}

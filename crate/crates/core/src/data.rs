//! Dataset and membership data model.
//!
//! Points, memberships and centroids are stored row-major in contiguous
//! `f64` buffers. All constructors validate their invariants eagerly and
//! reject violations; nothing is renormalized behind the caller's back.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};

/// Tolerance on membership row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// An ordered collection of `n` finite feature vectors of dimension `d`,
/// with optional integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    dim: usize,
    labels: Option<Vec<i64>>,
    meta: BTreeMap<String, String>,
}

impl Dataset {
    /// Builds a dataset from a row-major buffer of `values.len() / dim` points.
    pub fn new(values: Vec<f64>, dim: usize, labels: Option<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return invalid("feature dimension must be at least 1");
        }
        if values.is_empty() {
            return invalid("dataset must contain at least one point");
        }
        if !values.len().is_multiple_of(dim) {
            return invalid(format!(
                "buffer of {} values is not a multiple of dimension {dim}",
                values.len()
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            ));
        }
        let n = values.len() / dim;
        if let Some(labels) = &labels {
            if labels.len() != n {
                return invalid(format!(
                    "{} labels supplied for {n} points",
                    labels.len()
                ));
            }
        }
        Ok(Self {
            values,
            dim,
            labels,
            meta: BTreeMap::new(),
        })
    }

    /// Builds a dataset from individual rows, which must all share one length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: Option<Vec<i64>>) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return invalid(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    row.len()
                ));
            }
            values.extend_from_slice(row);
        }
        Self::new(values, dim, labels)
    }

    pub fn n(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    /// Row-major coordinate buffer.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// Number of distinct labels, when labels are present.
    pub fn label_count(&self) -> Option<usize> {
        self.labels.as_ref().map(|labels| {
            let mut distinct = labels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        })
    }

    /// Free-form provenance metadata (generator name, parameters, ...).
    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }

    /// Number of pairwise-distinct points.
    pub fn distinct_point_count(&self) -> usize {
        let mut rows: Vec<&[f64]> = self.points().collect();
        rows.sort_by(|a, b| cmp_rows(a, b));
        rows.dedup_by(|a, b| cmp_rows(a, b).is_eq());
        rows.len()
    }

    /// Returns a copy with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return invalid(format!("scale factor must be positive and finite, got {factor}"));
        }
        let values = self.values.iter().map(|v| v * factor).collect();
        let mut out = Self::new(values, self.dim, self.labels.clone())?;
        out.meta = self.meta.clone();
        Ok(out)
    }
}

fn cmp_rows(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// `n x K` row-stochastic matrix of fuzzy membership degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    values: Vec<f64>,
    k: usize,
}

impl MembershipMatrix {
    /// Validates entries in `[0, 1]`, row sums of 1 (within
    /// [`ROW_SUM_TOLERANCE`]) and `K >= 2`.
    pub fn new(values: Vec<f64>, k: usize) -> Result<Self> {
        if k < 2 {
            return invalid(format!("membership matrix needs K >= 2, got {k}"));
        }
        if values.is_empty() || !values.len().is_multiple_of(k) {
            return invalid(format!(
                "membership buffer of {} values does not hold rows of {k}",
                values.len()
            ));
        }
        for (i, row) in values.chunks_exact(k).enumerate() {
            if let Some(j) = row.iter().position(|u| !(0.0..=1.0).contains(u)) {
                return invalid(format!("membership u[{i}][{j}] = {} outside [0, 1]", row[j]));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return invalid(format!("membership row {i} sums to {sum}"));
            }
        }
        Ok(Self { values, k })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let k = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * k);
        for row in rows {
            let row = row.as_ref();
            if row.len() != k {
                return invalid("membership rows have unequal lengths");
            }
            values.extend_from_slice(row);
        }
        Self::new(values, k)
    }

    pub fn n(&self) -> usize {
        self.values.len() / self.k
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.k + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.k)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `K` cluster centers of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroids {
    values: Vec<f64>,
    dim: usize,
}

impl Centroids {
    pub fn new(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || !values.len().is_multiple_of(dim) {
            return invalid("centroid buffer does not match the dimension");
        }
        let k = values.len() / dim;
        if k < 2 {
            return invalid(format!("need at least 2 centroids, got {k}"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateData("non-finite centroid coordinate".into()));
        }
        Ok(Self { values, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return invalid("centroid rows have unequal lengths");
            }
            values.extend_from_slice(row);
        }
        Self::new(values, dim)
    }

    pub fn k(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn centers(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Squared Euclidean distance between two vectors of equal dimension.
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return invalid(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        ));
    }
    Ok(sq_dist(a, b))
}

/// Unchecked squared distance for hot loops where dimensions are known to match.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff = x - y;
            diff * diff
        })
        .sum()
}

/// Coordinate-wise arithmetic mean of all points.
pub fn grand_mean(data: &Dataset) -> Vec<f64> {
    let mut sum = vec![0.0; data.dim()];
    for p in data.points() {
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
    }
    let n = data.n() as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    sum
}

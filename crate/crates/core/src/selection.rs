//! Sweeping the cluster count and choosing `K` per index.
//!
//! Three selection procedures are provided: plain argmax/argmin per index,
//! the second-difference elbow rule on an index curve, and the Visual TSFD
//! angle analysis on the `(FI, FB)` plane. Ties always go to the smaller `K`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{Centroids, Dataset};
use crate::error::{invalid, Error, Result};
use crate::fcm::{fit, FcmConfig, ClusterModel};
use crate::indices::{IndexReport, InertiaTriple};

/// Default relative-improvement threshold for Visual TSFD candidates.
pub const DEFAULT_PLATEAU_THRESHOLD: f64 = 0.10;

/// Compact record of the fit that produced one sweep entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub centroids: Centroids,
    pub fw_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    pub seed: u64,
}

impl From<&ClusterModel> for FitSummary {
    fn from(model: &ClusterModel) -> Self {
        Self {
            centroids: model.centroids.clone(),
            fw_trace: model.fw_trace.clone(),
            iterations_run: model.iterations_run,
            converged: model.converged,
            seed: model.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub report: IndexReport,
    pub fit: FitSummary,
}

impl SweepEntry {
    pub fn inertia(&self) -> &InertiaTriple {
        &self.report.inertia
    }
}

/// Per-`K` results over an inclusive range. A `K` whose fit failed appears in
/// `failures` with a diagnostic instead of in `entries`.
#[derive(Debug, Clone, PartialEq)]
pub struct KSweepResult {
    pub k_min: usize,
    pub k_max: usize,
    pub n: usize,
    pub entries: BTreeMap<usize, SweepEntry>,
    pub failures: BTreeMap<usize, String>,
}

impl KSweepResult {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One index as a `K -> value` series over the successful entries.
    pub fn series(&self, index: Index) -> BTreeMap<usize, f64> {
        self.entries
            .iter()
            .map(|(&k, e)| (k, index.value(&e.report)))
            .collect()
    }
}

/// Fits every `K` in `k_min..=k_max` with the template's other settings and
/// evaluates all indices on each fit.
pub fn sweep(data: &Dataset, template: &FcmConfig, k_min: usize, k_max: usize) -> Result<KSweepResult> {
    if k_min < 2 || k_min > k_max || k_max >= data.n() {
        return invalid(format!(
            "K range [{k_min}, {k_max}] must satisfy 2 <= k_min <= k_max < n = {}",
            data.n()
        ));
    }
    let outcomes: Vec<(usize, Result<SweepEntry>)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let config = FcmConfig { k, ..template.clone() };
            let entry = fit(data, &config).and_then(|model| {
                let report = IndexReport::compute(data, &model, config.m)?;
                Ok(SweepEntry {
                    report,
                    fit: FitSummary::from(&model),
                })
            });
            (k, entry)
        })
        .collect();

    let mut result = KSweepResult {
        k_min,
        k_max,
        n: data.n(),
        entries: BTreeMap::new(),
        failures: BTreeMap::new(),
    };
    for (k, outcome) in outcomes {
        match outcome {
            Ok(entry) => {
                result.entries.insert(k, entry);
            }
            Err(e) => {
                result.failures.insert(k, e.to_string());
            }
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Maximized,
    Minimized,
}

/// The indices a sweep can be ranked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Index {
    Pc,
    Cl,
    /// Raw fuzzy between-inertia.
    Fb,
    FRatio,
    Fch,
    Fs,
    Xb,
    Tsfd,
    Psfd,
}

impl Index {
    pub const ALL: [Index; 9] = [
        Index::Pc,
        Index::Cl,
        Index::Fb,
        Index::FRatio,
        Index::Fch,
        Index::Fs,
        Index::Xb,
        Index::Tsfd,
        Index::Psfd,
    ];

    pub fn orientation(self) -> Orientation {
        match self {
            Index::Fs | Index::Xb => Orientation::Minimized,
            _ => Orientation::Maximized,
        }
    }

    pub fn value(self, report: &IndexReport) -> f64 {
        match self {
            Index::Pc => report.v_pc,
            Index::Cl => report.v_cl,
            Index::Fb => report.inertia.fb,
            Index::FRatio => report.v_fratio,
            Index::Fch => report.v_fch,
            Index::Fs => report.v_fs,
            Index::Xb => report.v_xb,
            Index::Tsfd => report.tsfd,
            Index::Psfd => report.psfd,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Index::Pc => "V_PC",
            Index::Cl => "V_CL",
            Index::Fb => "FB",
            Index::FRatio => "V_FRatio",
            Index::Fch => "V_FCH",
            Index::Fs => "V_FS",
            Index::Xb => "V_XB",
            Index::Tsfd => "TSFD",
            Index::Psfd => "PSFD",
        }
    }
}

/// `K` with the best value under `orientation`; NaN values are skipped and
/// ties keep the smaller `K`.
pub fn best_k(series: &BTreeMap<usize, f64>, orientation: Orientation) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (&k, &v) in series {
        if v.is_nan() {
            continue;
        }
        let better = match (best, orientation) {
            (None, _) => true,
            (Some((_, b)), Orientation::Maximized) => v > b,
            (Some((_, b)), Orientation::Minimized) => v < b,
        };
        if better {
            best = Some((k, v));
        }
    }
    best.map(|(k, _)| k)
}

/// Argmax/argmin choice of `K` for every index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleVerdicts {
    chosen: Vec<(Index, usize)>,
}

impl RuleVerdicts {
    pub fn get(&self, index: Index) -> usize {
        self.chosen
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, k)| *k)
            .expect("every index has a verdict")
    }

    pub fn iter(&self) -> impl Iterator<Item = (Index, usize)> + '_ {
        self.chosen.iter().copied()
    }
}

pub fn select_by_rule(sweep: &KSweepResult) -> Result<RuleVerdicts> {
    if sweep.is_empty() {
        return invalid("cannot select K from an empty sweep");
    }
    let mut chosen = Vec::with_capacity(Index::ALL.len());
    for index in Index::ALL {
        let series = sweep.series(index);
        let k = best_k(&series, index.orientation())
            .ok_or_else(|| Error::InvalidArgument(format!("{} is undefined at every K", index.name())))?;
        chosen.push((index, k));
    }
    Ok(RuleVerdicts { chosen })
}

/// Second difference `(i_{K+1} - i_K) - (i_K - i_{K-1})` at every `K` whose
/// two neighbours are present. Minimized series are negated first.
pub fn second_differences(series: &BTreeMap<usize, f64>, orientation: Orientation) -> BTreeMap<usize, f64> {
    let sign = match orientation {
        Orientation::Maximized => 1.0,
        Orientation::Minimized => -1.0,
    };
    let mut out = BTreeMap::new();
    for (&k, &here) in series {
        if k == 0 {
            continue;
        }
        if let (Some(&before), Some(&after)) = (series.get(&(k - 1)), series.get(&(k + 1))) {
            let (before, here, after) = (sign * before, sign * here, sign * after);
            out.insert(k, (after - here) - (here - before));
        }
    }
    out
}

/// Elbow rule: the `K` minimizing the second difference of the series.
pub fn elbow(series: &BTreeMap<usize, f64>, orientation: Orientation) -> Result<usize> {
    let diffs = second_differences(series, orientation);
    best_k(&diffs, Orientation::Minimized).ok_or_else(|| {
        Error::InsufficientRange(format!(
            "the elbow rule needs three consecutive K values, got {} value(s)",
            series.len()
        ))
    })
}

/// Angle in degrees between the diagonal `FB = FI` and the ray from the
/// origin through `(FI, FB)`.
pub fn diagonal_angle(fb: f64, fi: f64) -> f64 {
    45.0 - (fb / fi).atan().to_degrees()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisualTsfd {
    pub angles: BTreeMap<usize, f64>,
    /// Candidate cluster counts in increasing order.
    pub candidates: Vec<usize>,
    /// `K` values whose angle is larger than at the previous `K`.
    pub monotonicity_violations: Vec<usize>,
}

impl VisualTsfd {
    /// The last candidate: the `K` beyond which the angle stops improving
    /// noticeably.
    pub fn choice(&self) -> usize {
        *self.candidates.last().expect("candidate list is never empty")
    }
}

/// Visual TSFD angle analysis.
///
/// A `K` above the smallest swept value is a candidate when its angle
/// improves on the best angle seen at smaller `K` by more than
/// `plateau_threshold` times the angle at the smallest `K`. When no `K`
/// qualifies, the smallest `K` is the only candidate.
pub fn visual_tsfd(sweep: &KSweepResult, plateau_threshold: f64) -> Result<VisualTsfd> {
    let triples: BTreeMap<usize, InertiaTriple> =
        sweep.entries.iter().map(|(&k, e)| (k, *e.inertia())).collect();
    visual_tsfd_from_inertia(&triples, plateau_threshold)
}

/// [`visual_tsfd`] over a bare `K -> (FW, FB, FI)` map.
pub fn visual_tsfd_from_inertia(
    triples: &BTreeMap<usize, InertiaTriple>,
    plateau_threshold: f64,
) -> Result<VisualTsfd> {
    if !(plateau_threshold.is_finite() && plateau_threshold >= 0.0) {
        return invalid(format!("plateau threshold must be >= 0, got {plateau_threshold}"));
    }
    if triples.is_empty() {
        return invalid("cannot analyse an empty sweep");
    }
    let mut angles = BTreeMap::new();
    for (&k, t) in triples {
        if t.fi.is_nan() || t.fi <= 0.0 {
            return Err(Error::DegenerateData(format!("FI = {} at K = {k}", t.fi)));
        }
        angles.insert(k, diagonal_angle(t.fb, t.fi));
    }

    let mut iter = angles.iter();
    let (&first_k, &first_angle) = iter.next().expect("non-empty");
    let margin = plateau_threshold * first_angle;
    let mut best = first_angle;
    let mut previous = first_angle;
    let mut candidates = Vec::new();
    let mut monotonicity_violations = Vec::new();
    for (&k, &angle) in iter {
        if best - angle > margin {
            candidates.push(k);
        }
        if angle > previous {
            monotonicity_violations.push(k);
        }
        best = best.min(angle);
        previous = angle;
    }
    if candidates.is_empty() {
        candidates.push(first_k);
    }
    Ok(VisualTsfd {
        angles,
        candidates,
        monotonicity_violations,
    })
}

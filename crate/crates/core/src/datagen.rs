//! Artificial datasets: E1071-style Gaussian clusters, the overlapped
//! variant, skewed label noise, and the classic Ruspini data.
//!
//! All generators draw from a `ChaCha8Rng` seeded from their settings.
//! Normal deviates use the ziggurat sampler from `rand_distr`, so a given
//! seed regenerates the same data bit for bit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{invalid, Result};

/// Standard deviation of the overlapped E1071 variant.
pub const OVERLAP_SD: f64 = 0.4;

/// Isotropic Gaussian clusters; cluster `i` (1-based) is centred on `(i, ..., i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub cluster_count: usize,
    pub points_per_cluster: usize,
    pub sd: f64,
    pub dimension: usize,
    pub seed: u64,
}

impl GaussianSpec {
    pub fn new(cluster_count: usize, seed: u64) -> Self {
        Self {
            cluster_count,
            points_per_cluster: 50,
            sd: 0.3,
            dimension: 2,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.cluster_count < 2 {
            return invalid("cluster_count must be at least 2");
        }
        if self.points_per_cluster == 0 {
            return invalid("points_per_cluster must be at least 1");
        }
        if !(self.sd.is_finite() && self.sd > 0.0) {
            return invalid(format!("sd must be positive, got {}", self.sd));
        }
        if self.dimension == 0 {
            return invalid("dimension must be at least 1");
        }
        Ok(())
    }
}

pub fn gen_gaussian_clusters(spec: &GaussianSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.cluster_count * spec.points_per_cluster;
    let mut values = Vec::with_capacity(n * spec.dimension);
    let mut labels = Vec::with_capacity(n);
    for cluster in 1..=spec.cluster_count {
        let mean = cluster as f64;
        for _ in 0..spec.points_per_cluster {
            for _ in 0..spec.dimension {
                let z: f64 = rng.sample(StandardNormal);
                values.push(mean + spec.sd * z);
            }
            labels.push(cluster as i64);
        }
    }
    Ok(Dataset::new(values, spec.dimension, Some(labels))?
        .with_meta("generator", "gaussian")
        .with_meta("clusters", spec.cluster_count)
        .with_meta("points_per_cluster", spec.points_per_cluster)
        .with_meta("sd", spec.sd)
        .with_meta("dimension", spec.dimension)
        .with_meta("seed", spec.seed))
}

/// [`gen_gaussian_clusters`] with the standard deviation raised to [`OVERLAP_SD`].
pub fn gen_overlapped(spec: &GaussianSpec) -> Result<Dataset> {
    gen_gaussian_clusters(&GaussianSpec {
        sd: OVERLAP_SD,
        ..spec.clone()
    })
}

/// Per-coordinate magnitude of the noise offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffsetScale {
    /// The same scale on every coordinate of every label.
    Absolute(f64),
    /// A multiple of the label's per-coordinate sample standard deviation.
    LabelSd(f64),
}

impl Default for OffsetScale {
    fn default() -> Self {
        OffsetScale::LabelSd(2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub points_per_label: usize,
    /// Probability that a noise point lands below/left of its label's center.
    pub left_probability: f64,
    pub offset_scale: OffsetScale,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(points_per_label: usize, seed: u64) -> Self {
        Self {
            points_per_label,
            left_probability: 0.25,
            offset_scale: OffsetScale::default(),
            seed,
        }
    }
}

/// Appends skewed noise around each label's gravity center.
///
/// For each label (in increasing label order) `points_per_label` points are
/// drawn: `r ~ U[0, 1)` picks the side (`r <= left_probability` goes
/// below/left, otherwise above/right) and every coordinate is offset from
/// the center by `|g| * scale` with `g` standard normal. The input points are
/// kept as an unchanged prefix.
pub fn add_skewed_noise(data: &Dataset, spec: &NoiseSpec) -> Result<Dataset> {
    let Some(labels) = data.labels() else {
        return invalid("skewed noise needs a labelled dataset");
    };
    if spec.points_per_label == 0 {
        return invalid("points_per_label must be at least 1");
    }
    if !(spec.left_probability > 0.0 && spec.left_probability < 1.0) {
        return invalid(format!(
            "left_probability must lie in (0, 1), got {}",
            spec.left_probability
        ));
    }
    match spec.offset_scale {
        OffsetScale::Absolute(s) | OffsetScale::LabelSd(s) if !(s.is_finite() && s > 0.0) => {
            return invalid(format!("offset scale must be positive, got {s}"));
        }
        _ => {}
    }

    let dim = data.dim();
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        groups.entry(label).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = data.values().to_vec();
    let mut out_labels = labels.to_vec();
    for (&label, members) in &groups {
        let (center, sd) = center_and_sd(data, members);
        let scale: Vec<f64> = match spec.offset_scale {
            OffsetScale::Absolute(s) => vec![s; dim],
            OffsetScale::LabelSd(mult) => sd.iter().map(|s| mult * s).collect(),
        };
        for _ in 0..spec.points_per_label {
            let r: f64 = rng.random();
            let side = if r <= spec.left_probability { -1.0 } else { 1.0 };
            for j in 0..dim {
                let g: f64 = rng.sample(StandardNormal);
                values.push(center[j] + side * g.abs() * scale[j]);
            }
            out_labels.push(label);
        }
    }

    let mut noised = Dataset::new(values, dim, Some(out_labels))?;
    for (k, v) in data.meta() {
        noised = noised.with_meta(k.clone(), v);
    }
    Ok(noised
        .with_meta("noise_points_per_label", spec.points_per_label)
        .with_meta("noise_left_probability", spec.left_probability)
        .with_meta("noise_seed", spec.seed))
}

fn center_and_sd(data: &Dataset, members: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let dim = data.dim();
    let count = members.len() as f64;
    let mut center = vec![0.0; dim];
    for &i in members {
        for (c, v) in center.iter_mut().zip(data.point(i)) {
            *c += v;
        }
    }
    center.iter_mut().for_each(|c| *c /= count);
    let mut var = vec![0.0; dim];
    if members.len() > 1 {
        for &i in members {
            for ((s, v), c) in var.iter_mut().zip(data.point(i)).zip(&center) {
                *s += (v - c) * (v - c);
            }
        }
        var.iter_mut().for_each(|s| *s /= count - 1.0);
    }
    (center, var.into_iter().map(f64::sqrt).collect())
}

/// Ruspini (1970): 75 points in the plane, four groups of 20, 23, 17 and 15.
const RUSPINI: [(f64, f64, i64); 75] = [
    (4.0, 53.0, 1), (5.0, 63.0, 1), (10.0, 59.0, 1), (9.0, 77.0, 1), (13.0, 49.0, 1),
    (13.0, 69.0, 1), (12.0, 88.0, 1), (15.0, 75.0, 1), (18.0, 61.0, 1), (19.0, 65.0, 1),
    (22.0, 74.0, 1), (27.0, 72.0, 1), (28.0, 76.0, 1), (24.0, 58.0, 1), (27.0, 55.0, 1),
    (28.0, 60.0, 1), (30.0, 52.0, 1), (31.0, 60.0, 1), (32.0, 61.0, 1), (36.0, 72.0, 1),
    (28.0, 147.0, 2), (32.0, 149.0, 2), (35.0, 153.0, 2), (33.0, 154.0, 2), (38.0, 151.0, 2),
    (41.0, 150.0, 2), (38.0, 145.0, 2), (38.0, 143.0, 2), (32.0, 143.0, 2), (34.0, 141.0, 2),
    (44.0, 156.0, 2), (44.0, 149.0, 2), (44.0, 143.0, 2), (46.0, 142.0, 2), (47.0, 149.0, 2),
    (49.0, 152.0, 2), (50.0, 142.0, 2), (53.0, 144.0, 2), (52.0, 152.0, 2), (55.0, 155.0, 2),
    (54.0, 124.0, 2), (60.0, 136.0, 2), (63.0, 139.0, 2),
    (86.0, 132.0, 3), (85.0, 115.0, 3), (85.0, 96.0, 3), (78.0, 94.0, 3), (74.0, 96.0, 3),
    (97.0, 122.0, 3), (98.0, 116.0, 3), (98.0, 124.0, 3), (99.0, 119.0, 3), (99.0, 128.0, 3),
    (101.0, 115.0, 3), (108.0, 111.0, 3), (110.0, 111.0, 3), (108.0, 116.0, 3), (111.0, 126.0, 3),
    (115.0, 117.0, 3), (117.0, 115.0, 3),
    (70.0, 4.0, 4), (77.0, 12.0, 4), (83.0, 21.0, 4), (61.0, 15.0, 4), (69.0, 15.0, 4),
    (78.0, 16.0, 4), (66.0, 18.0, 4), (58.0, 13.0, 4), (64.0, 20.0, 4), (69.0, 21.0, 4),
    (66.0, 23.0, 4), (61.0, 25.0, 4), (76.0, 27.0, 4), (72.0, 31.0, 4), (64.0, 30.0, 4),
];

pub fn ruspini_fixture() -> Dataset {
    let values = RUSPINI.iter().flat_map(|&(x, y, _)| [x, y]).collect();
    let labels = RUSPINI.iter().map(|&(_, _, l)| l).collect();
    Dataset::new(values, 2, Some(labels))
        .expect("fixture is valid")
        .with_meta("name", "ruspini")
}

/// Ruspini with 5 skewed noise points per group (95 points).
pub fn ruspini_noised(seed: u64) -> Dataset {
    add_skewed_noise(&ruspini_fixture(), &NoiseSpec::new(5, seed))
        .expect("fixture is labelled")
        .with_meta("name", "ruspini_noised")
}

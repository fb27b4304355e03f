//! Fuzzy C-Means alternating optimization.
//!
//! Each restart samples `K` distinct data points as initial centroids, then
//! alternates the membership update and the weighted-mean centroid update
//! until the relative change of the within-inertia `FW` drops below
//! `epsilon` or the iteration budget runs out. The restart with the smallest
//! final `FW` wins.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{sq_dist, Centroids, Dataset, MembershipMatrix};
use crate::error::{invalid, Error, Result};
use crate::indices::fuzzy_within_inertia;

/// Parameters of a Fuzzy C-Means fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FcmConfig {
    /// Number of clusters.
    pub k: usize,
    /// Fuzziness coefficient, strictly greater than 1.
    pub m: f64,
    /// Threshold on `|FW_t - FW_{t-1}| / FW_t`.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Independent random initializations; restart `r` uses `seed + r`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self {
            k: 2,
            m: 2.0,
            epsilon: 1e-4,
            max_iterations: 100,
            restarts: 10,
            seed: 0,
        }
    }
}

impl FcmConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    /// Checks parameter ranges that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return invalid(format!("K must be at least 2, got {}", self.k));
        }
        validate_m(self.m)?;
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return invalid(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be at least 1");
        }
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        Ok(())
    }
}

pub(crate) fn validate_m(m: f64) -> Result<()> {
    if !(m.is_finite() && m > 1.0) {
        return invalid(format!("fuzziness m must be finite and > 1, got {m}"));
    }
    Ok(())
}

/// `u^m`, with the common `m = 2` case kept to a single multiply.
#[inline]
pub(crate) fn membership_weight(u: f64, m: f64) -> f64 {
    if m == 2.0 {
        u * u
    } else {
        u.powf(m)
    }
}

/// Converged (or budget-exhausted) state of one FCM fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub centroids: Centroids,
    pub memberships: MembershipMatrix,
    /// `FW` after each full iteration (membership then centroid update).
    pub fw_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Seed of the restart that produced this model.
    pub seed: u64,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centroids.k()
    }

    pub fn final_fw(&self) -> f64 {
        *self.fw_trace.last().expect("a fit runs at least one iteration")
    }
}

/// Samples `k` pairwise-distinct data points without replacement.
pub fn initialize_centroids(data: &Dataset, k: usize, seed: u64) -> Result<Centroids> {
    if k > data.n() {
        return invalid(format!("cannot pick K = {k} centroids from {} points", data.n()));
    }
    if data.distinct_point_count() < k {
        return Err(Error::DegenerateData(format!(
            "fewer than K = {k} distinct points"
        )));
    }
    let mut order: Vec<usize> = (0..data.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut chosen: Vec<&[f64]> = Vec::with_capacity(k);
    for i in order {
        let p = data.point(i);
        if !chosen.contains(&p) {
            chosen.push(p);
            if chosen.len() == k {
                break;
            }
        }
    }
    Centroids::from_rows(&chosen)
}

/// Membership update.
///
/// `u_ik = 1 / sum_j (d_ik / d_ij)^(1/(m-1))` with `d` the squared distance.
/// A point sitting exactly on one or more centroids gets its full membership
/// split equally among those centroids.
pub fn update_memberships(data: &Dataset, centroids: &Centroids, m: f64) -> Result<MembershipMatrix> {
    validate_m(m)?;
    if data.dim() != centroids.dim() {
        return invalid("centroid dimension differs from data dimension");
    }
    let k = centroids.k();
    let exponent = 1.0 / (m - 1.0);
    let mut values = Vec::with_capacity(data.n() * k);
    let mut dist = vec![0.0; k];

    for x in data.points() {
        for (d, c) in dist.iter_mut().zip(centroids.centers()) {
            *d = sq_dist(x, c);
        }
        let coincident = dist.iter().filter(|d| **d == 0.0).count();
        if coincident > 0 {
            let share = 1.0 / coincident as f64;
            values.extend(dist.iter().map(|d| if *d == 0.0 { share } else { 0.0 }));
            continue;
        }
        // Scaling every distance by the row minimum leaves the ratios in the
        // update unchanged and keeps the powers in (0, 1].
        let nearest = dist.iter().copied().fold(f64::INFINITY, f64::min);
        let start = values.len();
        let mut total = 0.0;
        for d in &dist {
            let w = if exponent == 1.0 {
                nearest / d
            } else {
                (nearest / d).powf(exponent)
            };
            total += w;
            values.push(w);
        }
        values[start..].iter_mut().for_each(|w| *w /= total);
    }
    MembershipMatrix::new(values, k)
}

/// Centroid update: `c_k = sum_i u_ik^m x_i / sum_i u_ik^m`.
pub fn update_centroids(data: &Dataset, memberships: &MembershipMatrix, m: f64) -> Result<Centroids> {
    validate_m(m)?;
    if memberships.n() != data.n() {
        return invalid(format!(
            "membership matrix has {} rows for {} points",
            memberships.n(),
            data.n()
        ));
    }
    let k = memberships.k();
    let dim = data.dim();
    let mut sums = vec![0.0; k * dim];
    let mut mass = vec![0.0; k];

    for (x, row) in data.points().zip(memberships.rows()) {
        for (c, &u) in row.iter().enumerate() {
            let w = membership_weight(u, m);
            if w == 0.0 {
                continue;
            }
            mass[c] += w;
            for (s, v) in sums[c * dim..(c + 1) * dim].iter_mut().zip(x) {
                *s += w * v;
            }
        }
    }
    for (c, &total) in mass.iter().enumerate() {
        if total.is_nan() || total <= 0.0 {
            return Err(Error::EmptyCluster { cluster: c });
        }
        sums[c * dim..(c + 1) * dim].iter_mut().for_each(|s| *s /= total);
    }
    Centroids::new(sums, dim)
}

/// Runs the full multi-restart FCM and returns the restart with the lowest final `FW`.
pub fn fit(data: &Dataset, config: &FcmConfig) -> Result<ClusterModel> {
    config.validate()?;
    if config.k >= data.n() {
        return invalid(format!(
            "K = {} must be smaller than the number of points ({})",
            config.k,
            data.n()
        ));
    }
    if data.distinct_point_count() < config.k {
        return Err(Error::DegenerateData(format!(
            "fewer than K = {} distinct points",
            config.k
        )));
    }

    let runs: Vec<Result<ClusterModel>> = (0..config.restarts as u64)
        .into_par_iter()
        .map(|r| fit_single(data, config, config.seed.wrapping_add(r)))
        .collect();

    let mut best: Option<ClusterModel> = None;
    let mut last_err = None;
    for run in runs {
        match run {
            Ok(model) => {
                // ties keep the earliest restart
                if best.as_ref().is_none_or(|b| model.final_fw() < b.final_fw()) {
                    best = Some(model);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some(model), _) => Ok(model),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one restart runs"),
    }
}

fn fit_single(data: &Dataset, config: &FcmConfig, seed: u64) -> Result<ClusterModel> {
    let mut centroids = initialize_centroids(data, config.k, seed)?;
    let mut fw_trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut memberships;

    loop {
        memberships = update_memberships(data, &centroids, config.m)?;
        centroids = update_centroids(data, &memberships, config.m)?;
        let fw = fuzzy_within_inertia(data, &memberships, &centroids, config.m);

        if let Some(&prev) = fw_trace.last() {
            let change = (prev - fw).abs();
            if change == 0.0 || change < config.epsilon * fw {
                converged = true;
            }
        }
        fw_trace.push(fw);
        if converged || fw_trace.len() >= config.max_iterations {
            break;
        }
    }

    Ok(ClusterModel {
        centroids,
        memberships,
        iterations_run: fw_trace.len(),
        fw_trace,
        converged,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::grand_mean;

    fn line(points: &[f64]) -> Dataset {
        let rows: Vec<[f64; 1]> = points.iter().map(|p| [*p]).collect();
        Dataset::from_rows(&rows, None).unwrap()
    }

    #[test]
    fn equidistant_point_splits_evenly() {
        let data = line(&[0.0]);
        let c = Centroids::from_rows(&[[-1.0], [1.0]]).unwrap();
        let u = update_memberships(&data, &c, 2.0).unwrap();
        assert_eq!(u.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn one_dimensional_substitution() {
        // u1 = 1 / (1 + 1/9)
        let data = line(&[0.0]);
        let c = Centroids::from_rows(&[[1.0], [3.0]]).unwrap();
        let u = update_memberships(&data, &c, 2.0).unwrap();
        assert!((u.get(0, 0) - 0.9).abs() < 1e-15);
        assert!((u.get(0, 1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn coincident_point_gets_full_membership() {
        let data = line(&[3.0]);
        let c = Centroids::from_rows(&[[1.0], [3.0]]).unwrap();
        let u = update_memberships(&data, &c, 2.0).unwrap();
        assert_eq!(u.row(0), &[0.0, 1.0]);

        let c = Centroids::from_rows(&[[3.0], [1.0], [3.0]]).unwrap();
        let u = update_memberships(&data, &c, 2.0).unwrap();
        assert_eq!(u.row(0), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn membership_update_matches_direct_formula_for_general_m() {
        let data = Dataset::from_rows(&[[0.3, -1.2], [2.0, 0.5], [-0.7, 0.9]], None).unwrap();
        let c = Centroids::from_rows(&[[0.0, 0.0], [1.0, 1.0], [-1.0, 2.0]]).unwrap();
        for &m in &[1.5, 2.0, 3.0] {
            let u = update_memberships(&data, &c, m).unwrap();
            for (i, x) in data.points().enumerate() {
                for k in 0..3 {
                    let dk = sq_dist(x, c.center(k));
                    let denom: f64 = (0..3)
                        .map(|j| (dk / sq_dist(x, c.center(j))).powf(1.0 / (m - 1.0)))
                        .sum();
                    assert!((u.get(i, k) - 1.0 / denom).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn crisp_centroid_is_plain_mean() {
        let data = line(&[0.0, 5.0, 2.0, 9.0]);
        let u = MembershipMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let c = update_centroids(&data, &u, 2.0).unwrap();
        assert_eq!(c.center(0), &[1.0]);
        assert_eq!(c.center(1), &[7.0]);
    }

    #[test]
    fn uniform_memberships_collapse_to_grand_mean() {
        let data = Dataset::from_rows(&[[0.0, 1.0], [4.0, -2.0], [1.0, 7.0], [3.0, 3.0]], None).unwrap();
        let u = MembershipMatrix::new(vec![1.0 / 3.0; 12], 3).unwrap();
        let c = update_centroids(&data, &u, 2.0).unwrap();
        let mean = grand_mean(&data);
        for center in c.centers() {
            for (a, b) in center.iter().zip(&mean) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weighted_centroids_two_points() {
        // x = 0 and 10, u = (0.9, 0.1) / (0.1, 0.9), m = 2:
        // c1 = (0.81*0 + 0.01*10) / 0.82, c2 = (0.01*0 + 0.81*10) / 0.82
        let data = line(&[0.0, 10.0]);
        let u = MembershipMatrix::from_rows(&[[0.9, 0.1], [0.1, 0.9]]).unwrap();
        let c = update_centroids(&data, &u, 2.0).unwrap();
        assert!((c.center(0)[0] - 0.1 / 0.82).abs() < 1e-12);
        assert!((c.center(1)[0] - 8.1 / 0.82).abs() < 1e-12);
    }

    #[test]
    fn empty_cluster_is_reported() {
        let data = line(&[0.0, 1.0]);
        let u = MembershipMatrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(
            update_centroids(&data, &u, 2.0),
            Err(Error::EmptyCluster { cluster: 1 })
        );
    }

    #[test]
    fn initialization_is_deterministic_and_distinct() {
        let data = line(&[0.0, 0.0, 1.0, 2.0, 2.0, 3.0]);
        let a = initialize_centroids(&data, 3, 5).unwrap();
        let b = initialize_centroids(&data, 3, 5).unwrap();
        assert_eq!(a, b);
        let mut xs: Vec<f64> = a.centers().map(|c| c[0]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        assert_eq!(xs.len(), 3);
    }

    #[test]
    fn initialization_with_exactly_k_points() {
        let data = line(&[4.0, -1.0, 2.5]);
        let c = initialize_centroids(&data, 3, 99).unwrap();
        let mut xs: Vec<f64> = c.centers().map(|c| c[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-1.0, 2.5, 4.0]);
    }

    #[test]
    fn initialization_errors() {
        let data = line(&[1.0, 1.0, 1.0, 2.0]);
        assert!(matches!(initialize_centroids(&data, 5, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(initialize_centroids(&data, 3, 0), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn fit_separates_singleton_groups() {
        let data = Dataset::from_rows(&[[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0], [10.0, 10.0]], None)
            .unwrap();
        let config = FcmConfig {
            restarts: 4,
            ..FcmConfig::with_k(4)
        };
        let model = fit(&data, &config).unwrap();
        assert!(model.final_fw() < 1e-6, "fw = {}", model.final_fw());
        for target in [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]] {
            let nearest = model
                .centroids
                .centers()
                .map(|c| sq_dist(c, &target).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-6);
        }
    }

    #[test]
    fn fit_rejects_bad_configs() {
        let data = line(&[0.0, 1.0, 2.0, 3.0]);
        assert!(fit(&data, &FcmConfig::with_k(4)).is_err());
        assert!(fit(&data, &FcmConfig::with_k(1)).is_err());
        let bad_m = FcmConfig { m: 1.0, ..FcmConfig::with_k(2) };
        assert!(matches!(fit(&data, &bad_m), Err(Error::InvalidArgument(_))));
        let bad_eps = FcmConfig { epsilon: 0.0, ..FcmConfig::with_k(2) };
        assert!(fit(&data, &bad_eps).is_err());
        let identical = line(&[1.0, 1.0, 1.0]);
        assert!(matches!(fit(&identical, &FcmConfig::with_k(2)), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn fit_respects_iteration_budget() {
        let data = line(&[0.0, 0.1, 0.2, 5.0, 5.1, 9.0, 9.3]);
        let config = FcmConfig {
            max_iterations: 2,
            epsilon: 1e-300,
            ..FcmConfig::with_k(3)
        };
        let model = fit(&data, &config).unwrap();
        assert_eq!(model.iterations_run, 2);
        assert_eq!(model.fw_trace.len(), 2);
    }
}

//! Fuzzy inertia decomposition and the validity indices built on it.
//!
//! With `w_ik = u_ik^m`:
//!
//! * `FW = sum_i sum_k w_ik d2(x_i, c_k)` (within, compactness)
//! * `FB = sum_i sum_k w_ik d2(c_k, mean)` (between, separability)
//! * `FI = sum_i sum_k w_ik d2(x_i, mean)` (total)
//!
//! `FI = FW + FB` only when every centroid is the `w`-weighted mean of the
//! data, so the three are always computed separately.

use crate::data::{grand_mean, sq_dist, Centroids, Dataset, MembershipMatrix};
use crate::error::{invalid, Error, Result};
use crate::fcm::{membership_weight, validate_m, ClusterModel};

/// Squared centroid separation below which two centroids count as coincident.
pub const COINCIDENT_CENTROIDS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaTriple {
    pub fw: f64,
    pub fb: f64,
    pub fi: f64,
}

impl InertiaTriple {
    /// `|FI - (FW + FB)| / FI`; zero when `FI` is zero.
    pub fn huygens_gap(&self) -> f64 {
        if self.fi == 0.0 {
            return (self.fw + self.fb).abs();
        }
        (self.fi - (self.fw + self.fb)).abs() / self.fi
    }
}

pub(crate) fn fuzzy_within_inertia(
    data: &Dataset,
    memberships: &MembershipMatrix,
    centroids: &Centroids,
    m: f64,
) -> f64 {
    let mut fw = 0.0;
    for (x, row) in data.points().zip(memberships.rows()) {
        for (&u, c) in row.iter().zip(centroids.centers()) {
            fw += membership_weight(u, m) * sq_dist(x, c);
        }
    }
    fw
}

/// Computes `(FW, FB, FI)` for a fitted model.
pub fn inertia(data: &Dataset, model: &ClusterModel, m: f64) -> Result<InertiaTriple> {
    validate_m(m)?;
    inertia_of(data, &model.memberships, &model.centroids, m)
}

/// [`inertia`] for an arbitrary membership matrix and centroid set.
pub fn inertia_of(
    data: &Dataset,
    memberships: &MembershipMatrix,
    centroids: &Centroids,
    m: f64,
) -> Result<InertiaTriple> {
    validate_m(m)?;
    check_shapes(data, memberships, centroids)?;
    let mean = grand_mean(data);
    let k = centroids.k();

    let fw = fuzzy_within_inertia(data, memberships, centroids, m);

    // FB and FI regroup the double sums around per-cluster and per-point weights.
    let mut cluster_mass = vec![0.0; k];
    let mut fi = 0.0;
    for (x, row) in data.points().zip(memberships.rows()) {
        let mut point_mass = 0.0;
        for (mass, &u) in cluster_mass.iter_mut().zip(row) {
            let w = membership_weight(u, m);
            *mass += w;
            point_mass += w;
        }
        fi += point_mass * sq_dist(x, &mean);
    }
    let fb = cluster_mass
        .iter()
        .zip(centroids.centers())
        .map(|(mass, c)| mass * sq_dist(c, &mean))
        .sum();

    Ok(InertiaTriple { fw, fb, fi })
}

fn check_shapes(data: &Dataset, memberships: &MembershipMatrix, centroids: &Centroids) -> Result<()> {
    if memberships.n() != data.n() {
        return invalid("membership rows do not match the number of points");
    }
    if memberships.k() != centroids.k() {
        return invalid("membership columns do not match the number of centroids");
    }
    if centroids.dim() != data.dim() {
        return invalid("centroid dimension differs from data dimension");
    }
    Ok(())
}

/// Partition coefficient, `(1/n) sum u_ik^2`. Maximized; lies in `[1/K, 1]`.
pub fn v_pc(memberships: &MembershipMatrix) -> f64 {
    let total: f64 = memberships.values().iter().map(|u| u * u).sum();
    total / memberships.n() as f64
}

/// Chen and Linkens' index. Maximized; lies in `[0, 1]`.
///
/// The first term rewards crisp maxima, the second penalizes the average
/// pairwise overlap `min(u_ik, u_ij)` over the `K(K-1)/2` cluster pairs.
pub fn v_cl(memberships: &MembershipMatrix) -> f64 {
    let n = memberships.n() as f64;
    let k = memberships.k();
    let mut max_term = 0.0;
    let mut overlap = 0.0;
    for row in memberships.rows() {
        max_term += row.iter().copied().fold(0.0, f64::max);
        for a in 0..k {
            for b in a + 1..k {
                overlap += row[a].min(row[b]);
            }
        }
    }
    let pairs = (k * (k - 1) / 2) as f64;
    max_term / n - overlap / n / pairs
}

/// `(n - K) / (K - 1)`, the penalty shared by `V_FCH` and `PSFD`.
pub fn count_penalty(n: usize, k: usize) -> f64 {
    (n - k) as f64 / (k - 1) as f64
}

fn check_counts(n: usize, k: usize) -> Result<()> {
    if k < 2 || k >= n {
        return invalid(format!("need 2 <= K < n, got K = {k}, n = {n}"));
    }
    Ok(())
}

/// Inertia ratio indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioIndices {
    /// `FB / FW`, maximized. `+inf` when `FW = 0`.
    pub fratio: f64,
    /// `(n - K)/(K - 1) * FB / FW`, maximized. `+inf` when `FW = 0`.
    pub fch: f64,
    /// `FW - FB`, minimized.
    pub fs: f64,
}

impl RatioIndices {
    /// True when `FW = 0`, in which case both ratio forms are infinite.
    pub fn perfectly_compact(&self) -> bool {
        self.fratio == f64::INFINITY
    }
}

/// `V_FRatio`, `V_FCH` (Calinski-Harabasz) and `V_FS` (Fukuyama-Sugeno).
pub fn crisp_and_penalized_family(inertia: &InertiaTriple, n: usize, k: usize) -> Result<RatioIndices> {
    check_counts(n, k)?;
    let fratio = if inertia.fw == 0.0 {
        f64::INFINITY
    } else {
        inertia.fb / inertia.fw
    };
    Ok(RatioIndices {
        fratio,
        fch: fratio * count_penalty(n, k),
        fs: inertia.fw - inertia.fb,
    })
}

/// Xie and Beni's index: `FW / (n * min_{j != k} d2(c_j, c_k))`. Minimized.
pub fn v_xb(data: &Dataset, model: &ClusterModel, m: f64) -> Result<f64> {
    validate_m(m)?;
    check_shapes(data, &model.memberships, &model.centroids)?;
    let (first, second, separation) = closest_centroid_pair(&model.centroids);
    if separation < COINCIDENT_CENTROIDS {
        return Err(Error::DegenerateCentroids {
            first,
            second,
            sq_distance: separation,
        });
    }
    let fw = fuzzy_within_inertia(data, &model.memberships, &model.centroids, m);
    Ok(fw / (data.n() as f64 * separation))
}

/// Indices and squared distance of the closest pair of centroids.
pub fn closest_centroid_pair(centroids: &Centroids) -> (usize, usize, f64) {
    let mut best = (0, 1, f64::INFINITY);
    for a in 0..centroids.k() {
        for b in a + 1..centroids.k() {
            let d = sq_dist(centroids.center(a), centroids.center(b));
            if d < best.2 {
                best = (a, b, d);
            }
        }
    }
    best
}

/// Standardized fuzzy difference and its transformed and penalized forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfdIndices {
    /// `(FB - FW) / FI`, in `[-1, 1]`.
    pub sfd: f64,
    /// `(1 + SFD) / 2 = FB / FI`, in `[0, 1]`, maximized.
    pub tsfd: f64,
    /// `TSFD * (n - K)/(K - 1)`, maximized.
    pub psfd: f64,
}

pub fn sfd_family(inertia: &InertiaTriple, n: usize, k: usize) -> Result<SfdIndices> {
    check_counts(n, k)?;
    if inertia.fi.is_nan() || inertia.fi <= 0.0 {
        return Err(Error::DegenerateData(format!(
            "total fuzzy inertia is {}, all points identical?",
            inertia.fi
        )));
    }
    // Rounding can push FB a few ulps past FI when FW is ~0.
    let sfd = ((inertia.fb - inertia.fw) / inertia.fi).clamp(-1.0, 1.0);
    let tsfd = (inertia.fb / inertia.fi).clamp(0.0, 1.0);
    Ok(SfdIndices {
        sfd,
        tsfd,
        psfd: tsfd * count_penalty(n, k),
    })
}

/// Every validity index for one fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub k: usize,
    pub n: usize,
    pub inertia: InertiaTriple,
    pub v_pc: f64,
    pub v_cl: f64,
    pub v_fratio: f64,
    pub v_fch: f64,
    pub v_fs: f64,
    /// `+inf` when two centroids coincide; see [`IndexReport::xb_note`].
    pub v_xb: f64,
    pub sfd: f64,
    pub tsfd: f64,
    pub psfd: f64,
    /// Diagnostic recorded when `V_XB` could not be evaluated.
    pub xb_note: Option<String>,
}

impl IndexReport {
    /// Evaluates all indices on the same model.
    pub fn compute(data: &Dataset, model: &ClusterModel, m: f64) -> Result<Self> {
        let n = data.n();
        let k = model.k();
        let inertia = inertia(data, model, m)?;
        let ratios = crisp_and_penalized_family(&inertia, n, k)?;
        let sfd = sfd_family(&inertia, n, k)?;
        let (v_xb, xb_note) = match v_xb(data, model, m) {
            Ok(v) => (v, None),
            Err(e @ Error::DegenerateCentroids { .. }) => (f64::INFINITY, Some(e.to_string())),
            Err(e) => return Err(e),
        };
        Ok(Self {
            k,
            n,
            inertia,
            v_pc: v_pc(&model.memberships),
            v_cl: v_cl(&model.memberships),
            v_fratio: ratios.fratio,
            v_fch: ratios.fch,
            v_fs: ratios.fs,
            v_xb,
            sfd: sfd.sfd,
            tsfd: sfd.tsfd,
            psfd: sfd.psfd,
            xb_note,
        })
    }
}

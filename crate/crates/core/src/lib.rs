//! Fuzzy C-Means clustering with fuzzy-inertia validity indices.
//!
//! The crate fits FCM models ([`fcm`]), decomposes their fuzzy inertia and
//! evaluates the validity indices V_PC, V_CL, V_FRatio, V_FCH, V_FS, V_XB,
//! SFD, TSFD and PSFD ([`indices`]), sweeps the number of clusters and
//! picks `K` per index, by elbow rule, or by Visual TSFD ([`selection`]),
//! and generates the artificial benchmark datasets ([`datagen`]).

pub mod data;
pub mod datagen;
pub mod error;
pub mod fcm;
pub mod indices;
pub mod selection;

pub use data::{grand_mean, squared_euclidean, Centroids, Dataset, MembershipMatrix};
pub use datagen::{
    add_skewed_noise, gen_gaussian_clusters, gen_overlapped, ruspini_fixture, ruspini_noised,
    GaussianSpec, NoiseSpec, OffsetScale,
};
pub use error::{Error, Result};
pub use fcm::{fit, initialize_centroids, update_centroids, update_memberships, ClusterModel, FcmConfig};
pub use indices::{
    crisp_and_penalized_family, inertia, inertia_of, sfd_family, v_cl, v_pc, v_xb, IndexReport,
    InertiaTriple, RatioIndices, SfdIndices,
};
pub use selection::{
    best_k, elbow, select_by_rule, sweep, visual_tsfd, visual_tsfd_from_inertia, Index,
    KSweepResult, Orientation, RuleVerdicts, SweepEntry, VisualTsfd, DEFAULT_PLATEAU_THRESHOLD,
};

//! Benchmark fixtures shared by the criterion benches.

use vtsfd_core::{fit, gen_gaussian_clusters, ClusterModel, Dataset, FcmConfig, GaussianSpec};

/// `clusters` Gaussian blobs of `per_cluster` points in `dimension` dimensions.
pub fn blobs(clusters: usize, per_cluster: usize, dimension: usize) -> Dataset {
    let spec = GaussianSpec {
        points_per_cluster: per_cluster,
        dimension,
        ..GaussianSpec::new(clusters, 42)
    };
    gen_gaussian_clusters(&spec).expect("valid generator settings")
}

/// A single-restart fit, for benchmarking index evaluation on a fixed model.
pub fn fitted(data: &Dataset, k: usize) -> ClusterModel {
    fit(data, &FcmConfig { restarts: 1, ..FcmConfig::with_k(k) }).expect("fit succeeds")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_the_requested_shape() {
        let d = blobs(4, 25, 3);
        assert_eq!((d.n(), d.dim()), (100, 3));
        assert_eq!(fitted(&d, 4).k(), 4);
    }
}

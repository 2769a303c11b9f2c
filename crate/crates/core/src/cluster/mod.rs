//! Density-linkage clustering with an explicit outlier label, HDBSCAN style:
//! core distances → mutual-reachability MST → condensed tree → EOM or leaf
//! selection, optionally followed by merging down to a requested topic count.
//!
//! Rows are processed in document-id order, so the result does not depend on
//! the order of the input matrix.

mod condense;
mod distance;
mod mst;
mod reduce;
mod select;

pub use condense::{condense_tree, lambda_of, CondensedNode, CondensedTree, MIN_DISTANCE};
pub use distance::{core_distances, euclidean, mutual_reachability, mutual_reachability_from};
pub use mst::{build_mst, MstEdge};
pub use reduce::{reduce_to_target, Centroids, Reduced, TopicVectors};
pub use select::{select_clusters, SelectedClusters, Selection};

use serde::Serialize;
use thiserror::Error;

use crate::partition::Partition;
use crate::vectorize::EmbeddingMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClusterError {
    #[error("{n} points, at least {required} needed")]
    TooFewPoints { n: usize, required: usize },
    #[error("invalid cluster parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClusterParams {
    pub min_cluster_size: usize,
    /// Defaults to `min_cluster_size` when absent.
    pub min_samples: Option<usize>,
    pub selection: Selection,
    /// Upper bound on the number of topics.
    pub target_n: Option<usize>,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            min_cluster_size: 15,
            min_samples: None,
            selection: Selection::Eom,
            target_n: None,
        }
    }
}

impl ClusterParams {
    pub fn min_samples(&self) -> usize {
        self.min_samples.unwrap_or(self.min_cluster_size)
    }

    pub fn validate(&self) -> Result<(), ClusterError> {
        if self.min_cluster_size < 2 {
            return Err(ClusterError::InvalidParams(
                "min_cluster_size must be >= 2".into(),
            ));
        }
        if self.min_samples() < 1 {
            return Err(ClusterError::InvalidParams(
                "min_samples must be >= 1".into(),
            ));
        }
        if self.target_n == Some(0) {
            return Err(ClusterError::InvalidParams("target_n must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub partition: Partition,
    /// Topic count before any merging.
    pub natural_topics: usize,
    pub merges: usize,
    /// Merging stopped early with a single topic left.
    pub no_merge_candidate: bool,
    pub selected_stability: f64,
}

/// Clusters the rows of `emb`. When `params.target_n` is set, topics are
/// merged using `vectors`, or embedding centroids when `vectors` is `None`.
pub fn cluster(
    emb: &EmbeddingMatrix,
    params: &ClusterParams,
    vectors: Option<&dyn TopicVectors>,
) -> Result<Clustering, ClusterError> {
    params.validate()?;
    let n = emb.len();
    let required = (params.min_samples() + 1).max(2);
    if n < required {
        return Err(ClusterError::TooFewPoints { n, required });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| emb.doc_ids()[a].cmp(&emb.doc_ids()[b]));
    let canon = emb.select(&order);

    let cores = core_distances(&canon, params.min_samples())?;
    let mst = build_mst(&canon, &cores);
    let tree = condense_tree(n, &mst, params.min_cluster_size);
    let selected = select_clusters(&tree, params.selection);
    let partition = Partition::from_parallel(canon.doc_ids(), &selected.labels);
    let natural_topics = partition.topic_count();

    let mut out = Clustering {
        partition,
        natural_topics,
        merges: 0,
        no_merge_candidate: false,
        selected_stability: selected.total_stability,
    };
    if let Some(target) = params.target_n {
        let centroids = Centroids(emb);
        let reduced = reduce_to_target(&out.partition, vectors.unwrap_or(&centroids), target);
        out.partition = reduced.partition;
        out.merges = reduced.merges;
        out.no_merge_candidate = reduced.no_merge_candidate;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::OUTLIER;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, Uniform};

    fn blobs(seed: u64) -> EmbeddingMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let mut ids = Vec::new();
        let mut data = Vec::new();
        for (b, center) in [[0.0, 0.0], [5.0, 5.0]].iter().enumerate() {
            for i in 0..30 {
                ids.push(format!("b{b}_{i:02}"));
                data.extend(center.iter().map(|c| c + noise.sample(&mut rng)));
            }
        }
        EmbeddingMatrix::new(ids, 2, data)
    }

    #[test]
    fn two_blobs() {
        let emb = blobs(1);
        let params = ClusterParams {
            min_cluster_size: 10,
            ..Default::default()
        };
        let c = cluster(&emb, &params, None).unwrap();
        assert_eq!(c.partition.topic_count(), 2);
        assert!(c.partition.outlier_count() <= 5);
        // each blob maps to a single label
        for b in 0..2 {
            let labels: std::collections::BTreeSet<_> = c
                .partition
                .iter()
                .filter(|(id, l)| id.starts_with(&format!("b{b}")) && *l != OUTLIER)
                .map(|(_, l)| l)
                .collect();
            assert_eq!(labels.len(), 1);
        }

        let forced = ClusterParams {
            target_n: Some(1),
            ..params
        };
        let c1 = cluster(&emb, &forced, None).unwrap();
        assert_eq!(c1.partition.topic_count(), 1);
        assert_eq!(c1.natural_topics, 2);
        assert_eq!(c1.partition.outliers(), c.partition.outliers());
    }

    #[test]
    fn uniform_noise_does_not_crash() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = Uniform::new(0.0, 1.0).unwrap();
        let ids = (0..50).map(|i| format!("u{i:02}")).collect();
        let data = (0..100).map(|_| u.sample(&mut rng)).collect();
        let emb = EmbeddingMatrix::new(ids, 2, data);
        let params = ClusterParams {
            min_cluster_size: 30,
            ..Default::default()
        };
        let c = cluster(&emb, &params, None).unwrap();
        let p = &c.partition;
        assert!(p.topic_count() == 1 || p.outlier_count() == p.len());
    }

    #[test]
    fn permutation_invariant() {
        let emb = blobs(3);
        let params = ClusterParams {
            min_cluster_size: 8,
            min_samples: Some(4),
            ..Default::default()
        };
        let base = cluster(&emb, &params, None).unwrap().partition;
        let mut order: Vec<usize> = (0..emb.len()).collect();
        order.reverse();
        order.swap(3, 40);
        let shuffled = cluster(&emb.select(&order), &params, None)
            .unwrap()
            .partition;
        assert_eq!(base, shuffled);
    }

    #[test]
    fn errors() {
        let emb = EmbeddingMatrix::new(vec!["a".into(), "b".into()], 1, vec![0.0, 1.0]);
        assert!(matches!(
            cluster(&emb, &ClusterParams::default(), None),
            Err(ClusterError::TooFewPoints { n: 2, required: 16 })
        ));
        let bad = ClusterParams {
            min_cluster_size: 1,
            ..Default::default()
        };
        assert!(matches!(
            cluster(&emb, &bad, None),
            Err(ClusterError::InvalidParams(_))
        ));
    }
}

use std::collections::BTreeSet;

use itertopic::iterloop::{Degenerate, Protocol};
use itertopic::synth::{gaussian_blobs, planted_corpus, PlantedConfig};
use itertopic::textprep::clean_all;
use itertopic::vectorize::{embed_tfidf_svd, EmbedConfig};
use itertopic::*;

fn corpus(seed: u64, n_docs: usize) -> (Vec<Document>, EmbeddingMatrix) {
    let c = planted_corpus(&PlantedConfig {
        n_docs,
        seed,
        ..Default::default()
    });
    let docs: Vec<Document> = clean_all(&c.records, &CleanConfig::default())
        .into_iter()
        .map(Result::unwrap)
        .collect();
    let emb = embed_tfidf_svd(
        &docs,
        &EmbedConfig {
            dims: 16,
            seed,
            ..Default::default()
        },
    )
    .unwrap();
    (docs, emb)
}

fn leaf_config() -> RunConfig {
    RunConfig {
        cluster: ClusterParams {
            min_cluster_size: 8,
            min_samples: Some(4),
            selection: Selection::Leaf,
            target_n: None,
        },
        ..Default::default()
    }
}

#[test]
fn zero_epsilon_never_converges_on_changing_partitions() {
    let (docs, emb) = corpus(0, 600);
    let cfg = RunConfig {
        epsilon: 0.0,
        max_iters: 4,
        ..leaf_config()
    };
    let r = run(&docs, &emb, cfg).unwrap();
    assert_ne!(r.stop_reason, StopReason::Converged);
    assert!(r.records.len() <= 5);
    assert_eq!(r.final_partition.len(), 600);
    // requested counts fall by one per round
    for w in r.records.windows(2) {
        assert_eq!(w[1].requested_n, Some(w[0].achieved_topics - 1));
    }
}

#[test]
fn tiny_corpus_is_degenerate_from_the_start() {
    let (docs, emb) = corpus(1, 20);
    let r = run(&docs, &emb, RunConfig::default()).unwrap();
    assert_eq!(r.stop_reason, StopReason::Degenerate);
    assert!(matches!(
        r.degenerate,
        Some(Degenerate::UniverseTooSmall {
            remaining: 20,
            required: 30
        })
    ));
    assert!(r.records.is_empty());
    assert_eq!(r.final_partition.outlier_count(), 20);
}

#[test]
fn delta_mode_needs_two_comparisons() {
    let (docs, emb) = corpus(0, 600);
    let cfg = RunConfig {
        stop_on_delta: true,
        ..leaf_config()
    };
    let r = run(&docs, &emb, cfg).unwrap();
    if r.stop_reason == StopReason::Converged {
        assert!(r.records.len() >= 3);
    }
}

#[test]
fn reembedding_keeps_conservation() {
    let (docs, emb) = corpus(2, 600);
    let cfg = RunConfig {
        reembed: Some(EmbedConfig {
            dims: 16,
            seed: 2,
            ..Default::default()
        }),
        ..leaf_config()
    };
    let r = run(&docs, &emb, cfg).unwrap();
    let ids: BTreeSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    let covered: BTreeSet<&str> = r.final_partition.ids().collect();
    assert_eq!(ids, covered);
}

#[test]
fn initial_n_caps_iteration_zero() {
    let (docs, emb) = corpus(0, 600);
    let cfg = RunConfig {
        initial_n: Some(5),
        ..leaf_config()
    };
    let p = Protocol::new(&docs, &emb, cfg).unwrap();
    let first = p.run_iteration_zero().unwrap().unwrap();
    assert_eq!(first.requested_n, Some(5));
    assert_eq!(first.achieved_topics, 5);
    assert!(first.natural_topics > 5);
    let second = p.next_iteration(&first).unwrap().unwrap();
    assert_eq!(second.requested_n, Some(4));
    assert_eq!(
        second.vs_previous.unwrap().n_common,
        600 - first.outlier_ids.len()
    );
}

#[test]
fn final_topics_describe_final_groups() {
    let (docs, emb) = corpus(3, 600);
    let r = run(&docs, &emb, leaf_config()).unwrap();
    let sizes = r.final_partition.sizes();
    assert_eq!(r.final_topics.len(), sizes.len());
    for t in &r.final_topics {
        assert_eq!(sizes[&t.label], t.size);
        assert!(r.final_groups.contains_key(&t.label));
    }
    let set_aside = r
        .final_groups
        .values()
        .filter(|g| g.starts_with("outlier@"))
        .count();
    let groups_with_outliers = r
        .records
        .iter()
        .filter(|rec| !rec.outlier_ids.is_empty())
        .count();
    assert_eq!(set_aside, groups_with_outliers);
}

#[test]
fn mismatched_embeddings_are_rejected() {
    let (docs, _) = corpus(0, 100);
    let (emb, _) = gaussian_blobs(&[vec![0.0], vec![5.0]], 50, 0.1, 0);
    assert!(matches!(
        Protocol::new(&docs, &emb, RunConfig::default()),
        Err(Error::Vectorize(_))
    ));
}

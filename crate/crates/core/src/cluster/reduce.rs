//! Merging topics down to a requested count.

use std::collections::{BTreeMap, HashMap};

use crate::partition::{Label, Partition, OUTLIER};
use crate::topicrep::{cosine, TermIndex};
use crate::vectorize::EmbeddingMatrix;

/// Something that can describe each topic of a partition as a vector.
pub trait TopicVectors {
    /// One sparse `(index, weight)` vector per non-outlier label.
    fn topic_vectors(&self, part: &Partition) -> BTreeMap<Label, Vec<(usize, f64)>>;
}

/// c-TF-IDF vectors.
impl TopicVectors for TermIndex {
    fn topic_vectors(&self, part: &Partition) -> BTreeMap<Label, Vec<(usize, f64)>> {
        self.represent(part)
            .into_iter()
            .filter(|r| r.label != OUTLIER)
            .map(|r| (r.label, r.vector))
            .collect()
    }
}

/// Summed embedding rows per topic; used when no text is at hand.
pub struct Centroids<'a>(pub &'a EmbeddingMatrix);

impl TopicVectors for Centroids<'_> {
    fn topic_vectors(&self, part: &Partition) -> BTreeMap<Label, Vec<(usize, f64)>> {
        let emb = self.0;
        let row_of: HashMap<&str, usize> = emb
            .doc_ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut sums: BTreeMap<Label, Vec<f64>> = BTreeMap::new();
        for (id, label) in part.iter().filter(|&(_, l)| l != OUTLIER) {
            let acc = sums.entry(label).or_insert_with(|| vec![0.0; emb.dim()]);
            if let Some(&i) = row_of.get(id) {
                for (a, x) in acc.iter_mut().zip(emb.row(i)) {
                    *a += x;
                }
            }
        }
        sums.into_iter()
            .map(|(l, v)| (l, v.into_iter().enumerate().collect()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub partition: Partition,
    pub merges: usize,
    /// The target could not be reached because a single topic was left.
    pub no_merge_candidate: bool,
}

/// Repeatedly merges the smallest topic into its most similar topic until at
/// most `target_n` remain. The outlier group is never merged or touched.
pub fn reduce_to_target(part: &Partition, vectors: &dyn TopicVectors, target_n: usize) -> Reduced {
    let mut current = part.clone();
    let mut merges = 0;
    while current.topic_count() > target_n {
        let topics = current.topic_count();
        if topics < 2 {
            return Reduced {
                partition: current,
                merges,
                no_merge_candidate: true,
            };
        }
        let sizes = current.sizes();
        // labels are ordered by size, so among the smallest take the last
        let min_size = (0..topics as Label).map(|l| sizes[&l]).min().unwrap();
        let smallest = (0..topics as Label)
            .rev()
            .find(|l| sizes[l] == min_size)
            .unwrap();
        let vecs = vectors.topic_vectors(&current);
        let empty = Vec::new();
        let source = vecs.get(&smallest).unwrap_or(&empty);
        let mut into = None;
        let mut best = f64::NEG_INFINITY;
        for l in (0..topics as Label).filter(|&l| l != smallest) {
            let sim = cosine(source, vecs.get(&l).unwrap_or(&empty));
            if sim > best {
                best = sim;
                into = Some(l);
            }
        }
        let into = into.expect("at least two topics");
        current = Partition::from_raw(
            current
                .iter()
                .map(|(id, l)| (id.to_string(), if l == smallest { into } else { l })),
        );
        merges += 1;
    }
    Reduced {
        partition: current,
        merges,
        no_merge_candidate: false,
    }
}

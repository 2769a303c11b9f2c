//! Synthetic data with known structure: planted-topic corpora and Gaussian
//! blobs. Used by tests, benchmarks and the `synth` command.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Zipf};

use crate::partition::{Label, Partition, OUTLIER};
use crate::textprep::{RawRecord, STOPWORDS};
use crate::vectorize::EmbeddingMatrix;

const CONSONANTS: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "kr", "st", "tr",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub n_docs: usize,
    pub n_topics: usize,
    pub vocab_size: usize,
    /// Share of the vocabulary split evenly between topics; the rest is
    /// background shared by all documents.
    pub topical_share: f64,
    /// Probability that a content word comes from the document's topic.
    pub topic_purity: f64,
    /// Fraction of documents drawn from background words only.
    pub noise_fraction: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            n_docs: 600,
            n_topics: 12,
            vocab_size: 2000,
            topical_share: 0.6,
            topic_purity: 0.7,
            noise_fraction: 0.05,
            min_len: 25,
            max_len: 45,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCorpus {
    pub records: Vec<RawRecord>,
    /// Planted topic of every document; background documents are `-1`.
    pub truth: Partition,
    pub vocabulary: Vec<String>,
}

/// Distinct pronounceable pseudo-words, two or three syllables long.
pub fn pseudo_words(count: usize, rng: &mut impl Rng) -> Vec<String> {
    let syllables: Vec<String> = CONSONANTS
        .iter()
        .flat_map(|c| VOWELS.iter().map(move |v| format!("{c}{v}")))
        .collect();
    let stop: BTreeSet<&str> = STOPWORDS.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let parts = rng.random_range(2..=3);
        let w: String = (0..parts)
            .map(|_| syllables[rng.random_range(0..syllables.len())].as_str())
            .collect();
        if !stop.contains(w.as_str()) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Uneven topic sizes summing to `total`, largest about three times the
/// smallest.
fn topic_sizes(total: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let weights: Vec<f64> = (0..k)
        .map(|i| 1.0 + 2.0 * i as f64 / (k.max(2) - 1) as f64)
        .collect();
    let sum: f64 = weights.iter().sum();
    let mut sizes: Vec<usize> = weights
        .iter()
        .map(|w| (w / sum * total as f64) as usize)
        .collect();
    let mut short = total - sizes.iter().sum::<usize>();
    let mut i = 0;
    while short > 0 {
        sizes[i % k] += 1;
        short -= 1;
        i += 1;
    }
    sizes.shuffle(rng);
    sizes
}

pub fn planted_corpus(cfg: &PlantedConfig) -> PlantedCorpus {
    assert!(cfg.n_topics >= 1 && cfg.min_len >= 1 && cfg.min_len <= cfg.max_len);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocabulary = pseudo_words(cfg.vocab_size, &mut rng);
    let per_topic = ((cfg.vocab_size as f64 * cfg.topical_share) as usize / cfg.n_topics).max(1);
    let topical = per_topic * cfg.n_topics;
    assert!(topical < cfg.vocab_size, "no background vocabulary left");
    let background = &vocabulary[topical..];
    let topic_words = |t: usize| &vocabulary[t * per_topic..(t + 1) * per_topic];
    let topic_zipf = Zipf::new(per_topic as f64, 1.0).unwrap();
    let bg_zipf = Zipf::new(background.len() as f64, 1.0).unwrap();

    let n_noise = (cfg.n_docs as f64 * cfg.noise_fraction).round() as usize;
    let mut labels: Vec<Label> = Vec::with_capacity(cfg.n_docs);
    for (t, size) in topic_sizes(cfg.n_docs - n_noise, cfg.n_topics, &mut rng)
        .into_iter()
        .enumerate()
    {
        labels.extend(std::iter::repeat_n(t as Label, size));
    }
    labels.extend(std::iter::repeat_n(OUTLIER, n_noise));
    labels.shuffle(&mut rng);

    let mut records = Vec::with_capacity(cfg.n_docs);
    let mut truth = Vec::with_capacity(cfg.n_docs);
    for (i, &label) in labels.iter().enumerate() {
        let len = rng.random_range(cfg.min_len..=cfg.max_len);
        let mut words: Vec<&str> = Vec::with_capacity(len + len / 3);
        for _ in 0..len {
            let from_topic = label != OUTLIER && rng.random_bool(cfg.topic_purity);
            let w = if from_topic {
                &topic_words(label as usize)[topic_zipf.sample(&mut rng) as usize - 1]
            } else {
                &background[bg_zipf.sample(&mut rng) as usize - 1]
            };
            words.push(w);
            if rng.random_bool(0.25) {
                words.push(STOPWORDS[rng.random_range(0..STOPWORDS.len())]);
            }
        }
        words.push("the");
        let id = format!("doc{i:05}");
        truth.push((id.clone(), label));
        records.push(RawRecord::new(id, words.join(" ")));
    }
    PlantedCorpus {
        records,
        truth: Partition::from_raw(truth),
        vocabulary,
    }
}

/// `per_blob` points around each centre with isotropic noise `sigma`. Ids are
/// `b<blob>_<index>` and the returned partition holds the blob of each point.
pub fn gaussian_blobs(
    centres: &[Vec<f64>],
    per_blob: usize,
    sigma: f64,
    seed: u64,
) -> (EmbeddingMatrix, Partition) {
    let dim = centres.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).expect("finite sigma");
    let mut ids = Vec::new();
    let mut data = Vec::new();
    let mut truth = Vec::new();
    for (b, c) in centres.iter().enumerate() {
        assert_eq!(c.len(), dim, "centres differ in dimension");
        for i in 0..per_blob {
            let id = format!("b{b}_{i:04}");
            data.extend(c.iter().map(|x| x + noise.sample(&mut rng)));
            truth.push((id.clone(), b as Label));
            ids.push(id);
        }
    }
    (
        EmbeddingMatrix::new(ids, dim, data),
        Partition::from_raw(truth),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::{clean_document, CleanConfig};

    #[test]
    fn planted_shape() {
        let c = planted_corpus(&PlantedConfig::default());
        assert_eq!(c.records.len(), 600);
        assert_eq!(c.truth.topic_count(), 12);
        assert_eq!(c.truth.outlier_count(), 30);
        let sizes = c.truth.sizes();
        let (lo, hi) = (sizes[&11], sizes[&0]);
        assert!(hi >= 2 * lo, "sizes should be uneven: {lo}..{hi}");
        let cfg = CleanConfig::default();
        assert!(c.records.iter().all(|r| clean_document(r, &cfg).is_ok()));
    }

    #[test]
    fn planted_is_deterministic() {
        let a = planted_corpus(&PlantedConfig::default());
        let b = planted_corpus(&PlantedConfig::default());
        assert_eq!(a, b);
        let other = planted_corpus(&PlantedConfig {
            seed: 1,
            ..Default::default()
        });
        assert_ne!(a.records, other.records);
    }

    #[test]
    fn words_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = pseudo_words(3000, &mut rng);
        assert_eq!(w.iter().collect::<BTreeSet<_>>().len(), 3000);
    }

    #[test]
    fn blobs() {
        let (e, p) = gaussian_blobs(&[vec![0.0, 0.0], vec![10.0, 0.0]], 5, 0.5, 3);
        assert_eq!(e.len(), 10);
        assert_eq!(p.topic_count(), 2);
        assert!(e.row(7)[0] > 5.0);
    }
}

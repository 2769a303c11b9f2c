//! Class-based TF-IDF topic representations.
//!
//! `W(t, c) = tf(t, c) · ln(1 + A / f(t))`, where `f(t)` is the frequency of
//! `t` over all classes and `A` the average token count per class. The
//! outlier group is a class like any other here.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::fmt::sig6;
use crate::partition::{Label, Partition};
use crate::textprep::Document;
use crate::vectorize::Vocabulary;

pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TopicRep {
    pub label: Label,
    pub size: usize,
    /// Nonzero-weight terms, descending weight, ties lexicographic.
    pub terms: Vec<(String, f64)>,
    /// `(vocabulary index, weight)`, ascending index.
    pub vector: Vec<(usize, f64)>,
}

impl TopicRep {
    pub fn top_terms(&self, k: usize) -> &[(String, f64)] {
        top_terms(self, k)
    }
}

pub fn top_terms(rep: &TopicRep, k: usize) -> &[(String, f64)] {
    &rep.terms[..k.min(rep.terms.len())]
}

/// Per-class term totals over a vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCounts {
    pub labels: Vec<Label>,
    pub sizes: Vec<usize>,
    /// `counts[c][t]`, dense over the vocabulary.
    pub counts: Vec<Vec<u64>>,
}

impl ClassCounts {
    /// `f(t)`: total occurrences of each term across all classes.
    pub fn term_totals(&self) -> Vec<u64> {
        let width = self.counts.first().map_or(0, Vec::len);
        let mut out = vec![0; width];
        for row in &self.counts {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c;
            }
        }
        out
    }
}

/// Per-document term counts, prepared once and reused for every grouping.
#[derive(Debug, Clone)]
pub struct TermIndex {
    vocab: Vocabulary,
    doc_terms: HashMap<String, Vec<(usize, u64)>>,
}

impl TermIndex {
    pub fn new(docs: &[Document], vocab: Vocabulary) -> Self {
        let doc_terms = docs
            .iter()
            .map(|d| {
                let mut tf: BTreeMap<usize, u64> = BTreeMap::new();
                for t in d.tokens() {
                    if let Some(j) = vocab.index_of(t) {
                        *tf.entry(j).or_insert(0) += 1;
                    }
                }
                (d.id.clone(), tf.into_iter().collect())
            })
            .collect();
        Self { vocab, doc_terms }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Ids of the partition missing from the index count as empty documents.
    pub fn class_counts(&self, part: &Partition) -> ClassCounts {
        let mut by_label: BTreeMap<Label, (usize, Vec<u64>)> = BTreeMap::new();
        for (id, label) in part.iter() {
            let (size, row) = by_label
                .entry(label)
                .or_insert_with(|| (0, vec![0; self.vocab.len()]));
            *size += 1;
            for &(j, c) in self.doc_terms.get(id).map_or(&[][..], Vec::as_slice) {
                row[j] += c;
            }
        }
        let mut out = ClassCounts {
            labels: Vec::new(),
            sizes: Vec::new(),
            counts: Vec::new(),
        };
        for (label, (size, row)) in by_label {
            out.labels.push(label);
            out.sizes.push(size);
            out.counts.push(row);
        }
        out
    }

    pub fn represent(&self, part: &Partition) -> Vec<TopicRep> {
        ctfidf(&self.class_counts(part), &self.vocab)
    }
}

pub fn class_term_counts(part: &Partition, docs: &[Document], vocab: &Vocabulary) -> ClassCounts {
    TermIndex::new(docs, vocab.clone()).class_counts(part)
}

/// The c-TF-IDF weight of one cell.
pub fn ctfidf_weight(tf: u64, term_total: u64, avg_class_tokens: f64) -> f64 {
    if tf == 0 || term_total == 0 {
        return 0.0;
    }
    tf as f64 * (1.0 + avg_class_tokens / term_total as f64).ln()
}

pub fn ctfidf(counts: &ClassCounts, vocab: &Vocabulary) -> Vec<TopicRep> {
    let totals = counts.term_totals();
    let classes = counts.counts.len().max(1) as f64;
    let avg = totals.iter().sum::<u64>() as f64 / classes;
    counts
        .labels
        .iter()
        .zip(&counts.sizes)
        .zip(&counts.counts)
        .map(|((&label, &size), row)| {
            let vector: Vec<(usize, f64)> = row
                .iter()
                .zip(&totals)
                .enumerate()
                .filter_map(|(j, (&tf, &f))| {
                    let w = ctfidf_weight(tf, f, avg);
                    (w > 0.0).then_some((j, w))
                })
                .collect();
            let mut terms: Vec<(String, f64)> = vector
                .iter()
                .map(|&(j, w)| (vocab.term(j).to_string(), w))
                .collect();
            terms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            TopicRep {
                label,
                size,
                terms,
                vector,
            }
        })
        .collect()
}

/// Cosine similarity of two sparse vectors sorted by index; 0 if either is zero.
pub fn cosine(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let na = a.iter().map(|x| x.1 * x.1).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.1 * x.1).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeight {
    pub term: String,
    pub weight: f64,
}

/// One entry of `topics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRecord {
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub size: usize,
    pub terms: Vec<TermWeight>,
}

impl TopicRecord {
    pub fn from_rep(rep: &TopicRep, k: usize, group: Option<String>) -> Self {
        Self {
            label: rep.label,
            group,
            size: rep.size,
            terms: rep
                .top_terms(k)
                .iter()
                .map(|(t, w)| TermWeight {
                    term: t.clone(),
                    weight: sig6(*w),
                })
                .collect(),
        }
    }
}

//! The iterative protocol.
//!
//! Iteration 0 clusters the whole corpus. Each later iteration removes the
//! previous outlier group, re-clusters the rest with at most
//! `achieved − step_k` topics and compares the result with the previous
//! clustering on their common documents. The loop stops when the chosen index
//! says the two clusterings agree within `epsilon`. The final grouping is every
//! set-aside outlier group plus the topics (and outliers) of the last round.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{cluster, ClusterParams};
use crate::cmpindex::{compare, ComparisonReport};
use crate::error::{Error, Result};
use crate::partition::{Label, Partition, OUTLIER};
use crate::textprep::Document;
use crate::topicrep::{TermIndex, TopicRep};
use crate::vectorize::{build_vocabulary, embed_tfidf_svd, EmbedConfig, EmbeddingMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopMetric {
    #[default]
    Vdm,
    Nvi,
    Ari,
}

impl StopMetric {
    /// Distance-like value of the metric: 0 means identical clusterings.
    pub fn value(self, r: &ComparisonReport) -> f64 {
        match self {
            StopMetric::Vdm => r.vdm,
            StopMetric::Nvi => r.nvi,
            StopMetric::Ari => 1.0 - r.ari,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    MaxIters,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Topic count requested at iteration 0; `None` keeps the natural count.
    pub initial_n: Option<usize>,
    pub step_k: usize,
    pub epsilon: f64,
    pub stop_metric: StopMetric,
    /// Stop on the change of the index between successive comparisons
    /// instead of its value.
    pub stop_on_delta: bool,
    /// Maximum number of re-clustering rounds after iteration 0.
    pub max_iters: usize,
    pub cluster: ClusterParams,
    pub seed: u64,
    /// Recompute TF-IDF + SVD embeddings on each round's documents.
    pub reembed: Option<EmbedConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            initial_n: None,
            step_k: 1,
            epsilon: 0.02,
            stop_metric: StopMetric::Vdm,
            stop_on_delta: false,
            max_iters: 20,
            cluster: ClusterParams::default(),
            seed: 0,
            reembed: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.step_k < 1 {
            return Err("step_k must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err("epsilon must be in [0, 1)".into());
        }
        if self.max_iters < 1 {
            return Err("max_iters must be >= 1".into());
        }
        if self.initial_n == Some(0) {
            return Err("initial_n must be >= 1".into());
        }
        self.cluster.validate().map_err(|e| e.to_string())
    }
}

/// Why the protocol cannot continue.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Degenerate {
    #[error("{remaining} documents left, at least {required} needed")]
    UniverseTooSmall { remaining: usize, required: usize },
    #[error("previous iteration produced no topics")]
    NoTopics,
    #[error("requested topic count is already at its floor of 1")]
    FloorReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub requested_n: Option<usize>,
    pub achieved_topics: usize,
    /// Topic count before merging to `requested_n`.
    pub natural_topics: usize,
    pub outlier_ids: BTreeSet<String>,
    pub partition: Partition,
    pub reps: Vec<TopicRep>,
    pub vs_previous: Option<ComparisonReport>,
}

impl IterationRecord {
    pub fn achieved_groups(&self) -> usize {
        self.partition.group_count()
    }

    pub fn universe(&self) -> impl Iterator<Item = &str> {
        self.partition.ids()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub records: Vec<IterationRecord>,
    /// Over the full input universe.
    pub final_partition: Partition,
    /// Name of every final label: `topic` or `outlier@<t>`.
    pub final_groups: BTreeMap<Label, String>,
    pub final_topics: Vec<TopicRep>,
    pub stop_reason: StopReason,
    pub degenerate: Option<Degenerate>,
}

/// Stop test for one comparison. In delta mode, `previous` is the comparison
/// made one round earlier; without it the run never stops.
pub fn should_stop(
    report: &ComparisonReport,
    previous: Option<&ComparisonReport>,
    cfg: &RunConfig,
) -> bool {
    let metric = cfg.stop_metric;
    if cfg.stop_on_delta {
        previous.is_some_and(|p| (metric.value(report) - metric.value(p)).abs() <= cfg.epsilon)
    } else {
        metric.value(report) <= cfg.epsilon
    }
}

/// Runs the protocol over a fixed corpus and its embeddings.
pub struct Protocol<'a> {
    docs: &'a [Document],
    emb: EmbeddingMatrix,
    terms: TermIndex,
    cfg: RunConfig,
}

impl<'a> Protocol<'a> {
    /// `emb` must hold exactly one row per document.
    pub fn new(docs: &'a [Document], emb: &EmbeddingMatrix, cfg: RunConfig) -> Result<Self> {
        cfg.validate().map_err(Error::Config)?;
        let ids: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
        let emb = crate::vectorize::align_embeddings(emb, &ids)?;
        let vocab = build_vocabulary(docs, 1, 1.0)?;
        Ok(Self {
            docs,
            emb,
            terms: TermIndex::new(docs, vocab),
            cfg,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn term_index(&self) -> &TermIndex {
        &self.terms
    }

    fn min_universe(&self) -> usize {
        (2 * self.cfg.cluster.min_cluster_size).max(self.cfg.cluster.min_samples() + 1)
    }

    fn cluster_universe(
        &self,
        t: usize,
        keep: &dyn Fn(&str) -> bool,
        requested_n: Option<usize>,
    ) -> Result<(Partition, usize)> {
        let emb = match &self.cfg.reembed {
            Some(ecfg) if t > 0 => {
                let docs: Vec<Document> =
                    self.docs.iter().filter(|d| keep(&d.id)).cloned().collect();
                embed_tfidf_svd(&docs, ecfg)?
            }
            _ => self.emb.restrict(keep),
        };
        let params = ClusterParams {
            target_n: requested_n,
            ..self.cfg.cluster
        };
        let c = cluster(&emb, &params, Some(&self.terms))?;
        Ok((c.partition, c.natural_topics))
    }

    fn record(
        &self,
        t: usize,
        requested_n: Option<usize>,
        partition: Partition,
        natural_topics: usize,
        vs_previous: Option<ComparisonReport>,
    ) -> IterationRecord {
        IterationRecord {
            t,
            requested_n,
            achieved_topics: partition.topic_count(),
            natural_topics,
            outlier_ids: partition.outliers(),
            reps: self.terms.represent(&partition),
            partition,
            vs_previous,
        }
    }

    pub fn run_iteration_zero(&self) -> Result<Result<IterationRecord, Degenerate>> {
        let required = self.min_universe();
        if self.docs.len() < required {
            return Ok(Err(Degenerate::UniverseTooSmall {
                remaining: self.docs.len(),
                required,
            }));
        }
        let (partition, natural) = self.cluster_universe(0, &|_| true, self.cfg.initial_n)?;
        Ok(Ok(self.record(
            0,
            self.cfg.initial_n,
            partition,
            natural,
            None,
        )))
    }

    pub fn next_iteration(
        &self,
        prev: &IterationRecord,
    ) -> Result<Result<IterationRecord, Degenerate>> {
        if prev.achieved_topics == 0 {
            return Ok(Err(Degenerate::NoTopics));
        }
        if prev.requested_n == Some(1) {
            return Ok(Err(Degenerate::FloorReached));
        }
        let remaining = prev.partition.len() - prev.outlier_ids.len();
        let required = self.min_universe();
        if remaining < required {
            return Ok(Err(Degenerate::UniverseTooSmall {
                remaining,
                required,
            }));
        }
        let requested = prev.achieved_topics.saturating_sub(self.cfg.step_k).max(1);
        let keep = |id: &str| prev.partition.get(id).is_some_and(|l| l != OUTLIER);
        let (partition, natural) = self.cluster_universe(prev.t + 1, &keep, Some(requested))?;
        let report = compare(&prev.partition, &partition)?;
        Ok(Ok(self.record(
            prev.t + 1,
            Some(requested),
            partition,
            natural,
            Some(report),
        )))
    }

    pub fn run(&self) -> Result<RunResult> {
        self.run_with(|_| Ok(()))
    }

    /// Like [`Protocol::run`], calling `observe` on each record as soon as it
    /// is computed.
    pub fn run_with(
        &self,
        mut observe: impl FnMut(&IterationRecord) -> Result<()>,
    ) -> Result<RunResult> {
        let mut records: Vec<IterationRecord> = Vec::new();
        let (stop_reason, degenerate) = match self.run_iteration_zero()? {
            Err(d) => (StopReason::Degenerate, Some(d)),
            Ok(first) => {
                observe(&first)?;
                records.push(first);
                loop {
                    let last = records.last().unwrap();
                    if last.t >= self.cfg.max_iters {
                        break (StopReason::MaxIters, None);
                    }
                    match self.next_iteration(last)? {
                        Err(d) => break (StopReason::Degenerate, Some(d)),
                        Ok(rec) => {
                            let previous = last.vs_previous;
                            let stop = rec
                                .vs_previous
                                .as_ref()
                                .is_some_and(|r| should_stop(r, previous.as_ref(), &self.cfg));
                            observe(&rec)?;
                            records.push(rec);
                            if stop {
                                break (StopReason::Converged, None);
                            }
                        }
                    }
                }
            }
        };
        let (final_partition, final_groups) = assemble_final(&records, self.docs);
        let final_topics = self.terms.represent(&final_partition);
        Ok(RunResult {
            records,
            final_partition,
            final_groups,
            final_topics,
            stop_reason,
            degenerate,
        })
    }
}

/// Builds the final grouping: the last round's topics keep their labels and
/// its outliers stay `-1`; each earlier outlier group gets the next free
/// label. With no records every document is an outlier.
pub fn assemble_final(
    records: &[IterationRecord],
    docs: &[Document],
) -> (Partition, BTreeMap<Label, String>) {
    let mut names = BTreeMap::new();
    let Some(last) = records.last() else {
        let all = docs.iter().map(|d| (d.id.clone(), OUTLIER)).collect();
        if !docs.is_empty() {
            names.insert(OUTLIER, "outlier@0".to_string());
        }
        return (Partition::new(all).expect("valid labels"), names);
    };
    let mut assignment: BTreeMap<String, Label> = last.partition.assignment().clone();
    let topics = last.achieved_topics as Label;
    for l in 0..topics {
        names.insert(l, "topic".to_string());
    }
    if !last.outlier_ids.is_empty() {
        names.insert(OUTLIER, format!("outlier@{}", last.t));
    }
    let mut next = topics;
    for rec in &records[..records.len() - 1] {
        if rec.outlier_ids.is_empty() {
            continue;
        }
        for id in &rec.outlier_ids {
            let clash = assignment.insert(id.clone(), next);
            debug_assert!(clash.is_none(), "outlier groups are disjoint");
        }
        names.insert(next, format!("outlier@{}", rec.t));
        next += 1;
    }
    (
        Partition::new(assignment).expect("contiguous labels"),
        names,
    )
}

/// Convenience wrapper around [`Protocol`].
pub fn run(docs: &[Document], emb: &EmbeddingMatrix, cfg: RunConfig) -> Result<RunResult> {
    Protocol::new(docs, emb, cfg)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(vdm: f64, nvi: f64, ari: f64) -> ComparisonReport {
        ComparisonReport {
            rand: 1.0,
            ari,
            vdm,
            vi: 0.0,
            nvi,
            n_common: 10,
        }
    }

    #[test]
    fn stop_rule_values() {
        let cfg = RunConfig::default();
        // last row of the published comparison table, VD 0.02
        assert!(should_stop(&report(0.02, 0.04, 0.98), None, &cfg));
        assert!(!should_stop(&report(0.05, 0.08, 0.91), None, &cfg));
        let ari = RunConfig {
            stop_metric: StopMetric::Ari,
            epsilon: 0.0,
            ..cfg.clone()
        };
        assert!(should_stop(&report(0.5, 0.5, 1.0), None, &ari));
        let nvi = RunConfig {
            stop_metric: StopMetric::Nvi,
            ..cfg.clone()
        };
        assert!(!should_stop(&report(0.0, 0.04, 1.0), None, &nvi));
    }

    #[test]
    fn stop_rule_delta() {
        let cfg = RunConfig {
            stop_on_delta: true,
            ..Default::default()
        };
        let a = report(0.17, 0.34, 0.83);
        let b = report(0.06, 0.12, 0.83);
        assert!(!should_stop(&a, None, &cfg));
        assert!(!should_stop(&b, Some(&a), &cfg));
        let c = report(0.05, 0.08, 0.91);
        assert!(should_stop(&c, Some(&b), &cfg));
    }

    fn rec(t: usize, part: Partition) -> IterationRecord {
        IterationRecord {
            t,
            requested_n: None,
            achieved_topics: part.topic_count(),
            natural_topics: part.topic_count(),
            outlier_ids: part.outliers(),
            partition: part,
            reps: Vec::new(),
            vs_previous: None,
        }
    }

    #[test]
    fn assembly() {
        let docs: Vec<Document> = ["a", "b", "c", "d", "e", "f"]
            .iter()
            .map(|id| Document::from_clean(*id, "x"))
            .collect();
        let r0 = rec(
            0,
            Partition::from_raw([("a", -1), ("b", 0), ("c", 0), ("d", 1), ("e", 1), ("f", -1)]),
        );
        let r1 = rec(
            1,
            Partition::from_raw([("b", 0), ("c", 0), ("d", -1), ("e", 0)]),
        );
        let (p, names) = assemble_final(&[r0.clone(), r1], &docs);
        assert_eq!(p.len(), 6);
        assert_eq!(p.get("b"), Some(0));
        assert_eq!(p.get("d"), Some(OUTLIER));
        assert_eq!(p.get("a"), Some(1));
        assert_eq!(p.get("f"), Some(1));
        assert_eq!(names[&1], "outlier@0");
        assert_eq!(names[&OUTLIER], "outlier@1");
        assert_eq!(names[&0], "topic");

        // single record without outliers
        let only = rec(0, Partition::from_raw([("a", 0), ("b", 1)]));
        let (p, _) = assemble_final(std::slice::from_ref(&only), &docs[..2]);
        assert_eq!(p, only.partition);

        let (p, names) = assemble_final(&[], &docs);
        assert_eq!(p.outlier_count(), 6);
        assert_eq!(names.len(), 1);
    }
}

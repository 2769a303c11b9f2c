//! Iterative topic modelling.
//!
//! A corpus is cleaned ([`textprep`]), embedded ([`vectorize`]), clustered with a
//! density-linkage clusterer that labels outliers `-1` ([`cluster`]), and then
//! re-clustered round after round with the outlier group set aside
//! ([`iterloop`]). Successive rounds are compared with the indices in
//! [`cmpindex`]; the loop stops once they agree within a threshold. Topic
//! descriptions come from class-based TF-IDF ([`topicrep`]).

pub mod cluster;
pub mod cmpindex;
pub mod corpus;
pub mod error;
pub mod fmt;
pub mod iterloop;
pub mod partition;
pub mod rundir;
pub mod synth;
pub mod textprep;
pub mod topicrep;
pub mod vectorize;

pub use cluster::{cluster, ClusterParams, Clustering, Selection};
pub use cmpindex::{compare, ComparisonReport, ContingencyTable};
pub use error::{Error, Result};
pub use iterloop::{run, IterationRecord, RunConfig, RunResult, StopMetric, StopReason};
pub use partition::{Label, Partition, OUTLIER};
pub use textprep::{clean_document, CleanConfig, Document, RawRecord, Rejection};
pub use topicrep::TopicRep;
pub use vectorize::{EmbeddingMatrix, SparseMatrix, Vocabulary};

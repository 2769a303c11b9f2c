//! Documents → dense low-dimensional embeddings.
//!
//! The built-in route is TF-IDF followed by a seeded randomized truncated SVD.
//! Embeddings produced elsewhere can be loaded from CSV instead.

mod embeddings_csv;
mod sparse;
mod svd;
mod vocab;

pub use embeddings_csv::{
    align_embeddings, load_external_embeddings, read_embeddings_csv, write_embeddings_csv,
};
pub use sparse::{tfidf_matrix, SparseMatrix};
pub use svd::{
    reduce_svd, truncated_svd, SvdFit, MAX_POWER_ITERATIONS, OVERSAMPLES, POWER_ITERATIONS,
    POWER_TOLERANCE,
};
pub use vocab::{build_vocabulary, Vocabulary};

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::textprep::Document;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VectorizeError {
    #[error("no term survives the document-frequency filters")]
    EmptyVocabulary,
    #[error("no documents to vectorize")]
    NoDocuments,
    #[error("requested {requested} dimensions but the matrix is {rows}x{cols}")]
    DimensionTooLarge {
        requested: usize,
        rows: usize,
        cols: usize,
    },
    #[error("embedding missing for id `{0}`")]
    MissingId(String),
    #[error("duplicate embedding id `{0}`")]
    DuplicateId(String),
    #[error("embedding file has id `{0}` that is not in the document set")]
    UnexpectedId(String),
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },
}

/// One row per document, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    doc_ids: Vec<String>,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Panics if the shape does not match or ids repeat. Finite values are
    /// the caller's responsibility.
    pub fn new(doc_ids: Vec<String>, dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(doc_ids.len() * dim, data.len(), "embedding shape mismatch");
        let mut seen = HashSet::with_capacity(doc_ids.len());
        for id in &doc_ids {
            assert!(seen.insert(id.as_str()), "duplicate embedding id `{id}`");
        }
        Self { doc_ids, dim, data }
    }

    pub fn from_rows(doc_ids: Vec<String>, rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), dim, "ragged embedding rows");
                r.iter().copied()
            })
            .collect();
        Self::new(doc_ids, dim, data)
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1)).take(self.len())
    }

    /// Rows whose id satisfies `keep`, in the current order.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> EmbeddingMatrix {
        let mut ids = Vec::new();
        let mut data = Vec::new();
        for (i, id) in self.doc_ids.iter().enumerate() {
            if keep(id) {
                ids.push(id.clone());
                data.extend_from_slice(self.row(i));
            }
        }
        EmbeddingMatrix {
            doc_ids: ids,
            dim: self.dim,
            data,
        }
    }

    /// Rows reordered by `order` (indices into the current rows).
    pub fn select(&self, order: &[usize]) -> EmbeddingMatrix {
        let ids = order.iter().map(|&i| self.doc_ids[i].clone()).collect();
        let data = order
            .iter()
            .flat_map(|&i| self.row(i).iter().copied())
            .collect();
        EmbeddingMatrix {
            doc_ids: ids,
            dim: self.dim,
            data,
        }
    }
}

/// Settings of the built-in TF-IDF + SVD embedder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbedConfig {
    pub dims: usize,
    pub min_df: usize,
    pub max_df_ratio: f64,
    pub seed: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            dims: 5,
            min_df: 2,
            max_df_ratio: 1.0,
            seed: 0,
        }
    }
}

/// Vocabulary, TF-IDF and SVD in one step.
pub fn embed_tfidf_svd(
    docs: &[Document],
    cfg: &EmbedConfig,
) -> Result<EmbeddingMatrix, VectorizeError> {
    let vocab = build_vocabulary(docs, cfg.min_df, cfg.max_df_ratio)?;
    let m = tfidf_matrix(docs, &vocab);
    let ids = docs.iter().map(|d| d.id.clone()).collect();
    reduce_svd(&m, ids, cfg.dims, cfg.seed)
}

use std::collections::{BTreeMap, BTreeSet};

use super::VectorizeError;
use crate::textprep::Document;

/// Sorted terms with their document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    /// Number of documents the vocabulary was built from.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn term(&self, idx: usize) -> &str {
        &self.terms[idx]
    }
}

/// Keeps terms with `min_df <= df <= max_df_ratio * n`.
pub fn build_vocabulary(
    docs: &[Document],
    min_df: usize,
    max_df_ratio: f64,
) -> Result<Vocabulary, VectorizeError> {
    if docs.is_empty() {
        return Err(VectorizeError::NoDocuments);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let uniq: BTreeSet<&str> = doc.tokens().collect();
        for t in uniq {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let max_df = max_df_ratio * docs.len() as f64;
    let (terms, doc_freq): (Vec<String>, Vec<usize>) = df
        .into_iter()
        .filter(|&(_, f)| f >= min_df && f as f64 <= max_df)
        .map(|(t, f)| (t.to_string(), f))
        .unzip();
    if terms.is_empty() {
        return Err(VectorizeError::EmptyVocabulary);
    }
    Ok(Vocabulary {
        terms,
        doc_freq,
        n_docs: docs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(texts: &[&str]) -> Vec<Document> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::from_clean(format!("d{i}"), *t))
            .collect()
    }

    #[test]
    fn filters() {
        let d = docs(&["a b", "a c", "a d"]);
        assert_eq!(build_vocabulary(&d, 2, 1.0).unwrap().terms(), &["a"]);
        assert_eq!(
            build_vocabulary(&d, 1, 1.0).unwrap().terms(),
            &["a", "b", "c", "d"]
        );
        let v = build_vocabulary(&d, 1, 0.5).unwrap();
        assert_eq!(v.terms(), &["b", "c", "d"]);
        assert_eq!(v.doc_freq(), &[1, 1, 1]);
    }

    #[test]
    fn df_counts_documents_not_occurrences() {
        let v = build_vocabulary(&docs(&["a a a", "b"]), 1, 1.0).unwrap();
        assert_eq!(v.doc_freq(), &[1, 1]);
        assert_eq!(v.index_of("b"), Some(1));
        assert_eq!(v.index_of("z"), None);
    }

    #[test]
    fn empty() {
        assert_eq!(
            build_vocabulary(&docs(&["a", "b"]), 2, 1.0),
            Err(VectorizeError::EmptyVocabulary)
        );
        assert_eq!(
            build_vocabulary(&[], 1, 1.0),
            Err(VectorizeError::NoDocuments)
        );
    }
}

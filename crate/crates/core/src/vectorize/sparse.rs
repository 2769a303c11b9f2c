use std::collections::BTreeMap;

use rayon::prelude::*;

use super::Vocabulary;
use crate::textprep::Document;

/// Compressed sparse row matrix with non-negative finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row `(col, weight)` lists. Columns within a row must be
    /// strictly increasing.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &rows {
            for w in row.windows(2) {
                assert!(w[0].0 < w[1].0, "columns must be strictly increasing");
            }
            for &(c, v) in row {
                assert!(c < n_cols && v.is_finite() && v >= 0.0);
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows: rows.len(),
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// All stored `(row, col, weight)` triples in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&c, &v)| (i, c, v))
        })
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.n_cols];
        for (i, j, v) in self.entries() {
            rows[j].push((i, v));
        }
        SparseMatrix::from_rows(self.n_rows, rows)
    }

    /// `self · x` where `x` is `n_cols × k`, row-major. Rows are computed
    /// independently, so the result does not depend on the thread count.
    pub fn mul_dense(&self, x: &[f64], k: usize) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols * k);
        let mut out = vec![0.0; self.n_rows * k];
        out.par_chunks_mut(k.max(1))
            .enumerate()
            .for_each(|(i, dst)| {
                let (cols, vals) = self.row(i);
                for (&c, &v) in cols.iter().zip(vals) {
                    for (d, s) in dst.iter_mut().zip(&x[c * k..(c + 1) * k]) {
                        *d += v * s;
                    }
                }
            });
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.entries() {
            out[i][j] = v;
        }
        out
    }
}

/// Raw-count TF times smoothed IDF `ln((1+n)/(1+df))`, each nonzero row
/// L2-normalized. Zero rows are kept.
pub fn tfidf_matrix(docs: &[Document], vocab: &Vocabulary) -> SparseMatrix {
    let n = docs.len() as f64;
    let idf: Vec<f64> = vocab
        .doc_freq()
        .iter()
        .map(|&df| ((1.0 + n) / (1.0 + df as f64)).ln())
        .collect();
    let rows = docs
        .par_iter()
        .map(|doc| {
            let mut tf: BTreeMap<usize, u32> = BTreeMap::new();
            for t in doc.tokens() {
                if let Some(j) = vocab.index_of(t) {
                    *tf.entry(j).or_insert(0) += 1;
                }
            }
            let mut row: Vec<(usize, f64)> = tf
                .into_iter()
                .map(|(j, c)| (j, c as f64 * idf[j]))
                .filter(|&(_, w)| w > 0.0)
                .collect();
            let norm = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, w) in &mut row {
                    *w /= norm;
                }
            }
            row
        })
        .collect();
    SparseMatrix::from_rows(vocab.len(), rows)
}

use std::collections::BTreeMap;

use crate::partition::Label;

/// Co-membership counts between two labelings of the same items.
///
/// Rows follow the sorted distinct labels of the first labeling, columns those
/// of the second. Stored sparsely; only nonzero cells are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    n: u64,
    row_labels: Vec<Label>,
    col_labels: Vec<Label>,
    cells: BTreeMap<(usize, usize), u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
}

impl ContingencyTable {
    /// `a` and `b` are labels of the same items, position by position.
    pub fn from_labels(a: &[Label], b: &[Label]) -> Self {
        assert_eq!(a.len(), b.len(), "labelings must have equal length");
        let index = |labels: &[Label]| -> BTreeMap<Label, usize> {
            let mut m: BTreeMap<Label, usize> = labels.iter().map(|&l| (l, 0)).collect();
            for (i, v) in m.values_mut().enumerate() {
                *v = i;
            }
            m
        };
        let (ra, rb) = (index(a), index(b));
        let mut cells = BTreeMap::new();
        let mut row_sums = vec![0; ra.len()];
        let mut col_sums = vec![0; rb.len()];
        for (la, lb) in a.iter().zip(b) {
            let (i, j) = (ra[la], rb[lb]);
            *cells.entry((i, j)).or_insert(0) += 1;
            row_sums[i] += 1;
            col_sums[j] += 1;
        }
        Self {
            n: a.len() as u64,
            row_labels: ra.into_keys().collect(),
            col_labels: rb.into_keys().collect(),
            cells,
            row_sums,
            col_sums,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row_sums.len(), self.col_sums.len())
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells.get(&(i, j)).copied().unwrap_or(0)
    }

    /// Nonzero cells as `(row, col, count)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.cells.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn row_maxima(&self) -> Vec<u64> {
        let mut out = vec![0; self.row_sums.len()];
        for (i, _, c) in self.cells() {
            out[i] = out[i].max(c);
        }
        out
    }

    pub fn col_maxima(&self) -> Vec<u64> {
        let mut out = vec![0; self.col_sums.len()];
        for (_, j, c) in self.cells() {
            out[j] = out[j].max(c);
        }
        out
    }

    /// Dense `R × C` counts, mostly for display and tests.
    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let (r, c) = self.shape();
        (0..r)
            .map(|i| (0..c).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

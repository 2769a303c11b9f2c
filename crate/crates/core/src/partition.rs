//! Document → label assignments.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use thiserror::Error;

pub type Label = i32;

/// Label of the outlier group.
pub const OUTLIER: Label = -1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("label {0} is below -1")]
    BadLabel(Label),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("non-outlier labels are not contiguous from 0 (missing {0})")]
    Gap(Label),
}

/// A total assignment of a universe of document ids to labels, `-1` meaning
/// outlier. Non-outlier labels are `0..T`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    assignment: BTreeMap<String, Label>,
}

impl Partition {
    /// Builds a partition, checking label range and contiguity.
    pub fn new(assignment: BTreeMap<String, Label>) -> Result<Self, PartitionError> {
        let labels: BTreeSet<Label> = assignment.values().copied().collect();
        if let Some(&l) = labels.iter().find(|&&l| l < OUTLIER) {
            return Err(PartitionError::BadLabel(l));
        }
        let topics: Vec<Label> = labels.into_iter().filter(|&l| l >= 0).collect();
        for (expected, &l) in topics.iter().enumerate() {
            if l != expected as Label {
                return Err(PartitionError::Gap(expected as Label));
            }
        }
        Ok(Self { assignment })
    }

    /// Builds from arbitrary labels, renumbering the non-outlier groups to
    /// `0..T` by decreasing size (ties: smallest member id first).
    pub fn from_raw<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Label)>,
        S: Into<String>,
    {
        let raw: BTreeMap<String, Label> = pairs.into_iter().map(|(k, v)| (k.into(), v)).collect();
        Self {
            assignment: relabel_by_size(&raw),
        }
    }

    pub fn from_parallel(ids: &[String], labels: &[Label]) -> Self {
        Self::from_raw(ids.iter().cloned().zip(labels.iter().copied()))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<Label> {
        self.assignment.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Label)> {
        self.assignment.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.assignment.keys().map(String::as_str)
    }

    pub fn assignment(&self) -> &BTreeMap<String, Label> {
        &self.assignment
    }

    /// Number of non-outlier topics.
    pub fn topic_count(&self) -> usize {
        self.assignment
            .values()
            .filter(|&&l| l != OUTLIER)
            .max()
            .map_or(0, |&m| m as usize + 1)
    }

    /// Number of groups including the outlier group when it is nonempty.
    pub fn group_count(&self) -> usize {
        self.topic_count() + usize::from(self.outlier_count() > 0)
    }

    pub fn outlier_count(&self) -> usize {
        self.assignment.values().filter(|&&l| l == OUTLIER).count()
    }

    pub fn outliers(&self) -> BTreeSet<String> {
        self.members(OUTLIER)
    }

    pub fn members(&self, label: Label) -> BTreeSet<String> {
        self.assignment
            .iter()
            .filter(|(_, &l)| l == label)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Group sizes keyed by label, including `-1` when present.
    pub fn sizes(&self) -> BTreeMap<Label, usize> {
        let mut out = BTreeMap::new();
        for &l in self.assignment.values() {
            *out.entry(l).or_insert(0) += 1;
        }
        out
    }

    /// Restriction to the ids also present in `universe`; labels unchanged.
    pub fn restrict<'a>(&self, universe: impl Fn(&str) -> bool + 'a) -> Partition {
        Partition {
            assignment: self
                .assignment
                .iter()
                .filter(|(k, _)| universe(k))
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
        }
    }

    /// Writes the `id,label` CSV.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["id", "label"])?;
        for (id, label) in &self.assignment {
            wr.write_record([id.as_str(), &label.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads an `id,label` CSV. Extra columns are ignored. Labels are kept as
    /// written (they may be non-contiguous), only the `>= -1` rule is checked.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, PartitionError> {
        let mut rd = csv::Reader::from_reader(r);
        let parse_err = |line: u64, message: String| PartitionError::Parse { line, message };
        let headers = rd
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| parse_err(1, format!("missing column `{name}`")))
        };
        let (id_col, label_col) = (col("id")?, col("label")?);
        let mut assignment = BTreeMap::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                parse_err(line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let id = rec.get(id_col).unwrap_or_default();
            let label: Label = rec
                .get(label_col)
                .unwrap_or_default()
                .trim()
                .parse()
                .map_err(|_| parse_err(line, "label is not an integer".into()))?;
            if label < OUTLIER {
                return Err(PartitionError::BadLabel(label));
            }
            if assignment.insert(id.to_string(), label).is_some() {
                return Err(PartitionError::DuplicateId(id.to_string()));
            }
        }
        Ok(Self { assignment })
    }
}

/// Renumbers non-outlier labels to `0..T` by decreasing size, ties broken by
/// the smallest member id.
pub(crate) fn relabel_by_size(raw: &BTreeMap<String, Label>) -> BTreeMap<String, Label> {
    // BTreeMap iteration is in id order, so the first id seen is the smallest.
    let mut groups: BTreeMap<Label, (usize, &str)> = BTreeMap::new();
    for (id, &l) in raw {
        if l == OUTLIER {
            continue;
        }
        groups.entry(l).or_insert((0, id.as_str())).0 += 1;
    }
    let mut order: Vec<(Label, usize, &str)> = groups
        .into_iter()
        .map(|(l, (n, first))| (l, n, first))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.2.cmp(b.2)));
    let remap: BTreeMap<Label, Label> = order
        .iter()
        .enumerate()
        .map(|(new, &(old, _, _))| (old, new as Label))
        .collect();
    raw.iter()
        .map(|(id, &l)| (id.clone(), if l == OUTLIER { OUTLIER } else { remap[&l] }))
        .collect()
}

//! Clustering-comparison indices: Rand, adjusted Rand, normalized Van Dongen,
//! variation of information (nats) and VI normalized by joint entropy.
//!
//! All indices are computed from a [`ContingencyTable`]. Pair counts use exact
//! integer arithmetic; only the final division is floating point. The outlier
//! label is an ordinary label here.

mod contingency;
mod oracle;

pub use contingency::ContingencyTable;
pub use oracle::{oracle_pair_counts, PairCounts};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt::serialize_sig6;
use crate::partition::{Label, Partition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompareError {
    #[error("partitions share {0} ids, at least 2 are needed")]
    InsufficientOverlap(usize),
    #[error("partitions are over different universes")]
    UniverseMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    #[serde(serialize_with = "serialize_sig6")]
    pub rand: f64,
    #[serde(serialize_with = "serialize_sig6")]
    pub ari: f64,
    #[serde(serialize_with = "serialize_sig6")]
    pub vdm: f64,
    #[serde(rename = "vi_nats", serialize_with = "serialize_sig6")]
    pub vi: f64,
    #[serde(serialize_with = "serialize_sig6")]
    pub nvi: f64,
    pub n_common: usize,
}

impl ComparisonReport {
    pub fn from_table(ct: &ContingencyTable) -> Self {
        Self {
            rand: rand_index(ct),
            ari: adjusted_rand(ct),
            vdm: van_dongen(ct),
            vi: variation_of_information(ct),
            nvi: normalized_vi(ct),
            n_common: ct.n() as usize,
        }
    }
}

/// Restricts both partitions to the ids they have in common.
pub fn restrict_to_common(
    a: &Partition,
    b: &Partition,
) -> Result<(Partition, Partition), CompareError> {
    let ra = a.restrict(|id| b.get(id).is_some());
    let rb = b.restrict(|id| a.get(id).is_some());
    if ra.len() < 2 {
        return Err(CompareError::InsufficientOverlap(ra.len()));
    }
    Ok((ra, rb))
}

/// Contingency table of two partitions over the same universe.
pub fn contingency(a: &Partition, b: &Partition) -> Result<ContingencyTable, CompareError> {
    if a.len() != b.len() || a.ids().zip(b.ids()).any(|(x, y)| x != y) {
        return Err(CompareError::UniverseMismatch);
    }
    let la: Vec<Label> = a.iter().map(|(_, l)| l).collect();
    let lb: Vec<Label> = b.iter().map(|(_, l)| l).collect();
    Ok(ContingencyTable::from_labels(&la, &lb))
}

pub fn compare(a: &Partition, b: &Partition) -> Result<ComparisonReport, CompareError> {
    let (ra, rb) = restrict_to_common(a, b)?;
    let ct = contingency(&ra, &rb)?;
    Ok(ComparisonReport::from_table(&ct))
}

fn choose2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

/// Σ C(n_ij, 2), Σ C(a_i, 2), Σ C(b_j, 2), C(n, 2).
fn pair_sums(ct: &ContingencyTable) -> (u128, u128, u128, u128) {
    let cells = ct.cells().map(|(_, _, c)| choose2(c)).sum();
    let rows = ct.row_sums().iter().map(|&a| choose2(a)).sum();
    let cols = ct.col_sums().iter().map(|&b| choose2(b)).sum();
    (cells, rows, cols, choose2(ct.n()))
}

pub fn rand_index(ct: &ContingencyTable) -> f64 {
    let (tp, sa, sb, total) = pair_sums(ct);
    if total == 0 {
        return 1.0;
    }
    // TN = total - sa - sb + tp, so agreements = total + 2tp - sa - sb
    let agree = total + 2 * tp - sa - sb;
    agree as f64 / total as f64
}

pub fn adjusted_rand(ct: &ContingencyTable) -> f64 {
    let (tp, sa, sb, total) = pair_sums(ct);
    // Scaled by C(n,2): (tp·N − sa·sb) / (½(sa+sb)·N − sa·sb)
    let (tp, sa, sb, total) = (tp as i128, sa as i128, sb as i128, total as i128);
    let num = 2 * (tp * total - sa * sb);
    let den = (sa + sb) * total - 2 * sa * sb;
    if den == 0 {
        return 1.0;
    }
    num as f64 / den as f64
}

pub fn van_dongen(ct: &ContingencyTable) -> f64 {
    let n = ct.n();
    if n == 0 {
        return 0.0;
    }
    let row_max: u64 = ct.row_maxima().iter().sum();
    let col_max: u64 = ct.col_maxima().iter().sum();
    1.0 - (row_max + col_max) as f64 / (2 * n) as f64
}

/// VI in nats, as Σ p_ij [ln(a_i/n_ij) + ln(b_j/n_ij)], which is exactly zero
/// for identical partitions.
pub fn variation_of_information(ct: &ContingencyTable) -> f64 {
    let n = ct.n() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (rows, cols) = (ct.row_sums(), ct.col_sums());
    let vi: f64 = ct
        .cells()
        .map(|(i, j, c)| {
            let c = c as f64;
            c / n * ((rows[i] as f64 / c).ln() + (cols[j] as f64 / c).ln())
        })
        .sum();
    vi.max(0.0)
}

pub fn joint_entropy(ct: &ContingencyTable) -> f64 {
    let n = ct.n() as f64;
    -ct.cells()
        .map(|(_, _, c)| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// VI divided by the joint entropy; 0 when the joint entropy is 0.
pub fn normalized_vi(ct: &ContingencyTable) -> f64 {
    let h = joint_entropy(ct);
    if h <= 0.0 {
        return 0.0;
    }
    (variation_of_information(ct) / h).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(a: &[Label], b: &[Label]) -> ContingencyTable {
        ContingencyTable::from_labels(a, b)
    }

    const A: [Label; 6] = [1, 1, 1, 2, 2, 2];
    const B: [Label; 6] = [1, 1, 2, 2, 2, 2];

    #[test]
    fn worked_example() {
        let ct = table(&A, &B);
        assert!((rand_index(&ct) - 2.0 / 3.0).abs() < 1e-12);
        assert!((adjusted_rand(&ct) - 1.2 / 3.7).abs() < 1e-12);
        assert!((van_dongen(&ct) - 1.0 / 6.0).abs() < 1e-12);
        // direct entropies: H(A)=ln2, H(B)=-(1/3 ln 1/3 + 2/3 ln 2/3),
        // H(A,B) over cells (2,1,0,3)/6
        let h = |ps: &[f64]| {
            -ps.iter()
                .filter(|&&p| p > 0.0)
                .map(|p| p * p.ln())
                .sum::<f64>()
        };
        let ha = h(&[0.5, 0.5]);
        let hb = h(&[2.0 / 6.0, 4.0 / 6.0]);
        let hab = h(&[2.0 / 6.0, 1.0 / 6.0, 3.0 / 6.0]);
        let vi = 2.0 * hab - ha - hb;
        assert!((variation_of_information(&ct) - vi).abs() < 1e-12);
        assert!((variation_of_information(&ct) - 0.6932).abs() < 1e-4);
        assert!((normalized_vi(&ct) - vi / hab).abs() < 1e-12);
        assert!((normalized_vi(&ct) - 0.6854).abs() < 1e-4);
    }

    #[test]
    fn rand_edge_cases() {
        assert_eq!(rand_index(&table(&A, &A)), 1.0);
        // one cluster vs singletons, n=3: no agreeing pairs
        assert_eq!(rand_index(&table(&[0, 0, 0], &[0, 1, 2])), 0.0);
    }

    #[test]
    fn ari_edge_cases() {
        assert_eq!(adjusted_rand(&table(&A, &A)), 1.0);
        assert_eq!(adjusted_rand(&table(&[0, 1, 2], &[3, 4, 5])), 1.0);
    }

    #[test]
    fn van_dongen_cases() {
        assert_eq!(van_dongen(&table(&A, &A)), 0.0);
        assert!((van_dongen(&table(&[0, 0, 0, 0], &[1, 2, 2, 2])) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn vi_cases() {
        assert_eq!(variation_of_information(&table(&A, &A)), 0.0);
        assert_eq!(normalized_vi(&table(&A, &A)), 0.0);
        // independent 2x2 with equal cells
        let ct = table(&[0, 0, 1, 1], &[0, 1, 0, 1]);
        assert!((variation_of_information(&ct) - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((normalized_vi(&ct) - 1.0).abs() < 1e-12);
        // both trivial
        assert_eq!(normalized_vi(&table(&[0, 0, 0], &[5, 5, 5])), 0.0);
    }

    #[test]
    fn restrict_and_compare() {
        let a = Partition::from_raw([("a", 0), ("b", 0), ("c", -1), ("d", 1)]);
        let b = Partition::from_raw([("a", 0), ("b", 0), ("d", 1)]);
        let (ra, rb) = restrict_to_common(&a, &b).unwrap();
        assert_eq!(ra.len(), 3);
        assert_eq!(rb, b);
        let rep = compare(&a, &b).unwrap();
        assert_eq!(
            (rep.rand, rep.ari, rep.vdm, rep.vi, rep.nvi),
            (1.0, 1.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(rep.n_common, 3);

        let c = Partition::from_raw([("x", 0), ("y", 0)]);
        assert_eq!(compare(&a, &c), Err(CompareError::InsufficientOverlap(0)));
        assert_eq!(contingency(&a, &b), Err(CompareError::UniverseMismatch));
    }

    #[test]
    fn report_serializes_with_six_digits() {
        let rep = ComparisonReport::from_table(&table(&A, &B));
        let v = serde_json::to_value(rep).unwrap();
        assert_eq!(v["ari"], serde_json::json!(0.324324));
        assert_eq!(v["vdm"], serde_json::json!(0.166667));
        assert!(v.get("vi_nats").is_some());
    }
}

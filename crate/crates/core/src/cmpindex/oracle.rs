use crate::partition::Label;

/// Pair classification over all `C(n, 2)` item pairs.
///
/// `tp`: together in both, `fp`: together only in `a`, `fn_`: together only
/// in `b`, `tn`: apart in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn rand(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// ARI in its pair-count form,
    /// `2(tp·tn − fn·fp) / ((tp+fn)(fn+tn) + (tp+fp)(fp+tn))`.
    pub fn ari(&self) -> f64 {
        let (tp, fp, fn_, tn) = (
            self.tp as i128,
            self.fp as i128,
            self.fn_ as i128,
            self.tn as i128,
        );
        let den = (tp + fn_) * (fn_ + tn) + (tp + fp) * (fp + tn);
        if den == 0 {
            return 1.0;
        }
        (2 * (tp * tn - fn_ * fp)) as f64 / den as f64
    }
}

/// Exhaustive pair enumeration. Quadratic; meant for checking the
/// contingency-table path on small inputs.
pub fn oracle_pair_counts(a: &[Label], b: &[Label]) -> PairCounts {
    assert_eq!(a.len(), b.len());
    let mut pc = PairCounts::default();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => pc.tp += 1,
                (true, false) => pc.fp += 1,
                (false, true) => pc.fn_ += 1,
                (false, false) => pc.tn += 1,
            }
        }
    }
    pc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let pc = oracle_pair_counts(&[1, 1, 1, 2, 2, 2], &[1, 1, 2, 2, 2, 2]);
        assert_eq!(
            pc,
            PairCounts {
                tp: 4,
                fp: 2,
                fn_: 3,
                tn: 6
            }
        );
        assert!((pc.rand() - 2.0 / 3.0).abs() < 1e-15);
        assert!((pc.ari() - 1.2 / 3.7).abs() < 1e-12);
    }

    #[test]
    fn identical_and_tiny() {
        let l = [0, 0, 1, 2, 2];
        let pc = oracle_pair_counts(&l, &l);
        assert_eq!((pc.fp, pc.fn_), (0, 0));
        assert_eq!(
            oracle_pair_counts(&[0, 0], &[1, 1]),
            PairCounts {
                tp: 1,
                ..Default::default()
            }
        );
        assert_eq!(
            oracle_pair_counts(&[0, 1], &[1, 0]),
            PairCounts {
                tn: 1,
                ..Default::default()
            }
        );
    }
}

use rayon::prelude::*;

use super::ClusterError;
use crate::vectorize::EmbeddingMatrix;

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distance from each point to its `min_samples`-th nearest other point.
pub fn core_distances(emb: &EmbeddingMatrix, min_samples: usize) -> Result<Vec<f64>, ClusterError> {
    let n = emb.len();
    if min_samples == 0 || n <= min_samples {
        return Err(ClusterError::TooFewPoints {
            n,
            required: min_samples + 1,
        });
    }
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let p = emb.row(i);
            let mut d: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| euclidean(p, emb.row(j)))
                .collect();
            let (_, kth, _) = d.select_nth_unstable_by(min_samples - 1, f64::total_cmp);
            *kth
        })
        .collect())
}

pub fn mutual_reachability(emb: &EmbeddingMatrix, cores: &[f64], p: usize, q: usize) -> f64 {
    mutual_reachability_from(euclidean(emb.row(p), emb.row(q)), cores[p], cores[q])
}

pub fn mutual_reachability_from(dist: f64, core_p: f64, core_q: f64) -> f64 {
    dist.max(core_p).max(core_q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> EmbeddingMatrix {
        let ids = (0..xs.len()).map(|i| format!("p{i}")).collect();
        EmbeddingMatrix::new(ids, 1, xs.to_vec())
    }

    #[test]
    fn cores_on_a_line() {
        let e = line(&[0.0, 1.0, 3.0]);
        assert_eq!(core_distances(&e, 1).unwrap(), vec![1.0, 1.0, 2.0]);
        // min_samples = n-1: farthest other point
        assert_eq!(core_distances(&e, 2).unwrap(), vec![3.0, 2.0, 3.0]);
        assert!(matches!(
            core_distances(&e, 3),
            Err(ClusterError::TooFewPoints { n: 3, required: 4 })
        ));
    }

    #[test]
    fn duplicates_have_zero_core() {
        let e = line(&[2.0, 2.0, 5.0, 5.0]);
        assert_eq!(core_distances(&e, 1).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn reachability() {
        let e = line(&[0.0, 1.0, 3.0]);
        let cores = core_distances(&e, 1).unwrap();
        assert_eq!(mutual_reachability(&e, &cores, 0, 1), 1.0);
        assert_eq!(mutual_reachability(&e, &cores, 0, 2), 3.0);
        assert_eq!(mutual_reachability(&e, &cores, 1, 2), 2.0);
        assert_eq!(mutual_reachability_from(4.5, 0.0, 0.0), 4.5);
    }
}

//! Seeded randomized truncated SVD (range finder with power iterations).

use nalgebra::{DMatrix, QR, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{EmbeddingMatrix, SparseMatrix, VectorizeError};

/// Minimum number of power iterations.
pub const POWER_ITERATIONS: usize = 4;
/// Power iterations continue past the minimum until the captured energy of the
/// leading `d` directions changes by less than this, relatively.
pub const POWER_TOLERANCE: f64 = 1e-13;
pub const MAX_POWER_ITERATIONS: usize = 300;
pub const OVERSAMPLES: usize = 10;

#[derive(Debug, Clone)]
pub struct SvdFit {
    /// Leading singular values, descending.
    pub singular_values: Vec<f64>,
    /// `d × n_cols`; row `k` is the k-th right singular vector.
    pub components: DMatrix<f64>,
    /// `n_rows × d`, row-major: rows of the input projected on the components.
    pub projection: Vec<f64>,
    /// Share of the squared Frobenius norm captured by the projection.
    pub explained_variance_ratio: f64,
}

fn to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn orthonormal_basis(y: DMatrix<f64>) -> DMatrix<f64> {
    QR::new(y).q()
}

pub fn truncated_svd(m: &SparseMatrix, d: usize, seed: u64) -> Result<SvdFit, VectorizeError> {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    if d == 0 || d > rows.min(cols) {
        return Err(VectorizeError::DimensionTooLarge {
            requested: d,
            rows,
            cols,
        });
    }
    let width = (d + OVERSAMPLES).min(rows.min(cols));
    let mt = m.transpose();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega: Vec<f64> = (0..cols * width)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();

    let mut q = orthonormal_basis(DMatrix::from_row_slice(
        rows,
        width,
        &m.mul_dense(&omega, width),
    ));
    let power_step = |q: &DMatrix<f64>| {
        let z = DMatrix::from_row_slice(cols, width, &mt.mul_dense(&to_row_major(q), width));
        let z = orthonormal_basis(z);
        let y = DMatrix::from_row_slice(rows, width, &m.mul_dense(&to_row_major(&z), width));
        orthonormal_basis(y)
    };
    // Bᵀ = Aᵀ Q is cols × width; its left singular vectors are A's right ones.
    let project = |q: &DMatrix<f64>| {
        let bt = DMatrix::from_row_slice(cols, width, &mt.mul_dense(&to_row_major(q), width));
        let svd = SVD::new(bt, true, false);
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .total_cmp(&svd.singular_values[a])
                .then(a.cmp(&b))
        });
        let energy: f64 = order
            .iter()
            .take(d)
            .map(|&k| svd.singular_values[k].powi(2))
            .sum();
        (svd, order, energy)
    };
    for _ in 0..POWER_ITERATIONS {
        q = power_step(&q);
    }
    let (mut svd, mut order, mut energy) = project(&q);
    for _ in POWER_ITERATIONS..MAX_POWER_ITERATIONS {
        q = power_step(&q);
        let next = project(&q);
        let settled = (next.2 - energy).abs() <= POWER_TOLERANCE * next.2.max(f64::MIN_POSITIVE);
        (svd, order, energy) = next;
        if settled {
            break;
        }
    }
    let u = svd.u.as_ref().expect("left singular vectors requested");

    let mut components = DMatrix::zeros(d, cols);
    let mut singular_values = Vec::with_capacity(d);
    for (k, &src) in order.iter().take(d).enumerate() {
        let mut v = u.column(src).into_owned();
        // sign convention: the largest-magnitude entry is positive
        let pivot = v.iter().enumerate().fold(
            0,
            |best, (i, x)| {
                if x.abs() > v[best].abs() {
                    i
                } else {
                    best
                }
            },
        );
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        components.row_mut(k).copy_from(&v.transpose());
        singular_values.push(svd.singular_values[src]);
    }

    let projection = m.mul_dense(&to_row_major(&components.transpose()), d);
    let total = m.frobenius_sq();
    let captured: f64 = projection.iter().map(|x| x * x).sum();
    Ok(SvdFit {
        singular_values,
        components,
        projection,
        explained_variance_ratio: if total > 0.0 { captured / total } else { 0.0 },
    })
}

/// Projects the rows of `m` onto its top-`d` right singular vectors.
pub fn reduce_svd(
    m: &SparseMatrix,
    doc_ids: Vec<String>,
    d: usize,
    seed: u64,
) -> Result<EmbeddingMatrix, VectorizeError> {
    assert_eq!(doc_ids.len(), m.n_rows());
    let fit = truncated_svd(m, d, seed)?;
    Ok(EmbeddingMatrix::new(doc_ids, d, fit.projection))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use rand::Rng;

    fn dense(m: &SparseMatrix) -> DMatrix<f64> {
        let rows = m.to_dense();
        DMatrix::from_fn(m.n_rows(), m.n_cols(), |i, j| rows[i][j])
    }

    fn random_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> SparseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows)
            .map(|_| {
                (0..cols)
                    .filter_map(|j| {
                        if rng.random_bool(density) {
                            Some((j, rng.random::<f64>()))
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        SparseMatrix::from_rows(cols, data)
    }

    /// ‖A − A V Vᵀ‖_F for the fitted components.
    fn reconstruction_error(a: &DMatrix<f64>, fit: &SvdFit) -> f64 {
        let v = fit.components.transpose();
        (a - a * &v * v.transpose()).norm()
    }

    /// Best rank-d error from the eigenvalues of the Gram matrix AᵀA.
    fn oracle_error(a: &DMatrix<f64>, d: usize) -> f64 {
        let eig = SymmetricEigen::new(a.transpose() * a);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        ev[d..].iter().sum::<f64>().sqrt()
    }

    #[test]
    fn rank_one_is_exact() {
        let base = [(0usize, 1.0), (3, 2.0), (4, 0.5)];
        let rows = (1..=6)
            .map(|k| base.iter().map(|&(c, v)| (c, v * k as f64)).collect())
            .collect();
        let m = SparseMatrix::from_rows(6, rows);
        let fit = truncated_svd(&m, 1, 3).unwrap();
        assert!(reconstruction_error(&dense(&m), &fit) < 1e-10);
        assert!((fit.explained_variance_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_rank_preserves_inner_products() {
        let m = random_sparse(12, 6, 0.5, 11);
        let fit = truncated_svd(&m, 6, 5).unwrap();
        let a = dense(&m);
        let p = DMatrix::from_row_slice(12, 6, &fit.projection);
        let diff = (&a * a.transpose() - &p * p.transpose()).abs().max();
        assert!(diff < 1e-8, "max inner-product drift {diff}");
    }

    #[test]
    fn matches_dense_oracle() {
        for seed in 0..3 {
            let m = random_sparse(50, 200, 0.05, 100 + seed);
            let a = dense(&m);
            let fit = truncated_svd(&m, 5, seed).unwrap();
            let err = reconstruction_error(&a, &fit);
            let best = oracle_error(&a, 5);
            assert!(err <= best + 1e-6, "seed {seed}: {err} vs optimum {best}");
            // explained variance close to the optimum as well
            let total = a.norm_squared();
            let opt_ratio = (total - best * best) / total;
            assert!((fit.explained_variance_ratio - opt_ratio).abs() < 1e-6);
        }
    }

    #[test]
    fn components_are_orthonormal() {
        let m = random_sparse(30, 40, 0.2, 9);
        let fit = truncated_svd(&m, 4, 1).unwrap();
        let gram = &fit.components * fit.components.transpose();
        assert!((gram - DMatrix::<f64>::identity(4, 4)).abs().max() < 1e-10);
        assert!(fit.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn deterministic_given_seed() {
        let m = random_sparse(40, 30, 0.2, 4);
        let a = truncated_svd(&m, 3, 77).unwrap();
        let b = truncated_svd(&m, 3, 77).unwrap();
        assert_eq!(a.projection, b.projection);
    }

    #[test]
    fn too_many_dimensions() {
        let m = random_sparse(5, 3, 0.9, 1);
        assert_eq!(
            truncated_svd(&m, 4, 0).unwrap_err(),
            VectorizeError::DimensionTooLarge {
                requested: 4,
                rows: 5,
                cols: 3
            }
        );
        assert!(truncated_svd(&m, 0, 0).is_err());
    }
}

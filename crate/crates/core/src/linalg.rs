//! Thin SVD through the symmetric eigenproblem of `[[0, B], [B^T, 0]]`,
//! whose eigenpairs are `(+-s, (u, +-v) / sqrt 2)`.

use nalgebra::{DMatrix, SymmetricEigen};

/// Factors `B = U diag(s) V^T` restricted to singular values above
/// `1e-12 * s_max`, sorted in decreasing order.
#[derive(Debug, Clone)]
pub(crate) struct ThinSvd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn augmented(b: &DMatrix<f64>) -> DMatrix<f64> {
    let (dx, dy) = b.shape();
    let mut h = DMatrix::zeros(dx + dy, dx + dy);
    h.view_mut((0, dx), (dx, dy)).copy_from(b);
    h.view_mut((dx, 0), (dy, dx)).copy_from(&b.transpose());
    h
}

pub(crate) fn thin_svd(b: &DMatrix<f64>) -> ThinSvd {
    let (dx, dy) = b.shape();
    let eig = SymmetricEigen::new(augmented(b));
    let smax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut keep: Vec<usize> = (0..dx + dy).filter(|&i| eig.eigenvalues[i] > 1e-12 * smax).collect();
    keep.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let scale = std::f64::consts::SQRT_2;
    let u = DMatrix::from_fn(dx, keep.len(), |r, c| scale * eig.eigenvectors[(r, keep[c])]);
    let v = DMatrix::from_fn(dy, keep.len(), |r, c| scale * eig.eigenvectors[(dx + r, keep[c])]);
    ThinSvd { u, s: keep.iter().map(|&i| eig.eigenvalues[i]).collect(), v }
}

/// Largest singular value.
pub(crate) fn spectral_norm(b: &DMatrix<f64>) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(augmented(b)).eigenvalues.iter().cloned().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recomposes_rank_deficient_product() {
        let u = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, -1.0]);
        let v = DMatrix::from_row_slice(1, 2, &[0.5, 3.0]);
        let b = &u * &v;
        let svd = thin_svd(&b);
        assert_eq!(svd.s.len(), 1);
        let rec = &svd.u * DMatrix::from_diagonal(&svd.s.clone().into()) * svd.v.transpose();
        assert!((rec - &b).norm() < 1e-13);
        assert!((svd.s[0] - spectral_norm(&b)).abs() < 1e-13);
    }

    #[test]
    fn orthonormal_factors_with_repeated_values() {
        let b = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let svd = thin_svd(&b);
        assert_eq!(svd.s.len(), 3);
        assert!((svd.u.transpose() * &svd.u - DMatrix::identity(3, 3)).norm() < 1e-13);
        assert!((svd.v.transpose() * &svd.v - DMatrix::identity(3, 3)).norm() < 1e-13);
        assert!((svd.s[0] - 2.0).abs() < 1e-14 && (svd.s[2] - 1.0).abs() < 1e-14);
    }
}

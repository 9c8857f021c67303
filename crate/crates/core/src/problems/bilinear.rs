use nalgebra::{DMatrix, DVector};

use super::saddle::SaddleSet;
use crate::linalg::thin_svd;
use super::Problem;
use crate::error::{MmxError, Result};
use crate::point::Point;

/// `f(x, y) = (x - x~)^T B (y - y~)` with the nonzero eigenvalues of `B^T B`
/// in `[m, M]`.
#[derive(Debug, Clone)]
pub struct BilinearProblem {
    b: DMatrix<f64>,
    bt: DMatrix<f64>,
    x_shift: DVector<f64>,
    y_shift: DVector<f64>,
    m: f64,
    big_m: f64,
    saddle: SaddleSet,
    singular_values: Vec<f64>,
}

impl BilinearProblem {
    /// Builds the instance and checks that every nonzero squared singular
    /// value of `B` lies in `[m, M]` (relative slack `1e-9`).
    pub fn new(
        b: DMatrix<f64>,
        x_shift: DVector<f64>,
        y_shift: DVector<f64>,
        m: f64,
        big_m: f64,
    ) -> Result<Self> {
        if b.nrows() == 0 || b.ncols() == 0 {
            return Err(MmxError::InvalidProblem("B must be nonempty".into()));
        }
        if x_shift.len() != b.nrows() || y_shift.len() != b.ncols() {
            return Err(MmxError::Dimension {
                expected: format!("shifts of length ({}, {})", b.nrows(), b.ncols()),
                got: format!("({}, {})", x_shift.len(), y_shift.len()),
            });
        }
        if b.iter().chain(x_shift.iter()).chain(y_shift.iter()).any(|v| !v.is_finite()) {
            return Err(MmxError::InvalidProblem("non-finite entry".into()));
        }
        if !(m > 0.0 && m <= big_m && big_m.is_finite()) {
            return Err(MmxError::domain(format!(
                "need 0 < m <= M < inf, got m = {m}, M = {big_m}"
            )));
        }
        let svd = thin_svd(&b);
        for &s in &svd.s {
            let s2 = s * s;
            if s2 < m * (1.0 - 1e-9) || s2 > big_m * (1.0 + 1e-9) {
                return Err(MmxError::InvalidProblem(format!(
                    "squared singular value {s2:e} outside [m, M] = [{m:e}, {big_m:e}]"
                )));
            }
        }
        let (dx, dy) = (b.nrows(), b.ncols());
        let r = svd.s.len();
        let mut range = DMatrix::zeros(dx + dy, 2 * r);
        range.view_mut((0, 0), (dx, r)).copy_from(&svd.u);
        range.view_mut((dx, r), (dy, r)).copy_from(&svd.v);
        let shift = Point::from_parts(x_shift.clone(), y_shift.clone());
        Ok(Self {
            bt: b.transpose(),
            b,
            x_shift,
            y_shift,
            m,
            big_m,
            saddle: SaddleSet::new(shift, range),
            singular_values: svd.s,
        })
    }

    /// Zero shifts, with `[m, M]` set to the extreme nonzero eigenvalues of `B^T B`.
    pub fn from_matrix(b: DMatrix<f64>) -> Result<Self> {
        let (dx, dy) = (b.nrows(), b.ncols());
        let (m, big_m) = spectral_bounds(&b)?;
        Self::new(b, DVector::zeros(dx), DVector::zeros(dy), m, big_m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn x_shift(&self) -> &DVector<f64> {
        &self.x_shift
    }

    pub fn y_shift(&self) -> &DVector<f64> {
        &self.y_shift
    }

    /// Lower spectral bound `m`.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Upper spectral bound `M`.
    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    /// Nonzero singular values of `B`, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn saddle_set(&self) -> &SaddleSet {
        &self.saddle
    }

    pub fn closest_saddle(&self, z0: &Point) -> Result<Point> {
        self.check_dims(z0)?;
        Ok(self.saddle.project(z0))
    }
}

/// Extreme nonzero eigenvalues of `B^T B`.
pub(crate) fn spectral_bounds(b: &DMatrix<f64>) -> Result<(f64, f64)> {
    let sv = thin_svd(b).s;
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if !(smax > 0.0) {
        return Err(MmxError::InvalidProblem("B has no nonzero singular value".into()));
    }
    Ok((smin * smin, smax * smax))
}

impl Problem for BilinearProblem {
    fn dims(&self) -> (usize, usize) {
        (self.b.nrows(), self.b.ncols())
    }

    fn eval_grad(&self, z: &Point) -> Point {
        let gx = &self.b * (z.y() - &self.y_shift);
        let gy = &self.bt * (z.x() - &self.x_shift);
        Point::from_parts(gx, gy)
    }

    fn eval_value(&self, z: &Point) -> Option<f64> {
        let dx = z.x() - &self.x_shift;
        let dy = z.y() - &self.y_shift;
        Some(dx.dot(&(&self.b * dy)))
    }

    fn eval_hessian_vec(&self, _z: &Point, v: &Point) -> Option<Point> {
        Some(Point::from_parts(&self.b * v.y(), &self.bt * v.x()))
    }

    fn smoothness(&self) -> f64 {
        self.big_m.sqrt()
    }

    fn saddle_for(&self, z0: &Point) -> Option<Point> {
        Some(self.saddle.project(z0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_scalar_bilinear() {
        let p = BilinearProblem::from_matrix(DMatrix::from_element(1, 1, 2.0)).unwrap();
        let g = p.grad(&Point::scalar(3.0, 5.0)).unwrap();
        assert_eq!(g.x()[0], 10.0);
        assert_eq!(g.y()[0], 6.0);
        assert_eq!(p.m(), 4.0);
        assert_eq!(p.smoothness(), 2.0);
    }

    #[test]
    fn rejects_spectrum_outside_bounds() {
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0]));
        let err = BilinearProblem::new(b, DVector::zeros(2), DVector::zeros(2), 1.0, 4.0);
        assert!(matches!(err, Err(MmxError::InvalidProblem(_))));
    }

    #[test]
    fn rank_deficient_projection_keeps_kernel_part() {
        // B = [[1, 0], [0, 0]]: saddle set is {x1 = 0, y1 = 0}
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let p = BilinearProblem::from_matrix(b).unwrap();
        let z0 = Point::from_slices(&[2.0, 3.0], &[4.0, 5.0]).unwrap();
        let s = p.closest_saddle(&z0).unwrap();
        assert!((s.x()[0]).abs() < 1e-14 && (s.x()[1] - 3.0).abs() < 1e-14);
        assert!((s.y()[0]).abs() < 1e-14 && (s.y()[1] - 5.0).abs() < 1e-14);
        assert!(p.grad(&s).unwrap().norm() < 1e-14);
        assert_eq!(p.saddle_set().kernel_dim(), 2);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = BilinearProblem::from_matrix(DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(p.grad(&Point::scalar(1.0, 1.0)), Err(MmxError::Dimension { .. })));
    }
}

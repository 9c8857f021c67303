use nalgebra::{DMatrix, DVector};

use crate::point::Point;

/// Affine saddle set `z_shift + Ker(H)` of a linear-gradient problem.
///
/// Stored through an orthonormal basis of `Ker(H)^perp` (the range of the
/// symmetric matrix `H`), so projection is `z_shift + (I - R R^T)(z0 - z_shift)`.
#[derive(Debug, Clone)]
pub struct SaddleSet {
    shift: Point,
    range_basis: DMatrix<f64>,
}

impl SaddleSet {
    pub(crate) fn new(shift: Point, range_basis: DMatrix<f64>) -> Self {
        debug_assert_eq!(range_basis.nrows(), shift.dx() + shift.dy());
        Self { shift, range_basis }
    }

    pub fn shift(&self) -> &Point {
        &self.shift
    }

    /// Orthonormal columns spanning the complement of the kernel.
    pub fn range_basis(&self) -> &DMatrix<f64> {
        &self.range_basis
    }

    pub fn kernel_dim(&self) -> usize {
        self.range_basis.nrows() - self.range_basis.ncols()
    }

    /// Component of `v` lying in `Ker(H)`.
    pub fn kernel_component(&self, v: &DVector<f64>) -> DVector<f64> {
        v - &self.range_basis * (self.range_basis.transpose() * v)
    }

    /// Closest saddle point to `z0`.
    pub fn project(&self, z0: &Point) -> Point {
        let d = (z0 - &self.shift).concat();
        let k = self.kernel_component(&d);
        &self.shift + &Point::from_concat(&k, self.shift.dx())
    }
}

//! Iterates `z = (x, y)` of a min-max problem.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;

use crate::error::{MmxError, Result};

/// A pair `(x, y)` with `x` the minimization block and `y` the maximization
/// block. Gradients and other `z`-shaped vectors use the same type.
#[derive(Clone, PartialEq)]
pub struct Point {
    x: DVector<f64>,
    y: DVector<f64>,
}

impl Point {
    /// Builds a point, rejecting empty blocks and non-finite entries.
    pub fn new(x: DVector<f64>, y: DVector<f64>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(MmxError::Dimension {
                expected: "d_x >= 1 and d_y >= 1".into(),
                got: format!("d_x = {}, d_y = {}", x.len(), y.len()),
            });
        }
        if !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
            return Err(MmxError::domain("point has non-finite entries"));
        }
        Ok(Point { x, y })
    }

    pub fn from_slices(x: &[f64], y: &[f64]) -> Result<Self> {
        Point::new(DVector::from_column_slice(x), DVector::from_column_slice(y))
    }

    /// Scalar convenience for the many 1-D examples.
    pub fn scalar(x: f64, y: f64) -> Self {
        Point::from_parts(DVector::from_element(1, x), DVector::from_element(1, y))
    }

    pub fn zeros(dx: usize, dy: usize) -> Self {
        Point::from_parts(DVector::zeros(dx), DVector::zeros(dy))
    }

    pub fn from_element(dx: usize, dy: usize, value: f64) -> Self {
        Point::from_parts(DVector::from_element(dx, value), DVector::from_element(dy, value))
    }

    /// Splits a concatenated vector `[x; y]` after `dx` entries.
    pub fn from_concat(z: &DVector<f64>, dx: usize) -> Self {
        let n = z.len();
        Point::from_parts(z.rows(0, dx).into_owned(), z.rows(dx, n - dx).into_owned())
    }

    /// Unvalidated constructor for arithmetic results (which may legitimately
    /// blow up during a diverging run).
    pub(crate) fn from_parts(x: DVector<f64>, y: DVector<f64>) -> Self {
        Point { x, y }
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn dx(&self) -> usize {
        self.x.len()
    }

    pub fn dy(&self) -> usize {
        self.y.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn concat(&self) -> DVector<f64> {
        let mut z = DVector::zeros(self.dx() + self.dy());
        z.rows_mut(0, self.dx()).copy_from(&self.x);
        z.rows_mut(self.dx(), self.dy()).copy_from(&self.y);
        z
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.x.dot(&other.x) + self.y.dot(&other.y)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x.norm_squared() + self.y.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        (&self.x - &other.x).norm_squared() + (&self.y - &other.y).norm_squared()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|v| v.is_finite())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Point) {
        self.x.axpy(a, &other.x, 1.0);
        self.y.axpy(a, &other.y, 1.0);
    }

    /// The GDA move `x -= alpha * g_x`, `y += beta * g_y`.
    pub fn gda_step(&mut self, alpha: f64, beta: f64, grad: &Point) {
        self.x.axpy(-alpha, &grad.x, 1.0);
        self.y.axpy(beta, &grad.y, 1.0);
    }

    /// `J v` with `J = blockdiag(I, -I)`.
    pub fn flip_y(&self) -> Point {
        Point::from_parts(self.x.clone(), -&self.y)
    }

    pub fn same_dims(&self, other: &Point) -> bool {
        self.dims() == other.dims()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Point")
            .field("x", &self.x.as_slice())
            .field("y", &self.y.as_slice())
            .finish()
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point::from_parts(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point::from_parts(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Mul<f64> for &Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::from_parts(&self.x * rhs, &self.y * rhs)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::from_parts(-&self.x, -&self.y)
    }
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::saddle::SaddleSet;
use super::Problem;
use crate::error::{MmxError, Result};
use crate::point::Point;

/// Convex-concave quadratic
/// `f = (x-x~)^T A (x-x~)/2 + (x-x~)^T B (y-y~) - (y-y~)^T C (y-y~)/2`
/// with `A, C` symmetric positive semidefinite.
///
/// Writing `H = [[A, B], [B^T, -C]]`, the gradient is `H (z - z~)` and `L` is
/// the spectral norm of `H`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    h: DMatrix<f64>,
    shift: Point,
    lipschitz: f64,
    computed_lipschitz: f64,
    mu: f64,
    saddle: SaddleSet,
}

impl QuadraticProblem {
    /// Builds the instance. `lipschitz`, when given, must be at least the
    /// spectral norm of `H` (relative slack `1e-10`); it is then used in place
    /// of the computed value.
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        x_shift: DVector<f64>,
        y_shift: DVector<f64>,
        lipschitz: Option<f64>,
    ) -> Result<Self> {
        let (dx, dy) = (b.nrows(), b.ncols());
        if dx == 0 || dy == 0 {
            return Err(MmxError::InvalidProblem("B must be nonempty".into()));
        }
        if a.shape() != (dx, dx) || c.shape() != (dy, dy) {
            return Err(MmxError::Dimension {
                expected: format!("A {dx}x{dx}, C {dy}x{dy}"),
                got: format!("A {:?}, C {:?}", a.shape(), c.shape()),
            });
        }
        if x_shift.len() != dx || y_shift.len() != dy {
            return Err(MmxError::Dimension {
                expected: format!("shifts of length ({dx}, {dy})"),
                got: format!("({}, {})", x_shift.len(), y_shift.len()),
            });
        }
        let finite = |m: &DMatrix<f64>| m.iter().all(|v| v.is_finite());
        if !(finite(&a) && finite(&b) && finite(&c))
            || x_shift.iter().chain(y_shift.iter()).any(|v| !v.is_finite())
        {
            return Err(MmxError::InvalidProblem("non-finite entry".into()));
        }
        let mu_a = check_psd(&a, "A")?;
        let mu_c = check_psd(&c, "C")?;

        let n = dx + dy;
        let mut h = DMatrix::zeros(n, n);
        h.view_mut((0, 0), (dx, dx)).copy_from(&a);
        h.view_mut((0, dx), (dx, dy)).copy_from(&b);
        h.view_mut((dx, 0), (dy, dx)).copy_from(&b.transpose());
        h.view_mut((dx, dx), (dy, dy)).copy_from(&(-&c));

        let eig = SymmetricEigen::new(h.clone());
        let computed = eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if !(computed > 0.0) {
            return Err(MmxError::InvalidProblem("H is identically zero".into()));
        }
        let lipschitz = match lipschitz {
            Some(l) if !(l.is_finite() && l >= computed * (1.0 - 1e-10)) => {
                return Err(MmxError::InvalidProblem(format!(
                    "declared L = {l} is below the spectral norm {computed} of H"
                )));
            }
            Some(l) => l,
            None => computed,
        };
        let cols: Vec<DVector<f64>> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 1e-12 * computed)
            .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
            .collect();
        let range = if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        };
        let shift = Point::from_parts(x_shift, y_shift);
        Ok(Self {
            a,
            b,
            c,
            h,
            saddle: SaddleSet::new(shift.clone(), range),
            shift,
            lipschitz,
            computed_lipschitz: computed,
            mu: mu_a.min(mu_c).max(0.0),
        })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// The symmetric matrix `H = [[A, B], [B^T, -C]]`.
    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn shift(&self) -> &Point {
        &self.shift
    }

    /// Spectral norm of `H`, regardless of any declared `L`.
    pub fn computed_lipschitz(&self) -> f64 {
        self.computed_lipschitz
    }

    pub fn saddle_set(&self) -> &SaddleSet {
        &self.saddle
    }

    pub fn closest_saddle(&self, z0: &Point) -> Result<Point> {
        self.check_dims(z0)?;
        Ok(self.saddle.project(z0))
    }
}

// Smallest eigenvalue of a symmetric PSD matrix, or an error.
fn check_psd(m: &DMatrix<f64>, name: &str) -> Result<f64> {
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let asym = (m - m.transpose()).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if asym > 1e-12 * scale.max(1.0) {
        return Err(MmxError::InvalidProblem(format!("{name} is not symmetric")));
    }
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * scale.max(1e-300) {
        return Err(MmxError::InvalidProblem(format!(
            "{name} is not positive semidefinite (eigenvalue {min:e})"
        )));
    }
    Ok(min)
}

impl Problem for QuadraticProblem {
    fn dims(&self) -> (usize, usize) {
        (self.b.nrows(), self.b.ncols())
    }

    fn eval_grad(&self, z: &Point) -> Point {
        let d = (z - &self.shift).concat();
        Point::from_concat(&(&self.h * d), self.b.nrows())
    }

    fn eval_value(&self, z: &Point) -> Option<f64> {
        let d = (z - &self.shift).concat();
        Some(0.5 * d.dot(&(&self.h * &d)))
    }

    fn eval_hessian_vec(&self, _z: &Point, v: &Point) -> Option<Point> {
        Some(Point::from_concat(&(&self.h * v.concat()), self.b.nrows()))
    }

    fn smoothness(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn saddle_for(&self, z0: &Point) -> Option<Point> {
        Some(self.saddle.project(z0))
    }
}

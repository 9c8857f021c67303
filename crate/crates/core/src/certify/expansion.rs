use super::certificate::two_step_trajectories;
use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::problems::{BilinearProblem, Problem};

/// Distance between the mean two-step randomized slingshot iterate and the
/// consensus-type prediction `z - (h/2) J grad f(z) - (h^2/2) hess f(z) grad f(z)`,
/// with `J = diag(I, -I)`.
///
/// Zero (up to rounding) whenever `grad f` is linear.
pub fn check_second_order_expansion(problem: &dyn Problem, z: &Point, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(MmxError::domain(format!("h must be positive, got {h}")));
    }
    let g = problem.grad(z)?;
    let hg = problem.hessian_vec(z, &g)?;
    let mean = two_step_trajectories(problem, z, h)?.mean();
    let mut predicted = z.clone();
    predicted.axpy(-0.5 * h, &g.flip_y());
    predicted.axpy(-0.5 * h * h, &hg);
    Ok(mean.dist_sq(&predicted).sqrt())
}

/// Residual between two bilinear slingshot steps of magnitude `h`
/// (`(h, -h)` then `(-h, h)`) and one gradient step of size `h^2` on the
/// Hamiltonian `||grad f||^2 / 2`.
///
/// ```
/// use mmx_core::certify::check_hamiltonian_equivalence;
/// use mmx_core::problems::BilinearProblem;
/// use mmx_core::Point;
/// use nalgebra::DMatrix;
///
/// let p = BilinearProblem::from_matrix(DMatrix::from_element(1, 1, 1.0)).unwrap();
/// let r = check_hamiltonian_equivalence(&p, &Point::scalar(1.0, 0.0), 0.5).unwrap();
/// assert_eq!(r, 0.0);
/// ```
pub fn check_hamiltonian_equivalence(problem: &BilinearProblem, z: &Point, h: f64) -> Result<f64> {
    if !h.is_finite() {
        return Err(MmxError::domain("h must be finite"));
    }
    let g = problem.grad(z)?;
    let mut two = z.clone();
    two.gda_step(h, -h, &g);
    let g1 = problem.eval_grad(&two);
    two.gda_step(-h, h, &g1);
    let dphi = problem.hessian_vec(z, &g)?;
    let mut gd = z.clone();
    gd.axpy(-h * h, &dphi);
    Ok(two.dist_sq(&gd).sqrt())
}

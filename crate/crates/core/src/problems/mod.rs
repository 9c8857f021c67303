//! Min-max problem instances and their oracles.
//!
//! Every instance implements [`Problem`]. Linear-gradient instances
//! ([`BilinearProblem`], [`QuadraticProblem`]) additionally know their saddle
//! set and can project onto it; nonlinear instances ([`SmoothCCProblem`]) are
//! built from closed-form oracles.

mod bilinear;
mod generators;
mod matrix_io;
mod quadratic;
mod saddle;
mod smooth;

pub use bilinear::BilinearProblem;
pub use generators::{diagonal_bilinear, random_bilinear, random_quadratic, random_scsc_quadratic};
pub use matrix_io::load_matrix_csv;
pub use quadratic::QuadraticProblem;
pub use saddle::SaddleSet;
pub use smooth::{make_huber_coupling, make_log_cosh, SmoothCCProblem};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::rng::seeded_rng;

/// Oracle bundle for `min_x max_y f(x, y)`.
///
/// Implementors supply the raw `eval_*` oracles; callers normally use the
/// checked wrappers ([`Problem::grad`], [`Problem::value`],
/// [`Problem::hessian_vec`]) which validate dimensions first.
pub trait Problem: Send + Sync {
    fn dims(&self) -> (usize, usize);

    /// `(grad_x f(z), grad_y f(z))`, assuming `z` has matching dimensions.
    fn eval_grad(&self, z: &Point) -> Point;

    fn eval_value(&self, _z: &Point) -> Option<f64> {
        None
    }

    /// `hess f(z) v`, when the instance has a Hessian-vector oracle.
    fn eval_hessian_vec(&self, _z: &Point, _v: &Point) -> Option<Point> {
        None
    }

    /// Lipschitz constant `L` of the gradient.
    fn smoothness(&self) -> f64;

    /// Strong-convexity-strong-concavity modulus `mu` (0 if merely convex-concave).
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// The saddle point that distances are measured to for runs started at
    /// `z0`: the closest saddle for linear-gradient problems, the known saddle
    /// otherwise. `None` when no saddle information is available.
    fn saddle_for(&self, _z0: &Point) -> Option<Point> {
        None
    }

    fn check_dims(&self, z: &Point) -> Result<()> {
        let expected = self.dims();
        if z.dims() != expected {
            return Err(MmxError::Dimension {
                expected: format!("(d_x, d_y) = {expected:?}"),
                got: format!("{:?}", z.dims()),
            });
        }
        Ok(())
    }

    fn grad(&self, z: &Point) -> Result<Point> {
        self.check_dims(z)?;
        Ok(self.eval_grad(z))
    }

    fn value(&self, z: &Point) -> Result<f64> {
        self.check_dims(z)?;
        self.eval_value(z)
            .ok_or_else(|| MmxError::unsupported("problem has no value oracle"))
    }

    fn hessian_vec(&self, z: &Point, v: &Point) -> Result<Point> {
        self.check_dims(z)?;
        self.check_dims(v)?;
        self.eval_hessian_vec(z, v)
            .ok_or_else(|| MmxError::unsupported("problem has no Hessian-vector oracle"))
    }
}

/// The Hamiltonian `Phi(z) = ||grad f(z)||^2 / 2`.
pub fn hamiltonian(problem: &dyn Problem, z: &Point) -> Result<f64> {
    Ok(0.5 * problem.grad(z)?.norm_sq())
}

/// How [`hamiltonian_grad`] may obtain `hess f(z) grad f(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HvpSource {
    /// Only the problem's Hessian-vector oracle.
    Oracle,
    /// Always the central finite difference.
    FiniteDifference,
    /// The oracle when present, otherwise the finite difference.
    OracleOrFiniteDifference,
}

/// `grad Phi(z) = hess f(z) grad f(z)`.
pub fn hamiltonian_grad(problem: &dyn Problem, z: &Point, source: HvpSource) -> Result<Point> {
    let g = problem.grad(z)?;
    hamiltonian_grad_with(problem, z, &g, source)
}

/// [`hamiltonian_grad`] for callers that already hold `g = grad f(z)`.
pub(crate) fn hamiltonian_grad_with(
    problem: &dyn Problem,
    z: &Point,
    g: &Point,
    source: HvpSource,
) -> Result<Point> {
    match source {
        HvpSource::Oracle => problem
            .eval_hessian_vec(z, g)
            .ok_or_else(|| MmxError::unsupported("problem has no Hessian-vector oracle")),
        HvpSource::FiniteDifference => {
            Ok(fd_hamiltonian_grad(problem, z, g, default_fd_step(z, g)))
        }
        HvpSource::OracleOrFiniteDifference => Ok(problem
            .eval_hessian_vec(z, g)
            .unwrap_or_else(|| fd_hamiltonian_grad(problem, z, g, default_fd_step(z, g)))),
    }
}

/// Finite-difference `grad Phi(z)` with an explicit step along the unit
/// gradient direction.
pub fn hamiltonian_grad_fd(problem: &dyn Problem, z: &Point, step: f64) -> Result<Point> {
    if !(step > 0.0) {
        return Err(MmxError::domain("finite-difference step must be positive"));
    }
    let g = problem.grad(z)?;
    Ok(fd_hamiltonian_grad(problem, z, &g, step))
}

/// `1e-5 (1 + ||z||) / (1 + ||grad f(z)||)`.
pub fn default_fd_step(z: &Point, g: &Point) -> f64 {
    1e-5 * (1.0 + z.norm()) / (1.0 + g.norm())
}

// Central difference of grad f along u = g/||g||, rescaled by ||g||.
fn fd_hamiltonian_grad(problem: &dyn Problem, z: &Point, g: &Point, step: f64) -> Point {
    let gnorm = g.norm();
    if gnorm == 0.0 {
        return Point::zeros(z.dx(), z.dy());
    }
    let u = g * (1.0 / gnorm);
    let mut plus = z.clone();
    plus.axpy(step, &u);
    let mut minus = z.clone();
    minus.axpy(-step, &u);
    let diff = &problem.eval_grad(&plus) - &problem.eval_grad(&minus);
    &diff * (gnorm / (2.0 * step))
}

/// Largest observed `||grad f(z) - grad f(z')|| / ||z - z'||` over random
/// Gaussian pairs around `center`; should not exceed [`Problem::smoothness`].
pub fn spot_check_lipschitz(problem: &dyn Problem, center: &Point, scale: f64, pairs: usize, seed: u64) -> Result<f64> {
    problem.check_dims(center)?;
    let mut rng = seeded_rng(seed);
    let (dx, dy) = problem.dims();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let a = perturb(center, scale, dx, dy, &mut rng);
        let b = perturb(center, scale, dx, dy, &mut rng);
        let dz = a.dist_sq(&b).sqrt();
        if dz > 0.0 {
            let dg = problem.eval_grad(&a).dist_sq(&problem.eval_grad(&b)).sqrt();
            worst = worst.max(dg / dz);
        }
    }
    Ok(worst)
}

/// Smallest slack of the strong-convexity inequalities for `f(., y)` and
/// `-f(x, .)` over random pairs sharing the frozen block. Non-negative (up to
/// rounding) for a `mu`-SCSC instance.
pub fn spot_check_strong_convexity(problem: &dyn Problem, center: &Point, scale: f64, pairs: usize, seed: u64) -> Result<f64> {
    problem.check_dims(center)?;
    let mu = problem.strong_convexity();
    let mut rng = seeded_rng(seed);
    let (dx, dy) = problem.dims();
    let mut worst = f64::INFINITY;
    for _ in 0..pairs {
        let a = perturb(center, scale, dx, dy, &mut rng);
        let b = perturb(center, scale, dx, dy, &mut rng);
        // f(., y) with y frozen at a.y
        let u = Point::from_parts(a.x().clone(), a.y().clone());
        let v = Point::from_parts(b.x().clone(), a.y().clone());
        let gv = problem.eval_grad(&v);
        let fx = problem.value(&u)? - problem.value(&v)?
            - gv.x().dot(&(u.x() - v.x()))
            - 0.5 * mu * (u.x() - v.x()).norm_squared();
        // -f(x, .) with x frozen at a.x
        let w = Point::from_parts(a.x().clone(), b.y().clone());
        let gw = problem.eval_grad(&w);
        let fy = -problem.value(&u)? + problem.value(&w)?
            + gw.y().dot(&(u.y() - w.y()))
            - 0.5 * mu * (u.y() - w.y()).norm_squared();
        worst = worst.min(fx).min(fy);
    }
    Ok(worst)
}

fn perturb(center: &Point, scale: f64, dx: usize, dy: usize, rng: &mut impl Rng) -> Point {
    let mut p = center.clone();
    let noise = Point::from_parts(
        nalgebra::DVector::from_fn(dx, |_, _| rng.sample::<f64, _>(StandardNormal)),
        nalgebra::DVector::from_fn(dy, |_, _| rng.sample::<f64, _>(StandardNormal)),
    );
    p.axpy(scale, &noise);
    p
}

use nalgebra::{DMatrix, DVector};

use crate::chebyshev::{extremal_rate_bilinear, extremal_rate_quadratic, induced_polynomial_max};
use crate::error::Result;
use crate::point::Point;
use crate::problems::{BilinearProblem, Problem, QuadraticProblem};
use crate::schedules::{slingshot_bilinear, slingshot_quadratic, RootOrdering};
use crate::solvers::{run_gda, RunOptions};

const GRID: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessReport {
    /// Spectral value at which the schedule's polynomial is largest.
    pub lambda_star: f64,
    /// Realized ratio on the 1-D instance built from `lambda_star`.
    pub realized_ratio: f64,
    /// The theoretical rate.
    pub rate: f64,
}

impl TightnessReport {
    /// `|realized - rate| / rate` (absolute difference when the rate is 0).
    pub fn relative_gap(&self) -> f64 {
        let d = (self.realized_ratio - self.rate).abs();
        if self.rate > 0.0 {
            d / self.rate
        } else {
            d
        }
    }
}

/// Worst case of the bilinear slingshot over `[m, M]`: maximizes its
/// polynomial, runs GDA on `f(x, y) = sqrt(lambda*) x y` from `(1, 0)` and
/// reports `||z_{2T} - z*|| / ||z_0 - z*||` next to `R_T`.
pub fn lower_bound_tightness(t: usize, m: f64, big_m: f64) -> Result<TightnessReport> {
    let rate = extremal_rate_bilinear(t, m, big_m)?;
    let schedule = slingshot_bilinear(t, m, big_m, RootOrdering::Auto)?;
    let (lambda_star, _) = induced_polynomial_max(&schedule.bilinear_polynomial()?, m, big_m, GRID)?;
    let p = BilinearProblem::new(
        DMatrix::from_element(1, 1, lambda_star.sqrt()),
        DVector::zeros(1),
        DVector::zeros(1),
        m,
        big_m,
    )?;
    let z0 = Point::scalar(1.0, 0.0);
    let opts = RunOptions::default().record_every(2 * t);
    let tr = run_gda(&p, &schedule, &z0, &opts)?;
    let ratio = (tr.last().dist_sq.unwrap_or(f64::NAN) / tr.first().dist_sq.unwrap_or(f64::NAN)).sqrt();
    Ok(TightnessReport { lambda_star, realized_ratio: ratio, rate })
}

/// Worst case of the quadratic slingshot on `[-L, L]`: maximizes
/// `|lambda p(lambda)|`, builds the 1-D quadratic whose `H` has eigenvalue
/// `lambda*` (on the `x` block when positive, the `y` block when negative),
/// and reports `||grad f(z_{2T})|| / ||z_0 - z*||` next to `L/(2T+1)`.
pub fn quadratic_lower_bound_tightness(t: usize, l: f64) -> Result<TightnessReport> {
    let rate = extremal_rate_quadratic(t, l)?;
    let schedule = slingshot_quadratic(t, l, RootOrdering::Auto)?;
    let poly = schedule.quadratic_polynomial().times_lambda();
    let (lambda_star, _) = induced_polynomial_max(&poly, -l, l, GRID)?;
    let one = |v: f64| DMatrix::from_element(1, 1, v);
    let (a, c, z0) = if lambda_star >= 0.0 {
        (lambda_star, 0.0, Point::scalar(1.0, 0.0))
    } else {
        (0.0, -lambda_star, Point::scalar(0.0, 1.0))
    };
    let p = QuadraticProblem::new(one(a), one(0.0), one(c), DVector::zeros(1), DVector::zeros(1), Some(l))?;
    let tr = run_gda(&p, &schedule, &z0, &RunOptions::default().record_every(2 * t))?;
    let d0 = z0.dist_sq(&p.saddle_for(&z0).expect("quadratic has a saddle set"));
    let ratio = (tr.last().grad_norm_sq / d0).sqrt();
    Ok(TightnessReport { lambda_star, realized_ratio: ratio, rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t1_kappa4() {
        let r = lower_bound_tightness(1, 1.0, 4.0).unwrap();
        assert!((r.realized_ratio - 0.6).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn kappa_one_converges_exactly() {
        let r = lower_bound_tightness(3, 2.0, 2.0).unwrap();
        assert!(r.realized_ratio < 1e-15 && r.rate == 0.0);
    }

    #[test]
    fn quadratic_worst_case_is_tight() {
        let r = quadratic_lower_bound_tightness(3, 1.0).unwrap();
        assert!(r.realized_ratio >= 0.999 * r.rate && r.realized_ratio <= r.rate * (1.0 + 1e-8), "{r:?}");
    }
}

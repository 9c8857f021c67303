use serde::{Deserialize, Serialize};

use super::Trace;
use crate::chebyshev::{extremal_rate_bilinear, extremal_rate_quadratic};
use crate::error::{MmxError, Result};

/// Theoretical guarantee to compare a trace against. Horizons count
/// iterations, so a trace of `2T` iterations has `T` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    /// `||z_{2T} - z*|| <= R_T ||z_0 - z*||`.
    BilinearRt { m: f64, big_m: f64 },
    /// `||grad f(z_{2T})|| <= L/(2T+1) ||z_0 - z*||`.
    QuadraticGrad { l: f64 },
    /// `||z_{2T} - z*||^2 <= (1 - h mu)^T ||z_0 - z*||^2` (in expectation).
    ScscContraction { h: f64, mu: f64 },
    /// `(1/T) sum_{t<T} ||grad f(z_{2t})||^2 <= 2 ||z_0 - z*||^2 / (h^2 (1 - 3Lh) T)`
    /// (in expectation).
    CcAverage { h: f64, l: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    pub empirical: f64,
    pub bound: f64,
    /// `bound - empirical`; negative means the bound was exceeded.
    pub margin: f64,
    /// Standard error of `empirical` when averaged over several traces.
    pub std_error: Option<f64>,
    /// `margin >= -1e-8 * bound`.
    pub passed: bool,
}

impl RateCheck {
    fn new(empirical: f64, bound: f64, std_error: Option<f64>) -> Self {
        let margin = bound - empirical;
        Self {
            empirical,
            bound,
            margin,
            std_error,
            passed: margin >= -1e-8 * bound.abs() && empirical.is_finite(),
        }
    }
}

fn pairs_of(trace: &Trace) -> Result<usize> {
    if trace.horizon % 2 != 0 || trace.horizon == 0 {
        return Err(MmxError::domain(format!(
            "rate bounds need a positive even horizon, got {}",
            trace.horizon
        )));
    }
    Ok(trace.horizon / 2)
}

fn initial_dist_sq(trace: &Trace) -> Result<f64> {
    trace
        .first()
        .dist_sq
        .ok_or_else(|| MmxError::unsupported("trace has no saddle distances"))
}

/// `(empirical, bound)` for one trace.
fn evaluate(trace: &Trace, kind: BoundKind) -> Result<(f64, f64)> {
    let t = pairs_of(trace)?;
    let d0 = initial_dist_sq(trace)?;
    let last = trace.last();
    let reached_end = last.t == trace.horizon;
    let final_dist = || -> Result<f64> {
        if !reached_end {
            return Ok(f64::INFINITY);
        }
        last.dist_sq.ok_or_else(|| MmxError::unsupported("trace has no saddle distances"))
    };
    match kind {
        BoundKind::BilinearRt { m, big_m } => {
            let r = extremal_rate_bilinear(t, m, big_m)?;
            Ok((final_dist()?.sqrt(), r * d0.sqrt()))
        }
        BoundKind::QuadraticGrad { l } => {
            let g = if reached_end { last.grad_norm_sq.sqrt() } else { f64::INFINITY };
            Ok((g, extremal_rate_quadratic(t, l)? * d0.sqrt()))
        }
        BoundKind::ScscContraction { h, mu } => {
            if !(h > 0.0 && mu >= 0.0 && h * mu < 1.0) {
                return Err(MmxError::domain("need h > 0, mu >= 0 and h mu < 1"));
            }
            Ok((final_dist()?, (1.0 - h * mu).powf(t as f64) * d0))
        }
        BoundKind::CcAverage { h, l } => {
            if !(h > 0.0 && 3.0 * l * h < 1.0) {
                return Err(MmxError::domain("need 0 < h < 1/(3L)"));
            }
            let mut sum = 0.0;
            for k in 0..t {
                let r = trace.at(2 * k).ok_or_else(|| {
                    MmxError::unsupported(format!("trace lacks the record for iterate {}", 2 * k))
                })?;
                sum += r.grad_norm_sq;
            }
            let avg = if reached_end { sum / t as f64 } else { f64::INFINITY };
            Ok((avg, 2.0 * d0 / (h * h * (1.0 - 3.0 * l * h) * t as f64)))
        }
    }
}

/// Compares one trace with its theoretical bound.
pub fn check_rate_bound(trace: &Trace, kind: BoundKind) -> Result<RateCheck> {
    let (e, b) = evaluate(trace, kind)?;
    Ok(RateCheck::new(e, b, None))
}

/// Averages the empirical quantity and the bound over several traces (for
/// bounds that hold in expectation) and reports the standard error.
pub fn check_rate_bound_mean(traces: &[Trace], kind: BoundKind) -> Result<RateCheck> {
    if traces.is_empty() {
        return Err(MmxError::domain("no traces to average"));
    }
    let vals = traces
        .iter()
        .map(|t| evaluate(t, kind))
        .collect::<Result<Vec<_>>>()?;
    let n = vals.len() as f64;
    let mean_e = vals.iter().map(|v| v.0).sum::<f64>() / n;
    let mean_b = vals.iter().map(|v| v.1).sum::<f64>() / n;
    let se = if vals.len() > 1 {
        let var = vals.iter().map(|v| (v.0 - mean_e).powi(2)).sum::<f64>() / (n - 1.0);
        Some((var / n).sqrt())
    } else {
        None
    };
    Ok(RateCheck::new(mean_e, mean_b, se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;
    use crate::problems::BilinearProblem;
    use crate::schedules::{classical, slingshot_bilinear, ClassicalKind, RootOrdering};
    use crate::solvers::{run_gda, RunOptions};
    use nalgebra::DMatrix;

    #[test]
    fn slingshot_passes_constant_fails() {
        let p = BilinearProblem::new(
            DMatrix::from_element(1, 1, 2.0),
            nalgebra::DVector::zeros(1),
            nalgebra::DVector::zeros(1),
            1.0,
            9.0,
        )
        .unwrap();
        let z0 = Point::scalar(1.0, 1.0);
        let s = slingshot_bilinear(4, 1.0, 9.0, RootOrdering::Auto).unwrap();
        let tr = run_gda(&p, &s, &z0, &RunOptions::default()).unwrap();
        let c = check_rate_bound(&tr, BoundKind::BilinearRt { m: 1.0, big_m: 9.0 }).unwrap();
        assert!(c.passed, "{c:?}");
        let s = classical(ClassicalKind::Constant, 0.1, 0.1, 8).unwrap();
        let tr = run_gda(&p, &s, &z0, &RunOptions::default()).unwrap();
        let c = check_rate_bound(&tr, BoundKind::BilinearRt { m: 1.0, big_m: 9.0 }).unwrap();
        assert!(!c.passed);
    }

    #[test]
    fn odd_horizon_rejected() {
        let p = BilinearProblem::from_matrix(DMatrix::from_element(1, 1, 1.0)).unwrap();
        let s = classical(ClassicalKind::Constant, 0.1, 0.1, 3).unwrap();
        let tr = run_gda(&p, &s, &Point::scalar(1.0, 0.0), &RunOptions::default()).unwrap();
        assert!(check_rate_bound(&tr, BoundKind::QuadraticGrad { l: 1.0 }).is_err());
    }
}

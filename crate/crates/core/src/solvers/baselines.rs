use serde::{Deserialize, Serialize};

use super::{Recorder, RunOptions, Trace};
use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::problems::{hamiltonian_grad_with, HvpSource, Problem};

/// First-order baselines. Every parameter left as `None` takes the default
/// listed on its variant (`L` is the problem's smoothness constant).
///
/// Trace columns: `alpha` is the primary stepsize; `beta` is the momentum
/// coefficient (negative momentum), `gamma` (consensus), or the stepsize
/// again (all others). With `F = (grad_x f, -grad_y f)`:
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Baseline {
    /// `w = z - eta F(z)`, `z <- z - eta F(w)`; 2 evaluations, `eta = 1/(sqrt(2) L)`.
    Extragradient { eta: Option<f64> },
    /// `z <- z - eta (2 F(z_t) - F(z_{t-1}))`; 1 evaluation, `eta = 1/(3L)`.
    Ogda { eta: Option<f64> },
    /// Extragradient with anchor weight `1/(t+2)` toward `z_0`; 2 evaluations,
    /// `eta = 1/(8L)`.
    Eag { eta: Option<f64> },
    /// `z <- z - eta F(z) + momentum (z_t - z_{t-1})`; 1 evaluation,
    /// `eta = 0.1/L`, `momentum = -0.5`.
    NegativeMomentum { eta: Option<f64>, momentum: Option<f64> },
    /// `z <- z - gamma grad Phi(z)`; `gamma = 1/L^2`.
    Hgd {
        gamma: Option<f64>,
        #[serde(default)]
        finite_difference_fallback: bool,
    },
    /// `z <- z - h F(z) - gamma grad Phi(z)`; `h = 1/(9L)`, `gamma = 2/(81 L^2)`.
    Consensus {
        h: Option<f64>,
        gamma: Option<f64>,
        #[serde(default)]
        finite_difference_fallback: bool,
    },
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Extragradient { .. } => "extragradient",
            Baseline::Ogda { .. } => "ogda",
            Baseline::Eag { .. } => "eag",
            Baseline::NegativeMomentum { .. } => "negative_momentum",
            Baseline::Hgd { .. } => "hgd",
            Baseline::Consensus { .. } => "consensus",
        }
    }

    pub fn extragradient() -> Self {
        Baseline::Extragradient { eta: None }
    }

    pub fn ogda() -> Self {
        Baseline::Ogda { eta: None }
    }

    pub fn eag() -> Self {
        Baseline::Eag { eta: None }
    }

    pub fn negative_momentum() -> Self {
        Baseline::NegativeMomentum { eta: None, momentum: None }
    }

    pub fn hgd() -> Self {
        Baseline::Hgd { gamma: None, finite_difference_fallback: false }
    }

    pub fn consensus() -> Self {
        Baseline::Consensus { h: None, gamma: None, finite_difference_fallback: false }
    }
}

fn operator(g: &Point) -> Point {
    g.flip_y()
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(MmxError::domain(format!("{name} must be a nonnegative finite number, got {v}")))
    }
}

fn hvp_source(fallback: bool) -> HvpSource {
    if fallback {
        HvpSource::OracleOrFiniteDifference
    } else {
        HvpSource::Oracle
    }
}

/// Gradient evaluations charged for one `grad Phi` (gradient plus either a
/// Hessian-vector product or two finite-difference gradients).
fn hamiltonian_cost(problem: &dyn Problem, z: &Point, source: HvpSource) -> Result<u64> {
    let has_oracle = problem.eval_hessian_vec(z, z).is_some();
    match (has_oracle, source) {
        (true, _) => Ok(2),
        (false, HvpSource::Oracle) => Err(MmxError::unsupported(
            "Hamiltonian-based baseline needs a Hessian-vector oracle or the finite-difference fallback",
        )),
        (false, _) => Ok(3),
    }
}

/// Runs `baseline` for `iterations` steps from `z0`.
pub fn run_baseline(
    problem: &dyn Problem,
    baseline: &Baseline,
    iterations: usize,
    z0: &Point,
    opts: &RunOptions,
) -> Result<Trace> {
    let l = problem.smoothness();
    let mut rec = Recorder::new(problem, z0, iterations, opts)?;
    let mut z = z0.clone();
    let mut evals: u64 = 0;
    // state carried between iterations
    let mut prev_f: Option<Point> = None;
    let mut prev_z = z0.clone();

    let (per_iter, params, source): (u64, (f64, f64), HvpSource) = match baseline {
        Baseline::Extragradient { eta } => {
            let e = positive("eta", eta.unwrap_or(1.0 / (2f64.sqrt() * l)))?;
            (2, (e, e), HvpSource::Oracle)
        }
        Baseline::Ogda { eta } => {
            let e = positive("eta", eta.unwrap_or(1.0 / (3.0 * l)))?;
            (1, (e, e), HvpSource::Oracle)
        }
        Baseline::Eag { eta } => {
            let e = positive("eta", eta.unwrap_or(1.0 / (8.0 * l)))?;
            (2, (e, e), HvpSource::Oracle)
        }
        Baseline::NegativeMomentum { eta, momentum } => {
            let e = positive("eta", eta.unwrap_or(0.1 / l))?;
            let m = momentum.unwrap_or(-0.5);
            if !m.is_finite() {
                return Err(MmxError::domain("momentum must be finite"));
            }
            (1, (e, m), HvpSource::Oracle)
        }
        Baseline::Hgd { gamma, finite_difference_fallback } => {
            let g = positive("gamma", gamma.unwrap_or(1.0 / (l * l)))?;
            let src = hvp_source(*finite_difference_fallback);
            (hamiltonian_cost(problem, z0, src)?, (g, g), src)
        }
        Baseline::Consensus { h, gamma, finite_difference_fallback } => {
            let h = positive("h", h.unwrap_or(1.0 / (9.0 * l)))?;
            let g = positive("gamma", gamma.unwrap_or(2.0 / (81.0 * l * l)))?;
            let src = hvp_source(*finite_difference_fallback);
            (hamiltonian_cost(problem, z0, src)?, (h, g), src)
        }
    };

    for t in 0..iterations {
        let g = problem.eval_grad(&z);
        if rec.wants(t) {
            rec.push(t, Some(params), &z, &g, evals);
        }
        let next = match baseline {
            Baseline::Extragradient { .. } => {
                let eta = params.0;
                let mut w = z.clone();
                w.axpy(-eta, &operator(&g));
                let fw = operator(&problem.eval_grad(&w));
                let mut n = z.clone();
                n.axpy(-eta, &fw);
                n
            }
            Baseline::Ogda { .. } => {
                let eta = params.0;
                let f = operator(&g);
                let fp = prev_f.take().unwrap_or_else(|| f.clone());
                let mut n = z.clone();
                n.axpy(-2.0 * eta, &f);
                n.axpy(eta, &fp);
                prev_f = Some(f);
                n
            }
            Baseline::Eag { .. } => {
                let eta = params.0;
                let anchor = 1.0 / (t as f64 + 2.0);
                let pull = &(z0 - &z) * anchor;
                let mut w = &z + &pull;
                w.axpy(-eta, &operator(&g));
                let fw = operator(&problem.eval_grad(&w));
                let mut n = &z + &pull;
                n.axpy(-eta, &fw);
                n
            }
            Baseline::NegativeMomentum { .. } => {
                let (eta, m) = params;
                let mut n = z.clone();
                n.axpy(-eta, &operator(&g));
                n.axpy(m, &(&z - &prev_z));
                n
            }
            Baseline::Hgd { .. } => {
                let dphi = hamiltonian_grad_with(problem, &z, &g, source)?;
                let mut n = z.clone();
                n.axpy(-params.1, &dphi);
                n
            }
            Baseline::Consensus { .. } => {
                let (h, gamma) = params;
                let dphi = hamiltonian_grad_with(problem, &z, &g, source)?;
                let mut n = z.clone();
                n.axpy(-h, &operator(&g));
                n.axpy(-gamma, &dphi);
                n
            }
        };
        prev_z = std::mem::replace(&mut z, next);
        evals += per_iter;
        if rec.blew_up(&z) {
            let g = problem.eval_grad(&z);
            return Ok(rec.finish(t + 1, z, &g, evals));
        }
    }
    let g = problem.eval_grad(&z);
    Ok(rec.finish(iterations, z, &g, evals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_huber_coupling, BilinearProblem};
    use nalgebra::DMatrix;

    fn xy() -> BilinearProblem {
        BilinearProblem::from_matrix(DMatrix::from_element(1, 1, 1.0)).unwrap()
    }

    #[test]
    fn eval_accounting() {
        let z0 = Point::scalar(1.0, 0.0);
        for (b, per) in [
            (Baseline::extragradient(), 2),
            (Baseline::ogda(), 1),
            (Baseline::eag(), 2),
            (Baseline::negative_momentum(), 1),
            (Baseline::hgd(), 2),
            (Baseline::consensus(), 2),
        ] {
            let tr = run_baseline(&xy(), &b, 6, &z0, &RunOptions::default()).unwrap();
            for r in &tr.records {
                assert_eq!(r.cum_grad_evals, per * r.t as u64, "{}", b.name());
            }
        }
    }

    #[test]
    fn extragradient_contracts_on_xy() {
        let tr = run_baseline(&xy(), &Baseline::extragradient(), 50, &Point::scalar(1.0, 0.0), &RunOptions::default()).unwrap();
        for w in tr.records.windows(2) {
            assert!(w[1].dist_sq.unwrap() < w[0].dist_sq.unwrap());
        }
    }

    #[test]
    fn hgd_is_stuck_on_huber_plateau() {
        let p = make_huber_coupling();
        let z0 = Point::scalar(3.0, 0.0);
        let tr = run_baseline(&p, &Baseline::hgd(), 20, &z0, &RunOptions::default()).unwrap();
        assert_eq!(tr.final_iterate, z0);
    }

    #[test]
    fn consensus_with_zero_h_is_hgd() {
        let p = BilinearProblem::from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 2.0])).unwrap();
        let z0 = Point::from_slices(&[1.0, -1.0], &[0.5, 2.0]).unwrap();
        let g = 0.05;
        let a = run_baseline(&p, &Baseline::Hgd { gamma: Some(g), finite_difference_fallback: false }, 30, &z0, &RunOptions::default()).unwrap();
        let b = run_baseline(&p, &Baseline::Consensus { h: Some(0.0), gamma: Some(g), finite_difference_fallback: false }, 30, &z0, &RunOptions::default()).unwrap();
        assert_eq!(a.final_iterate, b.final_iterate);
        let ga: Vec<f64> = a.records.iter().map(|r| r.grad_norm_sq).collect();
        let gb: Vec<f64> = b.records.iter().map(|r| r.grad_norm_sq).collect();
        assert_eq!(ga, gb);
    }

    #[test]
    fn hgd_without_oracle_is_unsupported() {
        let p = crate::problems::SmoothCCProblem::new(1, 1, 1.0, |z: &Point| Point::scalar(z.y()[0], z.x()[0])).unwrap();
        let z0 = Point::scalar(1.0, 1.0);
        let err = run_baseline(&p, &Baseline::hgd(), 3, &z0, &RunOptions::default());
        assert!(matches!(err, Err(MmxError::Unsupported(_))));
        let fallback = Baseline::Hgd { gamma: None, finite_difference_fallback: true };
        let tr = run_baseline(&p, &fallback, 3, &z0, &RunOptions::default()).unwrap();
        assert_eq!(tr.last().cum_grad_evals, 9);
    }
}

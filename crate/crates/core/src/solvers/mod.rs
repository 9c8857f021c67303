//! GDA under an arbitrary stepsize-pair schedule, first-order baselines, and
//! checks of realized traces against the theoretical rates.

mod baselines;
mod bounds;
mod trace;

pub use baselines::{run_baseline, Baseline};
pub use bounds::{check_rate_bound, check_rate_bound_mean, BoundKind, RateCheck};
pub use trace::{read_trace_csv, FinalState, RunStatus, Trace, TraceRecord};
pub(crate) use trace::fmt_float as trace_fmt_float;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::problems::Problem;
use crate::rng::seeded_rng;
use crate::schedules::StepPairSchedule;

/// Multiplicative gradient noise `g_i <- g_i (1 + relative * xi_i)` with
/// standard normal `xi`, used to probe floating-point stability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientNoise {
    pub relative: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Record every this many iterations (plus `t = 0` and the last iterate).
    pub record_every: usize,
    /// Final squared gradient norm at or below this counts as converged.
    pub converge_tol: f64,
    /// Iterate norm beyond which the run stops as diverged.
    pub divergence_threshold: f64,
    /// Saddle to measure distances to; defaults to `problem.saddle_for(z0)`.
    pub saddle: Option<Point>,
    pub noise: Option<GradientNoise>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_every: 1,
            converge_tol: 0.0,
            divergence_threshold: 1e100,
            saddle: None,
            noise: None,
        }
    }
}

impl RunOptions {
    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_saddle(mut self, saddle: Point) -> Self {
        self.saddle = Some(saddle);
        self
    }

    pub fn with_noise(mut self, relative: f64, seed: u64) -> Self {
        self.noise = Some(GradientNoise { relative, seed });
        self
    }
}

/// Shared bookkeeping for the GDA and baseline loops.
pub(crate) struct Recorder {
    records: Vec<TraceRecord>,
    saddle: Option<Point>,
    every: usize,
    threshold: f64,
    tol: f64,
    horizon: usize,
}

impl Recorder {
    pub(crate) fn new(problem: &dyn Problem, z0: &Point, horizon: usize, opts: &RunOptions) -> Result<Self> {
        problem.check_dims(z0)?;
        if opts.record_every == 0 {
            return Err(MmxError::domain("record_every must be at least 1"));
        }
        let saddle = match &opts.saddle {
            Some(s) => {
                problem.check_dims(s)?;
                Some(s.clone())
            }
            None => problem.saddle_for(z0),
        };
        Ok(Self {
            records: Vec::new(),
            saddle,
            every: opts.record_every,
            threshold: opts.divergence_threshold,
            tol: opts.converge_tol,
            horizon,
        })
    }

    pub(crate) fn wants(&self, t: usize) -> bool {
        t % self.every == 0
    }

    pub(crate) fn push(&mut self, t: usize, params: Option<(f64, f64)>, z: &Point, g: &Point, evals: u64) {
        self.records.push(TraceRecord {
            t,
            alpha: params.map(|p| p.0),
            beta: params.map(|p| p.1),
            grad_norm_sq: g.norm_sq(),
            dist_sq: self.saddle.as_ref().map(|s| z.dist_sq(s)),
            cum_grad_evals: evals,
        });
    }

    pub(crate) fn blew_up(&self, z: &Point) -> bool {
        !z.is_finite() || z.norm() > self.threshold
    }

    /// Closes the trace at iterate `t`. `g` is `grad f(z)`.
    pub(crate) fn finish(mut self, t: usize, z: Point, g: &Point, evals: u64) -> Trace {
        let diverged = self.blew_up(&z);
        if self.records.last().map(|r| r.t) != Some(t) {
            self.push(t, None, &z, g, evals);
        }
        let gn = self.records.last().map(|r| r.grad_norm_sq).unwrap_or(f64::NAN);
        let (status, diagnostic) = if diverged {
            (
                RunStatus::Diverged,
                Some(format!("iterate norm {:e} exceeded {:e} at t = {t}", z.norm(), self.threshold)),
            )
        } else if gn <= self.tol {
            (RunStatus::Converged, None)
        } else {
            (RunStatus::Completed, None)
        };
        Trace {
            records: self.records,
            final_iterate: z,
            status,
            horizon: self.horizon,
            saddle: self.saddle,
            diagnostic,
        }
    }
}

pub(crate) struct Noise {
    relative: f64,
    rng: ChaCha8Rng,
}

impl Noise {
    pub(crate) fn new(spec: Option<GradientNoise>) -> Option<Self> {
        spec.map(|n| Self { relative: n.relative, rng: seeded_rng(n.seed) })
    }

    pub(crate) fn apply(&mut self, g: &Point) -> Point {
        let mut perturb = |v: &DVector<f64>| {
            v.map(|c| c * (1.0 + self.relative * self.rng.sample::<f64, _>(StandardNormal)))
        };
        let x = perturb(g.x());
        let y = perturb(g.y());
        Point::from_parts(x, y)
    }
}

/// Runs `x <- x - alpha_t grad_x f`, `y <- y + beta_t grad_y f` for every
/// pair of `schedule`, one gradient evaluation per iteration.
///
/// Divergence is reported through [`RunStatus::Diverged`], not as an error.
///
/// ```
/// use mmx_core::problems::BilinearProblem;
/// use mmx_core::schedules::{classical, ClassicalKind};
/// use mmx_core::solvers::{run_gda, RunOptions};
/// use mmx_core::Point;
/// use nalgebra::DMatrix;
///
/// let xy = BilinearProblem::from_matrix(DMatrix::from_element(1, 1, 1.0)).unwrap();
/// let s = classical(ClassicalKind::Constant, 0.1, 0.1, 10).unwrap();
/// let trace = run_gda(&xy, &s, &Point::scalar(1.0, 0.0), &RunOptions::default()).unwrap();
/// let growth = trace.final_iterate.norm_sq();
/// assert!((growth - 1.01f64.powi(10)).abs() < 1e-12);
/// ```
pub fn run_gda(problem: &dyn Problem, schedule: &StepPairSchedule, z0: &Point, opts: &RunOptions) -> Result<Trace> {
    let horizon = schedule.horizon();
    let mut rec = Recorder::new(problem, z0, horizon, opts)?;
    let mut noise = Noise::new(opts.noise);
    let mut z = z0.clone();
    for (t, &(alpha, beta)) in schedule.steps().iter().enumerate() {
        let g = problem.eval_grad(&z);
        if rec.wants(t) {
            rec.push(t, Some((alpha, beta)), &z, &g, t as u64);
        }
        let g = match noise.as_mut() {
            Some(n) => n.apply(&g),
            None => g,
        };
        z.gda_step(alpha, beta, &g);
        if rec.blew_up(&z) {
            let g = problem.eval_grad(&z);
            return Ok(rec.finish(t + 1, z, &g, t as u64 + 1));
        }
    }
    let g = problem.eval_grad(&z);
    Ok(rec.finish(horizon, z, &g, horizon as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::BilinearProblem;
    use crate::schedules::{slingshot_bilinear, RootOrdering};
    use nalgebra::DMatrix;

    fn xy() -> BilinearProblem {
        BilinearProblem::from_matrix(DMatrix::from_element(1, 1, 1.0)).unwrap()
    }

    #[test]
    fn single_slingshot_pair_hits_saddle() {
        let s = slingshot_bilinear(1, 1.0, 1.0, RootOrdering::Auto).unwrap();
        let tr = run_gda(&xy(), &s, &Point::scalar(1.0, 0.0), &RunOptions::default()).unwrap();
        assert_eq!(tr.final_iterate, Point::scalar(0.0, 0.0));
        assert_eq!(tr.status, RunStatus::Converged);
        assert_eq!(tr.records.len(), 3);
        assert_eq!(tr.last().alpha, None);
    }

    #[test]
    fn zero_schedule_is_identity() {
        let s = StepPairSchedule::custom(vec![(0.0, 0.0); 7]).unwrap();
        let z0 = Point::scalar(0.3, -2.0);
        let tr = run_gda(&xy(), &s, &z0, &RunOptions::default().record_every(3)).unwrap();
        assert_eq!(tr.final_iterate, z0);
        let ts: Vec<usize> = tr.records.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![0, 3, 6, 7]);
        assert_eq!(tr.status, RunStatus::Completed);
    }

    #[test]
    fn divergence_is_a_status() {
        let s = StepPairSchedule::custom(vec![(1e60, 1e60); 10]).unwrap();
        let tr = run_gda(&xy(), &s, &Point::scalar(1.0, 1.0), &RunOptions::default()).unwrap();
        assert_eq!(tr.status, RunStatus::Diverged);
        assert!(tr.diagnostic.is_some());
        assert!(tr.last().t < 10);
    }

    #[test]
    fn empty_schedule_records_initial_state_only() {
        let s = StepPairSchedule::custom(vec![]).unwrap();
        let tr = run_gda(&xy(), &s, &Point::scalar(1.0, 0.0), &RunOptions::default()).unwrap();
        assert_eq!(tr.records.len(), 1);
        assert_eq!(tr.records[0].grad_norm_sq, 1.0);
        assert_eq!(tr.records[0].dist_sq, Some(1.0));
    }

    #[test]
    fn csv_header_and_missing_fields() {
        let s = StepPairSchedule::custom(vec![(0.5, 0.25)]).unwrap();
        let tr = run_gda(&xy(), &s, &Point::scalar(1.0, 0.0), &RunOptions::default()).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,alpha,beta,grad_norm_sq,dist_sq,cum_grad_evals");
        assert_eq!(lines[1], "0,0.5,0.25,1.0,1.0,0");
        assert!(lines[2].starts_with("1,,,"));
    }
}

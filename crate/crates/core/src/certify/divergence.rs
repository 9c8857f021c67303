use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::problems::{make_huber_coupling, Problem};
use crate::schedules::StepPairSchedule;
use crate::solvers::{run_baseline, run_gda, Baseline, RunOptions};

/// Class of schedules for which GDA on `f(x, y) = xy` cannot converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// Every step equal to the same `(alpha, beta)`.
    Constant,
    /// `alpha_t, beta_t >= 0`.
    Nonnegative,
    /// `alpha_t = beta_t`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceWitness {
    /// Provable lower bound on `||z_T|| / ||z_0||` for the worst unit start:
    /// the spectral radius of the product for constant schedules, the
    /// determinant product otherwise. At least 1 for every valid schedule.
    pub lower_bound: f64,
    /// `prod_t sqrt(1 + alpha_t beta_t)`.
    pub det_product: f64,
    /// Spectral norm of `prod_t U_t`, `U_t = [[1, -alpha_t], [beta_t, 1]]`.
    pub spectral_norm: f64,
    /// `||z_T||` from running GDA on `xy` from the top right singular vector.
    pub simulated_ratio: f64,
}

impl DivergenceWitness {
    /// The lower bound does not exceed the simulated ratio.
    pub fn bound_holds(&self) -> bool {
        self.lower_bound <= self.simulated_ratio * (1.0 + 1e-10) + 1e-10
    }
}

fn validate(schedule: &StepPairSchedule, kind: WitnessKind) -> Result<()> {
    let steps = schedule.steps();
    let ok = match kind {
        WitnessKind::Constant => steps.windows(2).all(|w| w[0] == w[1]),
        WitnessKind::Nonnegative => steps.iter().all(|&(a, b)| a >= 0.0 && b >= 0.0),
        WitnessKind::Symmetric => steps.iter().all(|&(a, b)| a == b),
    };
    if ok {
        Ok(())
    } else {
        Err(MmxError::domain(format!("schedule is not of the {kind:?} kind")))
    }
}

/// Lower-bounds the growth of GDA on the 1-D bilinear problem `xy` under
/// `schedule` and checks it against a simulation from the worst unit start.
pub fn check_divergence_witness(schedule: &StepPairSchedule, kind: WitnessKind) -> Result<DivergenceWitness> {
    validate(schedule, kind)?;
    let mut prod = Matrix2::identity();
    let mut log_det = 0.0;
    for &(a, b) in schedule.steps() {
        prod = Matrix2::new(1.0, -a, b, 1.0) * prod;
        log_det += 0.5 * (1.0 + a * b).abs().ln();
    }
    let det_product = log_det.exp();
    let lower_bound = match (kind, schedule.steps().first()) {
        (WitnessKind::Constant, Some(&(a, b))) => {
            let radius = if a * b >= 0.0 { (1.0 + a * b).sqrt() } else { 1.0 + (-a * b).sqrt() };
            radius.powi(schedule.horizon() as i32)
        }
        _ => det_product,
    };
    // top right-singular vector of the product from the eigenpairs of P^T P
    let eig = (prod.transpose() * prod).symmetric_eigen();
    let imax = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
    let spectral_norm = eig.eigenvalues[imax].max(0.0).sqrt();
    let v: Vector2<f64> = eig.eigenvectors.column(imax).into_owned();
    let xy = crate::problems::BilinearProblem::from_matrix(nalgebra::DMatrix::from_element(1, 1, 1.0))?;
    let opts = RunOptions { divergence_threshold: f64::INFINITY, ..RunOptions::default() }
        .record_every(schedule.horizon().max(1));
    let trace = run_gda(&xy, schedule, &Point::scalar(v[0], v[1]), &opts)?;
    Ok(DivergenceWitness {
        lower_bound,
        det_product,
        spectral_norm,
        simulated_ratio: trace.final_iterate.norm(),
    })
}

/// Outcome of one non-convergence example on the Huber coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclingCase {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation from the expected behaviour (0 means exact).
    pub deviation: f64,
}

/// Runs the Huber coupling `f(x, y) = huber(x)` examples:
///
/// - `zero_net_slingshot`: pairs `(h, -h), (-h, h)` with `h = 1/2` from
///   `x0 = 3` return to `z0` after every pair, exactly;
/// - `hgd_stationary`: Hamiltonian gradient descent from `x0 = 3` never moves;
/// - `zero_net_moves_near_saddle`: the same pairs from `x0 = 0.9` do move.
pub fn check_cycling_counterexamples() -> Result<Vec<CyclingCase>> {
    let p = make_huber_coupling();
    let h = 0.5;
    let pairs = 100;
    let z0 = Point::scalar(3.0, -1.25);
    let mut z = z0.clone();
    let mut deviation: f64 = 0.0;
    for _ in 0..pairs {
        for (a, b) in [(h, -h), (-h, h)] {
            let g = p.eval_grad(&z);
            z.gda_step(a, b, &g);
        }
        deviation = deviation.max(z.dist_sq(&z0).sqrt());
    }
    let a = CyclingCase { name: "zero_net_slingshot", passed: deviation == 0.0, deviation };

    let hgd = run_baseline(&p, &Baseline::hgd(), 200, &z0, &RunOptions::default())?;
    let d0 = hgd.first().dist_sq.unwrap_or(0.0);
    let dev = hgd.records.iter().map(|r| (r.dist_sq.unwrap_or(f64::NAN) - d0).abs()).fold(0.0, f64::max)
        + hgd.final_iterate.dist_sq(&z0).sqrt();
    let b = CyclingCase { name: "hgd_stationary", passed: dev == 0.0, deviation: dev };

    let near = Point::scalar(0.9, -1.25);
    let two = StepPairSchedule::custom(vec![(h, -h), (-h, h)])?;
    let moved = run_gda(&p, &two, &near, &RunOptions::default())?.final_iterate.dist_sq(&near).sqrt();
    let c = CyclingCase { name: "zero_net_moves_near_saddle", passed: moved > 0.0, deviation: moved };
    Ok(vec![a, b, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::{classical, ClassicalKind};

    #[test]
    fn constant_growth() {
        let s = classical(ClassicalKind::Constant, 0.1, 0.1, 20).unwrap();
        let w = check_divergence_witness(&s, WitnessKind::Constant).unwrap();
        assert!((w.lower_bound - 1.01f64.powi(10)).abs() < 1e-12);
        assert!((w.simulated_ratio - 1.01f64.powi(10)).abs() < 1e-12);
        assert!(w.bound_holds());
    }

    #[test]
    fn negative_product_constant_uses_spectral_radius() {
        let s = StepPairSchedule::custom(vec![(0.5, -0.5); 6]).unwrap();
        let w = check_divergence_witness(&s, WitnessKind::Constant).unwrap();
        assert!(w.det_product < 1.0);
        assert!(w.lower_bound > 1.0 && w.bound_holds(), "{w:?}");
    }

    #[test]
    fn alternating_and_symmetric() {
        let s = classical(ClassicalKind::Alternating, 0.1, 0.1, 10).unwrap();
        let w = check_divergence_witness(&s, WitnessKind::Nonnegative).unwrap();
        assert_eq!(w.det_product, 1.0);
        let s = StepPairSchedule::custom(vec![(-0.2, -0.2); 4]).unwrap();
        let w = check_divergence_witness(&s, WitnessKind::Symmetric).unwrap();
        assert!((w.det_product - 1.04f64.powi(2)).abs() < 1e-12);
        assert!(check_divergence_witness(&s, WitnessKind::Nonnegative).is_err());
    }

    #[test]
    fn cycling_cases_pass() {
        for case in check_cycling_counterexamples().unwrap() {
            assert!(case.passed, "{case:?}");
        }
    }
}

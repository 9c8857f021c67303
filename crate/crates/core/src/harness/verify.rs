use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::run::thread_pool;
use crate::certify::{
    check_cycling_counterexamples, check_divergence_witness, check_hamiltonian_equivalence,
    check_second_order_expansion, check_two_step_progress, lower_bound_tightness, verify_two_step_certificate,
    WitnessKind,
};
use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::problems::{make_log_cosh, random_scsc_quadratic, BilinearProblem, Problem};
use crate::rng::{derive_seed, indexed_rng};
use crate::schedules::StepPairSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyCheck {
    TwoStep,
    Expansion,
    Divergence,
    Hamiltonian,
    Tightness,
    Cycling,
}

impl VerifyCheck {
    pub const ALL: [VerifyCheck; 6] = [
        VerifyCheck::TwoStep,
        VerifyCheck::Expansion,
        VerifyCheck::Divergence,
        VerifyCheck::Hamiltonian,
        VerifyCheck::Tightness,
        VerifyCheck::Cycling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerifyCheck::TwoStep => "two-step",
            VerifyCheck::Expansion => "expansion",
            VerifyCheck::Divergence => "divergence",
            VerifyCheck::Hamiltonian => "hamiltonian",
            VerifyCheck::Tightness => "tightness",
            VerifyCheck::Cycling => "cycling",
        }
    }
}

impl fmt::Display for VerifyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerifyCheck {
    type Err = MmxError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| MmxError::Config(format!("unknown check {s:?}")))
    }
}

/// One output row `trial,status,residual_or_margin`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub trial: usize,
    pub passed: bool,
    pub value: f64,
}

impl VerifyRow {
    pub fn csv_line(&self) -> String {
        format!("{},{},{:?}", self.trial, if self.passed { "pass" } else { "fail" }, self.value)
    }
}

fn gaussian_vec(n: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn gaussian_point(dx: usize, dy: usize, rng: &mut impl Rng) -> Point {
    let x = gaussian_vec(dx, rng);
    let y = gaussian_vec(dy, rng);
    Point::from_parts(x, y)
}

/// Two-step certificate on a random SCSC quadratic. The reported value is
/// the identity residual relative to the certificate scale; the trial
/// passes when the identity, the term signs and the progress inequality all
/// hold.
pub fn two_step_trial(seed: u64, trial: u64) -> Result<VerifyRow> {
    let mut rng = indexed_rng(seed, trial);
    let dx = rng.random_range(1..=6);
    let dy = rng.random_range(1..=6);
    let mu = rng.random_range(0.0..=0.9);
    let h = (1.0 - rng.random::<f64>()) / 3.0;
    let p = random_scsc_quadratic(dx, dy, mu, derive_seed(seed, trial))?;
    let z0 = &gaussian_point(dx, dy, &mut rng) * 2.0;
    let rep = verify_two_step_certificate(&p, &z0, h)?;
    let prog = check_two_step_progress(&p, &z0, h)?;
    Ok(VerifyRow {
        trial: trial as usize,
        passed: rep.passes() && prog.passes(),
        value: rep.identity_residual / rep.scale,
    })
}

/// Ratio `error(h)/error(h/2)` of the second-order expansion on log-cosh.
pub fn expansion_trial(seed: u64, trial: u64) -> Result<VerifyRow> {
    let mut rng = indexed_rng(seed, trial);
    let p = make_log_cosh();
    let x = rng.random_range(0.2..1.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let z = Point::scalar(x, rng.sample(StandardNormal));
    let h = 10f64.powf(rng.random_range(-2.0..-1.0));
    let ratio = check_second_order_expansion(&p, &z, h)? / check_second_order_expansion(&p, &z, h / 2.0)?;
    Ok(VerifyRow { trial: trial as usize, passed: (6.0..=10.0).contains(&ratio), value: ratio })
}

/// Random nonnegative (even trials) or symmetric (odd trials) schedule; the
/// value is the determinant lower bound on the growth factor.
pub fn divergence_trial(seed: u64, trial: u64) -> Result<VerifyRow> {
    let mut rng = indexed_rng(seed, trial);
    let n = rng.random_range(1..=50);
    let symmetric = trial % 2 == 1;
    let steps: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            if symmetric {
                let a = rng.random_range(-1.0..1.0);
                (a, a)
            } else {
                (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))
            }
        })
        .collect();
    let kind = if symmetric { WitnessKind::Symmetric } else { WitnessKind::Nonnegative };
    let w = check_divergence_witness(&StepPairSchedule::custom(steps)?, kind)?;
    Ok(VerifyRow {
        trial: trial as usize,
        passed: w.lower_bound >= 1.0 && w.bound_holds(),
        value: w.lower_bound,
    })
}

/// Two bilinear slingshot steps versus one Hamiltonian gradient step, on a
/// random `B`, `z` and `h`; the value is the residual over `1 + ||z||`.
pub fn hamiltonian_trial(seed: u64, trial: u64) -> Result<VerifyRow> {
    let mut rng = indexed_rng(seed, trial);
    let dx = rng.random_range(1..=8);
    let dy = rng.random_range(1..=8);
    let b = DMatrix::from_fn(dx, dy, |_, _| rng.sample::<f64, _>(StandardNormal));
    let p = BilinearProblem::from_matrix(b)?;
    let z = gaussian_point(dx, dy, &mut rng);
    let h = rng.random_range(0.0..0.5) / p.smoothness();
    let r = check_hamiltonian_equivalence(&p, &z, h)? / (1.0 + z.norm());
    Ok(VerifyRow { trial: trial as usize, passed: r <= 1e-12, value: r })
}

/// Tightness for `T = trial % 8 + 1` and `kappa` alternating between 4 and
/// 100; the value is the relative gap to `R_T`.
pub fn tightness_trial(trial: u64) -> Result<VerifyRow> {
    let t = (trial % 8) as usize + 1;
    let kappa = if (trial / 8) % 2 == 0 { 4.0 } else { 100.0 };
    let rep = lower_bound_tightness(t, 1.0, kappa)?;
    let gap = rep.relative_gap();
    Ok(VerifyRow { trial: trial as usize, passed: gap <= 1e-6, value: gap })
}

/// Runs `trials` independent trials of `check` (in parallel). The cycling
/// check has a fixed set of cases and ignores `trials`.
pub fn run_verification(check: VerifyCheck, trials: usize, seed: u64) -> Result<Vec<VerifyRow>> {
    if check == VerifyCheck::Cycling {
        return Ok(check_cycling_counterexamples()?
            .into_iter()
            .enumerate()
            .map(|(i, c)| VerifyRow { trial: i, passed: c.passed, value: c.deviation })
            .collect());
    }
    let pool = thread_pool()?;
    pool.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| match check {
                VerifyCheck::TwoStep => two_step_trial(seed, i),
                VerifyCheck::Expansion => expansion_trial(seed, i),
                VerifyCheck::Divergence => divergence_trial(seed, i),
                VerifyCheck::Hamiltonian => hamiltonian_trial(seed, i),
                VerifyCheck::Tightness => tightness_trial(i),
                VerifyCheck::Cycling => unreachable!("handled above"),
            })
            .collect()
    })
}

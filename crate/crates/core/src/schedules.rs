//! Stepsize-pair schedules `(alpha_t, beta_t)` for GDA.
//!
//! GDA moves `x <- x - alpha grad_x f` and `y <- y + beta grad_y f`, so a
//! negative `alpha` (or `beta`) is an ascent step on `x` (or a descent step
//! on `y`). The slingshot families pair steps `(2t, 2t+1)` so that one pair
//! first steps "the wrong way" and then corrects.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{cheb_roots_shifted, leja_order, lebedev_order, quadratic_roots, InducedPolynomial};
use crate::error::{MmxError, Result};
use crate::rng::indexed_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    SlingshotBilinear,
    SlingshotQuadratic,
    SlingshotCc,
    Arcsine,
    Constant,
    Alternating,
    TwoTimescale,
    Custom,
}

impl ScheduleKind {
    pub fn is_stochastic(self) -> bool {
        matches!(self, ScheduleKind::SlingshotCc | ScheduleKind::Arcsine)
    }
}

/// A materialized sequence of stepsize pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPairSchedule {
    steps: Vec<(f64, f64)>,
    kind: ScheduleKind,
    seed: Option<u64>,
}

impl StepPairSchedule {
    /// A hand-built schedule.
    pub fn custom(steps: Vec<(f64, f64)>) -> Result<Self> {
        if steps.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(MmxError::domain("stepsizes must be finite"));
        }
        Ok(Self { steps, kind: ScheduleKind::Custom, seed: None })
    }

    fn built(steps: Vec<(f64, f64)>, kind: ScheduleKind, seed: Option<u64>) -> Self {
        Self { steps, kind, seed }
    }

    /// Number of GDA iterations.
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn step(&self, t: usize) -> (f64, f64) {
        self.steps[t]
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Concatenation, e.g. to repeat a slingshot block.
    pub fn then(mut self, other: &StepPairSchedule) -> Self {
        self.steps.extend_from_slice(&other.steps);
        if self.kind != other.kind {
            self.kind = ScheduleKind::Custom;
        }
        self
    }

    /// Residual polynomial of a bilinear-type schedule: one inverse root
    /// `1 / (alpha_{2t} beta_{2t+1})` per pair, which is `r_t` for the
    /// bilinear slingshot.
    pub fn bilinear_polynomial(&self) -> Result<InducedPolynomial> {
        self.require_even()?;
        Ok(InducedPolynomial::new(
            self.steps
                .chunks(2)
                .map(|p| 1.0 / (p[0].0 * p[1].1))
                .collect(),
        ))
    }

    /// Residual polynomial of a quadratic-type schedule (`alpha_t = -beta_t`):
    /// one inverse root `1 / alpha_t` per step.
    pub fn quadratic_polynomial(&self) -> InducedPolynomial {
        InducedPolynomial::new(self.steps.iter().map(|(a, _)| 1.0 / a).collect())
    }

    fn require_even(&self) -> Result<()> {
        if self.steps.len() % 2 != 0 {
            return Err(MmxError::domain(format!(
                "pairwise properties need an even horizon, got {}",
                self.steps.len()
            )));
        }
        Ok(())
    }

    /// Writes CSV rows `t,alpha,beta` with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "alpha", "beta"])?;
        for (t, (a, b)) in self.steps.iter().enumerate() {
            w.write_record([t.to_string(), format!("{a:?}"), format!("{b:?}")])?;
        }
        w.flush().map_err(|e| MmxError::io("<schedule csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| MmxError::io(path, e))?;
        self.write_csv(file)
    }

    /// Reads the format produced by [`StepPairSchedule::write_csv`].
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            t: usize,
            alpha: f64,
            beta: f64,
        }
        let mut steps = Vec::new();
        for (i, row) in csv::Reader::from_reader(reader).deserialize::<Row>().enumerate() {
            let row = row?;
            if row.t != i {
                return Err(MmxError::Config(format!("schedule row {i} has t = {}", row.t)));
            }
            steps.push((row.alpha, row.beta));
        }
        Self::custom(steps)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| MmxError::io(path, e))?;
        Self::read_csv(file)
    }
}

/// Order in which root indices are assigned to successive pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootOrdering {
    /// Lebedev when the number of pairs is a power of two, canonical otherwise.
    #[default]
    Auto,
    Canonical,
    Lebedev,
    /// Explicit permutation of root indices.
    Custom(Vec<usize>),
}

impl RootOrdering {
    fn resolve(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            RootOrdering::Auto if n.is_power_of_two() => lebedev_order(n),
            RootOrdering::Auto | RootOrdering::Canonical => Ok((0..n).collect()),
            RootOrdering::Lebedev => lebedev_order(n),
            RootOrdering::Custom(perm) => {
                let mut seen = vec![false; n];
                if perm.len() != n || perm.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
                    return Err(MmxError::domain(format!(
                        "custom ordering must be a permutation of 0..{n}"
                    )));
                }
                Ok(perm.clone())
            }
        }
    }
}

/// Bilinear slingshot over `[m, M]`: pair `t` uses `h = r^{-1/2}` for the
/// root `r` picked by `ordering`, with steps `(h, -h)` then `(-h, h)`.
///
/// ```
/// use mmx_core::schedules::{slingshot_bilinear, RootOrdering};
/// let s = slingshot_bilinear(1, 1.0, 1.0, RootOrdering::Canonical).unwrap();
/// assert_eq!(s.steps(), &[(1.0, -1.0), (-1.0, 1.0)]);
/// ```
pub fn slingshot_bilinear(t: usize, m: f64, big_m: f64, ordering: RootOrdering) -> Result<StepPairSchedule> {
    if !(m > 0.0) || !(m <= big_m) {
        return Err(MmxError::domain(format!("need 0 < m <= M, got m = {m}, M = {big_m}")));
    }
    let roots = cheb_roots_shifted(t, m, big_m)?;
    let order = ordering.resolve(t)?;
    let steps = order
        .iter()
        .flat_map(|&i| {
            let h = 1.0 / roots[i].sqrt();
            [(h, -h), (-h, h)]
        })
        .collect();
    Ok(StepPairSchedule::built(steps, ScheduleKind::SlingshotBilinear, None))
}

/// Quadratic slingshot on `[-L, L]`: `alpha_t = -beta_t = 1/rho` over the `2T`
/// nonzero roots `rho` of `T_{2T+1}^{[-L, L]}`.
///
/// `Auto` and `Lebedev` order the `T` root pairs `{rho, -rho}` and place each
/// positive root right before its negative partner. `Auto` uses the Lebedev
/// order when `T` is a power of two and a Leja order of `rho^2` otherwise; `Canonical` walks the roots in increasing
/// index; `Custom` permutes all `2T` root indices.
pub fn slingshot_quadratic(t: usize, l: f64, ordering: RootOrdering) -> Result<StepPairSchedule> {
    let roots = quadratic_roots(t, l)?;
    let idx: Vec<usize> = match &ordering {
        RootOrdering::Canonical => (0..2 * t).collect(),
        RootOrdering::Custom(_) => ordering.resolve(2 * t)?,
        RootOrdering::Auto | RootOrdering::Lebedev => {
            let pairs = match ordering {
                RootOrdering::Auto if !t.is_power_of_two() => {
                    let squares: Vec<f64> = roots[..t].iter().map(|r| r * r).collect();
                    leja_order(&squares)
                }
                _ => lebedev_order(t)?,
            };
            pairs.iter().flat_map(|&i| [i, 2 * t - 1 - i]).collect()
        }
    };
    let steps = idx
        .iter()
        .map(|&i| {
            let h = 1.0 / roots[i];
            (h, -h)
        })
        .collect();
    Ok(StepPairSchedule::built(steps, ScheduleKind::SlingshotQuadratic, None))
}

/// Branch of pair `index` of the randomized convex-concave slingshot: `true`
/// selects `(h, -h, 0, h)`, `false` selects `(-h, h, h, 0)`.
pub fn slingshot_cc_branch(seed: u64, index: u64) -> bool {
    indexed_rng(seed, index).random_bool(0.5)
}

/// Randomized slingshot for convex-concave problems: `T` independent fair
/// coin flips between the pairs `(h, -h), (0, h)` and `(-h, h), (h, 0)`.
pub fn slingshot_cc(t: usize, h: f64, seed: u64) -> Result<StepPairSchedule> {
    if t == 0 {
        return Err(MmxError::domain("T must be at least 1"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(MmxError::domain(format!("h must be positive, got {h}")));
    }
    let steps = (0..t as u64)
        .flat_map(|i| {
            if slingshot_cc_branch(seed, i) {
                [(h, -h), (0.0, h)]
            } else {
                [(-h, h), (h, 0.0)]
            }
        })
        .collect();
    Ok(StepPairSchedule::built(steps, ScheduleKind::SlingshotCc, Some(seed)))
}

/// Arcsine draw on `(m, M)` for pair `index`:
/// `(M+m)/2 + (M-m)/2 cos(pi U)` with `U ~ Uniform(0, 1)`.
pub fn arcsine_sample(seed: u64, index: u64, m: f64, big_m: f64) -> f64 {
    let u: f64 = indexed_rng(seed, index).sample(Open01);
    0.5 * (big_m + m) + 0.5 * (big_m - m) * (PI * u).cos()
}

/// Random bilinear schedule: pairs signed like [`slingshot_bilinear`] with
/// `h = r^{-1/2}` for i.i.d. Arcsine draws `r` on `(m, M)`.
pub fn arcsine_random(t: usize, m: f64, big_m: f64, seed: u64) -> Result<StepPairSchedule> {
    if t == 0 {
        return Err(MmxError::domain("T must be at least 1"));
    }
    if !(m > 0.0 && m < big_m && big_m.is_finite()) {
        return Err(MmxError::domain(format!("need 0 < m < M, got m = {m}, M = {big_m}")));
    }
    let steps = (0..t as u64)
        .flat_map(|i| {
            let h = 1.0 / arcsine_sample(seed, i, m, big_m).sqrt();
            [(h, -h), (-h, h)]
        })
        .collect();
    Ok(StepPairSchedule::built(steps, ScheduleKind::Arcsine, Some(seed)))
}

/// Classical nonnegative schedules over `iterations` GDA steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalKind {
    /// `(alpha, beta)` at every step.
    Constant,
    /// `(alpha, 0)` on even steps, `(0, beta)` on odd steps.
    Alternating,
    /// Constant with `alpha != beta`.
    TwoTimescale,
}

pub fn classical(kind: ClassicalKind, alpha: f64, beta: f64, iterations: usize) -> Result<StepPairSchedule> {
    if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(MmxError::domain("classical stepsizes must be nonnegative"));
    }
    let steps = match kind {
        ClassicalKind::Constant => vec![(alpha, beta); iterations],
        ClassicalKind::TwoTimescale => {
            if alpha == beta {
                return Err(MmxError::domain("two-timescale needs alpha != beta"));
            }
            vec![(alpha, beta); iterations]
        }
        ClassicalKind::Alternating => (0..iterations)
            .map(|t| if t % 2 == 0 { (alpha, 0.0) } else { (0.0, beta) })
            .collect(),
    };
    let tag = match kind {
        ClassicalKind::Constant => ScheduleKind::Constant,
        ClassicalKind::Alternating => ScheduleKind::Alternating,
        ClassicalKind::TwoTimescale => ScheduleKind::TwoTimescale,
    };
    Ok(StepPairSchedule::built(steps, tag, None))
}

/// Per-pair outcome of the three slingshot-family predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCheck {
    /// Some stepsize of the pair is strictly negative.
    pub negative_step: bool,
    /// `alpha_{2t} beta_{2t+1} >= 0` and `alpha_{2t+1} beta_{2t} >= 0`.
    pub alternating_products: bool,
    /// `alpha_{2t} + alpha_{2t+1} >= 0` and `beta_{2t} + beta_{2t+1} >= 0`.
    pub consecutive_sums: bool,
}

impl PairCheck {
    pub fn passes(&self) -> bool {
        self.negative_step && self.alternating_products && self.consecutive_sums
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlingshotFamilyCheck {
    pub pairs: Vec<PairCheck>,
}

impl SlingshotFamilyCheck {
    pub fn negative_steps(&self) -> bool {
        self.pairs.iter().all(|p| p.negative_step)
    }

    pub fn alternating_products(&self) -> bool {
        self.pairs.iter().all(|p| p.alternating_products)
    }

    pub fn consecutive_sums(&self) -> bool {
        self.pairs.iter().all(|p| p.consecutive_sums)
    }

    pub fn passes(&self) -> bool {
        self.pairs.iter().all(PairCheck::passes)
    }
}

/// Evaluates the slingshot-family predicates pair by pair.
pub fn validate_slingshot_family(schedule: &StepPairSchedule) -> Result<SlingshotFamilyCheck> {
    schedule.require_even()?;
    let pairs = schedule
        .steps()
        .chunks(2)
        .map(|p| {
            let ((a0, b0), (a1, b1)) = (p[0], p[1]);
            PairCheck {
                negative_step: [a0, b0, a1, b1].iter().any(|&v| v < 0.0),
                alternating_products: a0 * b1 >= 0.0 && a1 * b0 >= 0.0,
                consecutive_sums: a0 + a1 >= 0.0 && b0 + b1 >= 0.0,
            }
        })
        .collect();
    Ok(SlingshotFamilyCheck { pairs })
}

/// Serializable description of a schedule, as used in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    SlingshotBilinear {
        #[serde(rename = "T")]
        t: usize,
        m: f64,
        #[serde(rename = "M")]
        big_m: f64,
        #[serde(default)]
        ordering: RootOrdering,
    },
    SlingshotQuadratic {
        #[serde(rename = "T")]
        t: usize,
        #[serde(rename = "L")]
        l: f64,
        #[serde(default)]
        ordering: RootOrdering,
    },
    SlingshotCc {
        #[serde(rename = "T")]
        t: usize,
        h: f64,
        seed: Option<u64>,
    },
    Arcsine {
        #[serde(rename = "T")]
        t: usize,
        m: f64,
        #[serde(rename = "M")]
        big_m: f64,
        seed: Option<u64>,
    },
    Constant { alpha: f64, beta: f64, iterations: usize },
    Alternating { alpha: f64, beta: f64, iterations: usize },
    TwoTimescale { alpha: f64, beta: f64, iterations: usize },
    Csv { path: std::path::PathBuf },
}

impl ScheduleSpec {
    /// Materializes the schedule. Stochastic kinds without an explicit seed
    /// use `fallback_seed`.
    pub fn build(&self, fallback_seed: u64) -> Result<StepPairSchedule> {
        match self {
            ScheduleSpec::SlingshotBilinear { t, m, big_m, ordering } => {
                slingshot_bilinear(*t, *m, *big_m, ordering.clone())
            }
            ScheduleSpec::SlingshotQuadratic { t, l, ordering } => {
                slingshot_quadratic(*t, *l, ordering.clone())
            }
            ScheduleSpec::SlingshotCc { t, h, seed } => slingshot_cc(*t, *h, seed.unwrap_or(fallback_seed)),
            ScheduleSpec::Arcsine { t, m, big_m, seed } => {
                arcsine_random(*t, *m, *big_m, seed.unwrap_or(fallback_seed))
            }
            ScheduleSpec::Constant { alpha, beta, iterations } => {
                classical(ClassicalKind::Constant, *alpha, *beta, *iterations)
            }
            ScheduleSpec::Alternating { alpha, beta, iterations } => {
                classical(ClassicalKind::Alternating, *alpha, *beta, *iterations)
            }
            ScheduleSpec::TwoTimescale { alpha, beta, iterations } => {
                classical(ClassicalKind::TwoTimescale, *alpha, *beta, *iterations)
            }
            ScheduleSpec::Csv { path } => StepPairSchedule::load_csv(path),
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, ScheduleSpec::SlingshotCc { .. } | ScheduleSpec::Arcsine { .. })
    }
}

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{MmxError, Result};
use crate::point::Point;
use crate::problems::{
    diagonal_bilinear, load_matrix_csv, make_huber_coupling, make_log_cosh, random_bilinear, random_quadratic,
    random_scsc_quadratic, BilinearProblem, Problem,
};
use crate::rng::seeded_rng;
use crate::schedules::ScheduleSpec;
use crate::solvers::Baseline;

/// Problem instance description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `d x d` bilinear with squared singular values in `[1, M]`.
    RandomBilinear {
        d: usize,
        #[serde(rename = "M", default = "default_big_m")]
        big_m: f64,
        seed: u64,
    },
    /// `B = diag(2^0, 2^-1, ..., 2^-(d-1))`.
    PowersOfTwoBilinear { d: usize },
    /// `B = diag(diag)`.
    DiagonalBilinear { diag: Vec<f64> },
    /// Bilinear with `B` read from a header-less CSV file; `[m, M]` default
    /// to the extreme nonzero squared singular values.
    MatrixBilinear {
        path: PathBuf,
        m: Option<f64>,
        #[serde(rename = "M")]
        big_m: Option<f64>,
    },
    /// Random convex-concave quadratic with spectral norm `L`.
    RandomQuadratic {
        dx: usize,
        dy: usize,
        #[serde(rename = "L", default = "one_f")]
        l: f64,
        seed: u64,
    },
    /// Random `mu`-SCSC quadratic with `L = 1`.
    RandomScsc { dx: usize, dy: usize, mu: f64, seed: u64 },
    /// `f(x, y) = huber(x)`.
    Huber,
    /// `f(x, y) = log cosh(x)`.
    LogCosh,
}

fn default_big_m() -> f64 {
    300.0
}

fn one_f() -> f64 {
    1.0
}

fn one() -> usize {
    1
}

impl ProblemSpec {
    /// Builds the instance; relative paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Arc<dyn Problem>> {
        Ok(match self {
            ProblemSpec::RandomBilinear { d, big_m, seed } => Arc::new(random_bilinear(*d, *big_m, *seed)?),
            ProblemSpec::PowersOfTwoBilinear { d } => {
                let diag: Vec<f64> = (0..*d).map(|i| 2f64.powi(-(i as i32))).collect();
                Arc::new(diagonal_bilinear(&diag)?)
            }
            ProblemSpec::DiagonalBilinear { diag } => Arc::new(diagonal_bilinear(diag)?),
            ProblemSpec::MatrixBilinear { path, m, big_m } => {
                let b = load_matrix_csv(base.join(path))?;
                let auto = BilinearProblem::from_matrix(b.clone())?;
                let (dx, dy) = (b.nrows(), b.ncols());
                Arc::new(BilinearProblem::new(
                    b,
                    DVector::zeros(dx),
                    DVector::zeros(dy),
                    m.unwrap_or(auto.m()),
                    big_m.unwrap_or(auto.big_m()),
                )?)
            }
            ProblemSpec::RandomQuadratic { dx, dy, l, seed } => Arc::new(random_quadratic(*dx, *dy, *l, *seed)?),
            ProblemSpec::RandomScsc { dx, dy, mu, seed } => Arc::new(random_scsc_quadratic(*dx, *dy, *mu, *seed)?),
            ProblemSpec::Huber => Arc::new(make_huber_coupling()),
            ProblemSpec::LogCosh => Arc::new(make_log_cosh()),
        })
    }
}

/// Initial point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    #[default]
    Ones,
    Zeros,
    Constant { value: f64 },
    /// I.i.d. `N(0, scale^2)` entries, drawn from the trial seed.
    Gaussian {
        #[serde(default = "one_f")]
        scale: f64,
    },
    Point { x: Vec<f64>, y: Vec<f64> },
}

impl InitSpec {
    pub fn build(&self, dims: (usize, usize), trial_seed: u64) -> Result<Point> {
        let (dx, dy) = dims;
        match self {
            InitSpec::Ones => Ok(Point::from_element(dx, dy, 1.0)),
            InitSpec::Zeros => Ok(Point::zeros(dx, dy)),
            InitSpec::Constant { value } => Point::new(DVector::from_element(dx, *value), DVector::from_element(dy, *value)),
            InitSpec::Gaussian { scale } => {
                let mut rng = seeded_rng(trial_seed);
                let mut draw = |n: usize| DVector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
                let x = draw(dx);
                let y = draw(dy);
                Point::new(x, y)
            }
            InitSpec::Point { x, y } => {
                let p = Point::from_slices(x, y)?;
                if p.dims() != dims {
                    return Err(MmxError::Dimension {
                        expected: format!("{dims:?}"),
                        got: format!("{:?}", p.dims()),
                    });
                }
                Ok(p)
            }
        }
    }
}

/// Algorithm description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    /// GDA under a schedule; the schedule fixes the horizon.
    Gda {
        schedule: ScheduleSpec,
        /// Relative multiplicative gradient noise.
        gradient_noise: Option<f64>,
    },
    Baseline { iterations: usize, method: Baseline },
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::Gda { schedule, .. } => {
                let v = serde_json::to_value(schedule).unwrap_or_default();
                format!("gda:{}", v.get("kind").and_then(|k| k.as_str()).unwrap_or("schedule"))
            }
            AlgorithmSpec::Baseline { method, .. } => method.name().to_string(),
        }
    }
}

/// A full experiment, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Master seed; trial `i` uses a seed derived from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default = "one")]
    pub record_every: usize,
    /// Output directory, relative to the config file.
    pub output: Option<PathBuf>,
    /// Final squared gradient norm counted as converged.
    #[serde(default)]
    pub converge_tol: f64,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub init: InitSpec,
    pub algorithm: AlgorithmSpec,
    /// Directory relative paths are resolved against (the config's folder).
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| MmxError::Config(e.to_string()))?;
        if cfg.trials == 0 {
            return Err(MmxError::Config("trials must be at least 1".into()));
        }
        if cfg.record_every == 0 {
            return Err(MmxError::Config("record_every must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| MmxError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            MmxError::Config(msg) => MmxError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// `output` resolved against the config directory, or `out/<name>`.
    pub fn output_dir(&self) -> PathBuf {
        match &self.output {
            Some(p) => self.base_dir.join(p),
            None => self.base_dir.join("out").join(&self.name),
        }
    }
}

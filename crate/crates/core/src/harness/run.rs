use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AlgorithmSpec, ExperimentConfig};
use crate::error::{MmxError, Result};
use crate::rng::derive_seed;
use crate::solvers::{run_baseline, run_gda, RunOptions, RunStatus, Trace};

/// Worker pool honouring `MMX_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MMX_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| MmxError::Config(format!("MMX_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(MmxError::Config("MMX_THREADS must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| MmxError::Config(format!("thread pool: {e}")))
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub trace: Trace,
}

/// Across-trial statistics for one recorded iterate index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub t: usize,
    pub cum_grad_evals: u64,
    /// Trials contributing (diverged trials drop out after they stop).
    pub n: usize,
    pub grad_norm_sq_mean: f64,
    pub grad_norm_sq_se: f64,
    pub dist_sq_mean: Option<f64>,
    pub dist_sq_se: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub name: String,
    pub trials: Vec<TrialResult>,
    pub aggregate: Vec<AggregateRow>,
}

impl ExperimentResult {
    pub fn any_diverged(&self) -> bool {
        self.trials.iter().any(|t| t.trace.diverged())
    }
}

fn mean_se(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub(crate) fn aggregate(traces: &[&Trace]) -> Vec<AggregateRow> {
    let mut by_t: BTreeMap<usize, Vec<_>> = BTreeMap::new();
    for tr in traces {
        for r in &tr.records {
            by_t.entry(r.t).or_default().push(*r);
        }
    }
    by_t.into_iter()
        .map(|(t, rs)| {
            let g: Vec<f64> = rs.iter().map(|r| r.grad_norm_sq).collect();
            let (gm, gse) = mean_se(&g);
            let d: Option<Vec<f64>> = rs.iter().map(|r| r.dist_sq).collect();
            let (dm, dse) = match d {
                Some(d) => {
                    let (m, s) = mean_se(&d);
                    (Some(m), Some(s))
                }
                None => (None, None),
            };
            AggregateRow {
                t,
                cum_grad_evals: rs.iter().map(|r| r.cum_grad_evals).max().unwrap_or(0),
                n: rs.len(),
                grad_norm_sq_mean: gm,
                grad_norm_sq_se: gse,
                dist_sq_mean: dm,
                dist_sq_se: dse,
            }
        })
        .collect()
}

fn run_trial(cfg: &ExperimentConfig, problem: &dyn crate::problems::Problem, trial: usize) -> Result<TrialResult> {
    let seed = derive_seed(cfg.seed, trial as u64);
    let z0 = cfg.init.build(problem.dims(), derive_seed(seed, 0))?;
    let mut opts = RunOptions::default().record_every(cfg.record_every);
    opts.converge_tol = cfg.converge_tol;
    let trace = match &cfg.algorithm {
        AlgorithmSpec::Gda { schedule, gradient_noise } => {
            let schedule = crate::schedules::ScheduleSpec::build(
                &resolve_schedule(schedule, &cfg.base_dir),
                derive_seed(seed, 1),
            )?;
            if let Some(rel) = gradient_noise {
                opts = opts.with_noise(*rel, derive_seed(seed, 2));
            }
            run_gda(problem, &schedule, &z0, &opts)?
        }
        AlgorithmSpec::Baseline { iterations, method } => run_baseline(problem, method, *iterations, &z0, &opts)?,
    };
    Ok(TrialResult { trial, seed, trace })
}

fn resolve_schedule(spec: &crate::schedules::ScheduleSpec, base: &Path) -> crate::schedules::ScheduleSpec {
    match spec {
        crate::schedules::ScheduleSpec::Csv { path } => crate::schedules::ScheduleSpec::Csv { path: base.join(path) },
        other => other.clone(),
    }
}

/// Runs every trial (in parallel) and aggregates, without touching the disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let problem = cfg.problem.build(&cfg.base_dir)?;
    let pool = thread_pool()?;
    let trials = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, problem.as_ref(), i))
            .collect::<Result<Vec<_>>>()
    })?;
    let traces: Vec<&Trace> = trials.iter().map(|t| &t.trace).collect();
    let aggregate = aggregate(&traces);
    Ok(ExperimentResult { name: cfg.name.clone(), trials, aggregate })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| MmxError::io(dir, e))
}

fn fmt(v: f64) -> String {
    crate::solvers::trace_fmt_float(v)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

pub(crate) fn write_aggregate_rows<W: Write>(w: &mut csv::Writer<W>, label: Option<&str>, rows: &[AggregateRow]) -> Result<()> {
    for r in rows {
        let mut rec = Vec::with_capacity(8);
        if let Some(l) = label {
            rec.push(l.to_string());
        }
        rec.extend([
            r.t.to_string(),
            r.cum_grad_evals.to_string(),
            r.n.to_string(),
            fmt(r.grad_norm_sq_mean),
            fmt(r.grad_norm_sq_se),
            fmt_opt(r.dist_sq_mean),
            fmt_opt(r.dist_sq_se),
        ]);
        w.write_record(&rec)?;
    }
    Ok(())
}

pub(crate) const AGGREGATE_HEADER: [&str; 7] =
    ["t", "cum_grad_evals", "n", "grad_norm_sq_mean", "grad_norm_sq_se", "dist_sq_mean", "dist_sq_se"];

/// Writes `trace_NNNN.csv` and `final_NNNN.json` per trial plus
/// `summary.csv` (one row per trial) and `aggregate.csv` into `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path, gnuplot_stub: bool) -> Result<()> {
    create_dir(dir)?;
    for t in &result.trials {
        t.trace.save_csv(dir.join(format!("trace_{:04}.csv", t.trial)))?;
        t.trace.save_final_json(dir.join(format!("final_{:04}.json", t.trial)))?;
    }
    let path = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "trial",
        "seed",
        "status",
        "diverged",
        "T",
        "final_grad_norm_sq",
        "final_dist_sq",
        "cum_grad_evals",
    ])?;
    for t in &result.trials {
        let fs = t.trace.final_state();
        let status = match fs.status {
            RunStatus::Converged => "converged",
            RunStatus::Diverged => "diverged",
            RunStatus::Completed => "completed",
        };
        w.write_record([
            t.trial.to_string(),
            t.seed.to_string(),
            status.to_string(),
            t.trace.diverged().to_string(),
            fs.t.to_string(),
            fmt(fs.final_grad_norm_sq),
            fmt_opt(fs.final_dist_sq),
            t.trace.last().cum_grad_evals.to_string(),
        ])?;
    }
    w.flush().map_err(|e| MmxError::io(&path, e))?;

    let path = dir.join("aggregate.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(AGGREGATE_HEADER)?;
    write_aggregate_rows(&mut w, None, &result.aggregate)?;
    w.flush().map_err(|e| MmxError::io(&path, e))?;

    if gnuplot_stub {
        let script = format!(
            "# gnuplot -p {dir}/plot.gp\nset datafile separator ','\nset logscale y\nset key autotitle columnhead\n\
             set xlabel 'gradient evaluations'\nset ylabel 'squared gradient norm'\n\
             plot '{dir}/aggregate.csv' using 2:4 with lines title '{name}'\n",
            dir = dir.display(),
            name = result.name,
        );
        let p = dir.join("plot.gp");
        std::fs::write(&p, script).map_err(|e| MmxError::io(&p, e))?;
    }
    Ok(())
}

/// Runs the experiment and writes its files into [`ExperimentConfig::output_dir`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let result = execute(cfg)?;
    write_outputs(&result, &cfg.output_dir(), false)?;
    Ok(result)
}

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{MmxError, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Final squared gradient norm at or below the run's tolerance.
    Converged,
    /// Iterate norm passed the divergence threshold or became non-finite.
    Diverged,
    /// Ran the full horizon without either of the above.
    Completed,
}

/// Metrics of iterate `z_t`.
///
/// `alpha`/`beta` are the parameters of the step leaving `z_t` (stepsizes
/// for GDA; see [`crate::solvers::Baseline`] for baselines) and are `None`
/// on the final record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub grad_norm_sq: f64,
    pub dist_sq: Option<f64>,
    /// Gradient evaluations the method spent to produce `z_t`.
    pub cum_grad_evals: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub final_iterate: Point,
    pub status: RunStatus,
    /// Requested number of iterations.
    pub horizon: usize,
    /// Saddle point used for `dist_sq`, if any.
    pub saddle: Option<Point>,
    pub diagnostic: Option<String>,
}

/// Final-state summary, serialized as the per-run JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    pub status: RunStatus,
    pub final_grad_norm_sq: f64,
    pub final_dist_sq: Option<f64>,
    #[serde(rename = "T")]
    pub t: usize,
}

pub(crate) fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

impl Trace {
    pub fn first(&self) -> &TraceRecord {
        &self.records[0]
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("a trace always holds the t = 0 record")
    }

    /// Record for iterate `t`, when it was recorded.
    pub fn at(&self, t: usize) -> Option<&TraceRecord> {
        self.records
            .binary_search_by_key(&t, |r| r.t)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn diverged(&self) -> bool {
        self.status == RunStatus::Diverged
    }

    pub fn final_state(&self) -> FinalState {
        let last = self.last();
        FinalState {
            status: self.status,
            final_grad_norm_sq: last.grad_norm_sq,
            final_dist_sq: last.dist_sq,
            t: self.horizon,
        }
    }

    /// CSV with header `t,alpha,beta,grad_norm_sq,dist_sq,cum_grad_evals`;
    /// missing values are empty fields, floats use round-trip formatting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "alpha", "beta", "grad_norm_sq", "dist_sq", "cum_grad_evals"])?;
        for r in &self.records {
            w.write_record([
                r.t.to_string(),
                fmt_opt(r.alpha),
                fmt_opt(r.beta),
                fmt_float(r.grad_norm_sq),
                fmt_opt(r.dist_sq),
                r.cum_grad_evals.to_string(),
            ])?;
        }
        w.flush().map_err(|e| MmxError::io("<trace csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| MmxError::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn save_final_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(&self.final_state())?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| MmxError::io(path, e))
    }
}

/// Reads a trace CSV back into records.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| MmxError::io(path, e))?;
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(file).deserialize::<TraceRecord>() {
        out.push(row?);
    }
    Ok(out)
}

use std::path::Path;

use super::config::ExperimentConfig;
use super::run::{execute, write_aggregate_rows, AggregateRow, AGGREGATE_HEADER};
use crate::error::{MmxError, Result};

/// Trial-averaged metrics of one algorithm, ordered by gradient evaluations.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub label: String,
    pub rows: Vec<AggregateRow>,
}

impl Series {
    /// Latest row whose metrics used at most `k` gradient evaluations.
    pub fn at_evals(&self, k: u64) -> Option<&AggregateRow> {
        let idx = self.rows.partition_point(|r| r.cum_grad_evals <= k);
        idx.checked_sub(1).map(|i| &self.rows[i])
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonSummary {
    pub series: Vec<Series>,
}

impl ComparisonSummary {
    /// Each series' state after `k` gradient evaluations.
    pub fn aligned_at(&self, k: u64) -> Vec<Option<&AggregateRow>> {
        self.series.iter().map(|s| s.at_evals(k)).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Long-format CSV: the aggregate columns prefixed by `algorithm`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["algorithm"];
        header.extend(AGGREGATE_HEADER);
        w.write_record(&header)?;
        for s in &self.series {
            write_aggregate_rows(&mut w, Some(&s.name), &s.rows)?;
        }
        w.flush().map_err(|e| MmxError::io(path, e))
    }

    /// Plain gnuplot script plotting every series from `comparison.csv`.
    pub fn gnuplot_script(&self, csv_path: &Path) -> String {
        let mut s = String::from(
            "set datafile separator ','\nset logscale y\nset xlabel 'gradient evaluations'\n\
             set ylabel 'squared gradient norm'\n",
        );
        let plots: Vec<String> = self
            .series
            .iter()
            .map(|ser| {
                format!(
                    "'{}' using ((strcol(1) eq '{}') ? $3 : 1/0):5 with lines title '{}'",
                    csv_path.display(),
                    ser.name,
                    ser.name
                )
            })
            .collect();
        s.push_str("plot ");
        s.push_str(&plots.join(", \\\n     "));
        s.push('\n');
        s
    }
}

/// Runs every config and lines the results up by gradient evaluations.
/// All configs must describe the same problem instance.
pub fn compare(configs: &[ExperimentConfig]) -> Result<ComparisonSummary> {
    let first = configs.first().ok_or_else(|| MmxError::domain("nothing to compare"))?;
    for c in &configs[1..] {
        if c.problem != first.problem {
            return Err(MmxError::domain(format!(
                "configs {:?} and {:?} use different problem instances",
                first.name, c.name
            )));
        }
    }
    let series = configs
        .iter()
        .map(|c| {
            let r = execute(c)?;
            let mut rows = r.aggregate;
            rows.sort_by_key(|row| (row.cum_grad_evals, row.t));
            Ok(Series { name: c.name.clone(), label: c.algorithm.label(), rows })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonSummary { series })
}

/// [`compare`] plus `comparison.csv` (and optionally `plot.gp`) in `dir`.
pub fn compare_to_dir(configs: &[ExperimentConfig], dir: &Path, gnuplot_stub: bool) -> Result<ComparisonSummary> {
    let summary = compare(configs)?;
    std::fs::create_dir_all(dir).map_err(|e| MmxError::io(dir, e))?;
    let csv_path = dir.join("comparison.csv");
    summary.write_csv(&csv_path)?;
    if gnuplot_stub {
        let p = dir.join("plot.gp");
        std::fs::write(&p, summary.gnuplot_script(&csv_path)).map_err(|e| MmxError::io(&p, e))?;
    }
    Ok(summary)
}

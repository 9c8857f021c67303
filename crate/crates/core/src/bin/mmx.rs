use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mmx_core::chebyshev::{cheb_roots_shifted, extremal_rate_bilinear, extremal_rate_quadratic, quadratic_roots};
use mmx_core::harness::{compare_to_dir, execute, run_verification, write_outputs, ExperimentConfig, VerifyCheck};
use mmx_core::{MmxError, Result};

#[derive(Parser)]
#[command(name = "mmx", version, about = "Stepsize schedules for gradient descent-ascent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write traces and summaries.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write a gnuplot script next to the CSVs.
        #[arg(long)]
        gnuplot_stub: bool,
    },
    /// Run several configs on the same problem and align them by gradient evaluations.
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = "compare_out")]
        output: PathBuf,
        #[arg(long)]
        gnuplot_stub: bool,
    },
    /// Numerical checks; prints `trial,status,residual_or_margin` rows.
    Verify {
        check: CheckArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print schedule roots as `index,root,stepsize_magnitude` plus a final `rate` row.
    Roots {
        #[arg(long, value_enum)]
        kind: RootsKind,
        #[arg(long = "T")]
        t: usize,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long = "M", default_value_t = 1.0)]
        big_m: f64,
        /// Quadratic spectral bound; defaults to sqrt(M).
        #[arg(long = "L")]
        l: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    TwoStep,
    Expansion,
    Divergence,
    Hamiltonian,
    Tightness,
    Cycling,
}

impl From<CheckArg> for VerifyCheck {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::TwoStep => VerifyCheck::TwoStep,
            CheckArg::Expansion => VerifyCheck::Expansion,
            CheckArg::Divergence => VerifyCheck::Divergence,
            CheckArg::Hamiltonian => VerifyCheck::Hamiltonian,
            CheckArg::Tightness => VerifyCheck::Tightness,
            CheckArg::Cycling => VerifyCheck::Cycling,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RootsKind {
    Bilinear,
    Quadratic,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mmx: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |source| MmxError::Io { path: "<stdout>".into(), source };
    match cli.command {
        Command::Run { config, output, gnuplot_stub } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = output.unwrap_or_else(|| cfg.output_dir());
            let result = execute(&cfg)?;
            write_outputs(&result, &dir, gnuplot_stub)?;
            let diverged = result.trials.iter().filter(|t| t.trace.diverged()).count();
            writeln!(
                out,
                "{}: {} trial(s), {} diverged, written to {}",
                cfg.name,
                result.trials.len(),
                diverged,
                dir.display()
            )
            .map_err(io)?;
        }
        Command::Compare { configs, output, gnuplot_stub } => {
            let cfgs = configs.iter().map(ExperimentConfig::load).collect::<Result<Vec<_>>>()?;
            let summary = compare_to_dir(&cfgs, &output, gnuplot_stub)?;
            for s in &summary.series {
                if let Some(last) = s.rows.last() {
                    writeln!(
                        out,
                        "{} ({}): {} evals, mean grad_norm_sq {:?}",
                        s.name, s.label, last.cum_grad_evals, last.grad_norm_sq_mean
                    )
                    .map_err(io)?;
                }
            }
        }
        Command::Verify { check, trials, seed } => {
            let rows = run_verification(check.into(), trials, seed)?;
            writeln!(out, "trial,status,residual_or_margin").map_err(io)?;
            for r in &rows {
                writeln!(out, "{}", r.csv_line()).map_err(io)?;
            }
            if rows.iter().any(|r| !r.passed) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Roots { kind, t, m, big_m, l } => {
            writeln!(out, "index,root,stepsize_magnitude").map_err(io)?;
            match kind {
                RootsKind::Bilinear => {
                    for (i, r) in cheb_roots_shifted(t, m, big_m)?.iter().enumerate() {
                        writeln!(out, "{i},{r:?},{:?}", 1.0 / r.sqrt()).map_err(io)?;
                    }
                    writeln!(out, "rate,{:?},", extremal_rate_bilinear(t, m, big_m)?).map_err(io)?;
                }
                RootsKind::Quadratic => {
                    let l = l.unwrap_or_else(|| big_m.sqrt());
                    for (i, r) in quadratic_roots(t, l)?.iter().enumerate() {
                        writeln!(out, "{i},{r:?},{:?}", 1.0 / r.abs()).map_err(io)?;
                    }
                    writeln!(out, "rate,{:?},", extremal_rate_quadratic(t, l)?).map_err(io)?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

//! Config-driven experiments: TOML configs, parallel trials, trace and
//! summary files, comparisons across algorithms, and the verification
//! driver behind `mmx verify`.

mod compare;
mod config;
mod run;
mod verify;

pub use compare::{compare, compare_to_dir, ComparisonSummary, Series};
pub use config::{AlgorithmSpec, ExperimentConfig, InitSpec, ProblemSpec};
pub use run::{execute, run_experiment, thread_pool, write_outputs, AggregateRow, ExperimentResult, TrialResult};
pub use verify::{
    divergence_trial, expansion_trial, hamiltonian_trial, run_verification, tightness_trial, two_step_trial,
    VerifyCheck, VerifyRow,
};

use std::path::{Path, PathBuf};
use std::process::Command;

use mmx_core::harness::{compare, execute, run_experiment, write_outputs, ExperimentConfig};
use mmx_core::schedules::{slingshot_cc, StepPairSchedule};
use mmx_core::solvers::{read_trace_csv, RunStatus};
use mmx_core::MmxError;

fn mmx() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmx"))
}

fn recipes() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const CC_CONFIG: &str = r#"
name = "cc"
seed = 11
trials = 4
record_every = 3

[problem]
kind = "powers_of_two_bilinear"
d = 8

[init]
kind = "gaussian"
scale = 2.0

[algorithm]
kind = "gda"
schedule = { kind = "slingshot_cc", T = 40, h = 0.2 }
"#;

#[test]
fn every_recipe_parses() {
    let mut n = 0;
    for entry in std::fs::read_dir(recipes()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.problem.build(&cfg.base_dir).unwrap();
            n += 1;
        }
    }
    assert!(n >= 4);
}

#[test]
fn config_rejects_unknown_fields_and_zero_trials() {
    let bad = CC_CONFIG.replace("record_every = 3", "record_every = 3\ncolour = \"red\"");
    assert!(matches!(ExperimentConfig::from_toml_str(&bad), Err(MmxError::Config(_))));
    let zero = CC_CONFIG.replace("trials = 4", "trials = 0");
    assert!(matches!(ExperimentConfig::from_toml_str(&zero), Err(MmxError::Config(_))));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml_str(CC_CONFIG).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    write_outputs(&execute(&cfg).unwrap(), &a, false).unwrap();
    write_outputs(&execute(&cfg).unwrap(), &b, false).unwrap();
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "trace_0003.csv"));
    for name in names {
        let x = std::fs::read(a.join(&name)).unwrap();
        let y = std::fs::read(b.join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
    }
}

#[test]
fn trials_use_distinct_seeds() {
    let cfg = ExperimentConfig::from_toml_str(CC_CONFIG).unwrap();
    let res = execute(&cfg).unwrap();
    let mut seeds: Vec<u64> = res.trials.iter().map(|t| t.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 4);
    assert_eq!(res.trials.iter().map(|t| t.trial).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
}

#[test]
fn trace_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml_str(CC_CONFIG).unwrap();
    let res = execute(&cfg).unwrap();
    write_outputs(&res, dir.path(), false).unwrap();
    let text = std::fs::read_to_string(dir.path().join("trace_0000.csv")).unwrap();
    assert!(text.starts_with("t,alpha,beta,grad_norm_sq,dist_sq,cum_grad_evals\n"));
    assert!(!text.contains('\r'));
    let back = read_trace_csv(dir.path().join("trace_0000.csv")).unwrap();
    assert_eq!(back, res.trials[0].trace.records);
    let fin: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("final_0000.json")).unwrap()).unwrap();
    assert_eq!(fin["T"], 80);
    assert_eq!(fin["status"], "completed");
    assert_eq!(res.trials[0].trace.status, RunStatus::Completed);
}

#[test]
fn schedule_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let s = slingshot_cc(17, 0.1234567891, 5).unwrap();
    let path = dir.path().join("s.csv");
    s.save_csv(&path).unwrap();
    let back = StepPairSchedule::load_csv(&path).unwrap();
    assert_eq!(back.steps(), s.steps());
}

#[test]
fn zero_horizon_keeps_only_initial_metrics() {
    let cfg = ExperimentConfig::load(recipes().join("trivial_t0.toml")).unwrap();
    let res = execute(&cfg).unwrap();
    assert_eq!(res.aggregate.len(), 1);
    assert_eq!(res.aggregate[0].t, 0);
    assert_eq!(res.aggregate[0].cum_grad_evals, 0);
    assert_eq!(res.trials[0].trace.records.len(), 1);
}

#[test]
fn compare_rejects_different_problems() {
    let a = ExperimentConfig::from_toml_str(CC_CONFIG).unwrap();
    let b = ExperimentConfig::from_toml_str(&CC_CONFIG.replace("d = 8", "d = 9")).unwrap();
    assert!(matches!(compare(&[a, b]), Err(MmxError::Domain(_))));
}

#[test]
fn single_config_comparison_equals_its_run() {
    let cfg = ExperimentConfig::from_toml_str(CC_CONFIG).unwrap();
    let summary = compare(std::slice::from_ref(&cfg)).unwrap();
    let own = run_experiment(&cfg).unwrap();
    assert_eq!(summary.series.len(), 1);
    assert_eq!(summary.series[0].rows, own.aggregate);
}

#[test]
fn alignment_never_looks_ahead() {
    let base = ExperimentConfig::from_toml_str(CC_CONFIG).unwrap();
    let eg = ExperimentConfig::from_toml_str(&CC_CONFIG.replace(
        "kind = \"gda\"\nschedule = { kind = \"slingshot_cc\", T = 40, h = 0.2 }",
        "kind = \"baseline\"\niterations = 30\nmethod = { kind = \"extragradient\" }",
    ))
    .unwrap();
    let summary = compare(&[base, eg]).unwrap();
    for k in 0..100 {
        for row in summary.aligned_at(k).into_iter().flatten() {
            assert!(row.cum_grad_evals <= k);
        }
    }
}

#[test]
fn cli_run_writes_files_and_gnuplot_stub() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cc.toml", CC_CONFIG);
    let out = dir.path().join("out");
    let st = mmx().arg("run").arg(&cfg).arg("--output").arg(&out).arg("--gnuplot-stub").output().unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    for f in ["summary.csv", "aggregate.csv", "trace_0000.csv", "final_0003.json", "plot.gp"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let plot = std::fs::read_to_string(out.join("plot.gp")).unwrap();
    assert!(plot.contains("aggregate.csv"));
}

#[test]
fn cli_compare_writes_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let st = mmx()
        .arg("compare")
        .args(["fig2_xy_slingshot.toml", "fig2_xy_constant.toml", "fig2_xy_alternating.toml"].map(|f| recipes().join(f)))
        .arg("--output")
        .arg(&out)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert!(text.starts_with("algorithm,t,cum_grad_evals"));
    assert!(text.contains("fig2_xy_alternating"));
}

#[test]
fn cli_verify_prints_rows() {
    for check in ["two-step", "expansion", "divergence", "hamiltonian", "tightness", "cycling"] {
        let st = mmx().args(["verify", check, "--trials", "5", "--seed", "3"]).output().unwrap();
        assert!(st.status.success(), "{check}: {}", String::from_utf8_lossy(&st.stdout));
        let text = String::from_utf8(st.stdout).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("trial,status,residual_or_margin"));
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 3, "{check}: {line}");
            assert_eq!(cols[1], "pass", "{check}: {line}");
            cols[2].parse::<f64>().unwrap();
        }
    }
}

#[test]
fn cli_roots_bilinear() {
    let st = mmx().args(["roots", "--kind", "bilinear", "--T", "2", "--m", "1", "--M", "300"]).output().unwrap();
    assert!(st.status.success());
    let text = String::from_utf8(st.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "index,root,stepsize_magnitude");
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for (i, sign) in [(1usize, 1.0), (2, -1.0)] {
        let cols: Vec<f64> = rows[i].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        let r = 150.5 + sign * 149.5 * half;
        assert!((cols[0] - r).abs() < 1e-12 && (cols[1] - 1.0 / r.sqrt()).abs() < 1e-15);
    }
    assert!(rows[3].starts_with("rate,"));
}

#[test]
fn cli_reports_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "name = \"x\"\n[problem]\nkind = \"nope\"\n");
    let st = mmx().arg("run").arg(&cfg).output().unwrap();
    assert!(!st.status.success());
    assert!(String::from_utf8_lossy(&st.stderr).contains("bad.toml"));
}

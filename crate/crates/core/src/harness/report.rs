//! On-disk run outputs. Everything except `timing.csv` and `runtime_s` in
//! the summary is a deterministic function of the configuration.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::ExperimentReport;
use super::instance::ProblemInstance;
use super::pnm::{write_pbm, Pgm};
use crate::error::Result;
use crate::solver::IterationRecord;

pub const HISTORY_FILE: &str = "history.csv";
pub const TIMING_FILE: &str = "timing.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const RECONSTRUCTION_FILE: &str = "reconstruction.pgm";
pub const TRUTH_FILE: &str = "truth.pgm";
pub const MASK_FILE: &str = "mask.pbm";

/// Paths written for one run, echoed in the summary.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunFiles {
    pub history: PathBuf,
    pub timing: PathBuf,
    pub summary: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<PathBuf>,
}

impl RunFiles {
    fn in_dir(dir: &Path) -> Self {
        RunFiles {
            history: dir.join(HISTORY_FILE),
            timing: dir.join(TIMING_FILE),
            summary: dir.join(SUMMARY_FILE),
            ..RunFiles::default()
        }
    }
}

#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a ExperimentConfig>,
    #[serde(flatten)]
    report: R,
    files: &'a RunFiles,
}

#[derive(Serialize)]
struct DivergedReport<'a> {
    name: &'a str,
    iteration: usize,
    iterations_recorded: usize,
}

/// Creates `dir` if needed. Refuses to replace earlier outputs unless
/// `overwrite` is set.
pub fn prepare_dir(dir: &Path, overwrite: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    if !overwrite {
        for name in [HISTORY_FILE, SUMMARY_FILE] {
            let path = dir.join(name);
            if path.exists() {
                return Err(io::Error::new(
                    io::ErrorKind::AlreadyExists,
                    format!("{} exists; pass --overwrite to replace it", path.display()),
                )
                .into());
            }
        }
    }
    Ok(())
}

/// Writes history, timing, images and the summary of a finished run.
pub fn write_run(
    dir: &Path,
    report: &ExperimentReport,
    instance: &ProblemInstance,
    config: Option<&ExperimentConfig>,
    overwrite: bool,
) -> Result<RunFiles> {
    prepare_dir(dir, overwrite)?;
    let mut files = RunFiles::in_dir(dir);
    write_history(&files.history, &files.timing, &report.history)?;

    let reconstruction = dir.join(RECONSTRUCTION_FILE);
    Pgm::from_image(&report.estimate, instance.full_scale).write(&reconstruction)?;
    files.reconstruction = Some(reconstruction);
    let truth = dir.join(TRUTH_FILE);
    Pgm::from_image(&instance.truth, instance.full_scale).write(&truth)?;
    files.truth = Some(truth);
    if let Some(mask) = instance.mask() {
        let path = dir.join(MASK_FILE);
        let mut bytes = Vec::new();
        write_pbm(&mask, &mut bytes)?;
        fs::write(&path, bytes)?;
        files.mask = Some(path);
    }

    let status = if report.feasible { "feasible" } else { "infeasible" };
    write_summary(&files, status, config, report)?;
    Ok(files)
}

/// Writes what a diverged run produced before its last finite iterate.
pub fn write_diverged(
    dir: &Path,
    name: &str,
    iteration: usize,
    history: &[IterationRecord],
    config: Option<&ExperimentConfig>,
    overwrite: bool,
) -> Result<RunFiles> {
    prepare_dir(dir, overwrite)?;
    let files = RunFiles::in_dir(dir);
    write_history(&files.history, &files.timing, history)?;
    let report = DivergedReport {
        name,
        iteration,
        iterations_recorded: history.len(),
    };
    write_summary(&files, "diverged", config, report)?;
    Ok(files)
}

fn write_summary<R: Serialize>(
    files: &RunFiles,
    status: &str,
    config: Option<&ExperimentConfig>,
    report: R,
) -> Result<()> {
    let summary = Summary {
        status,
        config,
        report,
        files,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(&files.summary, text)?;
    Ok(())
}

/// Per-iteration quantities. Wall times go to a separate file so the
/// history is byte-identical across reruns.
pub fn write_history(history_path: &Path, timing_path: &Path, records: &[IterationRecord]) -> Result<()> {
    fs::write(history_path, history_csv(records))?;
    let mut timing = String::from("k,wall_time_s\n");
    for r in records {
        writeln!(timing, "{},{}", r.k, r.wall_time).expect("writing to a String");
    }
    fs::write(timing_path, timing)?;
    Ok(())
}

pub fn history_csv(records: &[IterationRecord]) -> String {
    let mut out = String::from("k,objective,constraint_norm,primal_residual,mse\n");
    for r in records {
        let mse = r.mse.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.k, r.objective, r.constraint_norm, r.primal_residual, mse
        )
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, ExperimentKind};

    fn tiny_run() -> (ExperimentConfig, ProblemInstance, ExperimentReport) {
        let mut c = ExperimentConfig::new(ExperimentKind::Inpaint);
        c.size = Some(16);
        c.iterations = Some(5);
        let inst = ProblemInstance::from_config(&c).unwrap();
        let choice = c.solver_choice(inst.truth.dim()).unwrap();
        let report = run_experiment(&inst, &choice, &c.solver_config()).unwrap();
        (c, inst, report)
    }

    #[test]
    fn writes_and_refuses_to_clobber() {
        let dir = tempfile::tempdir().unwrap();
        let (c, inst, report) = tiny_run();
        let files = write_run(dir.path(), &report, &inst, Some(&c), false).unwrap();
        let history = fs::read_to_string(&files.history).unwrap();
        assert_eq!(history.lines().count(), report.history.len() + 1);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&files.summary).unwrap()).unwrap();
        for key in ["history", "timing", "summary", "reconstruction", "truth", "mask"] {
            let p = summary["files"][key].as_str().unwrap();
            assert!(Path::new(p).exists(), "{key}");
        }
        assert_eq!(summary["config"]["experiment"], "inpaint");
        assert!(write_run(dir.path(), &report, &inst, Some(&c), false).is_err());
        assert!(write_run(dir.path(), &report, &inst, Some(&c), true).is_ok());
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (c, inst, report) = tiny_run();
        let a = write_run(&dir.path().join("a"), &report, &inst, Some(&c), false).unwrap();
        let (c2, inst2, report2) = tiny_run();
        let b = write_run(&dir.path().join("b"), &report2, &inst2, Some(&c2), false).unwrap();
        assert_eq!(fs::read(a.history).unwrap(), fs::read(b.history).unwrap());
        assert_eq!(
            fs::read(a.reconstruction.unwrap()).unwrap(),
            fs::read(b.reconstruction.unwrap()).unwrap()
        );
    }
}

use std::fs;

use csalsa::harness::report::{write_run, HISTORY_FILE, RECONSTRUCTION_FILE, SUMMARY_FILE};
use csalsa::harness::{epsilon_rule, run_experiment, ExperimentConfig, ExperimentKind, ProblemInstance};
use csalsa::validate::{run_suite, ValidateOptions};

#[test]
fn epsilon_follows_the_noise_rule_for_every_experiment() {
    for kind in [ExperimentKind::Mri, ExperimentKind::Deblur1, ExperimentKind::Deblur3B, ExperimentKind::Inpaint] {
        let mut c = ExperimentConfig::new(kind);
        c.size = Some(32);
        let inst = ProblemInstance::from_config(&c).unwrap();
        let m = inst.observations();
        let expected = (m as f64 + 8.0 * (m as f64).sqrt()).sqrt() * inst.sigma;
        assert!((inst.epsilon - expected).abs() <= 1e-12 * expected, "{kind:?}");
        assert_eq!(inst.epsilon, epsilon_rule(m, inst.sigma).unwrap());
    }
}

#[test]
fn explicit_epsilon_overrides_the_rule() {
    let mut c = ExperimentConfig::new(ExperimentKind::Deblur2A);
    c.size = Some(32);
    c.epsilon = Some(3.5);
    assert_eq!(ProblemInstance::from_config(&c).unwrap().epsilon, 3.5);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "experiment = \"mri\"\nsize = 64\nlines = 16\nmu = 20.0\nseed = 3\n").unwrap();
    let c = ExperimentConfig::load(&path).unwrap();
    assert_eq!(c.experiment, ExperimentKind::Mri);
    assert_eq!((c.size, c.lines, c.mu, c.seed), (Some(64), Some(16), Some(20.0), 3));

    fs::write(&path, "experiment = \"mri\"\nbogus = 1\n").unwrap();
    let err = ExperimentConfig::load(&path).unwrap_err().to_string();
    assert!(err.contains("run.toml"), "{err}");
    fs::write(&path, "experiment = \"mri\"\nmu = -1.0\n").unwrap();
    assert!(ExperimentConfig::load(&path).is_err());
}

#[test]
fn default_mri_run_finishes_within_budget() {
    let c = ExperimentConfig::new(ExperimentKind::Mri);
    let inst = ProblemInstance::from_config(&c).unwrap();
    let choice = c.solver_choice(inst.truth.dim()).unwrap();
    let r = run_experiment(&inst, &choice, &c.solver_config()).unwrap();
    assert!(r.feasible);
    assert!(r.iterations <= 300, "{}", r.summary_line());
}

#[test]
fn run_outputs_are_written_and_protected() {
    let mut c = ExperimentConfig::new(ExperimentKind::Inpaint);
    c.size = Some(32);
    c.iterations = Some(20);
    let inst = ProblemInstance::from_config(&c).unwrap();
    let choice = c.solver_choice(inst.truth.dim()).unwrap();
    let r = run_experiment(&inst, &choice, &c.solver_config()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let files = write_run(dir.path(), &r, &inst, Some(&c), false).unwrap();
    for name in [HISTORY_FILE, SUMMARY_FILE, RECONSTRUCTION_FILE] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    assert!(files.mask.is_some());
    let history = fs::read_to_string(&files.history).unwrap();
    assert_eq!(history.lines().count(), r.iterations + 1);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files.summary).unwrap()).unwrap();
    assert_eq!(summary["iterations"], r.iterations);

    assert!(write_run(dir.path(), &r, &inst, Some(&c), false).is_err());
    assert!(write_run(dir.path(), &r, &inst, Some(&c), true).is_ok());
}

#[test]
fn validation_suite_passes_inside_its_time_budget() {
    let report = run_suite(&ValidateOptions::default());
    let failures: Vec<_> = report.failures().map(|f| format!("{}: {}", f.name, f.detail)).collect();
    assert!(report.all_passed(), "{failures:?}");
    assert!(report.within_budget(), "{:?}", report.elapsed);
}

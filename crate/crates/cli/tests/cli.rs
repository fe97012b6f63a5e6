use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn csalsa(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csalsa"))
        .args(args)
        .env("CSALSA_OUT", out)
        .output()
        .expect("binary runs")
}

/// The single run directory under `out`.
fn run_dir(out: &Path) -> PathBuf {
    let dirs: Vec<_> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.into_iter().next().unwrap()
}

#[test]
fn mri_run_writes_its_outputs() {
    let out = tempfile::tempdir().unwrap();
    let o = csalsa(&["run", "--experiment", "mri", "--lines", "22", "--size", "128"], out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(out.path());
    for name in ["history.csv", "summary.json", "reconstruction.pgm"] {
        assert!(dir.join(name).exists(), "{name} missing");
    }
    assert!(fs::read(dir.join("reconstruction.pgm")).unwrap().starts_with(b"P5"));
}

#[test]
fn reruns_are_deterministic() {
    let out = tempfile::tempdir().unwrap();
    let args = ["run", "--experiment", "deblur-1", "--mu", "0.5", "--seed", "7", "--size", "64", "--iterations", "40", "--overwrite"];
    // A short budget may end infeasible (exit 1); either way outputs are written.
    let o = csalsa(&args, out.path());
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read(run_dir(out.path()).join("history.csv")).unwrap();
    assert!(matches!(csalsa(&args, out.path()).status.code(), Some(0 | 1)));
    let second = fs::read(run_dir(out.path()).join("history.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let out = tempfile::tempdir().unwrap();
    let o = csalsa(&["run", "--experiment", "denoise"], out.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn existing_outputs_need_overwrite() {
    let out = tempfile::tempdir().unwrap();
    let args = ["run", "--experiment", "inpaint", "--size", "32", "--iterations", "10"];
    let first = csalsa(&args, out.path());
    assert_ne!(first.status.code(), Some(2), "{}", String::from_utf8_lossy(&first.stderr));
    let second = csalsa(&args, out.path());
    assert_eq!(second.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&second.stderr).contains("--overwrite"));
}

#[test]
fn validate_flag_passes() {
    let out = tempfile::tempdir().unwrap();
    let o = csalsa(&["--validate"], out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("properties passed"));
}

#[test]
fn injected_fft_scale_error_is_caught() {
    let out = tempfile::tempdir().unwrap();
    let o = csalsa(&["validate", "--fft-scale-error", "1.1"], out.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

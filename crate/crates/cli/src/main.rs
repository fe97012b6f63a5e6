use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csalsa::frames::FrameFamily;
use csalsa::harness::{report, run_experiment, ExperimentConfig, ExperimentKind, Formulation, ProblemInstance};
use csalsa::solver::StopDecision;
use csalsa::validate::{run_suite, ValidateOptions, TIME_BUDGET};
use csalsa::Error;
use rayon::prelude::*;

const EXIT_EXHAUSTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

/// Constrained ADMM reconstruction benchmarks: deblurring, inpainting and
/// partial-Fourier (MRI-style) imaging.
///
/// Exit status: 0 converged, 1 iteration budget exhausted without
/// feasibility, 2 usage or configuration error, 3 divergence.
#[derive(Parser, Debug)]
#[command(name = "csalsa", version, about)]
struct Cli {
    /// Run the property suite (same as the `validate` subcommand).
    #[arg(long)]
    validate: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build benchmark instances, solve them and write reports.
    Run(RunArgs),
    /// Run the fast property suite and print pass/fail per property.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiments to run: deblur-1, deblur-2a, deblur-2b, deblur-3a,
    /// deblur-3b, mri, hdr, inpaint. Repeat or separate with commas.
    #[arg(long, value_delimiter = ',', value_parser = parse_experiment)]
    experiment: Vec<ExperimentKind>,
    /// TOML experiment files; each is one run.
    #[arg(long)]
    config: Vec<PathBuf>,
    /// Augmented-Lagrangian penalty.
    #[arg(long)]
    mu: Option<f64>,
    /// Constraint radius, replacing the noise-based rule.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Iteration budget.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Image side length.
    #[arg(long)]
    size: Option<usize>,
    /// Radial lines of the Fourier mask.
    #[arg(long)]
    lines: Option<usize>,
    /// tv, synthesis or analysis.
    #[arg(long, value_parser = parse_formulation)]
    formulation: Option<Formulation>,
    /// Frame for synthesis and analysis: orthogonal-haar or undecimated-haar.
    #[arg(long, value_parser = parse_frame)]
    frame: Option<FrameFamily>,
    /// Frame decomposition levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Concurrent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output root; each run writes to <out>/<run name>/.
    #[arg(long, env = "CSALSA_OUT", default_value = "csalsa-runs")]
    out: PathBuf,
    /// Replace outputs of an earlier run with the same name.
    #[arg(long)]
    overwrite: bool,
    /// Only print errors.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Fault injection: scale every DFT by this factor.
    #[arg(long, hide = true, default_value_t = 1.0)]
    fft_scale_error: f64,
}

fn parse_experiment(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_formulation(s: &str) -> Result<Formulation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_frame(s: &str) -> Result<FrameFamily, String> {
    match s {
        "orthogonal-haar" | "orthogonal" => Ok(FrameFamily::OrthogonalHaar),
        "undecimated-haar" | "undecimated" => Ok(FrameFamily::UndecimatedHaar),
        _ => Err(format!("unknown frame '{s}' (expected orthogonal-haar or undecimated-haar)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Some(Command::Validate(args)) => validate(&args),
        None if cli.validate => validate(&ValidateArgs { fft_scale_error: 1.0 }),
        Some(Command::Run(args)) => run(&args),
        None => {
            eprintln!("nothing to do: pass a subcommand (run, validate) or --validate; see --help");
            EXIT_USAGE
        }
    };
    ExitCode::from(code)
}

fn validate(args: &ValidateArgs) -> u8 {
    let report = run_suite(&ValidateOptions {
        fft_scale_error: args.fft_scale_error,
    });
    for r in &report.results {
        println!("{} {:<55} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = report.failures().count();
    println!(
        "{} of {} properties passed in {:.2}s",
        report.results.len() - failed,
        report.results.len(),
        report.elapsed.as_secs_f64()
    );
    if !report.within_budget() {
        eprintln!("warning: suite exceeded its {}s budget", TIME_BUDGET.as_secs());
    }
    if failed == 0 {
        0
    } else {
        1
    }
}

fn run(args: &RunArgs) -> u8 {
    if args.experiment.is_empty() && args.config.is_empty() {
        eprintln!("error: pass at least one --experiment or --config");
        return EXIT_USAGE;
    }
    if args.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    let mut configs = Vec::new();
    for path in &args.config {
        match ExperimentConfig::load(path) {
            Ok(c) => configs.push(c),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    configs.extend(args.experiment.iter().map(|&k| ExperimentConfig::new(k)));
    for c in &mut configs {
        apply_overrides(c, args);
        if let Err(e) = c.check() {
            eprintln!("error: {}: {e}", c.experiment);
            return EXIT_USAGE;
        }
    }

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    let outcomes: Vec<(String, u8)> =
        pool.install(|| configs.par_iter().map(|c| run_one(c, &args.out, args.overwrite)).collect());

    let mut code = 0;
    for (line, c) in outcomes {
        if c == 0 {
            if !args.quiet {
                println!("{line}");
            }
        } else {
            eprintln!("{line}");
        }
        code = code.max(c);
    }
    code
}

fn apply_overrides(c: &mut ExperimentConfig, args: &RunArgs) {
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = args.$field.clone() {
                c.$field = Some(v);
            }
        )*};
    }
    set!(mu, epsilon, iterations, size, lines, formulation, frame, levels);
    if let Some(seed) = args.seed {
        c.seed = seed;
    }
}

/// Solves one configuration and writes its outputs. Returns the summary
/// line and the run's exit status.
fn run_one(config: &ExperimentConfig, out: &Path, overwrite: bool) -> (String, u8) {
    let name = config.run_name();
    let dir = out.join(&name);
    let usage = |e: Error| (format!("error: {name}: {e}"), EXIT_USAGE);

    let instance = match ProblemInstance::from_config(config) {
        Ok(i) => i,
        Err(e) => return usage(e),
    };
    let choice = match config.solver_choice(instance.truth.dim()) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Err(e) = report::prepare_dir(&dir, overwrite) {
        return usage(e);
    }

    match run_experiment(&instance, &choice, &config.solver_config()) {
        Ok(rep) => {
            if let Err(e) = report::write_run(&dir, &rep, &instance, Some(config), overwrite) {
                return usage(e);
            }
            let code = match rep.decision {
                StopDecision::Converged => 0,
                _ if rep.feasible => 0,
                _ => EXIT_EXHAUSTED,
            };
            (format!("{} -> {}", rep.summary_line(), dir.display()), code)
        }
        Err(Error::Divergence { iteration, last_finite }) => {
            let written = report::write_diverged(&dir, &name, iteration, &last_finite.history, Some(config), true);
            let note = match written {
                Ok(_) => format!("partial history in {}", dir.display()),
                Err(e) => format!("could not write partial history: {e}"),
            };
            (format!("{name}: diverged at iteration {iteration}; {note}"), EXIT_DIVERGED)
        }
        Err(e) => usage(e),
    }
}

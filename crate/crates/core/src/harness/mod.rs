//! Benchmark problems, metrics and experiment orchestration.
//!
//! An [`ExperimentConfig`] names one of the benchmark experiments plus
//! overrides. It builds a [`ProblemInstance`] (truth, operator, noisy
//! observation, ε) and a solver choice; [`run_experiment`] solves it behind
//! a call-counting wrapper and returns an [`ExperimentReport`], which
//! [`report::write_run`] serialises to disk.

mod cartoon;
mod config;
mod experiment;
mod instance;
mod kernels;
mod masks;
mod metrics;
mod phantom;
pub mod pnm;
pub mod report;
mod squares;

pub use cartoon::cartoon;
pub use config::{ExperimentConfig, ExperimentKind, Formulation};
pub use experiment::{run_experiment, CallCounts, CountingOperator, ExperimentReport, SolverChoice};
pub use instance::ProblemInstance;
pub use kernels::{
    make_blur_kernel, BlurKernel, DEFAULT_GAUSSIAN_SUPPORT, DEFAULT_GAUSSIAN_VARIANCE,
    DEFAULT_INVERSE_QUADRATIC_SUPPORT,
};
pub use masks::{radial_mask, random_pixel_mask};
pub use metrics::{epsilon_rule, isnr, mse, Isnr};
pub use phantom::{shepp_logan, shepp_logan_support};
pub use squares::{random_squares, RandomSquares, SquaresSpec, DEFAULT_SQUARE_COUNT};

//! Constrained imaging inverse problems, min φ(x) s.t. ‖Bx − y‖₂ ≤ ε,
//! solved by an ADMM variant whose linear step is a closed-form
//! O(n log n) inverse.
//!
//! * [`operators`]: convolution, pixel masks and partial Fourier sampling,
//!   optionally composed with a frame.
//! * [`frames`]: orthogonal and undecimated Haar Parseval frames.
//! * [`prox`]: soft threshold, Chambolle TV denoiser, ε-ball projection.
//! * [`solver`]: the split ADMM engine and the two constrained solvers.
//! * [`harness`]: benchmark problems, metrics, reports and file formats.
//! * [`validate`]: the fast property suite behind `csalsa validate`.

pub mod error;
pub mod frames;
pub mod harness;
pub mod operators;
pub mod prox;
pub mod solver;
pub mod validate;
pub mod vector;

pub use error::{Error, Result};

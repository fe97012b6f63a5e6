use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GAUSSIAN_SUPPORT: usize = 9;
pub const DEFAULT_GAUSSIAN_VARIANCE: f64 = 1.0;
pub const DEFAULT_INVERSE_QUADRATIC_SUPPORT: usize = 15;

/// Blur kernels of the deconvolution benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum BlurKernel {
    Uniform { support: usize },
    Gaussian { support: usize, variance: f64 },
    /// h_ij ∝ 1 / (1 + i² + j²).
    InverseQuadratic { support: usize },
}

impl BlurKernel {
    pub fn uniform9x9() -> Self {
        BlurKernel::Uniform { support: 9 }
    }
}

/// A centred, unit-sum kernel on its odd support.
pub fn make_blur_kernel(kind: BlurKernel) -> Result<Array2<f64>> {
    let support = match kind {
        BlurKernel::Uniform { support }
        | BlurKernel::Gaussian { support, .. }
        | BlurKernel::InverseQuadratic { support } => support,
    };
    if support % 2 == 0 {
        return Err(Error::domain(format!("kernel support must be odd, got {support}")));
    }
    let c = (support / 2) as f64;
    let raw = match kind {
        BlurKernel::Uniform { .. } => Array2::ones((support, support)),
        BlurKernel::Gaussian { variance, .. } => {
            if !(variance > 0.0) {
                return Err(Error::domain("Gaussian variance must be positive"));
            }
            Array2::from_shape_fn((support, support), |(a, b)| {
                let (i, j) = (a as f64 - c, b as f64 - c);
                (-(i * i + j * j) / (2.0 * variance)).exp()
            })
        }
        BlurKernel::InverseQuadratic { .. } => Array2::from_shape_fn((support, support), |(a, b)| {
            let (i, j) = (a as f64 - c, b as f64 - c);
            1.0 / (1.0 + i * i + j * j)
        }),
    };
    let z = raw.sum();
    Ok(raw / z)
}

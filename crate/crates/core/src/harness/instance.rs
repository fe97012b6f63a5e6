use ndarray::{Array2, ArrayView2};

use super::config::{ExperimentConfig, ExperimentKind};
use super::kernels::{
    make_blur_kernel, BlurKernel, DEFAULT_GAUSSIAN_SUPPORT, DEFAULT_GAUSSIAN_VARIANCE,
    DEFAULT_INVERSE_QUADRATIC_SUPPORT,
};
use super::masks::{radial_mask, random_pixel_mask};
use super::metrics::epsilon_rule;
use super::phantom::shepp_logan;
use super::pnm::Pgm;
use super::squares::{random_squares, SquaresSpec, DEFAULT_SQUARE_COUNT};
use super::cartoon::cartoon;
use crate::error::{Error, Result};
use crate::operators::{add_noise, LinearMap, LinearOperatorSpec, Observation, ObservationOperator, OperatorKind};

const STREAM_NOISE: u64 = 1;
const STREAM_MASK: u64 = 2;
const STREAM_SQUARES: u64 = 3;

/// A benchmark problem: y = B x + n with ε set by the √(m + 8√m)σ rule
/// unless overridden.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub truth: Array2<f64>,
    /// B acting on images. Synthesis solvers compose it with a frame.
    pub operator: LinearOperatorSpec,
    pub observation: Observation,
    pub sigma: f64,
    pub epsilon: f64,
    pub seed: u64,
    /// Intensity written as white in PGM output.
    pub full_scale: f64,
}

impl ProblemInstance {
    /// Observes `truth` through `operator` with noise from `seed`.
    pub fn new(
        name: impl Into<String>,
        truth: Array2<f64>,
        operator: LinearOperatorSpec,
        sigma: f64,
        seed: u64,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        if operator.frame().is_some() {
            return Err(Error::Capability("instances hold the image-domain operator".into()));
        }
        let clean = operator.forward_image(truth.view())?;
        let observation = add_noise(&clean, sigma, seed)?;
        let epsilon = match epsilon {
            Some(e) => e,
            None => epsilon_rule(observation.samples(), sigma)?,
        };
        let full_scale = truth.iter().cloned().fold(0.0, f64::max);
        Ok(ProblemInstance {
            name: name.into(),
            truth,
            operator,
            observation,
            sigma,
            epsilon,
            seed,
            full_scale: if full_scale > 0.0 { full_scale } else { 1.0 },
        })
    }

    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        config.check()?;
        let n = config.size();
        let seed = config.seed;
        let name = config.run_name();
        let kind = config.experiment;
        let instance = match kind {
            ExperimentKind::Mri => {
                let truth = shepp_logan(n);
                let mask = radial_mask(n, config.lines.unwrap_or(22))?;
                let op = LinearOperatorSpec::partial_fourier(mask)?;
                let sigma = config.sigma.unwrap_or(kind.default_sigma().expect("fixed"));
                Self::new(name, truth, op, sigma, substream(seed, STREAM_NOISE), config.epsilon)?
            }
            ExperimentKind::Hdr => {
                let squares = random_squares(&SquaresSpec {
                    size: n,
                    dynamic_range_db: config.dynamic_range_db.unwrap_or(40.0),
                    count: config.squares.unwrap_or(DEFAULT_SQUARE_COUNT),
                    seed: substream(seed, STREAM_SQUARES),
                })?;
                let mask = radial_mask(n, config.lines.unwrap_or(27))?;
                let op = LinearOperatorSpec::partial_fourier(mask)?;
                let sigma = config.sigma.unwrap_or(kind.default_sigma().expect("fixed"));
                Self::new(name, squares.image, op, sigma, substream(seed, STREAM_NOISE), config.epsilon)?
            }
            ExperimentKind::Inpaint => {
                let truth = natural_image(config, n)?;
                let fraction = config.missing_fraction.unwrap_or(0.4);
                let mask = random_pixel_mask(truth.dim(), fraction, substream(seed, STREAM_MASK))?;
                let op = LinearOperatorSpec::pixel_mask(mask)?;
                let sigma = match config.sigma {
                    Some(s) => s,
                    None => snr_sigma(&op, truth.view(), config.snr_db.unwrap_or(40.0))?,
                };
                let mut inst = Self::new(name, truth, op, sigma, substream(seed, STREAM_NOISE), config.epsilon)?;
                inst.full_scale = 255.0;
                inst
            }
            _ => {
                let truth = natural_image(config, n)?;
                let kernel = make_blur_kernel(deblur_kernel(config))?;
                let op = LinearOperatorSpec::convolution(kernel.view(), truth.dim())?;
                let sigma = config.sigma.unwrap_or(kind.default_sigma().expect("fixed"));
                let mut inst = Self::new(name, truth, op, sigma, substream(seed, STREAM_NOISE), config.epsilon)?;
                inst.full_scale = 255.0;
                inst
            }
        };
        Ok(instance)
    }

    /// m, counted in complex samples for Fourier data.
    pub fn observations(&self) -> usize {
        self.observation.samples()
    }

    /// B x without noise.
    pub fn clean_observation(&self) -> Result<Observation> {
        self.operator.forward_image(self.truth.view())
    }

    /// The naive image from the data: y itself for blur, Bᴴy (zero filling)
    /// for masks and Fourier sampling.
    pub fn degraded_image(&self) -> Result<Array2<f64>> {
        let shape = self.truth.dim();
        let flat = match self.operator.kind() {
            OperatorKind::CircularConvolution(_) => self.observation.values().clone(),
            _ => self.operator.adjoint(self.observation.view())?,
        };
        Ok(flat.into_shape_with_order(shape).expect("operator maps images of this shape"))
    }

    /// The sampling pattern, if the operator has one.
    pub fn mask(&self) -> Option<Array2<bool>> {
        match self.operator.kind() {
            OperatorKind::PixelMask(m) => Some(m.mask().clone()),
            OperatorKind::PartialFourier(p) => Some(p.mask().clone()),
            OperatorKind::CircularConvolution(_) => None,
        }
    }
}

fn deblur_kernel(config: &ExperimentConfig) -> BlurKernel {
    match config.experiment {
        ExperimentKind::Deblur1 => BlurKernel::Uniform {
            support: config.kernel_support.unwrap_or(9),
        },
        ExperimentKind::Deblur2A | ExperimentKind::Deblur2B => BlurKernel::Gaussian {
            support: config.kernel_support.unwrap_or(DEFAULT_GAUSSIAN_SUPPORT),
            variance: config.gaussian_variance.unwrap_or(DEFAULT_GAUSSIAN_VARIANCE),
        },
        _ => BlurKernel::InverseQuadratic {
            support: config.kernel_support.unwrap_or(DEFAULT_INVERSE_QUADRATIC_SUPPORT),
        },
    }
}

/// The user's image scaled to [0, 255], or the bundled cartoon.
fn natural_image(config: &ExperimentConfig, n: usize) -> Result<Array2<f64>> {
    match &config.image {
        Some(path) => Ok(Pgm::read(path)?.to_image(255.0)),
        None => Ok(cartoon(n)),
    }
}

/// σ such that var(Bx) / σ² hits the requested SNR over the observed pixels.
fn snr_sigma(op: &LinearOperatorSpec, truth: ArrayView2<f64>, snr_db: f64) -> Result<f64> {
    let y = op.forward_image(truth)?.into_values();
    let mean = y.mean().unwrap_or(0.0);
    let var = y.mapv(|v| (v - mean) * (v - mean)).mean().unwrap_or(0.0);
    Ok((var / 10f64.powf(snr_db / 10.0)).sqrt())
}

/// An independent seed per random component of an instance (splitmix64).
fn substream(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Observation, SampleKind};
use crate::error::{Error, Result};

/// Adds i.i.d. Gaussian noise of standard deviation `sigma` per sample.
/// For complex observations the variance is split equally between the real
/// and imaginary parts (circular complex noise). Deterministic in `seed`.
pub fn add_noise(y: &Observation, sigma: f64, seed: u64) -> Result<Observation> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("noise sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(y.clone());
    }
    let per_component = match y.kind() {
        SampleKind::Real => sigma,
        SampleKind::Complex => sigma / std::f64::consts::SQRT_2,
    };
    let normal = Normal::new(0.0, per_component).map_err(|e| Error::domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy: Array1<f64> = y.values().mapv(|v| v + normal.sample(&mut rng));
    Observation::new(noisy, y.kind())
}

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SQUARE_COUNT: usize = 15;

/// A random-squares image and the amplitude of each square.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSquares {
    pub image: Array2<f64>,
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquaresSpec {
    pub size: usize,
    pub dynamic_range_db: f64,
    pub count: usize,
    pub seed: u64,
}

/// `count` axis-aligned squares with side lengths uniform in [4, n/4] on a
/// zero background, painted in order. Amplitudes are log-spaced from 1 to
/// 10^(dynamic_range_db / 20).
pub fn random_squares(spec: &SquaresSpec) -> Result<RandomSquares> {
    let n = spec.size;
    if n < 16 {
        return Err(Error::domain(format!("squares image needs n >= 16, got {n}")));
    }
    if !(spec.dynamic_range_db >= 0.0) {
        return Err(Error::domain("dynamic range must be non-negative"));
    }
    if spec.count == 0 {
        return Err(Error::domain("need at least one square"));
    }
    let top = 10f64.powf(spec.dynamic_range_db / 20.0);
    let amplitudes: Vec<f64> = (0..spec.count)
        .map(|k| {
            if spec.count == 1 {
                1.0
            } else {
                top.powf(k as f64 / (spec.count - 1) as f64)
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut image = Array2::zeros((n, n));
    for &amp in &amplitudes {
        let side = rng.random_range(4..=n / 4);
        let r0 = rng.random_range(0..=n - side);
        let c0 = rng.random_range(0..=n - side);
        image
            .slice_mut(ndarray::s![r0..r0 + side, c0..c0 + side])
            .fill(amp);
    }
    Ok(RandomSquares { image, amplitudes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(db: f64) -> SquaresSpec {
        SquaresSpec {
            size: 64,
            dynamic_range_db: db,
            count: 15,
            seed: 11,
        }
    }

    #[test]
    fn amplitude_ratio_matches_decibels() {
        let sq = random_squares(&spec(40.0)).unwrap();
        let max = sq.amplitudes.iter().cloned().fold(f64::MIN, f64::max);
        let min = sq.amplitudes.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max / min - 100.0).abs() < 1e-10);
    }

    #[test]
    fn zero_decibels_gives_equal_amplitudes() {
        let sq = random_squares(&spec(0.0)).unwrap();
        assert!(sq.amplitudes.iter().all(|&a| a == 1.0));
        assert!(sq.image.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn seeded_and_reproducible() {
        assert_eq!(random_squares(&spec(60.0)).unwrap(), random_squares(&spec(60.0)).unwrap());
    }
}

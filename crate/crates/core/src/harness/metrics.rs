use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ε = √(m + 8√m) σ: a radius the noise norm rarely exceeds.
pub fn epsilon_rule(m: usize, sigma: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::domain("epsilon rule needs at least one observation"));
    }
    if !(sigma >= 0.0) {
        return Err(Error::domain(format!("sigma must be non-negative, got {sigma}")));
    }
    let m = m as f64;
    Ok((m + 8.0 * m.sqrt()).sqrt() * sigma)
}

/// ‖x̂ − x‖² / n.
pub fn mse(estimate: ArrayView2<f64>, truth: ArrayView2<f64>) -> Result<f64> {
    check_shapes(estimate, truth)?;
    Ok(squared_error(estimate, truth) / truth.len() as f64)
}

/// Improvement in SNR of an estimate over a degraded image, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Isnr {
    Finite(f64),
    /// The estimate equals the truth.
    Saturated,
}

/// 10 log₁₀(‖y − x‖² / ‖x̂ − x‖²).
pub fn isnr(degraded: ArrayView2<f64>, estimate: ArrayView2<f64>, truth: ArrayView2<f64>) -> Result<Isnr> {
    check_shapes(degraded, truth)?;
    check_shapes(estimate, truth)?;
    let err = squared_error(estimate, truth);
    if err == 0.0 {
        return Ok(Isnr::Saturated);
    }
    Ok(Isnr::Finite(10.0 * (squared_error(degraded, truth) / err).log10()))
}

fn squared_error(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_shapes(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::shape("metric inputs", format!("{:?}", b.dim()), format!("{:?}", a.dim())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn epsilon_rule_values() {
        assert_eq!(epsilon_rule(1, 1.0).unwrap(), 3.0);
        assert_eq!(epsilon_rule(1000, 0.0).unwrap(), 0.0);
        let e = epsilon_rule(65536, 0.56).unwrap();
        assert!((e - 67584f64.sqrt() * 0.56).abs() < 1e-9);
        assert!((e - 145.58).abs() < 0.01);
        assert!(epsilon_rule(0, 1.0).is_err());
    }

    #[test]
    fn mse_and_isnr() {
        let x = Array2::from_shape_fn((4, 4), |(i, j)| (i + j) as f64);
        assert_eq!(mse(x.view(), x.view()).unwrap(), 0.0);
        assert_eq!(isnr(x.view(), x.view(), x.view()).unwrap(), Isnr::Saturated);
        let shifted = &x + 1.0;
        assert_eq!(mse(shifted.view(), x.view()).unwrap(), 1.0);
        let worse = &x + 2.0;
        match isnr(worse.view(), shifted.view(), x.view()).unwrap() {
            Isnr::Finite(db) => assert!((db - 10.0 * 4f64.log10()).abs() < 1e-12),
            Isnr::Saturated => panic!(),
        }
        assert!(mse(x.view(), Array2::zeros((3, 4)).view()).is_err());
    }
}

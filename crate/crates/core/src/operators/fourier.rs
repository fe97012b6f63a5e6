//! Partial Fourier sampling B = M U acting on real images.
//!
//! Observations are the selected complex DFT samples, stored interleaved as
//! `[re₀, im₀, re₁, im₁, …]` in row-major scan order of the centred mask.
//! Treating ℂᵐ as ℝ²ᵐ makes the adjoint `Re(Uᴴ Mᴴ r)`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;

use super::fft::Fft2;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PartialFourier {
    fft: Fft2,
    /// Mask in the centred frequency layout (DC at `(h/2, w/2)`).
    mask: Array2<bool>,
    /// Sample positions in the unshifted FFT layout, in centred row-major order.
    samples: Vec<(usize, usize)>,
    /// Unshifted-layout mask, used by the closed-form inverse.
    selector: Array2<bool>,
    conjugate_symmetric: bool,
}

impl PartialFourier {
    pub fn new(mask: Array2<bool>) -> Result<Self> {
        let (h, w) = mask.dim();
        Self::with_fft(mask, Fft2::new(h, w))
    }

    pub fn with_fft(mask: Array2<bool>, fft: Fft2) -> Result<Self> {
        let (h, w) = mask.dim();
        if fft.shape() != (h, w) {
            return Err(Error::shape(
                "frequency mask",
                format!("{:?}", fft.shape()),
                format!("{:?}", (h, w)),
            ));
        }
        let mut samples = Vec::new();
        let mut selector = Array2::from_elem((h, w), false);
        for ((i, j), &keep) in mask.indexed_iter() {
            if keep {
                let p = (uncentre(i, h), uncentre(j, w));
                selector[p] = true;
                samples.push(p);
            }
        }
        if samples.is_empty() {
            return Err(Error::domain("frequency mask observes no samples"));
        }
        let conjugate_symmetric = selector
            .indexed_iter()
            .all(|((k, l), &s)| s == selector[[(h - k) % h, (w - l) % w]]);
        Ok(PartialFourier {
            fft,
            mask: mask.as_standard_layout().to_owned(),
            samples,
            selector,
            conjugate_symmetric,
        })
    }

    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    pub fn shape(&self) -> (usize, usize) {
        self.fft.shape()
    }

    /// Number of complex samples, m.
    pub fn observed_len(&self) -> usize {
        self.samples.len()
    }

    /// Whether the sampled set is closed under k ↦ −k, which makes BᴴB map
    /// real images to real images.
    pub fn is_conjugate_symmetric(&self) -> bool {
        self.conjugate_symmetric
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array1<f64> {
        let spec = self.fft.forward_real(x);
        let mut out = Array1::zeros(2 * self.samples.len());
        for (t, &p) in self.samples.iter().enumerate() {
            out[2 * t] = spec[p].re;
            out[2 * t + 1] = spec[p].im;
        }
        out
    }

    pub fn adjoint(&self, r: ArrayView1<f64>) -> Array2<f64> {
        let mut spec = Array2::from_elem(self.fft.shape(), Complex64::new(0.0, 0.0));
        for (t, &p) in self.samples.iter().enumerate() {
            spec[p] = Complex64::new(r[2 * t], r[2 * t + 1]);
        }
        self.fft.inverse_real(spec)
    }

    /// ½ Uᴴ Mᴴ M U r, the projection onto the sampled frequencies scaled by ½.
    pub fn smw_filter(&self, r: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.require_symmetric()?;
        let mut spec = self.fft.forward_real(r);
        spec.zip_mut_with(&self.selector, |s, &keep| {
            *s = if keep { *s * 0.5 } else { Complex64::new(0.0, 0.0) }
        });
        Ok(self.fft.inverse_real(spec))
    }

    /// (I + BᴴB)⁻¹ r = r − ½ Uᴴ Mᴴ M U r.
    pub fn shifted_normal_inverse(&self, r: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.require_symmetric()?;
        let mut spec = self.fft.forward_real(r);
        spec.zip_mut_with(&self.selector, |s, &keep| {
            if keep {
                *s *= 0.5
            }
        });
        Ok(self.fft.inverse_real(spec))
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.conjugate_symmetric {
            Ok(())
        } else {
            Err(Error::Capability(
                "partial Fourier inverse on real images needs a conjugate-symmetric mask".into(),
            ))
        }
    }
}

/// Centred index → unshifted FFT index.
fn uncentre(i: usize, n: usize) -> usize {
    (i + n - n / 2) % n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dc_sample_is_scaled_mean() {
        let mut mask = Array2::from_elem((4, 4), false);
        mask[[2, 2]] = true;
        let op = PartialFourier::new(mask).unwrap();
        let x = Array2::from_elem((4, 4), 3.0);
        let y = op.forward(x.view());
        // Unitary DFT: DC = Σx / √n = 48 / 4.
        assert!((y[0] - 12.0).abs() < 1e-12);
        assert!(y[1].abs() < 1e-12);
        assert!(op.is_conjugate_symmetric());
    }

    #[test]
    fn asymmetric_mask_has_no_closed_form_inverse() {
        let mut mask = Array2::from_elem((4, 4), false);
        mask[[2, 3]] = true;
        let op = PartialFourier::new(mask).unwrap();
        assert!(!op.is_conjugate_symmetric());
        let r = Array2::zeros((4, 4));
        assert!(matches!(
            op.shifted_normal_inverse(r.view()),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn full_mask_forward_adjoint_is_identity() {
        let op = PartialFourier::new(Array2::from_elem((4, 6), true)).unwrap();
        let x = Array2::from_shape_fn((4, 6), |(i, j)| (i as f64) - 0.5 * j as f64);
        let back = op.adjoint(op.forward(x.view()).view());
        for (a, b) in x.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

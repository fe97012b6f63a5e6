//! Pixel subsampling: B selects the observed pixels (rows of the identity).

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PixelMask {
    mask: Array2<bool>,
    observed: Vec<usize>,
}

impl PixelMask {
    pub fn new(mask: Array2<bool>) -> Result<Self> {
        let observed: Vec<usize> = mask
            .iter()
            .enumerate()
            .filter_map(|(idx, &keep)| keep.then_some(idx))
            .collect();
        if observed.is_empty() {
            return Err(Error::domain("mask observes no pixels"));
        }
        let mask = mask.as_standard_layout().to_owned();
        Ok(PixelMask { mask, observed })
    }

    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mask.dim()
    }

    /// Number of observed pixels, m.
    pub fn observed_len(&self) -> usize {
        self.observed.len()
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array1<f64> {
        let w = self.mask.ncols();
        self.observed.iter().map(|&k| x[[k / w, k % w]]).collect()
    }

    pub fn adjoint(&self, r: ArrayView1<f64>) -> Array2<f64> {
        let w = self.mask.ncols();
        let mut out = Array2::zeros(self.mask.dim());
        for (&k, &v) in self.observed.iter().zip(r.iter()) {
            out[[k / w, k % w]] = v;
        }
        out
    }

    /// (I + BᴴB)⁻¹ is diagonal: ½ on observed pixels, 1 elsewhere.
    pub fn shifted_normal_inverse(&self, r: ArrayView2<f64>) -> Array2<f64> {
        let mut out = r.to_owned();
        out.zip_mut_with(&self.mask, |v, &keep| {
            if keep {
                *v *= 0.5
            }
        });
        out
    }

    /// Bᴴ (B Bᴴ + I)⁻¹ B = ½ BᴴB, i.e. half the masked image.
    pub fn smw_filter(&self, r: ArrayView2<f64>) -> Array2<f64> {
        let mut out = r.to_owned();
        out.zip_mut_with(&self.mask, |v, &keep| *v = if keep { 0.5 * *v } else { 0.0 });
        out
    }
}

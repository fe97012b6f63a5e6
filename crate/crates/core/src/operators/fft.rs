//! Unitary 2-D DFT on row-major grids.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned 2-D FFT pair with the unitary 1/√n scaling in both directions,
/// so that `inverse(forward(x)) == x` and ‖forward(x)‖ = ‖x‖.
#[derive(Clone)]
pub struct Fft2 {
    height: usize,
    width: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft2")
            .field("height", &self.height)
            .field("width", &self.width)
            .field("scale", &self.scale)
            .finish()
    }
}

impl Fft2 {
    pub fn new(height: usize, width: usize) -> Self {
        let scale = 1.0 / ((height * width) as f64).sqrt();
        Self::with_scale(height, width, scale)
    }

    /// Builds a transform with an arbitrary per-direction scale. Only the
    /// fault-injection path of the validation suite uses anything other
    /// than 1/√n.
    #[doc(hidden)]
    pub fn with_scale(height: usize, width: usize, scale: f64) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            height,
            width,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
            scale,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward_real(&self, x: ArrayView2<f64>) -> Array2<Complex64> {
        let mut buf = x.mapv(|v| Complex64::new(v, 0.0));
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, data: &mut Array2<Complex64>) {
        self.transform(data, &*self.row_fwd, &*self.col_fwd);
    }

    pub fn inverse_in_place(&self, data: &mut Array2<Complex64>) {
        self.transform(data, &*self.row_inv, &*self.col_inv);
    }

    /// Inverse transform, keeping only the real part.
    pub fn inverse_real(&self, mut data: Array2<Complex64>) -> Array2<f64> {
        self.inverse_in_place(&mut data);
        data.mapv(|c| c.re)
    }

    fn transform(&self, data: &mut Array2<Complex64>, rows: &dyn Fft<f64>, cols: &dyn Fft<f64>) {
        assert_eq!(data.dim(), (self.height, self.width), "fft grid shape");
        if !data.is_standard_layout() {
            *data = data.as_standard_layout().to_owned();
        }
        let slice = data.as_slice_mut().expect("standard layout");
        rows.process(slice);

        let mut column = vec![Complex64::new(0.0, 0.0); self.height];
        for j in 0..self.width {
            for (i, c) in column.iter_mut().enumerate() {
                *c = slice[i * self.width + j];
            }
            cols.process(&mut column);
            for (i, c) in column.iter().enumerate() {
                slice[i * self.width + j] = *c * self.scale;
            }
        }
    }
}

//! Periodic 2-D convolution diagonalised by the DFT: B = Uᴴ D U.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use super::fft::Fft2;
use crate::error::{Error, Result};

/// Circular convolution with a small odd-support kernel, zero-padded to the
/// image grid with its centre registered at the origin.
#[derive(Debug, Clone)]
pub struct CircularConvolution {
    fft: Fft2,
    kernel: Array2<f64>,
    response: Array2<Complex64>,
}

impl CircularConvolution {
    /// `kernel` is rescaled to unit sum.
    pub fn new(kernel: ArrayView2<f64>, shape: (usize, usize)) -> Result<Self> {
        Self::with_fft(kernel, Fft2::new(shape.0, shape.1))
    }

    pub fn with_fft(kernel: ArrayView2<f64>, fft: Fft2) -> Result<Self> {
        let (kh, kw) = kernel.dim();
        let (h, w) = fft.shape();
        if kh % 2 == 0 || kw % 2 == 0 {
            return Err(Error::domain(format!("kernel support {kh}x{kw} must be odd")));
        }
        if kh > h || kw > w {
            return Err(Error::shape("kernel", format!("at most {h}x{w}"), format!("{kh}x{kw}")));
        }
        if kernel.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("kernel has non-finite entries"));
        }
        let sum: f64 = kernel.sum();
        if sum.abs() < f64::EPSILON {
            return Err(Error::domain("kernel sums to zero and cannot be normalised"));
        }
        let kernel = kernel.mapv(|v| v / sum);

        let padded = register_kernel(kernel.view(), (h, w));
        // D is the unnormalised DFT of the kernel: U(h ⊛ x) = D ⊙ Ux.
        let root_n = ((h * w) as f64).sqrt();
        let response = fft.forward_real(padded.view()).mapv(|c| c * root_n);

        Ok(CircularConvolution {
            fft,
            kernel,
            response,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.fft.shape()
    }

    /// The unit-sum kernel on its original support.
    pub fn kernel(&self) -> &Array2<f64> {
        &self.kernel
    }

    /// The diagonal D of B = Uᴴ D U.
    pub fn frequency_response(&self) -> &Array2<Complex64> {
        &self.response
    }


    fn filter(&self, x: ArrayView2<f64>, gain: impl Fn(Complex64) -> Complex64) -> Array2<f64> {
        let mut spec = self.fft.forward_real(x);
        spec.zip_mut_with(&self.response, |s, &d| *s *= gain(d));
        self.fft.inverse_real(spec)
    }

    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.filter(x, |d| d)
    }

    pub fn adjoint(&self, r: ArrayView2<f64>) -> Array2<f64> {
        self.filter(r, |d| d.conj())
    }

    /// Uᴴ (|D|² + I)⁻¹ U r.
    pub fn shifted_normal_inverse(&self, r: ArrayView2<f64>) -> Array2<f64> {
        self.filter(r, |d| Complex64::new(1.0 / (d.norm_sqr() + 1.0), 0.0))
    }

    /// Bᴴ (B Bᴴ + I)⁻¹ B = Uᴴ D* (|D|² + I)⁻¹ D U.
    pub fn smw_filter(&self, r: ArrayView2<f64>) -> Array2<f64> {
        self.filter(r, |d| {
            let p = d.norm_sqr();
            Complex64::new(p / (p + 1.0), 0.0)
        })
    }
}

/// Places a centred odd-support kernel on an `(h, w)` grid with its centre
/// at index (0, 0), wrapping negative offsets around.
pub fn register_kernel(kernel: ArrayView2<f64>, shape: (usize, usize)) -> Array2<f64> {
    let (kh, kw) = kernel.dim();
    let (h, w) = shape;
    let (ch, cw) = (kh / 2, kw / 2);
    let mut out = Array2::zeros((h, w));
    for ((a, b), &v) in kernel.indexed_iter() {
        let i = (a + h - ch) % h;
        let j = (b + w - cw) % w;
        out[[i, j]] += v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn delta_kernel_is_identity() {
        let op = CircularConvolution::new(array![[1.0]].view(), (4, 5)).unwrap();
        let x = Array2::from_shape_fn((4, 5), |(i, j)| (i * 5 + j) as f64);
        let y = op.forward(x.view());
        for (a, b) in x.iter().zip(y.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        let inv = op.shifted_normal_inverse(x.view());
        for (a, b) in x.iter().zip(inv.iter()) {
            assert!((a / 2.0 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_kernel_moves_image() {
        // Kernel with all weight one pixel to the right of centre: y[i,j] = x[i,j-1].
        let k = array![[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]];
        let op = CircularConvolution::new(k.view(), (3, 4)).unwrap();
        let x = Array2::from_shape_fn((3, 4), |(i, j)| (10 * i + j) as f64);
        let y = op.forward(x.view());
        for i in 0..3 {
            for j in 0..4 {
                assert!((y[[i, j]] - x[[i, (j + 3) % 4]]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_even_support_and_zero_sum() {
        assert!(CircularConvolution::new(Array2::ones((2, 3)).view(), (8, 8)).is_err());
        let k = array![[1.0, -1.0, 0.0]];
        assert!(CircularConvolution::new(k.view(), (8, 8)).is_err());
    }

    #[test]
    fn kernel_is_normalised() {
        let op = CircularConvolution::new(Array2::from_elem((3, 3), 2.0).view(), (8, 8)).unwrap();
        assert!((op.kernel().sum() - 1.0).abs() < 1e-15);
        assert!((op.frequency_response()[[0, 0]].re - 1.0).abs() < 1e-12);
    }
}

//! Observation operators B, their adjoints, and closed-form applications of
//! (I + AᴴA)⁻¹ where A is B (analysis) or BW (synthesis).
//!
//! Everything acts on flat real vectors. Images are flattened row-major;
//! complex observations are stored as interleaved real/imaginary pairs, so
//! the real inner product on the observation space is Re⟨·,·⟩ on ℂᵐ.

mod convolution;
pub mod fft;
mod fourier;
mod mask;
mod noise;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

pub use convolution::{register_kernel, CircularConvolution};
pub use fourier::PartialFourier;
pub use mask::PixelMask;
pub use noise::add_noise;

use crate::error::{Error, Result};
use crate::frames::Frame;

/// A real linear map between flat vector spaces, with its adjoint.
pub trait LinearMap: Send + Sync {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>>;
    fn adjoint(&self, r: ArrayView1<f64>) -> Result<Array1<f64>>;

    /// True when the map is known to have full column rank from its
    /// structure alone (identity, Parseval analysis operator).
    fn injective_by_construction(&self) -> bool {
        false
    }
}

/// An observation operator that also supplies (I + AᴴA)⁻¹ in closed form.
pub trait ObservationOperator: LinearMap {
    fn shifted_normal_inverse(&self, r: ArrayView1<f64>) -> Result<Array1<f64>>;
    fn sample_kind(&self) -> SampleKind;
    fn image_shape(&self) -> (usize, usize);
    /// The synthesis frame when the operator acts on coefficients (BW).
    fn frame(&self) -> Option<Frame>;

    /// Maps a domain vector to an image: Wu with a frame, a reshape otherwise.
    fn to_image(&self, u: ArrayView1<f64>) -> Result<Array2<f64>> {
        if u.len() != self.input_len() {
            return Err(Error::shape("operator input", self.input_len(), u.len()));
        }
        match self.frame() {
            Some(frame) => frame.synthesis_flat(u),
            None => Ok(u.to_owned().into_shape_with_order(self.image_shape()).expect("checked")),
        }
    }
}

impl<T: LinearMap + ?Sized> LinearMap for &T {
    fn input_len(&self) -> usize {
        (**self).input_len()
    }
    fn output_len(&self) -> usize {
        (**self).output_len()
    }
    fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        (**self).forward(x)
    }
    fn adjoint(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        (**self).adjoint(r)
    }
    fn injective_by_construction(&self) -> bool {
        (**self).injective_by_construction()
    }
}

impl<T: ObservationOperator + ?Sized> ObservationOperator for &T {
    fn shifted_normal_inverse(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        (**self).shifted_normal_inverse(r)
    }
    fn sample_kind(&self) -> SampleKind {
        (**self).sample_kind()
    }
    fn image_shape(&self) -> (usize, usize) {
        (**self).image_shape()
    }
    fn frame(&self) -> Option<Frame> {
        (**self).frame()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Real,
    /// Interleaved (re, im) pairs.
    Complex,
}

/// Observed data y, real or complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    values: Array1<f64>,
    kind: SampleKind,
}

impl Observation {
    pub fn new(values: Array1<f64>, kind: SampleKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("observation must hold at least one sample"));
        }
        if kind == SampleKind::Complex && values.len() % 2 != 0 {
            return Err(Error::domain("complex observation needs an even number of reals"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("observation has non-finite samples"));
        }
        Ok(Observation { values, kind })
    }

    pub fn real(values: Array1<f64>) -> Result<Self> {
        Self::new(values, SampleKind::Real)
    }

    pub fn kind(&self) -> SampleKind {
        self.kind
    }

    /// Number of (possibly complex) samples, m.
    pub fn samples(&self) -> usize {
        match self.kind {
            SampleKind::Real => self.values.len(),
            SampleKind::Complex => self.values.len() / 2,
        }
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.values.view()
    }

    pub fn into_values(self) -> Array1<f64> {
        self.values
    }
}

/// The physical acquisition model.
#[derive(Debug, Clone)]
pub enum OperatorKind {
    CircularConvolution(CircularConvolution),
    PixelMask(PixelMask),
    PartialFourier(PartialFourier),
}

impl OperatorKind {
    pub fn image_shape(&self) -> (usize, usize) {
        match self {
            OperatorKind::CircularConvolution(c) => c.shape(),
            OperatorKind::PixelMask(m) => m.shape(),
            OperatorKind::PartialFourier(p) => p.shape(),
        }
    }

    fn observed_reals(&self) -> usize {
        match self {
            OperatorKind::CircularConvolution(c) => c.shape().0 * c.shape().1,
            OperatorKind::PixelMask(m) => m.observed_len(),
            OperatorKind::PartialFourier(p) => 2 * p.observed_len(),
        }
    }

    fn forward_image(&self, x: ArrayView2<f64>) -> Array1<f64> {
        match self {
            OperatorKind::CircularConvolution(c) => flatten(c.forward(x)),
            OperatorKind::PixelMask(m) => m.forward(x),
            OperatorKind::PartialFourier(p) => p.forward(x),
        }
    }

    fn adjoint_image(&self, r: ArrayView1<f64>) -> Array2<f64> {
        match self {
            OperatorKind::CircularConvolution(c) => {
                c.adjoint(r.into_shape_with_order(c.shape()).expect("checked"))
            }
            OperatorKind::PixelMask(m) => m.adjoint(r),
            OperatorKind::PartialFourier(p) => p.adjoint(r),
        }
    }

    fn inverse_image(&self, r: ArrayView2<f64>) -> Result<Array2<f64>> {
        Ok(match self {
            OperatorKind::CircularConvolution(c) => c.shifted_normal_inverse(r),
            OperatorKind::PixelMask(m) => m.shifted_normal_inverse(r),
            OperatorKind::PartialFourier(p) => p.shifted_normal_inverse(r)?,
        })
    }

    /// Bᴴ (B Bᴴ + I)⁻¹ B, the image-domain filter inside the synthesis inverse.
    fn smw_filter(&self, r: ArrayView2<f64>) -> Result<Array2<f64>> {
        Ok(match self {
            OperatorKind::CircularConvolution(c) => c.smw_filter(r),
            OperatorKind::PixelMask(m) => m.smw_filter(r),
            OperatorKind::PartialFourier(p) => p.smw_filter(r)?,
        })
    }
}

/// B, optionally composed with a frame synthesis W so that the solver's
/// unknown is the coefficient vector β and the operator is BW.
#[derive(Debug, Clone)]
pub struct LinearOperatorSpec {
    kind: OperatorKind,
    frame: Option<Frame>,
}

impl LinearOperatorSpec {
    pub fn new(kind: OperatorKind) -> Self {
        LinearOperatorSpec { kind, frame: None }
    }

    pub fn convolution(kernel: ArrayView2<f64>, shape: (usize, usize)) -> Result<Self> {
        Ok(Self::new(OperatorKind::CircularConvolution(CircularConvolution::new(kernel, shape)?)))
    }

    pub fn pixel_mask(mask: Array2<bool>) -> Result<Self> {
        Ok(Self::new(OperatorKind::PixelMask(PixelMask::new(mask)?)))
    }

    pub fn partial_fourier(mask: Array2<bool>) -> Result<Self> {
        Ok(Self::new(OperatorKind::PartialFourier(PartialFourier::new(mask)?)))
    }

    /// Composes with a frame: the domain becomes the frame's coefficients.
    pub fn with_frame(self, frame: Frame) -> Result<Self> {
        if frame.image_shape() != self.kind.image_shape() {
            return Err(Error::shape(
                "frame image shape",
                format!("{:?}", self.kind.image_shape()),
                format!("{:?}", frame.image_shape()),
            ));
        }
        Ok(LinearOperatorSpec {
            kind: self.kind,
            frame: Some(frame),
        })
    }

    /// The same acquisition acting on images.
    pub fn without_frame(&self) -> Self {
        LinearOperatorSpec {
            kind: self.kind.clone(),
            frame: None,
        }
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn observation(&self, values: Array1<f64>) -> Result<Observation> {
        Observation::new(values, self.sample_kind())
    }

    pub fn forward_image(&self, x: ArrayView2<f64>) -> Result<Observation> {
        if x.dim() != self.image_shape() {
            return Err(Error::shape(
                "operator input image",
                format!("{:?}", self.image_shape()),
                format!("{:?}", x.dim()),
            ));
        }
        self.observation(self.kind.forward_image(x))
    }

    fn check_domain(&self, x: ArrayView1<f64>) -> Result<()> {
        if x.len() != self.input_len() {
            return Err(Error::shape("operator input", self.input_len(), x.len()));
        }
        Ok(())
    }
}

impl LinearMap for LinearOperatorSpec {
    fn input_len(&self) -> usize {
        match &self.frame {
            Some(f) => f.coefficient_len(),
            None => {
                let (h, w) = self.image_shape();
                h * w
            }
        }
    }

    fn output_len(&self) -> usize {
        self.kind.observed_reals()
    }

    fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        let img = self.to_image(x)?;
        Ok(self.kind.forward_image(img.view()))
    }

    fn adjoint(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        if r.len() != self.output_len() {
            return Err(Error::shape("operator adjoint input", self.output_len(), r.len()));
        }
        let img = self.kind.adjoint_image(r);
        match &self.frame {
            Some(frame) => frame.analysis_flat(flatten(img).view()),
            None => Ok(flatten(img)),
        }
    }
}

impl ObservationOperator for LinearOperatorSpec {
    fn shifted_normal_inverse(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_domain(r)?;
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("shifted normal inverse input is not finite"));
        }
        match &self.frame {
            None => {
                let img = r.into_shape_with_order(self.image_shape()).expect("checked");
                Ok(flatten(self.kind.inverse_image(img)?))
            }
            // Needs W Wᴴ = I: (I + WᴴBᴴBW)⁻¹ = I − Wᴴ Bᴴ(BBᴴ + I)⁻¹B W.
            Some(frame) => {
                let img = frame.synthesis_flat(r)?;
                let filtered = self.kind.smw_filter(img.view())?;
                let back = frame.analysis_flat(flatten(filtered).view())?;
                Ok(&r - &back)
            }
        }
    }

    fn sample_kind(&self) -> SampleKind {
        match self.kind {
            OperatorKind::PartialFourier(_) => SampleKind::Complex,
            _ => SampleKind::Real,
        }
    }

    fn image_shape(&self) -> (usize, usize) {
        self.kind.image_shape()
    }

    fn frame(&self) -> Option<Frame> {
        self.frame
    }
}

/// H = I on ℝⁿ.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearMap for Identity {
    fn input_len(&self) -> usize {
        self.0
    }
    fn output_len(&self) -> usize {
        self.0
    }
    fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.0 {
            return Err(Error::shape("identity input", self.0, x.len()));
        }
        Ok(x.to_owned())
    }
    fn adjoint(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.forward(r)
    }
    fn injective_by_construction(&self) -> bool {
        true
    }
}

/// H = P, the analysis operator of a Parseval frame (PᴴP = I).
#[derive(Debug, Clone, Copy)]
pub struct FrameAnalysis(pub Frame);

impl LinearMap for FrameAnalysis {
    fn input_len(&self) -> usize {
        self.0.image_len()
    }
    fn output_len(&self) -> usize {
        self.0.coefficient_len()
    }
    fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.0.analysis_flat(x)
    }
    fn adjoint(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        Ok(flatten(self.0.synthesis_flat(r)?))
    }
    fn injective_by_construction(&self) -> bool {
        true
    }
}

pub(crate) fn flatten(img: Array2<f64>) -> Array1<f64> {
    let n = img.len();
    if img.is_standard_layout() {
        img.into_shape_with_order(n).expect("contiguous")
    } else {
        img.iter().copied().collect()
    }
}

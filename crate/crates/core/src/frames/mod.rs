//! Parseval frames built from the Haar filter pair.
//!
//! Both families satisfy W Wᴴ = I, where W is [`Frame::synthesis`] and
//! Wᴴ = P is [`Frame::analysis`]. Filtering uses periodic extension.

mod orthogonal;
mod undecimated;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameFamily {
    /// Decimated Haar basis; d = n.
    OrthogonalHaar,
    /// Translation-invariant Haar frame; d = n (3L + 1).
    UndecimatedHaar,
}

/// A Parseval frame on images of a fixed shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    family: FrameFamily,
    levels: usize,
    shape: (usize, usize),
}

/// Frame coefficients together with the frame that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Array1<f64>,
    pub frame: Frame,
}

impl Frame {
    pub fn new(family: FrameFamily, levels: usize, shape: (usize, usize)) -> Result<Self> {
        let (h, w) = shape;
        if h == 0 || w == 0 {
            return Err(Error::domain("frame image shape must be non-empty"));
        }
        if levels == 0 {
            return Err(Error::domain("frame needs at least one level"));
        }
        if family == FrameFamily::OrthogonalHaar {
            let block = 1usize
                .checked_shl(levels as u32)
                .ok_or_else(|| Error::domain(format!("{levels} levels is too deep")))?;
            if h % block != 0 || w % block != 0 {
                return Err(Error::domain(format!(
                    "orthogonal Haar with {levels} levels needs sides divisible by {block}, got {h}x{w}"
                )));
            }
        }
        Ok(Frame {
            family,
            levels,
            shape,
        })
    }

    pub fn family(&self) -> FrameFamily {
        self.family
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn image_shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn image_len(&self) -> usize {
        self.shape.0 * self.shape.1
    }

    /// Coefficient count d.
    pub fn coefficient_len(&self) -> usize {
        match self.family {
            FrameFamily::OrthogonalHaar => self.image_len(),
            FrameFamily::UndecimatedHaar => self.image_len() * (3 * self.levels + 1),
        }
    }

    /// P x = Wᴴ x.
    pub fn analysis(&self, x: ArrayView2<f64>) -> Result<CoefficientVector> {
        if x.dim() != self.shape {
            return Err(Error::shape(
                "frame analysis input",
                format!("{:?}", self.shape),
                format!("{:?}", x.dim()),
            ));
        }
        Ok(CoefficientVector {
            values: self.analyse(x),
            frame: *self,
        })
    }

    /// W β.
    pub fn synthesis(&self, beta: &CoefficientVector) -> Result<Array2<f64>> {
        if beta.frame != *self {
            return Err(Error::domain("coefficients belong to a different frame"));
        }
        self.synthesis_flat(beta.values.view())
    }

    /// Analysis of a row-major flattened image.
    pub fn analysis_flat(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.image_len() {
            return Err(Error::shape("frame analysis input", self.image_len(), x.len()));
        }
        let img = x.to_shape(self.shape).expect("length checked");
        Ok(self.analyse(img.view()))
    }

    pub fn synthesis_flat(&self, beta: ArrayView1<f64>) -> Result<Array2<f64>> {
        if beta.len() != self.coefficient_len() {
            return Err(Error::shape(
                "frame coefficients",
                self.coefficient_len(),
                beta.len(),
            ));
        }
        Ok(match self.family {
            FrameFamily::OrthogonalHaar => orthogonal::synthesis(beta, self.shape, self.levels),
            FrameFamily::UndecimatedHaar => undecimated::synthesis(beta, self.shape, self.levels),
        })
    }

    fn analyse(&self, x: ArrayView2<f64>) -> Array1<f64> {
        match self.family {
            FrameFamily::OrthogonalHaar => orthogonal::analysis(x, self.levels),
            FrameFamily::UndecimatedHaar => undecimated::analysis(x, self.levels),
        }
    }
}

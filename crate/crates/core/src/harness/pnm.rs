//! Binary PGM (P5) grayscale images and PBM (P4) bitmaps.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// A P5 grayscale image. `maxval` > 255 means two big-endian bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub maxval: u16,
    pub pixels: Array2<u16>,
}

impl Pgm {
    /// Linearly maps [0, `full_scale`] to [0, 65535], clamping outside values.
    pub fn from_image(image: &Array2<f64>, full_scale: f64) -> Self {
        let pixels = image.mapv(|v| {
            let t = if full_scale > 0.0 { v / full_scale } else { 0.0 };
            (t.clamp(0.0, 1.0) * 65535.0).round() as u16
        });
        Pgm { maxval: u16::MAX, pixels }
    }

    /// Maps [0, maxval] back to [0, `full_scale`].
    pub fn to_image(&self, full_scale: f64) -> Array2<f64> {
        let m = self.maxval as f64;
        self.pixels.mapv(|p| p as f64 / m * full_scale)
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        let (h, w) = self.pixels.dim();
        write!(out, "P5\n{w} {h}\n{}\n", self.maxval)?;
        let wide = self.maxval > 255;
        let mut buf = Vec::with_capacity(h * w * if wide { 2 } else { 1 });
        for &p in self.pixels.iter() {
            if wide {
                buf.extend_from_slice(&p.to_be_bytes());
            } else {
                buf.push(p as u8);
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut header = Header::new(bytes);
        header.magic(b"P5")?;
        let w = header.number()?;
        let h = header.number()?;
        let maxval = header.number()?;
        if maxval == 0 || maxval > 65535 {
            return Err(Error::Format(format!("PGM maxval {maxval} out of range")));
        }
        let data = header.body()?;
        let wide = maxval > 255;
        let need = w * h * if wide { 2 } else { 1 };
        if data.len() < need {
            return Err(Error::Format(format!("PGM body has {} bytes, expected {need}", data.len())));
        }
        let pixels: Vec<u16> = if wide {
            data[..need].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
        } else {
            data[..need].iter().map(|&b| b as u16).collect()
        };
        let pixels = Array2::from_shape_vec((h, w), pixels).map_err(|e| Error::Format(e.to_string()))?;
        Ok(Pgm {
            maxval: maxval as u16,
            pixels,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::parse(&bytes)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::new();
        self.write_to(&mut bytes)?;
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

/// Writes a P4 bitmap; `true` is stored as 1 (black).
pub fn write_pbm(mask: &Array2<bool>, mut out: impl Write) -> Result<()> {
    let (h, w) = mask.dim();
    write!(out, "P4\n{w} {h}\n")?;
    let stride = w.div_ceil(8);
    let mut row = vec![0u8; stride];
    for i in 0..h {
        row.fill(0);
        for j in 0..w {
            if mask[[i, j]] {
                row[j / 8] |= 0x80 >> (j % 8);
            }
        }
        out.write_all(&row)?;
    }
    Ok(())
}

pub fn parse_pbm(bytes: &[u8]) -> Result<Array2<bool>> {
    let mut header = Header::new(bytes);
    header.magic(b"P4")?;
    let w = header.number()?;
    let h = header.number()?;
    let data = header.body()?;
    let stride = w.div_ceil(8);
    if data.len() < stride * h {
        return Err(Error::Format("PBM body too short".into()));
    }
    Ok(Array2::from_shape_fn((h, w), |(i, j)| {
        data[i * stride + j / 8] & (0x80 >> (j % 8)) != 0
    }))
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Header { bytes, pos: 0 }
    }

    fn magic(&mut self, want: &[u8; 2]) -> Result<()> {
        if self.bytes.len() < 2 || &self.bytes[..2] != want {
            return Err(Error::Format(format!(
                "expected magic {}",
                String::from_utf8_lossy(want)
            )));
        }
        self.pos = 2;
        Ok(())
    }

    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("bad header number at byte {start}")))
    }

    /// Exactly one whitespace byte separates the header from the raster.
    fn body(self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(c) if c.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(Error::Format("missing raster separator".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pgm16_round_trips(h in 1usize..12, w in 1usize..12, seed in any::<u64>()) {
            let pixels = Array2::from_shape_fn((h, w), |(i, j)| {
                (seed.wrapping_mul(6364136223846793005).wrapping_add((i * 31 + j) as u64) >> 48) as u16
            });
            let pgm = Pgm { maxval: 65535, pixels };
            let mut bytes = Vec::new();
            pgm.write_to(&mut bytes).unwrap();
            prop_assert_eq!(Pgm::parse(&bytes).unwrap(), pgm);
        }

        #[test]
        fn pbm_round_trips(h in 1usize..20, w in 1usize..20, bits in any::<u64>()) {
            let mask = Array2::from_shape_fn((h, w), |(i, j)| (bits >> ((i * w + j) % 64)) & 1 == 1);
            let mut bytes = Vec::new();
            write_pbm(&mask, &mut bytes).unwrap();
            prop_assert_eq!(parse_pbm(&bytes).unwrap(), mask);
        }
    }

    #[test]
    fn parses_8bit_with_comment() {
        let bytes = b"P5\n# made by hand\n2 1\n255\n\x00\xff";
        let pgm = Pgm::parse(bytes).unwrap();
        assert_eq!(pgm.maxval, 255);
        assert_eq!(pgm.pixels, ndarray::array![[0, 255]]);
        assert_eq!(pgm.to_image(255.0), ndarray::array![[0.0, 255.0]]);
    }

    #[test]
    fn rejects_wrong_magic_and_short_body() {
        assert!(Pgm::parse(b"P2\n1 1\n255\n0").is_err());
        assert!(Pgm::parse(b"P5\n2 2\n255\n\x00").is_err());
    }
}

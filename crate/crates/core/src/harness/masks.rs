use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Union of `lines` lines through DC at angles kπ/lines, rasterised one
/// pixel per step along the dominant axis of each line, in the centred
/// frequency layout (DC at (n/2, n/2)). The result is closed under
/// reflection through DC (modulo n), which keeps Bᴴ B real.
pub fn radial_mask(n: usize, lines: usize) -> Result<Array2<bool>> {
    if lines == 0 || lines > n {
        return Err(Error::domain(format!("line count must be in 1..={n}, got {lines}")));
    }
    let c = (n / 2) as i64;
    let ni = n as i64;
    let mut mask = Array2::from_elem((n, n), false);
    for k in 0..lines {
        let theta = k as f64 * std::f64::consts::PI / lines as f64;
        let (s, co) = theta.sin_cos();
        let mostly_horizontal = co.abs() >= s.abs();
        for t in -c..(ni - c) {
            let (row, col) = if mostly_horizontal {
                (c - (t as f64 * s / co).round() as i64, c + t)
            } else {
                (c - t, c + (t as f64 * co / s).round() as i64)
            };
            if (0..ni).contains(&row) && (0..ni).contains(&col) {
                mask[[row as usize, col as usize]] = true;
            }
        }
    }
    mask[[n / 2, n / 2]] = true;
    Ok(symmetrise(mask))
}

fn symmetrise(mut mask: Array2<bool>) -> Array2<bool> {
    let (h, w) = mask.dim();
    let (ch, cw) = (h / 2, w / 2);
    let reflected = Array2::from_shape_fn((h, w), |(i, j)| mask[[(2 * ch + h - i) % h, (2 * cw + w - j) % w]]);
    mask.zip_mut_with(&reflected, |a, &b| *a |= b);
    mask
}

/// Keeps a uniformly random subset of pixels, dropping
/// round(`missing_fraction` · n) of them.
pub fn random_pixel_mask(shape: (usize, usize), missing_fraction: f64, seed: u64) -> Result<Array2<bool>> {
    if !(0.0..1.0).contains(&missing_fraction) {
        return Err(Error::domain(format!("missing fraction must be in [0, 1), got {missing_fraction}")));
    }
    let n = shape.0 * shape.1;
    let missing = (missing_fraction * n as f64).round() as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let mut mask = Array2::from_elem(shape, true);
    for &k in &idx[..missing] {
        mask[[k / shape.1, k % shape.1]] = false;
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_is_one_full_row() {
        let m = radial_mask(16, 1).unwrap();
        for i in 0..16 {
            let row_count = m.row(i).iter().filter(|&&b| b).count();
            assert_eq!(row_count, if i == 8 { 16 } else { 0 });
        }
    }

    #[test]
    fn mask_is_point_symmetric_and_has_dc() {
        for (n, lines) in [(32, 5), (33, 7), (128, 22)] {
            let m = radial_mask(n, lines).unwrap();
            let c = n / 2;
            assert!(m[[c, c]]);
            for ((i, j), &v) in m.indexed_iter() {
                assert_eq!(v, m[[(2 * c + n - i) % n, (2 * c + n - j) % n]]);
            }
        }
    }

    #[test]
    fn twenty_seven_lines_sample_a_fifth() {
        let m = radial_mask(128, 27).unwrap();
        let ratio = m.iter().filter(|&&b| b).count() as f64 / (128.0 * 128.0);
        assert!((ratio - 0.2).abs() <= 0.03, "{ratio}");
    }

    #[test]
    fn pixel_mask_drops_requested_fraction() {
        let m = random_pixel_mask((10, 10), 0.4, 3).unwrap();
        assert_eq!(m.iter().filter(|&&b| !b).count(), 40);
        assert_eq!(m, random_pixel_mask((10, 10), 0.4, 3).unwrap());
        assert!(random_pixel_mask((4, 4), 1.0, 0).is_err());
        assert!(radial_mask(8, 0).is_err());
    }
}

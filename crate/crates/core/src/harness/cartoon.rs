use ndarray::Array2;

/// A piecewise-smooth synthetic test image in [0, 255]: a shaded background
/// with a disc, an annulus, a rectangle, a triangle and a set of bars.
/// Geometry is defined on the unit square so any size can be rendered.
pub fn cartoon(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        let y = (i as f64 + 0.5) / n as f64;
        let x = (j as f64 + 0.5) / n as f64;
        let mut v = 60.0 + 40.0 * y;
        if (0.08..0.45).contains(&x) && (0.1..0.42).contains(&y) {
            v = 200.0;
        }
        let r2 = (x - 0.68).powi(2) + (y - 0.3).powi(2);
        if r2 < 0.2f64.powi(2) {
            v = 130.0;
        }
        if r2 < 0.08f64.powi(2) {
            v = 235.0;
        }
        let ra = ((x - 0.3).powi(2) + (y - 0.72).powi(2)).sqrt();
        if (0.1..0.17).contains(&ra) {
            v = 25.0;
        }
        // Triangle with apex at the top.
        if (0.55..0.9).contains(&y) {
            let half = 0.5 * (y - 0.55);
            if (x - 0.72).abs() < half {
                v = 175.0 - 60.0 * (y - 0.55);
            }
        }
        if (0.92..0.97).contains(&y) && ((x * 10.0) as usize) % 2 == 0 {
            v = 250.0;
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_and_variety() {
        let c = cartoon(128);
        assert!(c.iter().all(|&v| (0.0..=255.0).contains(&v)));
        let mut distinct: Vec<i64> = c.iter().map(|v| (v * 10.0) as i64).collect();
        distinct.sort_unstable();
        distinct.dedup();
        assert!(distinct.len() > 10);
    }
}

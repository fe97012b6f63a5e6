use ndarray::Array2;

/// (intensity, semi-axis a, semi-axis b, centre x, centre y, angle in degrees)
/// of the ten ellipses of the modified Shepp-Logan head phantom, whose
/// intensities lie in [0, 1].
const ELLIPSES: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

/// The Shepp-Logan phantom sampled at pixel centres of an n×n grid over
/// [−1, 1]², with y pointing up (row 0 is the top).
pub fn shepp_logan(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        let (x, y) = pixel_centre(i, j, n);
        let v: f64 = ELLIPSES
            .iter()
            .filter(|e| inside(e, x, y))
            .map(|e| e[0])
            .sum();
        // 1 − 0.8 − 0.2 lands a few ulps away from 0.
        if v.abs() < 1e-12 {
            0.0
        } else {
            v.clamp(0.0, 1.0)
        }
    })
}

/// Pixels inside the outer skull ellipse.
pub fn shepp_logan_support(n: usize) -> Array2<bool> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        let (x, y) = pixel_centre(i, j, n);
        inside(&ELLIPSES[0], x, y)
    })
}

fn pixel_centre(i: usize, j: usize, n: usize) -> (f64, f64) {
    let x = (2.0 * j as f64 + 1.0) / n as f64 - 1.0;
    let y = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
    (x, y)
}

fn inside(e: &[f64; 6], x: f64, y: f64) -> bool {
    let [_, a, b, x0, y0, deg] = *e;
    let (s, c) = deg.to_radians().sin_cos();
    let (dx, dy) = (x - x0, y - y0);
    let xr = dx * c + dy * s;
    let yr = -dx * s + dy * c;
    (xr / a).powi(2) + (yr / b).powi(2) <= 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_outside_skull_and_within_unit_range() {
        let p = shepp_logan(128);
        let support = shepp_logan_support(128);
        for (v, &s) in p.iter().zip(support.iter()) {
            assert!((0.0..=1.0).contains(v));
            if !s {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn nonzero_fraction_at_128() {
        let p = shepp_logan(128);
        let frac = p.iter().filter(|&&v| v != 0.0).count() as f64 / p.len() as f64;
        assert!(frac > 0.4 && frac < 0.75, "{frac}");
    }

    #[test]
    fn skull_outline_is_mirror_symmetric() {
        let n = 64;
        let s = shepp_logan_support(n);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(s[[i, j]], s[[i, n - 1 - j]]);
            }
        }
    }
}

//! Small helpers on flat real vectors.

use ndarray::{Array1, ArrayView1, Zip};

pub fn dot(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.dot(&b)
}

pub fn norm(a: ArrayView1<f64>) -> f64 {
    a.dot(&a).sqrt()
}

pub fn norm_sq(a: ArrayView1<f64>) -> f64 {
    a.dot(&a)
}

/// ‖a − b‖₂ without allocating.
pub fn distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    Zip::from(&a)
        .and(&b)
        .fold(0.0, |acc, &x, &y| acc + (x - y) * (x - y))
        .sqrt()
}

pub fn all_finite(a: ArrayView1<f64>) -> bool {
    a.iter().all(|v| v.is_finite())
}

pub fn axpy(alpha: f64, x: ArrayView1<f64>, y: &mut Array1<f64>) {
    y.scaled_add(alpha, &x);
}

//! Decimated 2-D Haar transform in the usual nested (Mallat) layout.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, Axis};
use std::f64::consts::FRAC_1_SQRT_2;

pub(super) fn analysis(x: ArrayView2<f64>, levels: usize) -> Array1<f64> {
    let (h, w) = x.dim();
    let mut work = x.to_owned();
    let mut buf = Vec::new();
    for l in 0..levels {
        let (bh, bw) = (h >> l, w >> l);
        let mut block = work.slice_mut(ndarray::s![..bh, ..bw]);
        for mut row in block.axis_iter_mut(Axis(0)) {
            forward_1d(&mut row, &mut buf);
        }
        for mut col in block.axis_iter_mut(Axis(1)) {
            forward_1d(&mut col, &mut buf);
        }
    }
    work.into_shape_with_order(h * w).expect("contiguous")
}

pub(super) fn synthesis(beta: ArrayView1<f64>, shape: (usize, usize), levels: usize) -> Array2<f64> {
    let (h, w) = shape;
    let mut work = beta
        .to_owned()
        .into_shape_with_order(shape)
        .expect("length checked by caller");
    let mut buf = Vec::new();
    for l in (0..levels).rev() {
        let (bh, bw) = (h >> l, w >> l);
        let mut block = work.slice_mut(ndarray::s![..bh, ..bw]);
        for mut col in block.axis_iter_mut(Axis(1)) {
            inverse_1d(&mut col, &mut buf);
        }
        for mut row in block.axis_iter_mut(Axis(0)) {
            inverse_1d(&mut row, &mut buf);
        }
    }
    work
}

fn forward_1d(v: &mut ArrayViewMut1<f64>, buf: &mut Vec<f64>) {
    let half = v.len() / 2;
    buf.clear();
    buf.extend(v.iter().copied());
    for i in 0..half {
        let (a, b) = (buf[2 * i], buf[2 * i + 1]);
        v[i] = (a + b) * FRAC_1_SQRT_2;
        v[half + i] = (a - b) * FRAC_1_SQRT_2;
    }
}

fn inverse_1d(v: &mut ArrayViewMut1<f64>, buf: &mut Vec<f64>) {
    let half = v.len() / 2;
    buf.clear();
    buf.extend(v.iter().copied());
    for i in 0..half {
        let (s, d) = (buf[i], buf[half + i]);
        v[2 * i] = (s + d) * FRAC_1_SQRT_2;
        v[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
    }
}

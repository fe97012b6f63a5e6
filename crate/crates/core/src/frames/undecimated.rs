//! Undecimated (à trous) Haar frame.
//!
//! At level j the filters are lo = ½(x[i] + x[i+s]) and hi = ½(x[i] − x[i+s])
//! with s = 2^(j−1), applied separably and without decimation. Since
//! loᵀlo + hiᵀhi = I, each level is a Parseval frame and so is the cascade.
//!
//! Coefficient layout: for j = 1..=L the three detail bands
//! (lo-rows/hi-cols, hi-rows/lo-cols, hi-rows/hi-cols), then the final
//! approximation band; each band is an h×w row-major block.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};

pub(super) fn analysis(x: ArrayView2<f64>, levels: usize) -> Array1<f64> {
    let (h, w) = x.dim();
    let n = h * w;
    let mut out = Array1::zeros(n * (3 * levels + 1));
    let mut approx = x.to_owned();
    for j in 0..levels {
        let shift = 1usize << j;
        let lo_v = filter(approx.view(), Axis(0), shift, 1.0);
        let hi_v = filter(approx.view(), Axis(0), shift, -1.0);
        let bands = [
            filter(lo_v.view(), Axis(1), shift, -1.0),
            filter(hi_v.view(), Axis(1), shift, 1.0),
            filter(hi_v.view(), Axis(1), shift, -1.0),
        ];
        for (b, band) in bands.iter().enumerate() {
            let start = (3 * j + b) * n;
            out.slice_mut(s![start..start + n])
                .assign(&band.view().into_shape_with_order(n).expect("contiguous"));
        }
        approx = filter(lo_v.view(), Axis(1), shift, 1.0);
    }
    let start = 3 * levels * n;
    out.slice_mut(s![start..])
        .assign(&approx.into_shape_with_order(n).expect("contiguous"));
    out
}

pub(super) fn synthesis(beta: ArrayView1<f64>, shape: (usize, usize), levels: usize) -> Array2<f64> {
    let n = shape.0 * shape.1;
    let band = |k: usize| {
        beta.slice(s![k * n..(k + 1) * n])
            .into_shape_with_order(shape)
            .expect("band length")
    };
    let mut approx = band(3 * levels).to_owned();
    for j in (0..levels).rev() {
        let shift = 1usize << j;
        let lo_rows = adjoint(approx.view(), Axis(1), shift, 1.0)
            + adjoint(band(3 * j).view(), Axis(1), shift, -1.0);
        let hi_rows = adjoint(band(3 * j + 1).view(), Axis(1), shift, 1.0)
            + adjoint(band(3 * j + 2).view(), Axis(1), shift, -1.0);
        approx = adjoint(lo_rows.view(), Axis(0), shift, 1.0)
            + adjoint(hi_rows.view(), Axis(0), shift, -1.0);
    }
    approx
}

/// y[i] = ½ (x[i] + sign · x[i + shift]) along `axis`, periodically.
fn filter(x: ArrayView2<f64>, axis: Axis, shift: usize, sign: f64) -> Array2<f64> {
    let len = x.len_of(axis);
    let mut out = Array2::zeros(x.dim());
    for i in 0..len {
        let k = (i + shift) % len;
        let a = x.index_axis(axis, i);
        let b = x.index_axis(axis, k);
        let mut o = out.index_axis_mut(axis, i);
        ndarray::Zip::from(&mut o)
            .and(&a)
            .and(&b)
            .for_each(|o, &a, &b| *o = 0.5 * (a + sign * b));
    }
    out
}

/// Adjoint of [`filter`]: y[i] = ½ (x[i] + sign · x[i − shift]).
fn adjoint(x: ArrayView2<f64>, axis: Axis, shift: usize, sign: f64) -> Array2<f64> {
    let len = x.len_of(axis);
    let back = shift % len;
    let mut out = Array2::zeros(x.dim());
    for i in 0..len {
        let k = (i + len - back) % len;
        let a = x.index_axis(axis, i);
        let b = x.index_axis(axis, k);
        let mut o = out.index_axis_mut(axis, i);
        ndarray::Zip::from(&mut o)
            .and(&a)
            .and(&b)
            .for_each(|o, &a, &b| *o = 0.5 * (a + sign * b));
    }
    out
}

use csalsa::frames::{Frame, FrameFamily};
use csalsa::harness::{make_blur_kernel, radial_mask, BlurKernel};
use csalsa::operators::{LinearMap, LinearOperatorSpec, ObservationOperator};
use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0))
}

fn rel_err(a: &Array1<f64>, b: &DVector<f64>) -> f64 {
    let diff: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    diff / b.norm()
}

/// The n²×n² matrix of circular convolution with a kernel centred at
/// (k/2, k/2), built entry by entry.
fn circulant(kernel: &Array2<f64>, n: usize) -> DMatrix<f64> {
    let (kh, kw) = kernel.dim();
    let (ch, cw) = (kh / 2, kw / 2);
    let mut c = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for a in 0..kh {
                for b in 0..kw {
                    let si = (i + n * kh - a + ch) % n;
                    let sj = (j + n * kw - b + cw) % n;
                    c[(i * n + j, si * n + sj)] += kernel[[a, b]];
                }
            }
        }
    }
    c
}

#[test]
fn uniform_blur_matches_dense_circulant() {
    let n = 8;
    let kernel = make_blur_kernel(BlurKernel::Uniform { support: 3 }).unwrap();
    let op = LinearOperatorSpec::convolution(kernel.view(), (n, n)).unwrap();
    let dense = circulant(&kernel, n);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let x = random_vec(&mut rng, n * n);
        let fast = op.forward(x.view()).unwrap();
        let exact = &dense * DVector::from_iterator(n * n, x.iter().cloned());
        assert!(rel_err(&fast, &exact) < 1e-12);
    }
}

#[test]
fn gaussian_inverse_matches_dense_solve() {
    let n = 8;
    let kernel = make_blur_kernel(BlurKernel::Gaussian { support: 3, variance: 1.0 }).unwrap();
    let op = LinearOperatorSpec::convolution(kernel.view(), (n, n)).unwrap();
    let b = circulant(&kernel, n);
    let normal = DMatrix::identity(n * n, n * n) + b.transpose() * &b;
    let lu = normal.lu();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let r = random_vec(&mut rng, n * n);
        let fast = op.shifted_normal_inverse(r.view()).unwrap();
        let exact = lu.solve(&DVector::from_iterator(n * n, r.iter().cloned())).unwrap();
        assert!(rel_err(&fast, &exact) < 1e-8);
    }
}

#[test]
fn partial_fourier_adjoint_with_twenty_frequencies() {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mask = Array2::from_elem((n, n), false);
    while mask.iter().filter(|&&m| m).count() < 20 {
        mask[[rng.random_range(0..n), rng.random_range(0..n)]] = true;
    }
    let op = LinearOperatorSpec::partial_fourier(mask).unwrap();
    assert_eq!(op.output_len(), 40);
    for _ in 0..50 {
        let x = random_vec(&mut rng, op.input_len());
        let r = random_vec(&mut rng, op.output_len());
        let lhs = op.forward(x.view()).unwrap().dot(&r);
        let rhs = x.dot(&op.adjoint(r.view()).unwrap());
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}

#[test]
fn asymmetric_fourier_mask_still_has_an_adjoint_but_no_inverse() {
    let mut mask = Array2::from_elem((8, 8), false);
    mask[[4, 4]] = true;
    mask[[4, 5]] = true;
    let op = LinearOperatorSpec::partial_fourier(mask).unwrap();
    let r = Array1::ones(op.input_len());
    assert!(op.shifted_normal_inverse(r.view()).is_err());
}

fn family(kind: u8, n: usize, seed: u64) -> LinearOperatorSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        0 => {
            let variance = rng.random_range(0.3..3.0);
            let kernel = make_blur_kernel(BlurKernel::Gaussian { support: 5, variance }).unwrap();
            LinearOperatorSpec::convolution(kernel.view(), (n, n)).unwrap()
        }
        1 => {
            let mut mask = Array2::from_shape_fn((n, n), |_| rng.random_bool(0.6));
            mask[[0, 0]] = true;
            LinearOperatorSpec::pixel_mask(mask).unwrap()
        }
        _ => LinearOperatorSpec::partial_fourier(radial_mask(n, rng.random_range(1..6)).unwrap()).unwrap(),
    }
}

fn with_frame(op: LinearOperatorSpec, frame: u8, n: usize, levels: usize) -> LinearOperatorSpec {
    match frame {
        0 => op,
        1 => op.with_frame(Frame::new(FrameFamily::OrthogonalHaar, levels, (n, n)).unwrap()).unwrap(),
        _ => op.with_frame(Frame::new(FrameFamily::UndecimatedHaar, levels, (n, n)).unwrap()).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_identity_holds(kind in 0u8..3, frame in 0u8..3, log_n in 3u32..6, levels in 1usize..3, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let op = with_frame(family(kind, n, seed), frame, n, levels);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        let x = random_vec(&mut rng, op.input_len());
        let r = random_vec(&mut rng, op.output_len());
        let lhs = op.forward(x.view()).unwrap().dot(&r);
        let rhs = x.dot(&op.adjoint(r.view()).unwrap());
        let scale = (x.dot(&x) * r.dot(&r)).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
    }

    #[test]
    fn closed_form_inverse_solves_the_shifted_system(kind in 0u8..3, frame in 0u8..3, log_n in 3u32..6, levels in 1usize..3, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let op = with_frame(family(kind, n, seed), frame, n, levels);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
        let r = random_vec(&mut rng, op.input_len());
        let x = op.shifted_normal_inverse(r.view()).unwrap();
        let back = &x + &op.adjoint(op.forward(x.view()).unwrap().view()).unwrap();
        let err = (&back - &r).mapv(|v| v * v).sum().sqrt() / r.dot(&r).sqrt();
        prop_assert!(err <= 1e-8, "residual {err:e}");
    }
}

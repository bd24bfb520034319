#![allow(dead_code)]

use mvfrac::rng::Stream;
use mvfrac::SpdMatrix;
use nalgebra::DMatrix;

/// Random SPD matrix with eigenvalues drawn from `(lo, hi)` and a random rotation.
pub fn random_spd(p: usize, lo: f64, hi: f64, stream: &mut Stream) -> SpdMatrix {
    let g = DMatrix::from_fn(p, p, |_, _| stream.normal());
    let q = g.qr().q();
    let eigs: Vec<f64> = (0..p).map(|_| stream.uniform_in(lo, hi)).collect();
    SpdMatrix::from_spectrum(&q, &eigs).unwrap()
}

pub fn random_orthogonal(p: usize, stream: &mut Stream) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |_, _| stream.normal()).qr().q()
}

/// `∫_a^b g(t) dt` by the tanh-sinh rule, robust to integrable endpoint singularities.
pub fn tanh_sinh(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    tanh_sinh_ends(|t, _, _| g(t), a, b)
}

/// As [`tanh_sinh`], with `g(t, t - a, b - t)`; the distances are exact near
/// the ends, where `t` itself has already rounded onto the endpoint.
pub fn tanh_sinh_ends(g: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let mut sum = 0.0;
    let n = (4.5 / h) as i64;
    for k in -n..=n {
        let u = k as f64 * h;
        let s = std::f64::consts::FRAC_PI_2 * u.sinh();
        let x = s.tanh();
        // 1 - |x| computed without cancellation.
        let one_minus = 1.0 / (s.abs().exp() * s.cosh());
        if one_minus == 0.0 {
            continue;
        }
        let w = std::f64::consts::FRAC_PI_2 * u.cosh() / (s.cosh() * s.cosh());
        let near = half * one_minus;
        let far = 2.0 * half - near;
        let (t, left, right) = if x >= 0.0 {
            (b - near, far, near)
        } else {
            (a + near, near, far)
        };
        sum += w * g(t, left, right);
    }
    sum * half * h
}

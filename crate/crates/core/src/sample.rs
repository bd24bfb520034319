//! Seeded samplers over matrix cones and the sum-of-gammas check.
//!
//! * matrix gamma `|W|^{a-(p+1)/2} e^{-tr W} / Gamma_p(a)` by the Bartlett
//!   construction `W = T T'`,
//! * the rectangular exponential density `|A|^{r/2}|B|^{p/2} pi^{-rp/2} e^{-tr Z_X}`
//!   as `X = A^{-1/2} G B^{-1/2}` with `G` entries `N(0, 1/2)`,
//! * uniform points of `O < W < I`, by rejection for `p <= 3` and through the
//!   matrix beta construction otherwise.
//!
//! The sum check tests the statement that `Z_1 + Z_2` of two independent
//! rectangular exponentials is matrix gamma with shape `(r_1 + r_2)/2`. Its
//! density is the convolution `∫_{U>V>O} f_1(U-V) f_2(V) dV`, which is the
//! left-sided fractional integral of the power function `|V|^{r_2/2-(p+1)/2}`
//! (order `r_1/2`) carrying an extra `e^{-tr U}` weight; compare
//! [`crate::fracint::frac_integral_power_closed`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::gamma::log_matrix_gamma;
use crate::mc::{map_batches, sample_moments, Moments, MIN_ACCEPTANCE};
use crate::rng::Stream;
use crate::spd::{
    in_unit_cone, rect_transform, symmetric_eigen, RectConfig, RectMatrix, SpdMatrix,
};
use crate::verify::Check;

/// Shape of a real matrix-variate gamma law with unit scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixGammaSpec {
    pub p: usize,
    pub shape: f64,
}

impl MatrixGammaSpec {
    pub fn new(p: usize, shape: f64) -> Result<Self> {
        require(p >= 1, || "p >= 1".into())?;
        let bound = 0.5 * (p as f64 - 1.0);
        require(shape > bound, || {
            format!("shape > (p-1)/2 (got shape = {shape}, (p-1)/2 = {bound})")
        })?;
        Ok(Self { p, shape })
    }
}

fn symmetric_from_lower(t: &DMatrix<f64>) -> DMatrix<f64> {
    let m = t * t.transpose();
    (&m + m.transpose()) * 0.5
}

fn spd_from_symmetric(m: DMatrix<f64>) -> Option<SpdMatrix> {
    let (eigs, vecs) = symmetric_eigen(&m);
    crate::spd::eigenvalues_positive(&eigs).then(|| SpdMatrix::from_parts(m, eigs, vecs))
}

/// One matrix-gamma draw. Diagonal `T_jj^2 ~ Gamma(a - (j-1)/2, 1)`,
/// strictly lower entries `N(0, 1/2)`.
pub fn draw_matrix_gamma(p: usize, shape: f64, stream: &mut Stream) -> SpdMatrix {
    loop {
        let mut t = DMatrix::zeros(p, p);
        for j in 0..p {
            t[(j, j)] = stream.gamma(shape - 0.5 * j as f64).sqrt();
            for i in j + 1..p {
                t[(i, j)] = stream.normal() * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        if let Some(w) = spd_from_symmetric(symmetric_from_lower(&t)) {
            return w;
        }
    }
}

pub fn sample_matrix_gamma(spec: &MatrixGammaSpec, n: u64, seed: u64) -> Result<Vec<SpdMatrix>> {
    let spec = MatrixGammaSpec::new(spec.p, spec.shape)?;
    Ok(map_batches(n, seed, |stream, count| {
        (0..count)
            .map(|_| draw_matrix_gamma(spec.p, spec.shape, stream))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect())
}

/// Draws `G` with i.i.d. `N(0, 1/2)` entries and returns `A^{-1/2} G B^{-1/2}`.
pub fn draw_rect_exponential(cfg: &RectConfig, stream: &mut Stream) -> RectMatrix {
    let (p, r) = (cfg.p(), cfg.r());
    let g = DMatrix::from_fn(p, r, |_, _| stream.normal() * std::f64::consts::FRAC_1_SQRT_2);
    let x = cfg.a().inv_sqrt() * g * cfg.b().inv_sqrt();
    RectMatrix::new_unchecked(x)
}

/// `Z_X` of one rectangular exponential draw.
pub fn draw_rect_transform(cfg: &RectConfig, stream: &mut Stream) -> SpdMatrix {
    loop {
        let x = draw_rect_exponential(cfg, stream);
        if let Ok(z) = rect_transform(&x, cfg) {
            return z;
        }
    }
}

pub fn sample_rect_exponential(cfg: &RectConfig, n: u64, seed: u64) -> Vec<RectMatrix> {
    map_batches(n, seed, |stream, count| {
        (0..count)
            .map(|_| draw_rect_exponential(cfg, stream))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Volume of the proposal box: diagonal in `[0,1]`, off-diagonal in `[-1,1]`.
pub fn unit_cone_box_volume(p: usize) -> f64 {
    2f64.powi((p * (p - 1) / 2) as i32)
}

/// One box proposal; `Some` iff it lies in `O < W < I`.
pub fn draw_unit_cone_candidate(p: usize, stream: &mut Stream) -> Option<SpdMatrix> {
    let mut m = DMatrix::zeros(p, p);
    for i in 0..p {
        m[(i, i)] = stream.uniform();
        for j in 0..i {
            let v = stream.uniform_in(-1.0, 1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    // Off-diagonals of a unit-cone matrix satisfy |w_ij| < sqrt(w_ii w_jj).
    for i in 0..p {
        for j in 0..i {
            if m[(i, j)] * m[(i, j)] >= m[(i, i)] * m[(j, j)] {
                return None;
            }
        }
    }
    let (eigs, vecs) = symmetric_eigen(&m);
    in_unit_cone(&eigs).then(|| SpdMatrix::from_parts(m, eigs, vecs))
}

/// Uniform points of the unit cone with the acceptance statistics of the rejection step.
#[derive(Clone, Debug)]
pub struct UniformSamples {
    pub samples: Vec<SpdMatrix>,
    pub proposals: u64,
    pub acceptance_rate: f64,
}

/// `n` uniform draws from `{W : O < W < I}` by rejection; `p` in `1..=3`.
pub fn sample_uniform_spd_unit(p: usize, n: u64, seed: u64) -> Result<UniformSamples> {
    require((1..=3).contains(&p), || {
        format!("p in 1..=3 for rejection sampling (got p = {p})")
    })?;
    let batches = map_batches(n, seed, |stream, count| {
        let cap = (count as f64 / MIN_ACCEPTANCE) as u64 + 1000;
        let mut out = Vec::with_capacity(count as usize);
        let mut proposals = 0u64;
        while (out.len() as u64) < count && proposals < cap {
            proposals += 1;
            if let Some(w) = draw_unit_cone_candidate(p, stream) {
                out.push(w);
            }
        }
        (out, proposals)
    });
    let proposals: u64 = batches.iter().map(|b| b.1).sum();
    let samples: Vec<SpdMatrix> = batches.into_iter().flat_map(|b| b.0).collect();
    let acceptance_rate = if proposals == 0 {
        1.0
    } else {
        samples.len() as f64 / proposals as f64
    };
    if (samples.len() as u64) < n || acceptance_rate < MIN_ACCEPTANCE {
        return Err(Error::Resource(format!(
            "unit-cone acceptance rate {acceptance_rate:e} below {MIN_ACCEPTANCE:e}"
        )));
    }
    Ok(UniformSamples {
        samples,
        proposals,
        acceptance_rate,
    })
}

/// Type-1 matrix beta draw `(G_1+G_2)^{-1/2} G_1 (G_1+G_2)^{-1/2}` with
/// `G_1 ~ Gamma_p(a)`, `G_2 ~ Gamma_p(b)`.
pub fn draw_matrix_beta(p: usize, a: f64, b: f64, stream: &mut Stream) -> SpdMatrix {
    loop {
        let g1 = draw_matrix_gamma(p, a, stream);
        let g2 = draw_matrix_gamma(p, b, stream);
        let Ok(total) = SpdMatrix::new(g1.entries() + g2.entries()) else {
            continue;
        };
        let root = total.inv_sqrt();
        let w = &root * g1.entries() * &root;
        let w = (&w + w.transpose()) * 0.5;
        let (eigs, vecs) = symmetric_eigen(&w);
        if in_unit_cone(&eigs) {
            return SpdMatrix::from_parts(w, eigs, vecs);
        }
    }
}

/// A uniform point of the unit cone: matrix beta with both shapes `(p+1)/2`.
pub fn draw_uniform_unit_cone_beta(p: usize, stream: &mut Stream) -> SpdMatrix {
    let half = 0.5 * (p as f64 + 1.0);
    draw_matrix_beta(p, half, half, stream)
}

pub fn sample_matrix_beta(p: usize, a: f64, b: f64, n: u64, seed: u64) -> Result<Vec<SpdMatrix>> {
    MatrixGammaSpec::new(p, a)?;
    MatrixGammaSpec::new(p, b)?;
    Ok(map_batches(n, seed, |stream, count| {
        (0..count)
            .map(|_| draw_matrix_beta(p, a, b, stream))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect())
}

/// Kolmogorov-Smirnov distance between the sample and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// `Gamma(shape, 1)` CDF.
pub fn gamma_cdf(shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        statrs::function::gamma::gamma_lr(shape, x)
    }
}

/// Outcome of the sum-density check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumDensityReport {
    pub p: usize,
    pub r1: usize,
    pub r2: usize,
    pub shape: f64,
    pub n: u64,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SumDensityReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Second-stream seed for the `Z_2` draws.
fn partner_seed(seed: u64) -> u64 {
    seed.wrapping_add(0x9E37_79B9_7F4A_7C15)
}

/// Draws `U = Z_1 + Z_2` and tests it against `Gamma_p((r_1 + r_2)/2)` through
/// the trace mean, the determinant mean and, for `p = 1`, a KS test.
pub fn verify_sum_density(
    cfg1: &RectConfig,
    cfg2: &RectConfig,
    n: u64,
    seed: u64,
) -> Result<SumDensityReport> {
    verify_sum_density_paired(cfg1, cfg2, n, seed, |i| i)
}

/// As [`verify_sum_density`] with `Z_1[i]` paired to `Z_2[pairing(i)]`;
/// `pairing` must be a permutation of `0..n`.
pub fn verify_sum_density_paired(
    cfg1: &RectConfig,
    cfg2: &RectConfig,
    n: u64,
    seed: u64,
    pairing: impl Fn(usize) -> usize,
) -> Result<SumDensityReport> {
    if cfg1.p() != cfg2.p() {
        return Err(Error::Dimension(format!(
            "both configurations need the same p (got {} and {})",
            cfg1.p(),
            cfg2.p()
        )));
    }
    require(n >= 2, || "samples >= 2".into())?;
    let p = cfg1.p();
    let shape = 0.5 * (cfg1.r() + cfg2.r()) as f64;

    let draw = |cfg: &RectConfig, seed: u64| -> Vec<SpdMatrix> {
        map_batches(n, seed, |stream, count| {
            (0..count)
                .map(|_| draw_rect_transform(cfg, stream))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    };
    let z1 = draw(cfg1, seed);
    let z2 = draw(cfg2, partner_seed(seed));
    let sums: Vec<DMatrix<f64>> = (0..n as usize)
        .map(|i| z1[i].entries() + z2[pairing(i)].entries())
        .collect();

    let mut trace = Moments::default();
    let mut det = Moments::default();
    for u in &sums {
        trace.push(u.trace());
        det.push(u.determinant());
    }
    let mut checks = vec![
        Check::z_test(
            "mean trace",
            trace.estimate(seed),
            p as f64 * shape,
            4.0,
        ),
        Check::z_test(
            "mean determinant",
            det.estimate(seed),
            (log_matrix_gamma(p, shape + 1.0)? - log_matrix_gamma(p, shape)?).exp(),
            4.0,
        ),
    ];
    if p == 1 {
        let xs: Vec<f64> = sums.iter().map(|u| u[(0, 0)]).collect();
        let d = ks_statistic(&xs, |x| gamma_cdf(shape, x));
        checks.push(Check::upper_bound("KS distance to Gamma(shape)", d, ks_critical_1pct(xs.len())));
    }
    Ok(SumDensityReport {
        p,
        r1: cfg1.r(),
        r2: cfg2.r(),
        shape,
        n,
        seed,
        checks,
    })
}

/// Mean of `h(W)` under the matrix gamma law; a convenience for moment checks.
pub fn matrix_gamma_moment(
    spec: &MatrixGammaSpec,
    n: u64,
    seed: u64,
    h: impl Fn(&SpdMatrix) -> f64 + Sync,
) -> Result<Moments> {
    let spec = MatrixGammaSpec::new(spec.p, spec.shape)?;
    Ok(sample_moments(n, seed, |stream| {
        h(&draw_matrix_gamma(spec.p, spec.shape, stream))
    }))
}

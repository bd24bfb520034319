//! Batched, seeded Monte Carlo integration.
//!
//! Work is split into fixed-size batches; batch `i` draws from stream `i` of
//! the seed. Batch statistics are merged in index order, so results are
//! bit-identical for any number of worker threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::log_matrix_beta;
use crate::rng::Stream;
use crate::sample::{draw_unit_cone_candidate, draw_uniform_unit_cone_beta, unit_cone_box_volume};
use crate::spd::{RectConfig, SpdMatrix};

/// Samples per batch (and per derived stream).
pub const BATCH_SIZE: u64 = 4096;

/// Rejection from the box below this acceptance rate is refused.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

/// Relative size of the smallest standard error [`McEstimate::z_score`] uses.
pub const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// A Monte Carlo value with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `(value - expected) / stderr`. The standard error is floored at the
    /// rounding level of `value`, so a zero-variance estimate (a constant
    /// integrand under an exact importance density) is compared at machine
    /// precision rather than declared infinitely far off.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.value - expected;
        let scale = self.stderr.max(ROUNDING_FLOOR * self.value.abs());
        if scale > 0.0 {
            diff / scale
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            stderr: self.stderr * factor.abs(),
            ..self
        }
    }
}

/// Running mean and sum of squared deviations (Welford / Chan merge).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn estimate(&self, seed: u64) -> McEstimate {
        McEstimate {
            value: self.mean,
            stderr: self.stderr(),
            n: self.n,
            seed,
        }
    }
}

fn batch_sizes(n: u64) -> Vec<(u64, u64)> {
    let batches = n.div_ceil(BATCH_SIZE);
    (0..batches)
        .map(|i| (i, BATCH_SIZE.min(n - i * BATCH_SIZE)))
        .collect()
}

/// Runs `work(stream, count)` for every batch and returns the results in batch order.
pub fn map_batches<T, F>(n: u64, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream, u64) -> T + Sync,
{
    let run = |&(index, count): &(u64, u64)| {
        let mut stream = Stream::new(seed, index);
        work(&mut stream, count)
    };
    let sizes = batch_sizes(n);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        sizes.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        sizes.iter().map(run).collect()
    }
}

/// Mean and spread of `draw` over `n` seeded evaluations.
pub fn sample_moments<F>(n: u64, seed: u64, draw: F) -> Moments
where
    F: Fn(&mut Stream) -> f64 + Sync,
{
    let parts = map_batches(n, seed, |stream, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            m.push(draw(stream));
        }
        m
    });
    let mut total = Moments::default();
    for m in &parts {
        total.merge(m);
    }
    total
}

fn check_samples(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("samples >= 1".into()));
    }
    Ok(())
}

/// `∫_{O<W<I} g(W) dW`.
///
/// For `p <= 3` this is plain Monte Carlo over the entrywise box (diagonal in
/// `[0,1]`, off-diagonal in `[-1,1]`) with `g` set to zero outside the cone, so
/// the region volume is itself estimated. For larger `p` uniform cone points
/// come from the matrix-beta construction and the exact volume `B_p((p+1)/2, (p+1)/2)`.
pub fn mc_integrate_unit_cone<G>(g: G, p: usize, n: u64, seed: u64) -> Result<McEstimate>
where
    G: Fn(&SpdMatrix) -> f64 + Sync,
{
    check_samples(n)?;
    if p == 0 {
        return Err(Error::Dimension("p >= 1".into()));
    }
    if p <= 3 {
        let accepted = std::sync::atomic::AtomicU64::new(0);
        let moments = sample_moments(n, seed, |stream| match draw_unit_cone_candidate(p, stream) {
            Some(w) => {
                accepted.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                g(&w)
            }
            None => 0.0,
        });
        let rate = accepted.into_inner() as f64 / n as f64;
        if rate < MIN_ACCEPTANCE {
            return Err(Error::Resource(format!(
                "unit-cone acceptance rate {rate:e} below {MIN_ACCEPTANCE:e}"
            )));
        }
        Ok(moments.estimate(seed).scaled(unit_cone_box_volume(p)))
    } else {
        let half = 0.5 * (p as f64 + 1.0);
        let volume = log_matrix_beta(p, half, half)?.exp();
        let moments = sample_moments(n, seed, |stream| {
            g(&draw_uniform_unit_cone_beta(p, stream))
        });
        Ok(moments.estimate(seed).scaled(volume))
    }
}

/// `∫ g(X) dX` over `p x r` matrices, by importance sampling from the
/// rectangular exponential density `|A|^{r/2}|B|^{p/2} pi^{-rp/2} e^{-tr Z_X}`.
///
/// `g` receives `Z_X`; it only sees the rectangular matrix through that
/// transform, which covers every integrand of this crate.
pub fn mc_integrate_rect<G>(g: G, cfg: &RectConfig, n: u64, seed: u64) -> Result<McEstimate>
where
    G: Fn(&SpdMatrix) -> f64 + Sync,
{
    check_samples(n)?;
    let log_norm = 0.5 * (cfg.r() * cfg.p()) as f64 * std::f64::consts::PI.ln() - cfg.log_jacobian();
    let moments = sample_moments(n, seed, |stream| {
        let z = crate::sample::draw_rect_transform(cfg, stream);
        let value = g(&z);
        if value == 0.0 {
            0.0
        } else {
            value * z.trace().exp()
        }
    });
    Ok(moments.estimate(seed).scaled(log_norm.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.n, whole.n);
        assert!((a.mean - whole.mean).abs() < 1e-12);
        assert!((a.variance() - whole.variance()).abs() < 1e-10);
    }

    #[test]
    fn batches_cover_n() {
        let sizes = batch_sizes(10_000);
        assert_eq!(sizes.iter().map(|s| s.1).sum::<u64>(), 10_000);
        assert_eq!(sizes.len(), 3);
        assert!(batch_sizes(0).is_empty());
    }

    #[test]
    fn scalar_monomial_integral() {
        let est = mc_integrate_unit_cone(|w| w.entries()[(0, 0)].powi(2), 1, 200_000, 3).unwrap();
        assert!(est.z_score(1.0 / 3.0).abs() < 3.0, "{est:?}");
        assert!(matches!(
            mc_integrate_unit_cone(|_| 1.0, 2, 0, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let g = |w: &SpdMatrix| w.det();
        let a = mc_integrate_unit_cone(g, 2, 50_000, 9).unwrap();
        let b = mc_integrate_unit_cone(g, 2, 50_000, 9).unwrap();
        let c = mc_integrate_unit_cone(g, 2, 50_000, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.value, c.value);
    }
}

//! Truncated hypergeometric series of matrix argument
//!
//! ```text
//! pFq(a; b; Z) = sum_k sum_{K |- k} [prod_i (a_i)_K / prod_j (b_j)_K] C_K(Z) / k!
//! ```
//!
//! summed in weight order (reverse-lexicographic within a weight) with
//! compensated addition, plus the rectangular-argument Gauss function and
//! the determinant pathway limit.

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::spd::{RectConfig, SpdMatrix};
use crate::zonal::ZonalTable;

/// Upper and lower parameter lists of a `pFq`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl HyperParams {
    pub fn new(numerator: &[f64], denominator: &[f64]) -> Self {
        Self {
            numerator: numerator.to_vec(),
            denominator: denominator.to_vec(),
        }
    }

    /// Rejects lower parameters whose Pochhammer factor `b - (j-1)/2 + i - 1`
    /// vanishes for some partition of weight `<= k_max` with at most `p` parts.
    pub fn validate(&self, k_max: usize, p: usize) -> Result<()> {
        for &b in &self.denominator {
            require(b.is_finite(), || format!("finite lower parameter (got {b})"))?;
            for j in 0..p.min(k_max) {
                let longest = k_max / (j + 1);
                for i in 0..longest {
                    let factor = b - 0.5 * j as f64 + i as f64;
                    require(factor != 0.0, || {
                        format!(
                            "lower parameter {b} gives a vanishing Pochhammer factor in row {} at weight <= {k_max}",
                            j + 1
                        )
                    })?;
                }
            }
        }
        for &a in &self.numerator {
            require(a.is_finite(), || format!("finite upper parameter (got {a})"))?;
        }
        Ok(())
    }

    /// `prod (a_i)_K / prod (b_j)_K / k!`, accumulated box by box.
    fn coefficient(&self, kappa: &crate::Partition) -> f64 {
        let mut acc = 1.0;
        for (m, (row, col)) in kappa.boxes().enumerate() {
            let shift = col as f64 - 0.5 * row as f64;
            for &a in &self.numerator {
                acc *= a + shift;
            }
            for &b in &self.denominator {
                acc /= b + shift;
            }
            acc /= (m + 1) as f64;
        }
        acc
    }
}

/// Truncation control for series evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub k_max: usize,
    pub tail_tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            k_max: 25,
            tail_tol: 1e-10,
        }
    }
}

impl Truncation {
    pub fn new(k_max: usize, tail_tol: f64) -> Result<Self> {
        require(k_max >= 1, || "k_max >= 1".into())?;
        require(tail_tol > 0.0, || "tail_tol > 0".into())?;
        Ok(Self { k_max, tail_tol })
    }

    pub fn with_k_max(k_max: usize) -> Self {
        Self {
            k_max,
            ..Self::default()
        }
    }
}

/// A partial sum with its truncation diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Geometric estimate of the omitted remainder; infinite when the last ratio is `>= 1`.
    pub tail_estimate: f64,
    pub k_max: usize,
    /// `|s_{k_max}|`, the magnitude of the last weight sum.
    pub last_term: f64,
    /// `|s_{k_max} / s_{k_max - 1}|`.
    pub ratio: f64,
    /// `ratio < 1`.
    pub converged: bool,
    /// `tail_estimate <= tail_tol * max(|value|, 1)`.
    pub meets_tolerance: bool,
    /// Sum of the terms of each weight, `s_0 .. s_{k_max}`.
    pub weight_sums: Vec<f64>,
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Consecutive growing weight sums at the end of the series that count as divergence.
const DIVERGENCE_RUN: usize = 5;

/// `pFq` at a symmetric argument given by its eigenvalues.
pub fn hyper_pfq_eigs(
    params: &HyperParams,
    eigs: &[f64],
    trunc: &Truncation,
    table: &ZonalTable,
) -> Result<SeriesValue> {
    let s = params.numerator.len();
    let t = params.denominator.len();
    if s == t + 1 {
        let radius = eigs.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
        require(radius < 1.0, || {
            format!("spectral radius of Z < 1 for a {s}F{t} (got {radius})")
        })?;
    }
    sum_series(params, eigs, trunc, table)
}

fn sum_series(
    params: &HyperParams,
    eigs: &[f64],
    trunc: &Truncation,
    table: &ZonalTable,
) -> Result<SeriesValue> {
    if trunc.k_max > table.k_max() {
        return Err(Error::MissingEntry(format!(
            "weights up to {} (table holds {})",
            trunc.k_max,
            table.k_max()
        )));
    }
    params.validate(trunc.k_max, eigs.len())?;
    let mut total = Neumaier::default();
    let mut weight_sums = Vec::with_capacity(trunc.k_max + 1);
    for k in 0..=trunc.k_max {
        let zonals = table.eval_weight(k, eigs)?;
        let mut level = Neumaier::default();
        for (kappa, c) in table.partitions(k).iter().zip(zonals) {
            if c != 0.0 {
                level.add(params.coefficient(kappa) * c);
            }
        }
        let sk = level.value();
        if !sk.is_finite() {
            return Err(Error::Divergence(format!("weight {k} sum is not finite")));
        }
        weight_sums.push(sk);
        total.add(sk);
    }
    let n = weight_sums.len();
    if n > DIVERGENCE_RUN
        && (n - DIVERGENCE_RUN..n).all(|k| weight_sums[k].abs() > weight_sums[k - 1].abs())
    {
        return Err(Error::Divergence(format!(
            "weight sums still growing over the last {DIVERGENCE_RUN} weights (|s_{}| = {:e})",
            n - 1,
            weight_sums[n - 1].abs()
        )));
    }
    let last = weight_sums[n - 1].abs();
    let prev = if n >= 2 { weight_sums[n - 2].abs() } else { 0.0 };
    let ratio = if last == 0.0 {
        0.0
    } else if prev == 0.0 {
        f64::INFINITY
    } else {
        last / prev
    };
    let converged = ratio < 1.0;
    let tail_estimate = if converged {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    let value = total.value();
    Ok(SeriesValue {
        value,
        tail_estimate,
        k_max: trunc.k_max,
        last_term: last,
        ratio,
        converged,
        meets_tolerance: tail_estimate <= trunc.tail_tol * value.abs().max(1.0),
        weight_sums,
    })
}

/// `pFq(a; b; Z)`.
pub fn hyper_pfq(
    params: &HyperParams,
    z: &SpdMatrix,
    trunc: &Truncation,
    table: &ZonalTable,
) -> Result<SeriesValue> {
    hyper_pfq_eigs(params, z.eigenvalues(), trunc, table)
}

/// Largest last-weight ratio accepted for a series at the identity.
pub const IDENTITY_RATIO_LIMIT: f64 = 0.95;

/// `pFq(a; b; I_p)`. No closed convergence condition is assumed: the
/// evaluation fails unless the observed weight ratio stays below
/// [`IDENTITY_RATIO_LIMIT`].
pub fn hyper_pfq_at_identity(
    params: &HyperParams,
    p: usize,
    trunc: &Truncation,
    table: &ZonalTable,
) -> Result<SeriesValue> {
    let series = sum_series(params, &vec![1.0; p], trunc, table)?;
    if series.ratio >= IDENTITY_RATIO_LIMIT {
        return Err(Error::NonConvergence(format!(
            "series at I_{p} has weight ratio {:.4} >= {IDENTITY_RATIO_LIMIT} at k_max = {}",
            series.ratio, trunc.k_max
        )));
    }
    Ok(series)
}

/// `2F1(a + r/2, b; c + r/2; Z_Y)`, the Gauss function of rectangular matrix
/// argument. Equal to the normalized Euler integral over `p x r` matrices `X`
/// with `O < Z_X < I`.
pub fn gauss_2f1_rect(
    a: f64,
    b: f64,
    c: f64,
    cfg: &RectConfig,
    z_y: &SpdMatrix,
    trunc: &Truncation,
    table: &ZonalTable,
) -> Result<SeriesValue> {
    let (p, r) = (cfg.p() as f64, cfg.r() as f64);
    if z_y.dim() != cfg.p() {
        return Err(Error::Dimension(format!(
            "Z_Y is {0}x{0} but p = {1}",
            z_y.dim(),
            cfg.p()
        )));
    }
    require(z_y.spectral_radius() < 1.0, || {
        format!("O < Z_Y < I (largest eigenvalue {})", z_y.spectral_radius())
    })?;
    let half = 0.5 * (p - 1.0);
    require(c - a > half, || {
        format!("c - a > (p-1)/2 (got c - a = {}, (p-1)/2 = {half})", c - a)
    })?;
    require(a > -0.5 * r + half, || {
        format!(
            "a > -r/2 + (p-1)/2 (got a = {a}, bound = {})",
            -0.5 * r + half
        )
    })?;
    let params = HyperParams::new(&[a + 0.5 * r, b], &[c + 0.5 * r]);
    hyper_pfq(&params, z_y, trunc, table)
}

/// `|I + (q-1) Z|^{-1/(q-1)} = prod_j (1 + (q-1) l_j)^{-1/(q-1)}`, which tends to
/// `exp(-tr Z)` as `q -> 1`.
pub fn pathway_det_limit_eigs(q: f64, eigs: &[f64]) -> Result<f64> {
    require(q > 1.0, || format!("q > 1 (got q = {q})"))?;
    let eps = q - 1.0;
    let mut log = 0.0;
    for &l in eigs {
        let x = eps * l;
        require(1.0 + x > 0.0, || {
            format!("I + (q-1) Z positive definite (eigenvalue {l})")
        })?;
        log += x.ln_1p();
    }
    Ok((-log / eps).exp())
}

pub fn pathway_det_limit(q: f64, z: &SpdMatrix) -> Result<f64> {
    pathway_det_limit_eigs(q, z.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_argument() {
        let table = ZonalTable::build(10, 2).unwrap();
        let p = HyperParams::new(&[1.3, 0.7], &[2.1]);
        let v = hyper_pfq_eigs(&p, &[0.0, 0.0], &Truncation::with_k_max(10), &table).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.tail_estimate, 0.0);
    }

    #[test]
    fn log_series() {
        let table = ZonalTable::build_with_ceiling(60, 1, 60).unwrap();
        let p = HyperParams::new(&[1.0, 1.0], &[2.0]);
        let v = hyper_pfq_eigs(&p, &[0.5], &Truncation::with_k_max(60), &table).unwrap();
        // -ln(1 - z) / z at z = 1/2
        assert_relative_eq!(v.value, 2.0 * 2f64.ln(), max_relative = 1e-10);
    }

    #[test]
    fn binomial_at_diagonal() {
        let table = ZonalTable::build(25, 2).unwrap();
        let p = HyperParams::new(&[1.5], &[]);
        let z = SpdMatrix::diagonal(&[0.2, 0.1]).unwrap();
        let v = hyper_pfq(&p, &z, &Truncation::default(), &table).unwrap();
        let exact = (0.8f64 * 0.9).powf(-1.5);
        assert!((v.value - exact).abs() < 1e-9);
        assert!(v.converged && v.ratio < 0.3);
    }

    #[test]
    fn domain_checks() {
        let table = ZonalTable::build(5, 2).unwrap();
        let t = Truncation::with_k_max(5);
        let p = HyperParams::new(&[1.0], &[]);
        assert!(matches!(
            hyper_pfq_eigs(&p, &[1.2, 0.1], &t, &table),
            Err(Error::Domain(_))
        ));
        // b = 1/2 vanishes in row 2 at i = 1.
        let bad = HyperParams::new(&[1.0, 1.0], &[0.5]);
        assert!(matches!(
            hyper_pfq_eigs(&bad, &[0.1, 0.1], &t, &table),
            Err(Error::Domain(_))
        ));
        // but is fine for p = 1.
        assert!(hyper_pfq_eigs(&bad, &[0.1], &t, &table).is_ok());
        let too_deep = Truncation::with_k_max(6);
        assert!(hyper_pfq_eigs(&p, &[0.1], &too_deep, &table).is_err());
    }

    #[test]
    fn growing_series_is_flagged() {
        let table = ZonalTable::build(8, 1).unwrap();
        // 2F0 grows factorially.
        let p = HyperParams::new(&[3.0, 3.0], &[]);
        assert!(matches!(
            hyper_pfq_eigs(&p, &[0.9], &Truncation::with_k_max(8), &table),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn identity_series_requires_fast_decay() {
        let table = ZonalTable::build(25, 1).unwrap();
        let slow = HyperParams::new(&[1.0, 1.0, 1.0], &[1.2, 1.9]);
        assert!(matches!(
            hyper_pfq_at_identity(&slow, 1, &Truncation::default(), &table),
            Err(Error::NonConvergence(_))
        ));
        let ok = HyperParams::new(&[0.3, 0.2, 1.0], &[2.0, 2.0]);
        assert!(hyper_pfq_at_identity(&ok, 1, &Truncation::default(), &table).is_ok());
    }

    #[test]
    fn rect_gauss_conditions_and_reductions() {
        let table = ZonalTable::build(25, 2).unwrap();
        let t = Truncation::default();
        let cfg = RectConfig::identity(2, 2).unwrap();
        let z = SpdMatrix::diagonal(&[0.3, 0.1]).unwrap();
        let v = gauss_2f1_rect(1.0, 0.0, 3.0, &cfg, &z, &t, &table).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(matches!(
            gauss_2f1_rect(1.0, 0.5, 1.2, &cfg, &z, &t, &table),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gauss_2f1_rect(-0.6, 0.5, 3.0, &cfg, &z, &t, &table),
            Err(Error::Domain(_))
        ));
        let big = SpdMatrix::diagonal(&[1.0, 0.1]).unwrap();
        assert!(gauss_2f1_rect(1.0, 0.5, 3.0, &cfg, &big, &t, &table).is_err());

        let cfg1 = RectConfig::identity(1, 1).unwrap();
        let z1 = SpdMatrix::diagonal(&[0.4]).unwrap();
        let rect = gauss_2f1_rect(0.7, 1.1, 2.2, &cfg1, &z1, &t, &table).unwrap();
        let direct = hyper_pfq_eigs(&HyperParams::new(&[1.2, 1.1], &[2.7]), &[0.4], &t, &table).unwrap();
        assert_eq!(rect.value, direct.value);
    }

    #[test]
    fn pathway_values() {
        let v = pathway_det_limit_eigs(1.01, &[1.0]).unwrap();
        assert_relative_eq!(v, 1.01f64.powf(-100.0), max_relative = 1e-13);
        assert_relative_eq!(v, 0.369_711_3, epsilon = 1e-6);
        assert_eq!(pathway_det_limit_eigs(1.7, &[0.0, 0.0]).unwrap(), 1.0);
        assert!(pathway_det_limit_eigs(1.0, &[1.0]).is_err());
        let z = SpdMatrix::diagonal(&[0.6, 0.3]).unwrap();
        let v = pathway_det_limit(1.0001, &z).unwrap();
        assert!((v - (-0.9f64).exp()).abs() < 1e-3 * 0.81);
    }
}

//! Scalar and matrix-variate gamma and beta functions, generalized
//! Pochhammer symbols and the pathway factor.
//!
//! All gamma values are carried in log scale. Pochhammer products can change
//! sign, so their log forms return a separate sign.

use std::f64::consts::PI;

use crate::error::{require, Error, Result};
use crate::partition::Partition;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln|Gamma(x)|` and `sign(Gamma(x))` by the Lanczos approximation (g = 7, n = 9),
/// with reflection below 1/2. Poles return `(+inf, 0.0)`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x <= 0.0 && x == x.floor() {
        return (f64::INFINITY, 0.0);
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        let (lg, sg) = ln_gamma_signed(1.0 - x);
        return ((PI / s.abs()).ln() - lg, s.signum() * sg);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln(),
        1.0,
    )
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).0
}

/// `log Gamma_p(alpha) = p(p-1)/4 log(pi) + sum_{j=1}^{p} log Gamma(alpha - (j-1)/2)`.
pub fn log_matrix_gamma(p: usize, alpha: f64) -> Result<f64> {
    require(p >= 1, || "p >= 1".into())?;
    let bound = 0.5 * (p as f64 - 1.0);
    require(alpha > bound, || {
        format!("alpha > (p-1)/2 (got alpha = {alpha}, (p-1)/2 = {bound})")
    })?;
    let mut acc = 0.25 * (p * (p - 1)) as f64 * PI.ln();
    for j in 0..p {
        acc += ln_gamma(alpha - 0.5 * j as f64);
    }
    Ok(acc)
}

/// Generalized Pochhammer `(a)_K = prod_j (a - (j-1)/2)_{k_j}`; zero factors give 0.
pub fn gen_pochhammer(a: f64, k: &Partition) -> f64 {
    let mut acc = 1.0;
    for (j, &kj) in k.parts().iter().enumerate() {
        let base = a - 0.5 * j as f64;
        for i in 0..kj {
            acc *= base + i as f64;
        }
    }
    acc
}

/// `(log|(a)_K|, sign)`; a zero product returns `(-inf, 0.0)`.
pub fn log_gen_pochhammer(a: f64, k: &Partition) -> (f64, f64) {
    let mut log = 0.0;
    let mut sign = 1.0;
    for (j, &kj) in k.parts().iter().enumerate() {
        let base = a - 0.5 * j as f64;
        for i in 0..kj {
            let f = base + i as f64;
            if f == 0.0 {
                return (f64::NEG_INFINITY, 0.0);
            }
            log += f.abs().ln();
            sign *= f.signum();
        }
    }
    (log, sign)
}

/// `(log|Gamma_p(b, K)|, sign)` with `Gamma_p(b, K) = Gamma_p(b) (b)_K`.
pub fn signed_log_matrix_gamma_partition(p: usize, b: f64, k: &Partition) -> Result<(f64, f64)> {
    require(k.len() <= p, || {
        format!("partition {k} has more than p = {p} nonzero parts")
    })?;
    let lg = log_matrix_gamma(p, b)?;
    let (lp, sign) = log_gen_pochhammer(b, k);
    Ok((lg + lp, sign))
}

/// `log Gamma_p(b, K)`; requires `(b)_K > 0`.
pub fn log_matrix_gamma_partition(p: usize, b: f64, k: &Partition) -> Result<f64> {
    let (log, sign) = signed_log_matrix_gamma_partition(p, b, k)?;
    if sign > 0.0 {
        Ok(log)
    } else {
        Err(Error::Domain(format!(
            "(b)_K > 0 for the log form (b = {b}, K = {k}); use the signed variant"
        )))
    }
}

/// `log B_p(alpha, beta) = log Gamma_p(alpha) + log Gamma_p(beta) - log Gamma_p(alpha + beta)`.
pub fn log_matrix_beta(p: usize, alpha: f64, beta: f64) -> Result<f64> {
    Ok(log_matrix_gamma(p, alpha)? + log_matrix_gamma(p, beta)?
        - log_matrix_gamma(p, alpha + beta)?)
}

/// `(q-1)^k (1/(q-1))_K`, evaluated box by box as
/// `prod_j prod_{i=1}^{k_j} [1 - (q-1)(j-1)/2 + (q-1)(i-1)]`. Tends to 1 as `q -> 1`.
pub fn pathway_factor(q: f64, k: &Partition) -> Result<f64> {
    require(q > 1.0, || format!("q > 1 (got q = {q})"))?;
    let eps = q - 1.0;
    let mut acc = 1.0;
    for (j, &kj) in k.parts().iter().enumerate() {
        for i in 0..kj {
            acc *= 1.0 - eps * 0.5 * j as f64 + eps * i as f64;
        }
    }
    Ok(acc)
}

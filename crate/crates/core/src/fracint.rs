//! The left-sided fractional integral of matrix argument
//!
//! ```text
//! (D^{-α} f)(X) = 1/Γ_p(α) ∫_{Z_X > Z_Y > O} |Z_X - Z_Y|^{α-(p+1)/2} f(Z_Y) dY
//! ```
//!
//! over `p x r` matrices `Y`. Substituting `U = A^{1/2} Y B^{1/2}`, `V = UU'`
//! and `W = Z_X^{-1/2} V Z_X^{-1/2}` reduces it to
//!
//! ```text
//! |Z_X|^{α+r/2-(p+1)/2} π^{rp/2} / (|A|^{r/2} |B|^{p/2} Γ_p(α) Γ_p(r/2))
//!     × ∫_{O<W<I} |I-W|^{α-(p+1)/2} |W|^{r/2-(p+1)/2} f(Z_X^{1/2} W Z_X^{1/2}) dW,
//! ```
//!
//! which the Monte Carlo route evaluates by sampling the kernel. Closed forms are given for
//! determinant powers, zonal polynomials and the Gauss-kernel (Saigo) operator
//! on determinant powers.

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::gamma::{log_gen_pochhammer, log_matrix_beta, log_matrix_gamma};
use crate::hyper::{hyper_pfq_at_identity, hyper_pfq_eigs, HyperParams, SeriesValue, Truncation};
use crate::mc::{sample_moments, McEstimate};
use crate::sample::draw_matrix_beta;
use crate::partition::Partition;
use crate::spd::{symmetric_eigen, RectConfig, SpdMatrix};
use crate::zonal::ZonalTable;

/// Order `α` of the operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracOrder(pub f64);

impl FracOrder {
    /// `α > (p-1)/2`, needed for `Γ_p(α)`.
    pub fn check(&self, p: usize) -> Result<f64> {
        let bound = 0.5 * (p as f64 - 1.0);
        require(self.0 > bound, || {
            format!("alpha > (p-1)/2 (got alpha = {}, (p-1)/2 = {bound})", self.0)
        })?;
        Ok(self.0)
    }
}

/// Parameters of the Gauss kernel `2F1(a, b; c; I - Z_X^{-1/2} Z_Y Z_X^{-1/2})`
/// and the power `|Z_Y|^η` it multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaigoParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub eta: f64,
}

/// An operator value `sign · exp(log_magnitude)`. `det_exponent` is the power
/// of `|Z_X|` already folded into `log_magnitude`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorValue {
    pub log_magnitude: f64,
    pub sign: f64,
    pub det_exponent: f64,
}

impl OperatorValue {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.log_magnitude.exp()
        }
    }
}

fn check_dims(z_x: &SpdMatrix, cfg: &RectConfig) -> Result<()> {
    if z_x.dim() != cfg.p() {
        return Err(Error::Dimension(format!(
            "Z_X is {0}x{0} but p = {1}",
            z_x.dim(),
            cfg.p()
        )));
    }
    Ok(())
}

fn check_power_shift(p: usize, r: usize, eta: f64) -> Result<()> {
    let lhs = 0.5 * r as f64 + eta;
    let bound = 0.5 * (p as f64 - 1.0);
    require(lhs > bound, || {
        format!("r/2 + eta > (p-1)/2 (got {lhs}, (p-1)/2 = {bound})")
    })
}

/// `log Γ_p(r/2 + η) - log Γ_p(α + r/2 + η)`: the part of the power closed
/// form that carries the order. Composing orders telescopes:
/// `ratio(α, η) + ratio(β, η + α) = ratio(α + β, η)`.
pub fn power_gamma_ratio(alpha: f64, eta: f64, p: usize, r: usize) -> Result<f64> {
    let half_r = 0.5 * r as f64;
    Ok(log_matrix_gamma(p, half_r + eta)? - log_matrix_gamma(p, alpha + half_r + eta)?)
}

/// `D^{-α} |Z_X|^η = |Z_X|^{α+r/2+η-(p+1)/2} π^{rp/2} / (|A|^{r/2}|B|^{p/2} Γ_p(r/2))
/// · Γ_p(r/2+η) / Γ_p(α+r/2+η)`.
pub fn frac_integral_power_closed(
    alpha: FracOrder,
    eta: f64,
    z_x: &SpdMatrix,
    cfg: &RectConfig,
) -> Result<OperatorValue> {
    check_dims(z_x, cfg)?;
    let (p, r) = (cfg.p(), cfg.r());
    let alpha = alpha.check(p)?;
    check_power_shift(p, r, eta)?;
    let det_exponent = alpha + 0.5 * r as f64 + eta - 0.5 * (p as f64 + 1.0);
    let log_magnitude = cfg.log_reduction_constant()
        + power_gamma_ratio(alpha, eta, p, r)?
        + det_exponent * z_x.log_det();
    Ok(OperatorValue {
        log_magnitude,
        sign: 1.0,
        det_exponent,
    })
}

/// `D^{-α} C_K(Z_X) = |Z_X|^{α+r/2-(p+1)/2} π^{rp/2} / (|A|^{r/2}|B|^{p/2} Γ_p(α+r/2))
/// · (r/2)_K / (α+r/2)_K · C_K(Z_X)`.
pub fn frac_integral_zonal_closed(
    alpha: FracOrder,
    kappa: &Partition,
    z_x: &SpdMatrix,
    cfg: &RectConfig,
    table: &ZonalTable,
) -> Result<OperatorValue> {
    check_dims(z_x, cfg)?;
    let (p, r) = (cfg.p(), cfg.r());
    let alpha = alpha.check(p)?;
    let half_r = 0.5 * r as f64;
    let det_exponent = alpha + half_r - 0.5 * (p as f64 + 1.0);
    let zonal = crate::zonal::zonal_eval(kappa, z_x, table)?;
    if zonal == 0.0 {
        return Ok(OperatorValue {
            log_magnitude: f64::NEG_INFINITY,
            sign: 0.0,
            det_exponent,
        });
    }
    let (log_num, sign_num) = log_gen_pochhammer(half_r, kappa);
    let (log_den, sign_den) = log_gen_pochhammer(alpha + half_r, kappa);
    // The reduction constant carries 1/Γ_p(r/2); the closed form has none.
    let log_magnitude = cfg.log_reduction_constant() + log_matrix_gamma(p, half_r)?
        - log_matrix_gamma(p, alpha + half_r)?
        + log_num
        - log_den
        + zonal.abs().ln()
        + det_exponent * z_x.log_det();
    Ok(OperatorValue {
        log_magnitude,
        sign: sign_num * sign_den * zonal.signum(),
        det_exponent,
    })
}

/// Monte Carlo evaluation of the reduced integral for a bounded `f`.
///
/// The kernel `|I-W|^{α-(p+1)/2} |W|^{r/2-(p+1)/2}` is a type-1 matrix beta
/// density up to `B_p(r/2, α)`, so `W` is drawn from that law and only `f` is
/// averaged. Uniform sampling of the cone would give infinite variance as soon
/// as either exponent is `<= -1/2`, which already happens at `p = r = 1`.
pub fn frac_integral_numeric<F>(
    alpha: FracOrder,
    f: F,
    z_x: &SpdMatrix,
    cfg: &RectConfig,
    samples: u64,
    seed: u64,
) -> Result<McEstimate>
where
    F: Fn(&SpdMatrix) -> f64 + Sync,
{
    check_dims(z_x, cfg)?;
    let (p, r) = (cfg.p(), cfg.r());
    let alpha = alpha.check(p)?;
    require(samples >= 1, || "samples >= 1".into())?;
    let half_r = 0.5 * r as f64;
    require(half_r > 0.5 * (p as f64 - 1.0), || {
        format!("r >= p (got p = {p}, r = {r})")
    })?;
    let log_prefactor = cfg.log_reduction_constant() - log_matrix_gamma(p, alpha)?
        + log_matrix_beta(p, half_r, alpha)?
        + (alpha + half_r - 0.5 * (p as f64 + 1.0)) * z_x.log_det();
    let root = z_x.sqrt();
    let moments = sample_moments(samples, seed, |stream| {
        let w = draw_matrix_beta(p, half_r, alpha, stream);
        let v = root.entries() * w.entries() * root.entries();
        match SpdMatrix::symmetrized(v) {
            Ok(v) => f(&v),
            Err(_) => 0.0,
        }
    });
    let est = moments.estimate(seed);
    if !est.value.is_finite() || !est.stderr.is_finite() {
        return Err(Error::NonConvergence(
            "Monte Carlo estimate is not finite; check the integrand".into(),
        ));
    }
    Ok(est.scaled(log_prefactor.exp()))
}

/// The Saigo closed form together with the `3F2` series it contains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaigoValue {
    pub operator: OperatorValue,
    pub series: SeriesValue,
}

/// `D^{-α}[2F1(a,b;c; I - Z_X^{-1/2} Z_Y Z_X^{-1/2}) |Z_Y|^η]
///   = π^{rp/2} / (|A|^{r/2}|B|^{p/2} Γ_p(r/2)) · Γ_p(η+r/2) / Γ_p(α+η+r/2)
///     · |Z_X|^{α+η+r/2-(p+1)/2} · 3F2(a, b, α; c, α+η+r/2; I)`.
///
/// The `3F2` at the identity is required to pass the ratio test of
/// [`hyper_pfq_at_identity`].
pub fn saigo_power_closed(
    sp: &SaigoParams,
    alpha: FracOrder,
    z_x: &SpdMatrix,
    cfg: &RectConfig,
    trunc: &Truncation,
    table: &ZonalTable,
) -> Result<SaigoValue> {
    check_dims(z_x, cfg)?;
    let (p, r) = (cfg.p(), cfg.r());
    let alpha = alpha.check(p)?;
    check_power_shift(p, r, sp.eta)?;
    let half_r = 0.5 * r as f64;
    HyperParams::new(&[sp.a, sp.b], &[sp.c]).validate(trunc.k_max, p)?;
    let params = HyperParams::new(&[sp.a, sp.b, alpha], &[sp.c, alpha + sp.eta + half_r]);
    let series = hyper_pfq_at_identity(&params, p, trunc, table)?;
    let det_exponent = alpha + sp.eta + half_r - 0.5 * (p as f64 + 1.0);
    let operator = if series.value == 0.0 {
        OperatorValue {
            log_magnitude: f64::NEG_INFINITY,
            sign: 0.0,
            det_exponent,
        }
    } else {
        OperatorValue {
            log_magnitude: cfg.log_reduction_constant() + power_gamma_ratio(alpha, sp.eta, p, r)?
                + det_exponent * z_x.log_det()
                + series.value.abs().ln(),
            sign: series.value.signum(),
            det_exponent,
        }
    };
    Ok(SaigoValue { operator, series })
}

/// The integrand `f(Z_Y) = 2F1(a,b;c; I - Z_X^{-1/2} Z_Y Z_X^{-1/2}) |Z_Y|^η`
/// of the Saigo operator, with the Gauss series truncated at `trunc.k_max`.
pub struct SaigoKernel<'a> {
    params: HyperParams,
    eta: f64,
    z_inv_sqrt: nalgebra::DMatrix<f64>,
    trunc: Truncation,
    table: &'a ZonalTable,
}

impl<'a> SaigoKernel<'a> {
    pub fn new(sp: &SaigoParams, z_x: &SpdMatrix, trunc: &Truncation, table: &'a ZonalTable) -> Result<Self> {
        let params = HyperParams::new(&[sp.a, sp.b], &[sp.c]);
        params.validate(trunc.k_max, z_x.dim())?;
        Ok(Self {
            params,
            eta: sp.eta,
            z_inv_sqrt: z_x.inv_sqrt(),
            trunc: *trunc,
            table,
        })
    }

    /// Value at `Z_Y` with `O < Z_Y < Z_X`.
    pub fn eval(&self, z_y: &SpdMatrix) -> Result<f64> {
        let w = &self.z_inv_sqrt * z_y.entries() * &self.z_inv_sqrt;
        let n = w.nrows();
        let arg = nalgebra::DMatrix::identity(n, n) - (&w + w.transpose()) * 0.5;
        let (eigs, _) = symmetric_eigen(&arg);
        let gauss = hyper_pfq_eigs(&self.params, &eigs, &self.trunc, self.table)?;
        Ok(gauss.value * (self.eta * z_y.log_det()).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(z: f64) -> SpdMatrix {
        SpdMatrix::diagonal(&[z]).unwrap()
    }

    #[test]
    fn scalar_power_examples() {
        let cfg = RectConfig::identity(1, 1).unwrap();
        for z in [0.3, 1.0, 2.5] {
            let v = frac_integral_power_closed(FracOrder(1.0), 0.0, &scalar(z), &cfg).unwrap();
            assert_relative_eq!(v.value(), 2.0 * z.sqrt(), max_relative = 1e-13);
            assert_relative_eq!(v.det_exponent, 0.5);
        }
        let v = frac_integral_power_closed(FracOrder(2.0), 0.0, &scalar(1.0), &cfg).unwrap();
        assert_relative_eq!(v.value(), 4.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn scalar_zonal_example() {
        let cfg = RectConfig::identity(1, 1).unwrap();
        let table = ZonalTable::build(2, 1).unwrap();
        let k = Partition::new(&[1]).unwrap();
        let v = frac_integral_zonal_closed(FracOrder(1.0), &k, &scalar(1.0), &cfg, &table).unwrap();
        assert_relative_eq!(v.value(), 2.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn empty_partition_matches_power_form() {
        let a = SpdMatrix::from_rows(&[vec![1.4, 0.2], vec![0.2, 0.7]]).unwrap();
        let b = SpdMatrix::from_rows(&[
            vec![1.0, 0.1, 0.0],
            vec![0.1, 2.0, 0.3],
            vec![0.0, 0.3, 0.5],
        ])
        .unwrap();
        let cfg = RectConfig::new(a, b).unwrap();
        let z = SpdMatrix::from_rows(&[vec![0.8, 0.1], vec![0.1, 0.4]]).unwrap();
        let table = ZonalTable::build(2, 2).unwrap();
        for alpha in [1.0, 1.5, 2.7] {
            let pw = frac_integral_power_closed(FracOrder(alpha), 0.0, &z, &cfg).unwrap();
            let zn = frac_integral_zonal_closed(FracOrder(alpha), &Partition::empty(), &z, &cfg, &table)
                .unwrap();
            assert_relative_eq!(pw.value(), zn.value(), max_relative = 1e-12);
        }
    }

    #[test]
    fn index_law_telescopes() {
        for (p, r) in [(1, 1), (2, 2), (2, 3), (3, 5)] {
            for (alpha, beta, eta) in [(1.0, 1.5, 0.0), (1.2, 2.0, 1.0), (2.5, 1.1, 0.3)] {
                let lhs = power_gamma_ratio(alpha, eta, p, r).unwrap()
                    + power_gamma_ratio(beta, eta + alpha, p, r).unwrap();
                let rhs = power_gamma_ratio(alpha + beta, eta, p, r).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn domain_errors_name_the_condition() {
        let cfg = RectConfig::identity(2, 2).unwrap();
        let z = SpdMatrix::scaled_identity(2, 0.5);
        let err = frac_integral_power_closed(FracOrder(0.4), 0.0, &z, &cfg).unwrap_err();
        assert!(err.to_string().contains("alpha > (p-1)/2"));
        let err = frac_integral_power_closed(FracOrder(1.0), -0.6, &z, &cfg).unwrap_err();
        assert!(err.to_string().contains("r/2 + eta > (p-1)/2"));
        let z3 = SpdMatrix::identity(3);
        assert!(matches!(
            frac_integral_power_closed(FracOrder(1.0), 0.0, &z3, &cfg),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn saigo_collapses_without_kernel() {
        let cfg = RectConfig::identity(2, 3).unwrap();
        let z = SpdMatrix::from_rows(&[vec![0.9, 0.2], vec![0.2, 0.6]]).unwrap();
        let table = ZonalTable::build(25, 2).unwrap();
        let trunc = Truncation::default();
        for (a, b) in [(0.0, 0.7), (0.4, 0.0)] {
            let sp = SaigoParams { a, b, c: 2.0, eta: 0.5 };
            let s = saigo_power_closed(&sp, FracOrder(1.5), &z, &cfg, &trunc, &table).unwrap();
            let pw = frac_integral_power_closed(FracOrder(1.5), 0.5, &z, &cfg).unwrap();
            assert_relative_eq!(s.operator.value(), pw.value(), max_relative = 1e-12);
        }
    }

    #[test]
    fn saigo_scales_as_determinant_power() {
        let cfg = RectConfig::identity(2, 2).unwrap();
        let z = SpdMatrix::from_rows(&[vec![0.9, 0.2], vec![0.2, 0.6]]).unwrap();
        let z2 = SpdMatrix::new(z.entries() * 1.7).unwrap();
        let table = ZonalTable::build(25, 2).unwrap();
        let trunc = Truncation::default();
        let sp = SaigoParams { a: 0.3, b: 0.2, c: 3.0, eta: 0.5 };
        let s1 = saigo_power_closed(&sp, FracOrder(1.0), &z, &cfg, &trunc, &table).unwrap();
        let s2 = saigo_power_closed(&sp, FracOrder(1.0), &z2, &cfg, &trunc, &table).unwrap();
        let s = s1.operator.det_exponent;
        assert_relative_eq!(s2.operator.value() / s1.operator.value(), 1.7f64.powf(2.0 * s), max_relative = 1e-12);
    }

    #[test]
    fn saigo_kernel_at_zero_eta_is_gauss() {
        let table = ZonalTable::build(25, 1).unwrap();
        let trunc = Truncation::default();
        let sp = SaigoParams { a: 0.3, b: 0.2, c: 2.0, eta: 0.0 };
        let zx = scalar(2.0);
        let kernel = SaigoKernel::new(&sp, &zx, &trunc, &table).unwrap();
        let v = kernel.eval(&scalar(1.0)).unwrap();
        let direct = hyper_pfq_eigs(&HyperParams::new(&[0.3, 0.2], &[2.0]), &[0.5], &trunc, &table)
            .unwrap()
            .value;
        assert_relative_eq!(v, direct, max_relative = 1e-14);
    }
}

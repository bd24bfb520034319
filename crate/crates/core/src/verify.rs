//! Oracle-comparison suites. Each suite compares a closed form or series
//! against an independent evaluation (Monte Carlo, a direct formula or a
//! limit) and returns a JSON-serializable report.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::fracint::{
    frac_integral_numeric, frac_integral_power_closed, frac_integral_zonal_closed,
    saigo_power_closed, FracOrder, SaigoKernel, SaigoParams,
};
use crate::gamma::{log_matrix_beta, log_matrix_gamma, pathway_factor};
use crate::hyper::{
    gauss_2f1_rect, hyper_pfq, pathway_det_limit, pathway_det_limit_eigs, HyperParams, Truncation,
};
use crate::mc::{mc_integrate_rect, mc_integrate_unit_cone, McEstimate};
use crate::partition::Partition;
use crate::rng::Stream;
use crate::sample::verify_sum_density;
use crate::spd::{RectConfig, SpdMatrix};
use crate::zonal::{zonal_eval, ZonalTable, DEFAULT_KMAX_CEILING};
use crate::SCHEMA;

/// One comparison. `z_score` is set for statistical checks, `error` for
/// deterministic ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub expected: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `|est - expected| < threshold · stderr`.
    pub fn z_test(name: &str, est: McEstimate, expected: f64, threshold: f64) -> Self {
        let z = est.z_score(expected);
        Self {
            name: name.into(),
            statistic: est.value,
            expected,
            stderr: Some(est.stderr),
            z_score: Some(z),
            error: None,
            threshold,
            pass: z.abs() < threshold,
        }
    }

    /// Passes when `statistic <= bound`.
    pub fn upper_bound(name: &str, statistic: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            expected: bound,
            stderr: None,
            z_score: None,
            error: None,
            threshold: bound,
            pass: statistic <= bound,
        }
    }

    pub fn abs_error(name: &str, statistic: f64, expected: f64, tol: f64) -> Self {
        let err = (statistic - expected).abs();
        Self {
            name: name.into(),
            statistic,
            expected,
            stderr: None,
            z_score: None,
            error: Some(err),
            threshold: tol,
            pass: err < tol,
        }
    }

    /// Relative error, measured against `max(|expected|, tiny)`.
    pub fn rel_error(name: &str, statistic: f64, expected: f64, tol: f64) -> Self {
        let err = (statistic - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        Self {
            error: Some(err),
            pass: err < tol,
            ..Self::abs_error(name, statistic, expected, tol)
        }
    }

    /// A predicate with no natural statistic, such as an error-decay pattern.
    pub fn predicate(name: &str, statistic: f64, expected: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            statistic,
            expected,
            stderr: None,
            z_score: None,
            error: None,
            threshold: expected,
            pass,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Euler,
    Binomial,
    FracPower,
    FracZonal,
    Saigo,
    Beta,
    SumDensity,
    Pathway,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Euler,
        Suite::Binomial,
        Suite::FracPower,
        Suite::FracZonal,
        Suite::Saigo,
        Suite::Beta,
        Suite::SumDensity,
        Suite::Pathway,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Euler => "euler",
            Suite::Binomial => "binomial",
            Suite::FracPower => "fracpower",
            Suite::FracZonal => "fraczonal",
            Suite::Saigo => "saigo",
            Suite::Beta => "beta",
            Suite::SumDensity => "sumdensity",
            Suite::Pathway => "pathway",
        }
    }

    fn default_samples(self) -> u64 {
        match self {
            Suite::Euler | Suite::FracPower | Suite::FracZonal | Suite::Saigo | Suite::Beta => {
                1_000_000
            }
            Suite::SumDensity => 100_000,
            Suite::Binomial | Suite::Pathway => 0,
        }
    }

    /// Share of checks that must pass. The closed-form grids allow the
    /// occasional 3-sigma excursion.
    fn required_fraction(self) -> f64 {
        match self {
            Suite::FracPower | Suite::FracZonal => 0.95,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::Parse(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Knobs shared by the suites. `None` selects the suite default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub samples: Option<u64>,
    pub seed: u64,
    pub p: Option<usize>,
    pub r1: Option<usize>,
    pub r2: Option<usize>,
    pub k_max: Option<usize>,
    pub k_max_ceiling: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            samples: None,
            seed: 42,
            p: None,
            r1: None,
            r2: None,
            k_max: None,
            k_max_ceiling: DEFAULT_KMAX_CEILING,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub suite: Suite,
    pub seed: u64,
    pub samples: u64,
    pub k_max: usize,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub total: usize,
    pub required_fraction: f64,
    pub pass: bool,
}

/// Runs one suite.
pub fn run_suite(suite: Suite, params: &VerifyParams) -> Result<VerifyReport> {
    let samples = params.samples.unwrap_or(suite.default_samples());
    let k_max = params.k_max.unwrap_or(25);
    if let Some(p) = params.p {
        require((1..=8).contains(&p), || format!("1 <= p <= 8 (got p = {p})"))?;
    }
    let ctx = Ctx {
        samples,
        seed: params.seed,
        k_max,
        ceiling: params.k_max_ceiling,
        params,
    };
    if suite.default_samples() > 0 {
        require(samples >= 2, || "samples >= 2".into())?;
    }
    let checks = match suite {
        Suite::Euler => euler(&ctx)?,
        Suite::Binomial => binomial(&ctx)?,
        Suite::FracPower => frac_power(&ctx)?,
        Suite::FracZonal => frac_zonal(&ctx)?,
        Suite::Saigo => saigo(&ctx)?,
        Suite::Beta => beta(&ctx)?,
        Suite::SumDensity => sum_density(&ctx)?,
        Suite::Pathway => pathway(&ctx)?,
    };
    let passed = checks.iter().filter(|c| c.pass).count();
    let total = checks.len();
    let required_fraction = suite.required_fraction();
    Ok(VerifyReport {
        schema: SCHEMA.into(),
        suite,
        seed: params.seed,
        samples,
        k_max,
        pass: total > 0 && passed as f64 >= required_fraction * total as f64,
        checks,
        passed,
        total,
        required_fraction,
    })
}

struct Ctx<'a> {
    samples: u64,
    seed: u64,
    k_max: usize,
    ceiling: usize,
    params: &'a VerifyParams,
}

impl Ctx<'_> {
    fn dims(&self, defaults: &[usize]) -> Vec<usize> {
        match self.params.p {
            Some(p) => vec![p],
            None => defaults.to_vec(),
        }
    }

    /// Seed for the `i`-th Monte Carlo case of a suite.
    fn case_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

/// A fixed, well-conditioned SPD matrix with diagonal `d` and constant off-diagonal `off`.
fn banded(p: usize, d: f64, off: f64) -> SpdMatrix {
    let m = DMatrix::from_fn(p, p, |i, j| if i == j { d } else { off });
    SpdMatrix::new(m).expect("diagonally dominant")
}

/// Non-trivial `A` and `B`; every suite result is independent of them.
fn test_config(p: usize, r: usize) -> Result<RectConfig> {
    RectConfig::new(banded(p, 1.2, 0.25), banded(r, 0.8, 0.15))
}

/// The evaluation point `Z_X` used by the operator suites.
fn operator_point(p: usize) -> SpdMatrix {
    let m = DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            0.9 - 0.3 * i as f64 / p as f64
        } else {
            0.15
        }
    });
    SpdMatrix::new(m).expect("diagonally dominant")
}

fn diag_head(values: &[f64], p: usize) -> Result<SpdMatrix> {
    let d: Vec<f64> = (0..p).map(|i| values[i % values.len()] / (1 + i / values.len()) as f64).collect();
    SpdMatrix::diagonal(&d)
}

/// Random SPD matrix with eigenvalues in `(lo, hi)` and a random rotation.
fn random_spd(p: usize, lo: f64, hi: f64, stream: &mut Stream) -> Result<SpdMatrix> {
    let g = DMatrix::from_fn(p, p, |_, _| stream.normal());
    let q = g.qr().q();
    let eigs: Vec<f64> = (0..p).map(|_| stream.uniform_in(lo, hi)).collect();
    SpdMatrix::from_spectrum(&q, &eigs)
}

fn euler(ctx: &Ctx) -> Result<Vec<Check>> {
    let (a, b, c) = (1.0, 0.5, 3.0);
    let mut checks = Vec::new();
    for (i, p) in ctx.dims(&[2]).into_iter().enumerate() {
        let r = p;
        let cfg = test_config(p, r)?;
        let z_y = diag_head(&[0.3, 0.1], p)?;
        let table = ZonalTable::shared(ctx.k_max, p, ctx.ceiling)?;
        let series = gauss_2f1_rect(a, b, c, &cfg, &z_y, &Truncation::with_k_max(ctx.k_max), &table)?;
        let half_r = 0.5 * r as f64;
        let half_p1 = 0.5 * (p as f64 + 1.0);
        let log_norm = -cfg.log_reduction_constant() + log_matrix_gamma(p, c + half_r)?
            - log_matrix_gamma(p, a + half_r)?
            - log_matrix_gamma(p, c - a)?;
        let zy = z_y.entries().clone();
        let integrand = move |z: &SpdMatrix| {
            let eigs = z.eigenvalues();
            if eigs.iter().any(|&l| l >= 1.0) {
                return 0.0;
            }
            let one_minus: f64 = eigs.iter().map(|&l| (1.0 - l).ln()).sum();
            let cross = (DMatrix::identity(p, p) - &zy * z.entries()).determinant();
            (a * z.log_det() + (c - a - half_p1) * one_minus - b * cross.ln()).exp()
        };
        let est = mc_integrate_rect(integrand, &cfg, ctx.samples, ctx.case_seed(i))?;
        checks.push(Check::z_test(
            &format!("p={p} r={r}: Euler integral vs 2F1"),
            est.scaled(log_norm.exp()),
            series.value,
            3.0,
        ));
    }
    Ok(checks)
}

fn binomial(ctx: &Ctx) -> Result<Vec<Check>> {
    let trunc = Truncation::with_k_max(ctx.k_max);
    let mut stream = Stream::new(ctx.seed, 0);
    let mut checks = Vec::new();
    for p in ctx.dims(&[2, 3]) {
        let table = ZonalTable::shared(ctx.k_max, p, ctx.ceiling)?;
        for b in [0.7, 1.5, 2.5] {
            for case in 0..3 {
                let z = random_spd(p, 0.01, 0.3, &mut stream)?;
                let series = hyper_pfq(&HyperParams::new(&[b], &[]), &z, &trunc, &table)?;
                let direct: f64 = z.eigenvalues().iter().map(|&l| -b * (1.0 - l).ln()).sum::<f64>().exp();
                checks.push(Check::abs_error(
                    &format!("p={p} b={b} case {case}: 1F0 vs |I-Z|^-b"),
                    series.value,
                    direct,
                    1e-8,
                ));
            }
        }
    }
    Ok(checks)
}

fn frac_grid(ctx: &Ctx) -> Vec<(usize, usize, f64)> {
    let mut grid = Vec::new();
    for p in ctx.dims(&[1, 2]) {
        for r in [p, p + 1] {
            for alpha in [1.0, 1.5] {
                grid.push((p, r, alpha));
            }
        }
    }
    grid
}

fn frac_power(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut i = 0;
    for (p, r, alpha) in frac_grid(ctx) {
        let cfg = test_config(p, r)?;
        let z = operator_point(p);
        for eta in [0.0, 1.0] {
            let closed = frac_integral_power_closed(FracOrder(alpha), eta, &z, &cfg)?;
            let est = frac_integral_numeric(
                FracOrder(alpha),
                |v: &SpdMatrix| (eta * v.log_det()).exp(),
                &z,
                &cfg,
                ctx.samples,
                ctx.case_seed(i),
            )?;
            i += 1;
            checks.push(Check::z_test(
                &format!("p={p} r={r} alpha={alpha} eta={eta}"),
                est,
                closed.value(),
                3.0,
            ));
        }
    }
    Ok(checks)
}

fn frac_zonal(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut i = 0;
    for (p, r, alpha) in frac_grid(ctx) {
        let cfg = test_config(p, r)?;
        let z = operator_point(p);
        let table = ZonalTable::shared(2, p, ctx.ceiling)?;
        for parts in [[1u32], [2u32]] {
            let kappa = Partition::new(&parts)?;
            let closed = frac_integral_zonal_closed(FracOrder(alpha), &kappa, &z, &cfg, &table)?;
            let est = frac_integral_numeric(
                FracOrder(alpha),
                |v: &SpdMatrix| zonal_eval(&kappa, v, &table).unwrap_or(f64::NAN),
                &z,
                &cfg,
                ctx.samples,
                ctx.case_seed(i),
            )?;
            i += 1;
            checks.push(Check::z_test(
                &format!("p={p} r={r} alpha={alpha} K={kappa}"),
                est,
                closed.value(),
                3.0,
            ));
        }
        let empty = frac_integral_zonal_closed(FracOrder(alpha), &Partition::empty(), &z, &cfg, &table)?;
        let power = frac_integral_power_closed(FracOrder(alpha), 0.0, &z, &cfg)?;
        checks.push(Check::rel_error(
            &format!("p={p} r={r} alpha={alpha} K=(): zonal form vs power form"),
            empty.value(),
            power.value(),
            1e-12,
        ));
    }
    Ok(checks)
}

fn saigo(ctx: &Ctx) -> Result<Vec<Check>> {
    let trunc = Truncation::with_k_max(ctx.k_max);
    let mut checks = Vec::new();
    for (p, r) in [(1, 1), (2, 3)] {
        let cfg = test_config(p, r)?;
        let z = operator_point(p);
        let table = ZonalTable::shared(ctx.k_max, p, ctx.ceiling)?;
        let sp = SaigoParams { a: 0.0, b: 0.7, c: 2.5, eta: 0.5 };
        let s = saigo_power_closed(&sp, FracOrder(1.5), &z, &cfg, &trunc, &table)?;
        let power = frac_integral_power_closed(FracOrder(1.5), sp.eta, &z, &cfg)?;
        checks.push(Check::rel_error(
            &format!("p={p} r={r} a=0: Saigo vs power form"),
            s.operator.value(),
            power.value(),
            1e-12,
        ));
    }
    for (i, p) in ctx.dims(&[1]).into_iter().enumerate() {
        let r = p;
        let cfg = test_config(p, r)?;
        let z = operator_point(p);
        let table = ZonalTable::shared(ctx.k_max, p, ctx.ceiling)?;
        let sp = SaigoParams { a: 0.3, b: 0.2, c: 2.0, eta: 0.5 };
        let alpha = FracOrder(1.0);
        let closed = saigo_power_closed(&sp, alpha, &z, &cfg, &trunc, &table)?;
        let kernel = SaigoKernel::new(&sp, &z, &trunc, &table)?;
        let est = frac_integral_numeric(
            alpha,
            |v: &SpdMatrix| kernel.eval(v).unwrap_or(f64::NAN),
            &z,
            &cfg,
            ctx.samples,
            ctx.case_seed(i),
        )?;
        checks.push(Check::z_test(
            &format!("p={p} r={r} a=0.3 b=0.2 c=2 eta=0.5 alpha=1: closed form vs kernel MC"),
            est,
            closed.operator.value(),
            3.0,
        ));
    }
    Ok(checks)
}

fn beta(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut i = 0;
    for p in ctx.dims(&[2]) {
        let half_p1 = 0.5 * (p as f64 + 1.0);
        for (alpha, beta) in [(2.0, 2.0), (1.5, 2.5)] {
            let expected = log_matrix_beta(p, alpha, beta)?.exp();
            let type1 = mc_integrate_unit_cone(
                |w: &SpdMatrix| {
                    let one_minus: f64 = w.eigenvalues().iter().map(|&l| (1.0 - l).ln()).sum();
                    ((alpha - half_p1) * w.log_det() + (beta - half_p1) * one_minus).exp()
                },
                p,
                ctx.samples,
                ctx.case_seed(i),
            )?;
            // S = (I-W)^{-1/2} W (I-W)^{-1/2} maps the unit cone onto S > O with
            // dS = |I-W|^{-(p+1)} dW.
            let type2 = mc_integrate_unit_cone(
                |w: &SpdMatrix| {
                    let root = w.spectral_map(|l| (1.0 - l).powf(-0.5));
                    let s = &root * w.entries() * &root;
                    let s = (&s + s.transpose()) * 0.5;
                    let det_s = s.determinant();
                    let det_i_s = (DMatrix::identity(p, p) + &s).determinant();
                    let one_minus: f64 = w.eigenvalues().iter().map(|&l| (1.0 - l).ln()).sum();
                    ((alpha - half_p1) * det_s.ln() - (alpha + beta) * det_i_s.ln()
                        - 2.0 * half_p1 * one_minus)
                        .exp()
                },
                p,
                ctx.samples,
                ctx.case_seed(i + 1),
            )?;
            i += 2;
            checks.push(Check::z_test(
                &format!("p={p} alpha={alpha} beta={beta}: type-1 integral"),
                type1,
                expected,
                3.0,
            ));
            checks.push(Check::z_test(
                &format!("p={p} alpha={alpha} beta={beta}: type-2 integral"),
                type2,
                expected,
                3.0,
            ));
        }
    }
    Ok(checks)
}

fn sum_density(ctx: &Ctx) -> Result<Vec<Check>> {
    let p_cases = &ctx.params;
    let cases: Vec<(usize, usize, usize)> = match (p_cases.p, p_cases.r1, p_cases.r2) {
        (None, None, None) => vec![(1, 1, 1), (2, 3, 4)],
        (p, r1, r2) => {
            let p = p.unwrap_or(1);
            vec![(p, r1.unwrap_or(p), r2.unwrap_or(p))]
        }
    };
    let mut checks = Vec::new();
    for (i, (p, r1, r2)) in cases.into_iter().enumerate() {
        let report = verify_sum_density(
            &test_config(p, r1)?,
            &test_config(p, r2)?,
            ctx.samples,
            ctx.case_seed(i),
        )?;
        for mut check in report.checks {
            check.name = format!("p={p} r1={r1} r2={r2}: {}", check.name);
            checks.push(check);
        }
    }
    Ok(checks)
}

fn pathway(ctx: &Ctx) -> Result<Vec<Check>> {
    let qs = [1.01, 1.001, 1.0001];
    let mut checks = Vec::new();
    let decay = |name: &str, errors: &[f64], checks: &mut Vec<Check>| {
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            checks.push(Check::predicate(
                &format!("{name}: error reduction per step"),
                ratio,
                10.0,
                (5.0..=20.0).contains(&ratio),
            ));
        }
        checks.push(Check::upper_bound(
            &format!("{name}: relative error at q = {}", qs[qs.len() - 1]),
            errors[errors.len() - 1],
            1e-3,
        ));
    };

    for p in ctx.dims(&[1, 2, 3]) {
        let kappa = Partition::new(&[3, 2, 1][..p.min(3)])?;
        let errors: Vec<f64> = qs
            .iter()
            .map(|&q| pathway_factor(q, &kappa).map(|v| (v - 1.0).abs()))
            .collect::<Result<_>>()?;
        decay(&format!("p={p} K={kappa}: (q-1)^k (1/(q-1))_K"), &errors, &mut checks);

        let z = operator_point(p);
        let limit = (-z.trace()).exp();
        let errors: Vec<f64> = qs
            .iter()
            .map(|&q| pathway_det_limit(q, &z).map(|v| (v - limit).abs() / limit))
            .collect::<Result<_>>()?;
        decay(&format!("p={p}: |I+(q-1)Z|^(-1/(q-1))"), &errors, &mut checks);

        for &q in &qs {
            let zero = pathway_det_limit_eigs(q, &vec![0.0; p])?;
            checks.push(Check::abs_error(&format!("p={p} q={q}: Z=0"), zero, 1.0, f64::MIN_POSITIVE));
            let empty = pathway_factor(q, &Partition::empty())?;
            checks.push(Check::abs_error(&format!("p={p} q={q}: K=()"), empty, 1.0, f64::MIN_POSITIVE));
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.name()));
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Parse(_))));
    }

    #[test]
    fn check_constructors() {
        let est = McEstimate { value: 1.1, stderr: 0.05, n: 100, seed: 1 };
        let c = Check::z_test("x", est, 1.0, 3.0);
        assert!(c.pass);
        assert!((c.z_score.unwrap() - 2.0).abs() < 1e-12);
        assert!(!Check::z_test("x", est, 0.8, 3.0).pass);
        assert!(Check::upper_bound("d", 0.1, 0.2).pass);
        assert!(!Check::abs_error("e", 1.0, 1.1, 1e-3).pass);
        assert!(Check::rel_error("e", 100.0, 100.0 + 1e-11, 1e-12).pass);
    }

    #[test]
    fn binomial_and_pathway_pass() {
        let params = VerifyParams::default();
        for suite in [Suite::Binomial, Suite::Pathway] {
            let report = run_suite(suite, &params).unwrap();
            assert!(report.pass, "{}", serde_json::to_string_pretty(&report).unwrap());
        }
    }

    #[test]
    fn small_runs_are_reproducible() {
        let params = VerifyParams {
            samples: Some(20_000),
            ..VerifyParams::default()
        };
        let a = serde_json::to_string(&run_suite(Suite::Beta, &params).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Beta, &params).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

//! `mvfrac`: JSON front end to the mvfrac library.
//!
//! Exit codes: 0 success, 1 failed verification, 2 domain or numerical
//! error, 64 malformed usage.

mod args;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nalgebra::DMatrix;
use serde_json::{json, Value};

use args::{Cli, Command, EvalCommand, RectArg, SampleArgs, SampleKind, SuiteArg, VerifyArgs, ZArg};
use mvfrac::fracint::{
    frac_integral_power_closed, frac_integral_zonal_closed, saigo_power_closed, FracOrder,
    OperatorValue, SaigoParams,
};
use mvfrac::gamma::{log_gen_pochhammer, log_matrix_beta, log_matrix_gamma, pathway_factor};
use mvfrac::hyper::{hyper_pfq, pathway_det_limit_eigs, HyperParams, SeriesValue, Truncation};
use mvfrac::sample::{
    sample_matrix_gamma, sample_rect_exponential, sample_uniform_spd_unit, MatrixGammaSpec,
};
use mvfrac::spd::{matrix_from_json, matrix_to_rows, rect_transform};
use mvfrac::verify::{run_suite, Suite, VerifyParams};
use mvfrac::zonal::{zonal_eval, ZonalTable, DEFAULT_KMAX_CEILING};
use mvfrac::{Error, Partition, RectConfig, SpdMatrix, SCHEMA};

const EXIT_FAIL: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// What a command produced: JSON lines and whether a verification passed.
struct Outcome {
    lines: Vec<Value>,
    pass: bool,
}

impl Outcome {
    fn one(v: Value) -> Self {
        Self { lines: vec![v], pass: true }
    }
}

fn main() -> ExitCode {
    let argv = match config::merge_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => return fail(&Error::Parse(msg)),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = kmax_ceiling().and_then(|ceiling| match &cli.command {
        Command::Eval(cmd) => eval(cmd, ceiling).map(Outcome::one),
        Command::Verify(v) => verify(v, ceiling),
        Command::Sample(s) => sample(s),
    });
    match result {
        Ok(out) => {
            if let Err(e) = write_lines(&cli, &out.lines) {
                eprintln!("cannot write output: {e}");
                return ExitCode::from(EXIT_DOMAIN);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e) => fail(&e),
    }
}

fn write_lines(cli: &Cli, lines: &[Value]) -> std::io::Result<()> {
    let mut text = String::new();
    for v in lines {
        text.push_str(&serde_json::to_string(v).expect("JSON values serialize"));
        text.push('\n');
    }
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension(_) => "dimension",
        Error::NotPositiveDefinite(_) => "not_positive_definite",
        Error::Degenerate(_) => "degenerate",
        Error::Domain(_) => "domain",
        Error::NonConvergence(_) => "non_convergence",
        Error::Divergence(_) => "divergence",
        Error::Resource(_) => "resource",
        Error::MissingEntry(_) => "missing_entry",
        Error::Parse(_) => "usage",
    }
}

fn fail(e: &Error) -> ExitCode {
    let record = json!({
        "schema": SCHEMA,
        "error": { "kind": error_kind(e), "message": e.to_string() },
    });
    println!("{record}");
    ExitCode::from(if matches!(e, Error::Parse(_)) { EXIT_USAGE } else { EXIT_DOMAIN })
}

fn kmax_ceiling() -> mvfrac::Result<usize> {
    match std::env::var("MVFRAC_KMAX_CEILING") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("MVFRAC_KMAX_CEILING must be an integer (got {v:?})"))),
        Err(_) => Ok(DEFAULT_KMAX_CEILING),
    }
}

fn file_matrices(z: &ZArg) -> mvfrac::Result<Option<serde_json::Map<String, Value>>> {
    let Some(path) = &z.file else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(Some(map)),
        _ => Err(Error::Parse(format!("{} must hold a JSON object", path.display()))),
    }
}

fn matrix_value(v: &Value) -> mvfrac::Result<DMatrix<f64>> {
    matrix_from_json(&v.to_string())
}

fn resolve_z(z: &ZArg) -> mvfrac::Result<SpdMatrix> {
    if let Some(text) = &z.z {
        return SpdMatrix::new(matrix_from_json(text)?);
    }
    if let Some(eigs) = &z.eigs {
        return SpdMatrix::diagonal(eigs);
    }
    if let Some(map) = file_matrices(z)? {
        if let Some(v) = map.get("Z") {
            return SpdMatrix::new(matrix_value(v)?);
        }
    }
    Err(Error::Parse("a matrix is required: --z, --eigs or a \"Z\" entry in --file".into()))
}

/// Eigenvalues of the argument; zero eigenvalues are allowed here.
fn resolve_eigs(z: &ZArg) -> mvfrac::Result<Vec<f64>> {
    if let Some(eigs) = &z.eigs {
        return Ok(eigs.clone());
    }
    Ok(resolve_z(z)?.eigenvalues().to_vec())
}

fn resolve_rect(rect: &RectArg, z: &ZArg, p: usize) -> mvfrac::Result<RectConfig> {
    let file = file_matrices(z)?;
    let pick = |inline: &Option<String>, key: &str, dim: usize| -> mvfrac::Result<SpdMatrix> {
        if let Some(text) = inline {
            return SpdMatrix::new(matrix_from_json(text)?);
        }
        if let Some(v) = file.as_ref().and_then(|m| m.get(key)) {
            return SpdMatrix::new(matrix_value(v)?);
        }
        Ok(SpdMatrix::identity(dim))
    };
    RectConfig::new(pick(&rect.amat, "A", p)?, pick(&rect.bmat, "B", rect.r)?)
}

fn operator_json(v: &OperatorValue) -> Value {
    json!({
        "value": v.value(),
        "log_magnitude": v.log_magnitude,
        "sign": v.sign,
        "det_exponent": v.det_exponent,
    })
}

fn series_json(s: &SeriesValue) -> Value {
    json!({
        "value": s.value,
        "k_max": s.k_max,
        "tail_estimate": s.tail_estimate,
        "last_term": s.last_term,
        "ratio": s.ratio,
        "converged": s.converged,
        "meets_tolerance": s.meets_tolerance,
    })
}

fn record(op: &str, inputs: Value, mut result: Value) -> Value {
    let obj = result.as_object_mut().expect("result is an object");
    obj.insert("schema".into(), SCHEMA.into());
    obj.insert("op".into(), op.into());
    obj.insert("inputs".into(), inputs);
    result
}

fn eval(cmd: &EvalCommand, ceiling: usize) -> mvfrac::Result<Value> {
    Ok(match cmd {
        EvalCommand::Gamma { p, alpha } => {
            let log = log_matrix_gamma(*p, *alpha)?;
            record("gamma", json!({"p": p, "alpha": alpha}), json!({"log_value": log, "value": log.exp()}))
        }
        EvalCommand::Beta { p, alpha, beta } => {
            let log = log_matrix_beta(*p, *alpha, *beta)?;
            record(
                "beta",
                json!({"p": p, "alpha": alpha, "beta": beta}),
                json!({"log_value": log, "value": log.exp()}),
            )
        }
        EvalCommand::Pochhammer { a, k } => {
            let kappa = Partition::parse(k)?;
            let (log, sign) = log_gen_pochhammer(*a, &kappa);
            let value = if sign == 0.0 { 0.0 } else { sign * log.exp() };
            record(
                "pochhammer",
                json!({"a": a, "k": kappa.parts()}),
                json!({"value": value, "log_magnitude": log, "sign": sign}),
            )
        }
        EvalCommand::Zonal { k, z } => {
            let kappa = Partition::parse(k)?;
            let zm = resolve_z(z)?;
            let table = ZonalTable::build_with_ceiling(kappa.weight(), zm.dim(), ceiling)?;
            let value = zonal_eval(&kappa, &zm, &table)?;
            record(
                "zonal",
                json!({"k": kappa.parts(), "z": matrix_to_rows(zm.entries())}),
                json!({"value": value}),
            )
        }
        EvalCommand::Hyper { num, den, kmax, tail_tol, z } => {
            let zm = resolve_z(z)?;
            let trunc = Truncation::new(*kmax, *tail_tol)?;
            let table = ZonalTable::build_with_ceiling(*kmax, zm.dim(), ceiling)?;
            let series = hyper_pfq(&HyperParams::new(num, den), &zm, &trunc, &table)?;
            record(
                "hyper",
                json!({"num": num, "den": den, "z": matrix_to_rows(zm.entries()), "kmax": kmax, "tail_tol": tail_tol}),
                series_json(&series),
            )
        }
        EvalCommand::FracintPower { alpha, eta, rect, z } => {
            let zm = resolve_z(z)?;
            let cfg = resolve_rect(rect, z, zm.dim())?;
            let v = frac_integral_power_closed(FracOrder(*alpha), *eta, &zm, &cfg)?;
            record(
                "fracint-power",
                json!({"alpha": alpha, "eta": eta, "r": rect.r, "z": matrix_to_rows(zm.entries()),
                       "a": matrix_to_rows(cfg.a().entries()), "b": matrix_to_rows(cfg.b().entries())}),
                operator_json(&v),
            )
        }
        EvalCommand::FracintZonal { alpha, k, rect, z } => {
            let kappa = Partition::parse(k)?;
            let zm = resolve_z(z)?;
            let cfg = resolve_rect(rect, z, zm.dim())?;
            let table = ZonalTable::build_with_ceiling(kappa.weight(), zm.dim(), ceiling)?;
            let v = frac_integral_zonal_closed(FracOrder(*alpha), &kappa, &zm, &cfg, &table)?;
            record(
                "fracint-zonal",
                json!({"alpha": alpha, "k": kappa.parts(), "r": rect.r, "z": matrix_to_rows(zm.entries()),
                       "a": matrix_to_rows(cfg.a().entries()), "b": matrix_to_rows(cfg.b().entries())}),
                operator_json(&v),
            )
        }
        EvalCommand::Saigo { a, b, c, eta, alpha, kmax, rect, z } => {
            let zm = resolve_z(z)?;
            let cfg = resolve_rect(rect, z, zm.dim())?;
            let table = ZonalTable::build_with_ceiling(*kmax, zm.dim(), ceiling)?;
            let sp = SaigoParams { a: *a, b: *b, c: *c, eta: *eta };
            let v = saigo_power_closed(&sp, FracOrder(*alpha), &zm, &cfg, &Truncation::with_k_max(*kmax), &table)?;
            let mut out = operator_json(&v.operator);
            out["series"] = series_json(&v.series);
            record(
                "saigo",
                json!({"a": a, "b": b, "c": c, "eta": eta, "alpha": alpha, "kmax": kmax, "r": rect.r,
                       "z": matrix_to_rows(zm.entries())}),
                out,
            )
        }
        EvalCommand::Pathway { q, k, z } => {
            let eigs = resolve_eigs(z)?;
            let value = pathway_det_limit_eigs(*q, &eigs)?;
            let mut out = json!({"value": value, "limit": (-eigs.iter().sum::<f64>()).exp()});
            let mut inputs = json!({"q": q, "eigs": eigs});
            if let Some(k) = k {
                let kappa = Partition::parse(k)?;
                out["factor"] = pathway_factor(*q, &kappa)?.into();
                inputs["k"] = json!(kappa.parts());
            }
            record("pathway", inputs, out)
        }
    })
}

fn suite_of(s: SuiteArg) -> Suite {
    match s {
        SuiteArg::Euler => Suite::Euler,
        SuiteArg::Binomial => Suite::Binomial,
        SuiteArg::Fracpower => Suite::FracPower,
        SuiteArg::Fraczonal => Suite::FracZonal,
        SuiteArg::Saigo => Suite::Saigo,
        SuiteArg::Beta => Suite::Beta,
        SuiteArg::Sumdensity => Suite::SumDensity,
        SuiteArg::Pathway => Suite::Pathway,
    }
}

fn verify(v: &VerifyArgs, ceiling: usize) -> mvfrac::Result<Outcome> {
    let params = VerifyParams {
        samples: v.samples,
        seed: v.seed,
        p: v.p,
        r1: v.r1,
        r2: v.r2,
        k_max: v.kmax,
        k_max_ceiling: ceiling,
    };
    let report = run_suite(suite_of(v.suite), &params)?;
    let value = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome { lines: vec![value], pass: report.pass })
}

fn sample(s: &SampleArgs) -> mvfrac::Result<Outcome> {
    let line = |i: usize, extra: Value| {
        let mut v = json!({"schema": SCHEMA, "kind": kind_name(s.kind), "seed": s.seed, "index": i});
        for (k, x) in extra.as_object().expect("object").iter() {
            v[k] = x.clone();
        }
        v
    };
    let lines = match s.kind {
        SampleKind::MatrixGamma => {
            let shape = s
                .shape
                .ok_or_else(|| Error::Parse("matrix-gamma needs --shape".into()))?;
            let spec = MatrixGammaSpec::new(s.p, shape)?;
            sample_matrix_gamma(&spec, s.n, s.seed)?
                .iter()
                .enumerate()
                .map(|(i, w)| line(i, json!({"matrix": matrix_to_rows(w.entries())})))
                .collect()
        }
        SampleKind::RectExponential => {
            let r = s
                .r
                .ok_or_else(|| Error::Parse("rect-exponential needs --r".into()))?;
            let rect = RectArg { r, amat: s.amat.clone(), bmat: s.bmat.clone() };
            let cfg = resolve_rect(&rect, &ZArg::default(), s.p)?;
            let mut out = Vec::new();
            for (i, x) in sample_rect_exponential(&cfg, s.n, s.seed).iter().enumerate() {
                let z = rect_transform(x, &cfg)?;
                out.push(line(
                    i,
                    json!({"matrix": matrix_to_rows(x.entries()), "z": matrix_to_rows(z.entries())}),
                ));
            }
            out
        }
        SampleKind::UniformUnitCone => sample_uniform_spd_unit(s.p, s.n, s.seed)?
            .samples
            .iter()
            .enumerate()
            .map(|(i, w)| line(i, json!({"matrix": matrix_to_rows(w.entries())})))
            .collect(),
    };
    Ok(Outcome { lines, pass: true })
}

fn kind_name(k: SampleKind) -> &'static str {
    match k {
        SampleKind::MatrixGamma => "matrix-gamma",
        SampleKind::RectExponential => "rect-exponential",
        SampleKind::UniformUnitCone => "uniform-unit-cone",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_error_kind_has_a_name() {
        let errs = [
            Error::Dimension(String::new()),
            Error::Domain(String::new()),
            Error::Parse(String::new()),
        ];
        let names: Vec<_> = errs.iter().map(error_kind).collect();
        assert_eq!(names, ["dimension", "domain", "usage"]);
    }

    #[test]
    fn resolves_eigs_and_inline_matrices() {
        let z = ZArg { eigs: Some(vec![0.5, 0.2]), ..ZArg::default() };
        assert_eq!(resolve_z(&z).unwrap().dim(), 2);
        let z = ZArg { z: Some("[[1.0, 0.2], [0.2, 0.5]]".into()), ..ZArg::default() };
        assert!((resolve_z(&z).unwrap().trace() - 1.5).abs() < 1e-15);
        assert!(matches!(resolve_z(&ZArg::default()), Err(Error::Parse(_))));
    }
}

//! Browser bindings for three operations: zonal polynomials of a given
//! degree, a truncated `pFq` series, and the fractional integral of
//! `|Z|^η` in closed form.
//!
//! Every function takes eigenvalues or parameter lists as comma-separated
//! text, straight from form inputs, and returns a JSON string. Failures
//! come back as `{"error": {"kind", "message"}}` rather than exceptions.

use mvfrac::fracint::{frac_integral_power_closed, FracOrder};
use mvfrac::hyper::{hyper_pfq_eigs, HyperParams, Truncation};
use mvfrac::zonal::{ZonalTable, DEFAULT_KMAX_CEILING};
use mvfrac::{Error, RectConfig, Result, SpdMatrix, SCHEMA};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn parse_list(name: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("{name}: '{s}' is not a number")))
        })
        .collect()
}

fn parse_eigs(text: &str) -> Result<Vec<f64>> {
    let eigs = parse_list("eigenvalues", text)?;
    if eigs.is_empty() {
        return Err(Error::Parse("eigenvalues: at least one is needed".into()));
    }
    Ok(eigs)
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension(_) => "dimension",
        Error::NotPositiveDefinite(_) => "not_positive_definite",
        Error::Degenerate(_) => "degenerate",
        Error::Domain(_) => "domain",
        Error::NonConvergence(_) => "non_convergence",
        Error::Divergence(_) => "divergence",
        Error::Resource(_) => "resource",
        Error::MissingEntry(_) => "missing_entry",
        Error::Parse(_) => "parse",
    }
}

fn render(result: Result<Value>) -> String {
    let mut v = match result {
        Ok(v) => v,
        Err(e) => json!({ "error": { "kind": kind(&e), "message": e.to_string() } }),
    };
    v["schema"] = json!(SCHEMA);
    v.to_string()
}

/// Every `C_K(Z)` with `|K| = k`, plus their sum, which equals `(tr Z)^k`.
pub fn zonal_all(k: usize, eigs: &str) -> String {
    render((|| {
        let eigs = parse_eigs(eigs)?;
        let table = ZonalTable::build_with_ceiling(k, eigs.len(), DEFAULT_KMAX_CEILING)?;
        let values = table.eval_weight(k, &eigs)?;
        let rows: Vec<Value> = table
            .partitions(k)
            .iter()
            .zip(&values)
            .map(|(kappa, v)| json!({ "partition": kappa.parts(), "value": v }))
            .collect();
        let trace: f64 = eigs.iter().sum();
        Ok(json!({
            "k": k,
            "p": eigs.len(),
            "polynomials": rows,
            "sum": values.iter().sum::<f64>(),
            "trace_power": trace.powi(k as i32),
        }))
    })())
}

/// `pFq(a; b; Z)` truncated at weight `k_max`, with the per-weight sums.
pub fn hypergeometric(numerator: &str, denominator: &str, eigs: &str, k_max: usize) -> String {
    render((|| {
        let num = parse_list("numerator", numerator)?;
        let den = parse_list("denominator", denominator)?;
        let eigs = parse_eigs(eigs)?;
        let table = ZonalTable::build_with_ceiling(k_max, eigs.len(), DEFAULT_KMAX_CEILING)?;
        let series = hyper_pfq_eigs(
            &HyperParams::new(&num, &den),
            &eigs,
            &Truncation::with_k_max(k_max),
            &table,
        )?;
        Ok(serde_json::to_value(series).expect("series serializes"))
    })())
}

/// `D^{-α} |Z_X|^η` with `A = I_p`, `B = I_r` and `Z_X = diag(eigs)`.
pub fn fractional_power(alpha: f64, eta: f64, r: usize, eigs: &str) -> String {
    render((|| {
        let eigs = parse_eigs(eigs)?;
        let cfg = RectConfig::identity(eigs.len(), r)?;
        let z = SpdMatrix::diagonal(&eigs)?;
        let out = frac_integral_power_closed(FracOrder(alpha), eta, &z, &cfg)?;
        Ok(json!({
            "value": out.value(),
            "log_magnitude": out.log_magnitude,
            "det_exponent": out.det_exponent,
        }))
    })())
}

#[wasm_bindgen(js_name = zonalAll)]
pub fn zonal_all_js(k: usize, eigs: &str) -> String {
    zonal_all(k, eigs)
}

#[wasm_bindgen(js_name = hypergeometric)]
pub fn hypergeometric_js(numerator: &str, denominator: &str, eigs: &str, k_max: usize) -> String {
    hypergeometric(numerator, denominator, eigs, k_max)
}

#[wasm_bindgen(js_name = fractionalPower)]
pub fn fractional_power_js(alpha: f64, eta: f64, r: usize, eigs: &str) -> String {
    fractional_power(alpha, eta, r, eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_tolerate_spaces_and_trailing_commas() {
        assert_eq!(parse_list("x", " 1, 2.5 ,").unwrap(), vec![1.0, 2.5]);
        assert!(matches!(parse_list("x", "1,a"), Err(Error::Parse(_))));
        assert!(parse_eigs(" ").is_err());
    }
}

use mvfrac_wasm::{fractional_power, hypergeometric, zonal_all};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn zonal_sum_is_trace_power() {
    let v = parse(zonal_all(3, "0.5, 0.2, 0.1"));
    assert_eq!(v["schema"], "mvfrac/1");
    assert_eq!(v["polynomials"].as_array().unwrap().len(), 3);
    let (sum, want) = (v["sum"].as_f64().unwrap(), v["trace_power"].as_f64().unwrap());
    assert!((sum - want).abs() < 1e-14);
}

#[test]
fn one_variable_series_is_log() {
    // 2F1(1,1;2;x) = -ln(1-x)/x
    let v = parse(hypergeometric("1,1", "2", "0.5", 25));
    let want = 2.0 * 2f64.ln();
    assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-8);
    assert_eq!(v["weight_sums"].as_array().unwrap().len(), 26);
}

#[test]
fn scalar_power_integral() {
    // p = r = 1, η = 0, α = 1: Γ(1/2)/Γ(3/2) · z^{1/2} = 2√z.
    let v = parse(fractional_power(1.0, 0.0, 1, "0.64"));
    assert!((v["value"].as_f64().unwrap() - 1.6).abs() < 1e-13);
}

#[test]
fn errors_are_json() {
    let v = parse(fractional_power(0.4, 0.0, 3, "1, 1, 1"));
    assert_eq!(v["error"]["kind"], "domain");
    let v = parse(hypergeometric("1,1", "2", "1.5", 20));
    assert_eq!(v["error"]["kind"], "domain");
    let v = parse(zonal_all(2, "x"));
    assert_eq!(v["error"]["kind"], "parse");
    let v = parse(hypergeometric("1", "", "0.1", 400));
    assert_eq!(v["error"]["kind"], "resource");
}

mod common;

use approx::assert_relative_eq;
use common::random_spd;
use mvfrac::hyper::{gauss_2f1_rect, hyper_pfq, hyper_pfq_eigs, HyperParams, Truncation};
use mvfrac::rng::Stream;
use mvfrac::zonal::ZonalTable;
use mvfrac::{Error, RectConfig, SpdMatrix};

/// Term-by-term scalar pFq, summed until the terms stop mattering.
fn scalar_pfq(num: &[f64], den: &[f64], z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..2000 {
        let kf = k as f64;
        for &a in num {
            term *= a + kf;
        }
        for &b in den {
            term /= b + kf;
        }
        term *= z / (kf + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

#[test]
fn binomial_series_matches_determinant_power() {
    let trunc = Truncation::with_k_max(25);
    let mut stream = Stream::new(11, 0);
    for p in [2, 3] {
        let table = ZonalTable::build(25, p).unwrap();
        for b in [0.7, 1.5, 2.5] {
            for _ in 0..5 {
                let z = random_spd(p, 0.01, 0.3, &mut stream);
                let s = hyper_pfq(&HyperParams::new(&[b], &[]), &z, &trunc, &table).unwrap();
                let direct = z
                    .eigenvalues()
                    .iter()
                    .map(|&l| (1.0 - l).powf(-b))
                    .product::<f64>();
                assert!((s.value - direct).abs() < 1e-8, "p={p} b={b}: {} vs {direct}", s.value);
            }
        }
    }
}

#[test]
fn scalar_argument_matches_scalar_series() {
    let trunc = Truncation::with_k_max(80);
    let table = ZonalTable::build_with_ceiling(80, 1, 80).unwrap();
    let mut stream = Stream::new(3, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = stream.uniform_in(-2.0, 3.0);
        let b = stream.uniform_in(-2.0, 3.0);
        let c = stream.uniform_in(0.3, 4.0);
        let z = stream.uniform_in(-0.5, 0.5);
        let params = HyperParams::new(&[a, b], &[c]);
        let series = hyper_pfq_eigs(&params, &[z], &trunc, &table).unwrap();
        let direct = scalar_pfq(&[a, b], &[c], z);
        let rel = ((series.value - direct) / direct).abs();
        worst = worst.max(rel);
    }
    assert!(worst < 1e-10, "worst relative error {worst:e}");
}

#[test]
fn exponential_series_is_exp_trace() {
    let trunc = Truncation::with_k_max(30);
    let table = ZonalTable::build(30, 3).unwrap();
    let mut stream = Stream::new(8, 0);
    for _ in 0..5 {
        let z = random_spd(3, 0.05, 1.0, &mut stream);
        let s = hyper_pfq(&HyperParams::new(&[], &[]), &z, &trunc, &table).unwrap();
        assert_relative_eq!(s.value, z.trace().exp(), max_relative = 1e-13);
        assert!(s.meets_tolerance);
    }
}

#[test]
fn confluent_series_at_scalar_identity_multiple() {
    // 1F1(a; c; x I_p) for a = c reduces to exp(p x).
    let trunc = Truncation::with_k_max(30);
    let table = ZonalTable::build(30, 2).unwrap();
    let s = hyper_pfq_eigs(&HyperParams::new(&[1.7], &[1.7]), &[0.6, 0.6], &trunc, &table).unwrap();
    assert_relative_eq!(s.value, 1.2f64.exp(), max_relative = 1e-13);
}

#[test]
fn gauss_rect_reduces_in_scalar_case() {
    let trunc = Truncation::with_k_max(60);
    let table = ZonalTable::build_with_ceiling(60, 1, 60).unwrap();
    let cfg = RectConfig::identity(1, 1).unwrap();
    let z = SpdMatrix::diagonal(&[0.4]).unwrap();
    let (a, b, c) = (0.8, 1.3, 2.1);
    let v = gauss_2f1_rect(a, b, c, &cfg, &z, &trunc, &table).unwrap();
    assert_relative_eq!(v.value, scalar_pfq(&[a + 0.5, b], &[c + 0.5], 0.4), max_relative = 1e-12);

    let zero_b = gauss_2f1_rect(a, 0.0, c, &cfg, &z, &trunc, &table).unwrap();
    assert_eq!(zero_b.value, 1.0);
}

#[test]
fn gauss_rect_names_the_failed_condition() {
    let trunc = Truncation::default();
    let table = ZonalTable::build(25, 2).unwrap();
    let cfg = RectConfig::identity(2, 2).unwrap();
    let z = SpdMatrix::diagonal(&[0.3, 0.1]).unwrap();
    let err = gauss_2f1_rect(1.0, 0.5, 1.2, &cfg, &z, &trunc, &table).unwrap_err();
    assert!(err.to_string().contains("c - a > (p-1)/2"), "{err}");
    let err = gauss_2f1_rect(-1.0, 0.5, 3.0, &cfg, &z, &trunc, &table).unwrap_err();
    assert!(err.to_string().contains("a > -r/2 + (p-1)/2"), "{err}");
    let big = SpdMatrix::diagonal(&[1.2, 0.1]).unwrap();
    assert!(matches!(
        gauss_2f1_rect(1.0, 0.5, 3.0, &cfg, &big, &trunc, &table),
        Err(Error::Domain(_))
    ));
}

#[test]
fn truncation_beyond_the_table_is_refused() {
    let table = ZonalTable::build(10, 2).unwrap();
    let err = hyper_pfq_eigs(
        &HyperParams::new(&[1.0], &[]),
        &[0.1, 0.1],
        &Truncation::with_k_max(20),
        &table,
    )
    .unwrap_err();
    assert!(matches!(err, Error::MissingEntry(_)));
    assert!(matches!(ZonalTable::build(31, 2), Err(Error::Resource(_))));
}

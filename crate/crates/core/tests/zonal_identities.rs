mod common;

use approx::assert_relative_eq;
use common::{random_orthogonal, random_spd};
use mvfrac::partition::partitions_of;
use mvfrac::rng::Stream;
use mvfrac::zonal::{zonal_at_identity, zonal_eval, ZonalTable};
use mvfrac::{Partition, SpdMatrix};

#[test]
fn zonal_sum_is_trace_power() {
    let mut stream = Stream::new(2024, 0);
    for p in 1..=4 {
        let table = ZonalTable::build(8, p).unwrap();
        for k in 0..=8 {
            for _ in 0..50 {
                let z = random_spd(p, 0.05, 2.0, &mut stream);
                let total: f64 = table.eval_weight(k, z.eigenvalues()).unwrap().iter().sum();
                let expected = z.trace().powi(k as i32);
                assert!(
                    ((total - expected) / expected).abs() < 1e-10,
                    "p={p} k={k}: {total} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn first_degree_is_trace_and_scalar_is_power() {
    let table = ZonalTable::build(6, 3).unwrap();
    let z = SpdMatrix::from_rows(&[
        vec![0.9, 0.1, 0.0],
        vec![0.1, 0.5, 0.2],
        vec![0.0, 0.2, 0.3],
    ])
    .unwrap();
    let one = Partition::new(&[1]).unwrap();
    assert_relative_eq!(zonal_eval(&one, &z, &table).unwrap(), 1.7, max_relative = 1e-14);

    let scalar = ZonalTable::build(6, 1).unwrap();
    for k in 0..=6u32 {
        let kappa = Partition::new(&[k]).unwrap();
        let v = scalar.eval_eigs(&kappa, &[0.7]).unwrap();
        assert_relative_eq!(v, 0.7f64.powi(k as i32), max_relative = 1e-14);
    }
}

#[test]
fn invariant_under_rotation() {
    let mut stream = Stream::new(5, 0);
    let table = ZonalTable::build(5, 3).unwrap();
    for _ in 0..10 {
        let z = random_spd(3, 0.1, 1.5, &mut stream);
        let q = random_orthogonal(3, &mut stream);
        let rotated = SpdMatrix::symmetrized(&q * z.entries() * q.transpose()).unwrap();
        for kappa in partitions_of(5, 3) {
            let a = zonal_eval(&kappa, &z, &table).unwrap();
            let b = zonal_eval(&kappa, &rotated, &table).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }
}

#[test]
fn homogeneous_of_degree_k() {
    let table = ZonalTable::build(6, 2).unwrap();
    let eigs = [0.8, 0.3];
    let scaled = [0.8 * 1.7, 0.3 * 1.7];
    for k in 0..=6 {
        for kappa in partitions_of(k, 2) {
            let a = table.eval_eigs(&kappa, &eigs).unwrap();
            let b = table.eval_eigs(&kappa, &scaled).unwrap();
            assert_relative_eq!(b, 1.7f64.powi(k as i32) * a, max_relative = 1e-12);
        }
    }
}

#[test]
fn values_at_identity_match_the_hook_product() {
    // C_K(I_p) = 2^{2k} k! (p/2)_K prod_{i<j}(2k_i - 2k_j - i + j) / prod_i (2k_i + p_K - i)!
    // with p_K the number of nonzero parts.
    fn oracle(kappa: &Partition, p: usize) -> f64 {
        let parts: Vec<i64> = kappa.parts().iter().map(|&x| x as i64).collect();
        let m = parts.len();
        let k: i64 = parts.iter().sum();
        let fact = |n: i64| (1..=n).map(|x| x as f64).product::<f64>();
        let mut num = 4f64.powi(k as i32) * fact(k) * mvfrac::gamma::gen_pochhammer(0.5 * p as f64, kappa);
        for i in 0..m {
            for j in i + 1..m {
                num *= (2 * parts[i] - 2 * parts[j] - i as i64 + j as i64) as f64;
            }
        }
        let mut den = 1.0;
        for (i, &ki) in parts.iter().enumerate() {
            den *= fact(2 * ki + m as i64 - (i as i64 + 1));
        }
        num / den
    }
    for p in 1..=4 {
        let table = ZonalTable::build(6, p).unwrap();
        for k in 0..=6 {
            for kappa in partitions_of(k, p) {
                let v = zonal_at_identity(&kappa, p, &table).unwrap();
                assert_relative_eq!(v, oracle(&kappa, p), max_relative = 1e-11);
            }
        }
    }
}

#[test]
fn table_round_trips_through_records() {
    let table = ZonalTable::build(5, 3).unwrap();
    let json = serde_json::to_string(&table.records()).unwrap();
    let records: Vec<mvfrac::zonal::ZonalRecord> = serde_json::from_str(&json).unwrap();
    let back = ZonalTable::from_records(5, 3, &records).unwrap();
    let eigs = [0.4, 0.25, 0.1];
    for k in 0..=5 {
        assert_eq!(table.eval_weight(k, &eigs).unwrap(), back.eval_weight(k, &eigs).unwrap());
    }
}

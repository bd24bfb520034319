//! Zonal polynomials `C_K` in the monomial symmetric basis.
//!
//! For each partition `K` the coefficients of the monic polynomial `P_K` are
//! produced top-down in dominance order by the Laplace-Beltrami eigenfunction
//! recurrence
//!
//! ```text
//! c[K, L] = sum_{i<j, t} ((l_i + t) - (l_j - t)) c[K, M] / (rho_K - rho_L),
//! M = sort(l_1, .., l_i + t, .., l_j - t, ..),   rho_K = sum_i k_i (k_i - i),
//! ```
//!
//! and then rescaled by `2^k k! / prod_{boxes} (2 arm + leg + 2)` so that the
//! polynomials of weight `k` sum to `(tr Z)^k`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{partitions_of, Partition};
use crate::spd::SpdMatrix;

/// Largest weight a table may be built for unless the caller raises it.
pub const DEFAULT_KMAX_CEILING: usize = 30;

#[derive(Clone, Debug)]
struct Level {
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// `coeffs[K][M]`, both indices into `partitions`.
    coeffs: Vec<Vec<f64>>,
}

/// Zonal coefficients for every partition of weight `<= k_max` with at most `p` parts.
#[derive(Clone, Debug)]
pub struct ZonalTable {
    k_max: usize,
    p: usize,
    levels: Vec<Level>,
}

/// One nonzero coefficient, the unit of the JSON dump format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZonalRecord {
    pub k: usize,
    pub partition: Partition,
    pub monomial: Partition,
    pub coefficient: f64,
}

fn rho(k: &Partition) -> f64 {
    k.parts()
        .iter()
        .enumerate()
        .map(|(i, &ki)| ki as f64 * (ki as f64 - (i + 1) as f64))
        .sum()
}

/// `2^k k! / prod_{s in K} (2 a(s) + l(s) + 2)`: the leading coefficient of `C_K`.
fn leading_coefficient(k: &Partition) -> f64 {
    let conj = k.conjugate();
    let mut acc = 1.0;
    for (m, (i, j)) in k.boxes().enumerate() {
        let arm = (k.part(i) as usize - j - 1) as f64;
        let leg = (conj.part(j) as usize - i - 1) as f64;
        acc *= 2.0 * (m + 1) as f64 / (2.0 * arm + leg + 2.0);
    }
    acc
}

fn build_level(k: usize, p: usize) -> Level {
    let partitions = partitions_of(k, p.min(k.max(1)));
    let index: HashMap<Partition, usize> = partitions
        .iter()
        .enumerate()
        .map(|(i, part)| (part.clone(), i))
        .collect();
    let n = partitions.len();
    let mut coeffs = Vec::with_capacity(n);
    for (top, kappa) in partitions.iter().enumerate() {
        let mut c = vec![0.0; n];
        c[top] = 1.0;
        let rho_kappa = rho(kappa);
        for low in top + 1..n {
            let lambda = &partitions[low];
            if !lambda.dominated_by(kappa) {
                continue;
            }
            let parts = lambda.parts();
            let mut acc = 0.0;
            for i in 0..parts.len() {
                for j in i + 1..parts.len() {
                    for t in 1..=parts[j] {
                        let mut moved = parts.to_vec();
                        moved[i] += t;
                        moved[j] -= t;
                        moved.sort_unstable_by(|a, b| b.cmp(a));
                        let mu = Partition::new(&moved).expect("sorted parts");
                        let weight = (parts[i] + t) as f64 - (parts[j] - t) as f64;
                        acc += weight * c[index[&mu]];
                    }
                }
            }
            c[low] = acc / (rho_kappa - rho(lambda));
        }
        let lead = leading_coefficient(kappa);
        c.iter_mut().for_each(|v| *v *= lead);
        coeffs.push(c);
    }
    Level {
        partitions,
        index,
        coeffs,
    }
}

/// Monomial symmetric polynomial `m_M(x)`: sum over distinct exponent permutations.
pub fn monomial_symmetric(m: &Partition, x: &[f64]) -> f64 {
    let n = x.len();
    if m.len() > n {
        return 0.0;
    }
    let mut exps: Vec<u32> = (0..n).map(|i| m.part(i)).collect();
    exps.sort_unstable();
    let mut total = 0.0;
    loop {
        total += exps
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product::<f64>();
        if !next_permutation(&mut exps) {
            break;
        }
    }
    total
}

fn next_permutation(v: &mut [u32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl ZonalTable {
    /// Builds the table, refusing weights above [`DEFAULT_KMAX_CEILING`].
    pub fn build(k_max: usize, p: usize) -> Result<Self> {
        Self::build_with_ceiling(k_max, p, DEFAULT_KMAX_CEILING)
    }

    pub fn build_with_ceiling(k_max: usize, p: usize, ceiling: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Dimension("zonal table needs p >= 1".into()));
        }
        if k_max > ceiling {
            return Err(Error::Resource(format!(
                "k_max = {k_max} exceeds the zonal table ceiling {ceiling}"
            )));
        }
        let levels = (0..=k_max).map(|k| build_level(k, p)).collect();
        Ok(Self { k_max, p, levels })
    }

    /// Process-wide cached table; concurrent requests for the same key build it once.
    pub fn shared(k_max: usize, p: usize, ceiling: usize) -> Result<Arc<ZonalTable>> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<ZonalTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = guard.get(&(k_max, p)) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(Self::build_with_ceiling(k_max, p, ceiling)?);
        guard.insert((k_max, p), Arc::clone(&table));
        Ok(table)
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Partitions of weight `k` held by the table, reverse-lexicographic.
    pub fn partitions(&self, k: usize) -> &[Partition] {
        &self.levels[k].partitions
    }

    /// Coefficient of `m_M` in `C_K`.
    pub fn coefficient(&self, kappa: &Partition, m: &Partition) -> Result<f64> {
        let level = self.level_of(kappa)?;
        let row = level.index[kappa];
        Ok(level.index.get(m).map_or(0.0, |&col| level.coeffs[row][col]))
    }

    fn level_of(&self, kappa: &Partition) -> Result<&Level> {
        let level = self
            .levels
            .get(kappa.weight())
            .ok_or_else(|| Error::MissingEntry(kappa.to_string()))?;
        if !level.index.contains_key(kappa) {
            return Err(Error::MissingEntry(kappa.to_string()));
        }
        Ok(level)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n > self.p {
            return Err(Error::Dimension(format!(
                "argument has {n} eigenvalues but the table was built for p = {}",
                self.p
            )));
        }
        Ok(())
    }

    /// `C_K` for every `K` of weight `k`, in [`ZonalTable::partitions`] order,
    /// at the given eigenvalues.
    pub fn eval_weight(&self, k: usize, eigs: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(eigs.len())?;
        let level = self
            .levels
            .get(k)
            .ok_or_else(|| Error::MissingEntry(format!("weight {k}")))?;
        let monomials: Vec<f64> = level
            .partitions
            .iter()
            .map(|m| monomial_symmetric(m, eigs))
            .collect();
        Ok(level
            .partitions
            .iter()
            .zip(&level.coeffs)
            .map(|(kappa, row)| {
                if kappa.len() > eigs.len() {
                    0.0
                } else {
                    row.iter().zip(&monomials).map(|(c, m)| c * m).sum()
                }
            })
            .collect())
    }

    /// `C_K` at the given eigenvalues.
    pub fn eval_eigs(&self, kappa: &Partition, eigs: &[f64]) -> Result<f64> {
        self.check_dim(eigs.len())?;
        if kappa.len() > eigs.len() {
            if kappa.weight() > self.k_max {
                return Err(Error::MissingEntry(kappa.to_string()));
            }
            Ok(0.0)
        } else {
            let level = self.level_of(kappa)?;
            let row = &level.coeffs[level.index[kappa]];
            Ok(level
                .partitions
                .iter()
                .zip(row)
                .filter(|(_, c)| **c != 0.0)
                .map(|(m, c)| c * monomial_symmetric(m, eigs))
                .sum())
        }
    }

    /// Dumps every nonzero coefficient.
    pub fn records(&self) -> Vec<ZonalRecord> {
        let mut out = Vec::new();
        for (k, level) in self.levels.iter().enumerate() {
            for (kappa, row) in level.partitions.iter().zip(&level.coeffs) {
                for (m, &c) in level.partitions.iter().zip(row) {
                    if c != 0.0 {
                        out.push(ZonalRecord {
                            k,
                            partition: kappa.clone(),
                            monomial: m.clone(),
                            coefficient: c,
                        });
                    }
                }
            }
        }
        out
    }

    /// Rebuilds a table from a dump; every partition of weight `<= k_max` with
    /// at most `p` parts must appear as a leading record.
    pub fn from_records(k_max: usize, p: usize, records: &[ZonalRecord]) -> Result<Self> {
        let mut levels: Vec<Level> = (0..=k_max)
            .map(|k| {
                let partitions = partitions_of(k, p.min(k.max(1)));
                let index = partitions
                    .iter()
                    .enumerate()
                    .map(|(i, part)| (part.clone(), i))
                    .collect();
                let n = partitions.len();
                Level {
                    partitions,
                    index,
                    coeffs: vec![vec![0.0; n]; n],
                }
            })
            .collect();
        for rec in records {
            let level = levels
                .get_mut(rec.k)
                .ok_or_else(|| Error::Parse(format!("record weight {} > k_max", rec.k)))?;
            let (Some(&row), Some(&col)) =
                (level.index.get(&rec.partition), level.index.get(&rec.monomial))
            else {
                return Err(Error::Parse(format!(
                    "record ({}, {}) is not a partition pair of weight {} with <= {p} parts",
                    rec.partition, rec.monomial, rec.k
                )));
            };
            level.coeffs[row][col] = rec.coefficient;
        }
        for level in &levels {
            for (i, row) in level.coeffs.iter().enumerate() {
                if row[i] == 0.0 {
                    return Err(Error::MissingEntry(level.partitions[i].to_string()));
                }
            }
        }
        Ok(Self { k_max, p, levels })
    }
}

/// `C_K(Z)`, a function of the eigenvalues of `Z` only.
pub fn zonal_eval(kappa: &Partition, z: &SpdMatrix, table: &ZonalTable) -> Result<f64> {
    table.eval_eigs(kappa, z.eigenvalues())
}

/// `C_K(I_p)`.
pub fn zonal_at_identity(kappa: &Partition, p: usize, table: &ZonalTable) -> Result<f64> {
    table.eval_eigs(kappa, &vec![1.0; p])
}

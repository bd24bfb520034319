//! Symmetric positive definite matrices and the rectangular transform.
//!
//! Every matrix-valued quantity in the crate funnels through one symmetric
//! eigendecomposition, computed when an [`SpdMatrix`] is built. Square roots,
//! determinants, the Loewner ordering and spectral norms are all read off it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::gamma::log_matrix_gamma;

/// Relative threshold below which an eigenvalue does not count as positive.
pub const PD_TOLERANCE: f64 = 1e-12;

/// Relative threshold on singular values for the full-rank check of a rectangular matrix.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Eigenvalues (descending) and matching eigenvector columns of a symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)]], DMatrix::from_element(1, 1, 1.0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Scale-invariant positivity rule: every eigenvalue exceeds
/// `PD_TOLERANCE` times the largest eigenvalue magnitude.
pub fn eigenvalues_positive(eigs: &[f64]) -> bool {
    let scale = eigs.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    scale > 0.0 && eigs.iter().all(|&e| e > PD_TOLERANCE * scale)
}

/// A real symmetric positive definite matrix with its eigendecomposition.
#[derive(Clone, Debug)]
pub struct SpdMatrix {
    entries: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpdMatrix {
    /// Validates exact symmetry and positive definiteness.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::Dimension(format!(
                "expected a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("matrix has non-finite entries".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::NotPositiveDefinite(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        let (eigenvalues, eigenvectors) = symmetric_eigen(&entries);
        if !eigenvalues_positive(&eigenvalues) {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalues {eigenvalues:?}"
            )));
        }
        Ok(Self {
            entries,
            eigenvalues,
            eigenvectors,
        })
    }

    /// Trusted constructor for a decomposition the caller already validated.
    pub(crate) fn from_parts(
        entries: DMatrix<f64>,
        eigenvalues: Vec<f64>,
        eigenvectors: DMatrix<f64>,
    ) -> Self {
        Self {
            entries,
            eigenvalues,
            eigenvectors,
        }
    }

    /// Symmetrizes `(M + M') / 2` before validating; for computed products.
    pub fn symmetrized(m: DMatrix<f64>) -> Result<Self> {
        let sym = (&m + m.transpose()) * 0.5;
        Self::new(sym)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn identity(p: usize) -> Self {
        Self::scaled_identity(p, 1.0)
    }

    pub fn scaled_identity(p: usize, c: f64) -> Self {
        assert!(p > 0 && c > 0.0, "scaled identity needs p > 0 and c > 0");
        Self {
            entries: DMatrix::identity(p, p) * c,
            eigenvalues: vec![c; p],
            eigenvectors: DMatrix::identity(p, p),
        }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    /// Rebuilds `Q diag(eigs) Q'` for an orthogonal `Q` (columns) and positive eigenvalues.
    pub fn from_spectrum(q: &DMatrix<f64>, eigs: &[f64]) -> Result<Self> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eigs));
        Self::symmetrized(q * d * q.transpose())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn log_det(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.ln()).sum()
    }

    pub fn det(&self) -> f64 {
        self.eigenvalues.iter().product()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V f(Λ) V'`, symmetrized.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&l| f(l)),
        ));
        let m = v * d * v.transpose();
        (&m + m.transpose()) * 0.5
    }

    /// The unique positive definite square root.
    pub fn sqrt(&self) -> SpdMatrix {
        let eigenvalues: Vec<f64> = self.eigenvalues.iter().map(|l| l.sqrt()).collect();
        SpdMatrix {
            entries: self.spectral_map(f64::sqrt),
            eigenvalues,
            eigenvectors: self.eigenvectors.clone(),
        }
    }

    /// `S^{-1/2}`.
    pub fn inv_sqrt(&self) -> DMatrix<f64> {
        self.spectral_map(|l| 1.0 / l.sqrt())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.entries)
    }

    /// `M^{1/2} W M^{1/2}` where `M` is `self`.
    pub fn congruence(&self, w: &SpdMatrix) -> Result<SpdMatrix> {
        if w.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "congruence of {}x{} by {}x{}",
                w.dim(),
                w.dim(),
                self.dim(),
                self.dim()
            )));
        }
        let root = self.sqrt();
        SpdMatrix::symmetrized(root.entries() * w.entries() * root.entries())
    }
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Serialize for SpdMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpdMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SpdMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// A `p x r` real matrix of full row rank with `r >= p`.
#[derive(Clone, Debug, PartialEq)]
pub struct RectMatrix {
    entries: DMatrix<f64>,
}

impl RectMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (p, r) = entries.shape();
        if p == 0 || r < p {
            return Err(Error::Dimension(format!(
                "rectangular matrix must be p x r with r >= p >= 1, got {p}x{r}"
            )));
        }
        let sv = entries.singular_values();
        let largest = sv.max();
        let smallest = sv.min();
        if largest.is_nan() || largest <= 0.0 || smallest <= RANK_TOLERANCE * largest {
            return Err(Error::Degenerate(format!(
                "matrix is not of full rank {p} (singular values {smallest:e}..{largest:e})"
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// Skips the rank check; for sampler output, which is full rank almost surely.
    pub(crate) fn new_unchecked(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.entries)
    }
}

/// The pair of constant matrices `(A, B)` defining `Z_X = A^{1/2} X B X' A^{1/2}`.
#[derive(Clone, Debug)]
pub struct RectConfig {
    a: SpdMatrix,
    b: SpdMatrix,
    a_sqrt: SpdMatrix,
}

impl RectConfig {
    pub fn new(a: SpdMatrix, b: SpdMatrix) -> Result<Self> {
        require(b.dim() >= a.dim(), || {
            format!("r >= p (got r = {}, p = {})", b.dim(), a.dim())
        })?;
        let a_sqrt = a.sqrt();
        Ok(Self { a, b, a_sqrt })
    }

    /// `A = I_p`, `B = I_r`.
    pub fn identity(p: usize, r: usize) -> Result<Self> {
        require(p >= 1, || "p >= 1".into())?;
        Self::new(SpdMatrix::identity(p), SpdMatrix::identity(r))
    }

    pub fn p(&self) -> usize {
        self.a.dim()
    }

    pub fn r(&self) -> usize {
        self.b.dim()
    }

    pub fn a(&self) -> &SpdMatrix {
        &self.a
    }

    pub fn b(&self) -> &SpdMatrix {
        &self.b
    }

    pub fn a_sqrt(&self) -> &SpdMatrix {
        &self.a_sqrt
    }

    /// `log(|A|^{r/2} |B|^{p/2})`, the Jacobian of `U = A^{1/2} X B^{1/2}`.
    pub fn log_jacobian(&self) -> f64 {
        0.5 * self.r() as f64 * self.a.log_det() + 0.5 * self.p() as f64 * self.b.log_det()
    }

    /// `log[ pi^{rp/2} / (|A|^{r/2} |B|^{p/2} Gamma_p(r/2)) ]`: the constant that
    /// turns an integral over `X` into an integral over `Z_X`.
    pub fn log_reduction_constant(&self) -> f64 {
        stiefel_constant(self.p(), self.r()).expect("r >= p checked at construction")
            - self.log_jacobian()
    }
}

/// `A^{1/2} X B X' A^{1/2}`.
pub fn rect_transform(x: &RectMatrix, cfg: &RectConfig) -> Result<SpdMatrix> {
    if x.rows() != cfg.p() || x.cols() != cfg.r() {
        return Err(Error::Dimension(format!(
            "X is {}x{} but the configuration expects {}x{}",
            x.rows(),
            x.cols(),
            cfg.p(),
            cfg.r()
        )));
    }
    let root = cfg.a_sqrt().entries();
    let xm = x.entries();
    let z = root * xm * cfg.b().entries() * xm.transpose() * root;
    SpdMatrix::symmetrized(z).map_err(|e| Error::Degenerate(e.to_string()))
}

/// The positive definite square root.
pub fn spd_sqrt(s: &SpdMatrix) -> SpdMatrix {
    s.sqrt()
}

/// `log[ pi^{rp/2} / Gamma_p(r/2) ]`, the volume factor left after integrating
/// a `p x r` matrix over the Stiefel manifold.
pub fn stiefel_constant(p: usize, r: usize) -> Result<f64> {
    require(p >= 1 && r >= p, || {
        format!("r >= p >= 1 (got p = {p}, r = {r})")
    })?;
    let log_gamma = log_matrix_gamma(p, 0.5 * r as f64)?;
    Ok(0.5 * (r * p) as f64 * PI.ln() - log_gamma)
}

/// Strict Loewner ordering: `S1 < S2` iff `S2 - S1` is positive definite.
pub fn ordering_lt(s1: &SpdMatrix, s2: &SpdMatrix) -> bool {
    if s1.dim() != s2.dim() {
        return false;
    }
    let diff = s2.entries() - s1.entries();
    let diff = (&diff + diff.transpose()) * 0.5;
    let (eigs, _) = symmetric_eigen(&diff);
    eigenvalues_positive(&eigs)
}

/// `O < W < I` on the eigenvalues of a symmetric matrix, with the same
/// positivity rule as [`ordering_lt`].
pub fn in_unit_cone(eigs: &[f64]) -> bool {
    let complement: Vec<f64> = eigs.iter().map(|l| 1.0 - l).collect();
    eigenvalues_positive(eigs) && eigenvalues_positive(&complement)
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let m = rows[0].len();
    if m == 0 || rows.iter().any(|row| row.len() != m) {
        return Err(Error::Dimension("ragged or empty rows".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Parses a JSON array-of-arrays of numbers.
pub fn matrix_from_json(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    matrix_from_rows(&rows)
}

pub fn matrix_to_json(m: &DMatrix<f64>) -> String {
    serde_json::to_string(&matrix_to_rows(m)).expect("finite matrix serializes")
}

//! Dense data containers shared by every module.

use crate::error::{Result, SpcaError};

/// Where a [`DataMatrix`] came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub model: String,
    pub seed: u64,
    pub replication: u64,
}

/// A d x n matrix whose columns are the n sample vectors.
///
/// Storage is row-major over variables: row `i` holds the n observations of
/// variable `i`. With d in the thousands and n in the tens, every kernel in
/// the crate walks rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    d: usize,
    n: usize,
    values: Vec<f64>,
    provenance: Provenance,
}

impl DataMatrix {
    /// Builds a matrix from row-major values (`d` rows of length `n`).
    pub fn from_row_major(d: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(SpcaError::Dimension(format!(
                "data matrix must be non-empty, got {d}x{n}"
            )));
        }
        if values.len() != d * n {
            return Err(SpcaError::Dimension(format!(
                "expected {} values for a {d}x{n} matrix, got {}",
                d * n,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpcaError::NonFinite(format!(
                "entry ({}, {})",
                pos / n,
                pos % n
            )));
        }
        Ok(Self {
            d,
            n,
            values,
            provenance: Provenance::default(),
        })
    }

    /// Builds a matrix from its columns (the sample vectors).
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        let d = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != d) {
            return Err(SpcaError::Dimension("columns differ in length".into()));
        }
        let mut values = vec![0.0; d * n];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                values[i * n + j] = v;
            }
        }
        Self::from_row_major(d, n, values)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Ambient dimension (number of variables).
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Sample size.
    pub fn samples(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.values
    }

    /// `X v` for an n-vector `v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "vector length must equal sample size");
        self.rows().map(|row| dot(row, v)).collect()
    }

    /// `Xᵀ u` for a d-vector `u`. Zero entries of `u` are skipped.
    pub fn tr_mul_vec(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.d, "vector length must equal dimension");
        let mut out = vec![0.0; self.n];
        for (row, &ui) in self.rows().zip(u) {
            if ui != 0.0 {
                for (o, &x) in out.iter_mut().zip(row) {
                    *o += ui * x;
                }
            }
        }
        out
    }

    /// Squared Euclidean norm of every row.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        self.rows().map(|row| dot(row, row)).collect()
    }

    /// Sub-matrix made of the listed rows, in the listed order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.d) {
            return Err(SpcaError::Dimension(format!(
                "row index {bad} out of range for dimension {}",
                self.d
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * self.n);
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        Ok(Self::from_row_major(rows.len(), self.n, values)?.with_provenance(self.provenance.clone()))
    }

    /// Every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }
}

/// A d-dimensional loading vector with an exact-zero support.
///
/// An estimator that thresholds every entry away produces the all-zero
/// vector; it is kept as such (not normalized) and metrics treat it as
/// orthogonal to everything.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingVector {
    entries: Vec<f64>,
    support: Vec<usize>,
    normalized: bool,
}

impl LoadingVector {
    /// Normalizes `raw` to unit length. An all-zero input stays all-zero.
    pub fn normalize(raw: Vec<f64>) -> Self {
        let norm = l2_norm(&raw);
        if norm == 0.0 {
            return Self::from_raw(raw);
        }
        let entries: Vec<f64> = raw.into_iter().map(|v| v / norm).collect();
        let support = support_of(&entries);
        Self {
            entries,
            support,
            normalized: true,
        }
    }

    /// Wraps `entries` as-is.
    pub fn from_raw(entries: Vec<f64>) -> Self {
        let support = support_of(&entries);
        Self {
            entries,
            support,
            normalized: false,
        }
    }

    /// Wraps entries that are already unit-norm (or all zero) without rescaling.
    pub(crate) fn embed_normalized(entries: Vec<f64>, normalized: bool) -> Self {
        let support = support_of(&entries);
        Self {
            entries,
            support,
            normalized,
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    /// Indices of exactly non-zero entries, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Number of exactly non-zero entries.
    pub fn nnz(&self) -> usize {
        self.support.len()
    }
}

fn support_of(entries: &[f64]) -> Vec<usize> {
    entries
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

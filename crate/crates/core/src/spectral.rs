//! Symmetric eigendecomposition of small matrices and the dual route to the
//! leading sample eigenvector.
//!
//! For a d x n data matrix `X` with d much larger than n, the leading
//! eigenvector of the d x d sample covariance `XXᵀ/n` is obtained from the
//! leading eigenvector `v` of the n x n dual covariance `S = XᵀX/n`: the
//! vector `Xv` is proportional to it. Only the n x n problem is ever solved.

use crate::data::{dot, l2_norm, DataMatrix};
use crate::error::{Result, SpcaError};

/// Off-diagonal Frobenius threshold, relative to the Frobenius norm of the input.
const JACOBI_REL_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative eigengap below which the leading dual eigenvalue is reported as repeated.
const AMBIGUOUS_GAP: f64 = 1e-12;

/// A dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Wraps row-major `entries`; they must describe an exactly symmetric
    /// `order x order` matrix with finite values.
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 || entries.len() != order * order {
            return Err(SpcaError::Dimension(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(SpcaError::NonFinite("symmetric matrix entry".into()));
        }
        for i in 0..order {
            for j in (i + 1)..order {
                if entries[i * order + j] != entries[j * order + i] {
                    return Err(SpcaError::Dimension(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { order, entries })
    }

    /// Builds from a list of rows, which must form a square symmetric matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(SpcaError::Dimension("matrix is not square".into()));
        }
        Self::new(order, rows.concat())
    }

    /// Builds the matrix whose upper triangle (including the diagonal) is
    /// given by `f(i, j)` for `i <= j`; the lower triangle mirrors it.
    pub fn from_upper(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                entries[i * order + j] = v;
                entries[j * order + i] = v;
            }
        }
        Self::new(order, entries)
    }

    pub fn identity(order: usize) -> Self {
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            entries[i * order + i] = 1.0;
        }
        Self { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        l2_norm(&self.entries)
    }

    /// `m v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.entries.chunks_exact(self.order).map(|row| dot(row, v)).collect()
    }
}

/// An eigenvalue with its unit eigenvector.
///
/// The vector is sign-canonical: its entry of largest magnitude is positive,
/// the lowest index winning ties.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Full eigendecomposition by cyclic Jacobi rotations, sorted by descending
/// eigenvalue.
pub fn sym_eigen(m: &SymMatrix) -> Result<Vec<EigenPair>> {
    let n = m.order;
    let mut a = m.entries.clone();
    let mut v = SymMatrix::identity(n).entries;
    let tol = JACOBI_REL_TOL * m.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, n, p, q, c, s);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > tol {
        return Err(SpcaError::Degenerate(format!(
            "Jacobi iteration did not converge within {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let mut vector: Vec<f64> = (0..n).map(|i| v[i * n + k]).collect();
            canonicalize_sign(&mut vector);
            EigenPair {
                value: a[k * n + k],
                vector,
            }
        })
        .collect();
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Applies the plane rotation that annihilates `a[p][q]`, accumulating it into `v`.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    // A' = Jᵀ A J with J the identity except J[p][p]=J[q][q]=c, J[p][q]=s, J[q][p]=-s.
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is positive.
pub fn canonicalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// The dual covariance `XᵀX / n`.
pub fn dual_covariance(x: &DataMatrix) -> SymMatrix {
    let n = x.samples();
    let mut s = vec![0.0; n * n];
    for row in x.rows() {
        for a in 0..n {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            for b in a..n {
                s[a * n + b] += ra * row[b];
            }
        }
    }
    let scale = 1.0 / n as f64;
    for a in 0..n {
        for b in a..n {
            let val = s[a * n + b] * scale;
            s[a * n + b] = val;
            s[b * n + a] = val;
        }
    }
    SymMatrix { order: n, entries: s }
}

/// Leading dual eigenvector and the unnormalized primal direction `X v1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualComponent {
    /// Leading unit eigenvector of the dual covariance.
    pub v1: Vec<f64>,
    /// `X v1`; normalizing it gives the leading sample eigenvector.
    pub u_tilde: Vec<f64>,
    /// Leading eigenvalue of the dual covariance.
    pub eigenvalue: f64,
    /// Set when the leading eigenvalue is repeated (relative gap below 1e-12),
    /// in which case `v1` is only one canonical choice in the eigenspace.
    pub ambiguous: bool,
}

pub fn dual_first_component(x: &DataMatrix) -> Result<DualComponent> {
    if x.as_row_major().iter().all(|&v| v == 0.0) {
        return Err(SpcaError::Degenerate("data matrix is identically zero".into()));
    }
    let pairs = sym_eigen(&dual_covariance(x))?;
    let lead = &pairs[0];
    let ambiguous = pairs
        .get(1)
        .is_some_and(|second| (lead.value - second.value) <= AMBIGUOUS_GAP * lead.value.abs());
    let v1 = lead.vector.clone();
    let u_tilde = x.mul_vec(&v1);
    Ok(DualComponent {
        v1,
        u_tilde,
        eigenvalue: lead.value,
        ambiguous,
    })
}

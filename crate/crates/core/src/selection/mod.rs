//! Penalty selection and estimator diagnostics.

mod bic;

pub use bic::{bic, default_lambda_grid, select_lambda_bic, BicContext, BicValue, LambdaGridSpec};

use crate::data::{l2_norm, LoadingVector};
use crate::error::{Result, SpcaError};

/// Angle in degrees, in `[0, 90]`, between the lines spanned by `a` and `b`.
///
/// A zero vector is orthogonal to everything. Uses the half-angle form
/// `2·atan2(‖â - b̂‖, ‖â + b̂‖)`, which stays accurate for nearly parallel
/// vectors where `arccos` loses half the significant digits.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (l2_norm(a), l2_norm(b));
    if na == 0.0 || nb == 0.0 {
        return 90.0;
    }
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x / na, y / nb);
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    let (diff, sum) = (diff.sqrt(), sum.sqrt());
    let rad = 2.0 * diff.min(sum).atan2(diff.max(sum));
    rad.to_degrees().clamp(0.0, 90.0)
}

/// Angle between two loading vectors; see [`angle_between`].
pub fn angle(u: &LoadingVector, v: &LoadingVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(SpcaError::Dimension(format!(
            "cannot compare vectors of dimension {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    Ok(angle_between(u.entries(), v.entries()))
}

/// Support-recovery error rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportErrors {
    /// Fraction of true non-zeros estimated as zero.
    pub type1: f64,
    /// Fraction of true zeros estimated as non-zero; 0 when the truth has no zeros.
    pub type2: f64,
}

pub fn support_errors(estimate: &LoadingVector, truth_support: &[usize], d: usize) -> Result<SupportErrors> {
    if truth_support.is_empty() {
        return Err(SpcaError::Domain("true support must be non-empty".into()));
    }
    if estimate.dim() != d {
        return Err(SpcaError::Dimension(format!(
            "estimate has dimension {}, expected {d}",
            estimate.dim()
        )));
    }
    let mut in_truth = vec![false; d];
    for &i in truth_support {
        if i >= d {
            return Err(SpcaError::Domain(format!("support index {i} out of range for d={d}")));
        }
        in_truth[i] = true;
    }
    let k = in_truth.iter().filter(|&&t| t).count();
    let entries = estimate.entries();
    let missed = (0..d).filter(|&i| in_truth[i] && entries[i] == 0.0).count();
    let false_pos = (0..d).filter(|&i| !in_truth[i] && entries[i] != 0.0).count();
    Ok(SupportErrors {
        type1: missed as f64 / k as f64,
        type2: if k == d { 0.0 } else { false_pos as f64 / (d - k) as f64 },
    })
}

/// Admissible range of the thresholding parameter,
/// `log(d)^δ d^{θ/2} ≤ λ ≤ d^{γ/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBounds {
    pub lower: f64,
    pub upper: f64,
}

impl LambdaBounds {
    /// At finite d the lower end can exceed the upper end.
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.lower <= lambda && lambda <= self.upper
    }
}

pub fn theorem_lambda_bounds(d: usize, theta: f64, gamma: f64, delta: f64) -> Result<LambdaBounds> {
    if gamma <= theta {
        return Err(SpcaError::Domain(format!(
            "gamma ({gamma}) must exceed theta ({theta})"
        )));
    }
    if !(delta > 0.5) {
        return Err(SpcaError::Domain(format!("delta must exceed 1/2, got {delta}")));
    }
    if d < 2 {
        return Err(SpcaError::Domain("d must be at least 2".into()));
    }
    let d = d as f64;
    Ok(LambdaBounds {
        lower: d.ln().powf(delta) * d.powf(theta / 2.0),
        upper: d.powf(gamma / 2.0),
    })
}

/// Whether `gamma` lies in `(theta, alpha - eta)`.
pub fn gamma_admissible(gamma: f64, theta: f64, alpha: f64, eta: f64) -> bool {
    theta < gamma && gamma < alpha - eta
}

/// Midpoint of `(theta, alpha - eta)`, or `None` when that interval is empty.
pub fn default_gamma(theta: f64, alpha: f64, eta: f64) -> Option<f64> {
    (alpha - eta > theta).then(|| (theta + alpha - eta) / 2.0)
}

/// Gaps below this are floored before taking logarithms.
pub const GAP_FLOOR: f64 = 1e-15;

/// Power-law fit of `1 - |⟨û, u1⟩|` against d.
#[derive(Debug, Clone, PartialEq)]
pub struct RateDiagnostic {
    /// Fitted exponent ς with gap ∝ d^{-ς/2}.
    pub varsigma_hat: f64,
    pub dims: Vec<f64>,
    pub gaps: Vec<f64>,
}

/// Least-squares slope of `log(gap)` on `log(d)`; `varsigma_hat = -2·slope`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateDiagnostic> {
    if points.len() < 3 {
        return Err(SpcaError::Domain(format!(
            "need at least 3 (d, gap) points, got {}",
            points.len()
        )));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) || pts[0].0 <= 0.0 {
        return Err(SpcaError::Domain("dimensions must be positive and distinct".into()));
    }
    if pts.iter().any(|p| !(p.1 >= 0.0)) {
        return Err(SpcaError::Domain("gaps must be non-negative".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.max(GAP_FLOOR).ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(RateDiagnostic {
        varsigma_hat: -2.0 * sxy / sxx,
        dims: pts.iter().map(|p| p.0).collect(),
        gaps: pts.iter().map(|p| p.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_basics() {
        let u = LoadingVector::normalize(vec![0.3, -0.4, 1.2]);
        let neg = LoadingVector::normalize(vec![-0.3, 0.4, -1.2]);
        assert_eq!(angle(&u, &u).unwrap(), 0.0);
        assert_eq!(angle(&u, &neg).unwrap(), 0.0);
        let e1 = LoadingVector::normalize(vec![1.0, 0.0]);
        let e2 = LoadingVector::normalize(vec![0.0, 1.0]);
        assert!((angle(&e1, &e2).unwrap() - 90.0).abs() < 1e-12);
        let z = LoadingVector::from_raw(vec![0.0, 0.0]);
        assert_eq!(angle(&e1, &z).unwrap(), 90.0);
        assert!(angle(&e1, &u).is_err());
        let diag = LoadingVector::normalize(vec![1.0, 1.0]);
        assert!((angle(&e1, &diag).unwrap() - 45.0).abs() < 1e-12);
    }

    #[test]
    fn support_error_cases() {
        let truth = [0usize, 1];
        let exact = LoadingVector::normalize(vec![1.0, 2.0, 0.0, 0.0]);
        let e = support_errors(&exact, &truth, 4).unwrap();
        assert_eq!((e.type1, e.type2), (0.0, 0.0));
        let zero = LoadingVector::from_raw(vec![0.0; 4]);
        let e = support_errors(&zero, &truth, 4).unwrap();
        assert_eq!((e.type1, e.type2), (1.0, 0.0));
        let dense = LoadingVector::normalize(vec![1.0, 1.0, 1.0, 1.0]);
        let e = support_errors(&dense, &truth, 4).unwrap();
        assert_eq!((e.type1, e.type2), (0.0, 1.0));
        let mixed = LoadingVector::normalize(vec![1.0, 0.0, 0.0, 1.0]);
        let e = support_errors(&mixed, &truth, 4).unwrap();
        assert_eq!((e.type1, e.type2), (0.5, 0.5));
        assert!(support_errors(&dense, &[], 4).is_err());
        let full = support_errors(&dense, &[0, 1, 2, 3], 4).unwrap();
        assert_eq!(full.type2, 0.0);
    }

    #[test]
    fn lambda_bounds_examples() {
        let b = theorem_lambda_bounds(10_000, 0.0, 0.25, 1.0).unwrap();
        assert!((b.lower - 10_000f64.ln()).abs() < 1e-12);
        assert!((b.lower - 9.2103).abs() < 1e-4);
        assert!((b.upper - 10_000f64.powf(0.125)).abs() < 1e-12);
        assert!((b.upper - 3.1623).abs() < 1e-4);
        assert!(b.is_empty());

        // d^{γ/2} = 10000^{0.25} = 10, so the range is [9.21, 10].
        let b = theorem_lambda_bounds(10_000, 0.0, 0.5, 1.0).unwrap();
        assert!((b.upper - 10.0).abs() < 1e-9);
        assert!(!b.is_empty() && b.contains(9.5));

        assert!(theorem_lambda_bounds(10_000, 0.3, 0.3, 1.0).is_err());
        assert!(theorem_lambda_bounds(10_000, 0.0, 0.3, 0.5).is_err());
    }

    #[test]
    fn gamma_helpers() {
        assert!(gamma_admissible(0.2, 0.0, 0.6, 0.1));
        assert!(!gamma_admissible(0.6, 0.0, 0.6, 0.1));
        assert!((default_gamma(0.0, 0.6, 0.2).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(default_gamma(0.0, 0.2, 0.7), None);
    }

    #[test]
    fn rate_fit_on_exact_power_laws() {
        let inv: Vec<(f64, f64)> = [100.0, 1000.0, 10_000.0].iter().map(|&d| (d, 1.0 / d)).collect();
        assert!((fit_rate(&inv).unwrap().varsigma_hat - 2.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&d| (d, 0.3)).collect();
        assert!(fit_rate(&flat).unwrap().varsigma_hat.abs() < 1e-12);
        assert!(fit_rate(&inv[..2]).is_err());
        assert!(fit_rate(&[(10.0, 0.1), (10.0, 0.2), (20.0, 0.1)]).is_err());
        let zero = fit_rate(&[(10.0, 0.0), (20.0, 0.0), (40.0, 0.0)]).unwrap();
        assert!(zero.varsigma_hat.abs() < 1e-12);
    }
}

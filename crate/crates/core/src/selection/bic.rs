//! BIC for the thresholding parameter.
//!
//! For a fixed unit right vector `v`, the rank-one fit `‖X - u vᵀ‖²_F` is the
//! least-squares problem `‖Y - (I_d ⊗ v) u‖²` with `Y` the stacked rows of X.
//! Its unpenalized solution is `u = X v`, a design with d columns, so the
//! error variance is estimated as
//!
//! ```text
//! σ̂² = ‖X - (Xv) vᵀ‖²_F / (nd - d)
//! ```
//!
//! and a thresholded candidate `u(λ)` with `df` non-zero entries scores
//!
//! ```text
//! BIC(λ) = ‖X - u(λ) vᵀ‖²_F / (nd σ̂²) + log(nd)/(nd) · df
//! ```
//!
//! Row by row, `‖x_i - u_i v‖² = ‖x_i‖² - 2 u_i (x_i·v) + u_i²`, so every
//! candidate costs O(d) once the row norms and `Xv` are known.

use crate::data::{l2_norm, DataMatrix};
use crate::error::{Result, SpcaError};
use crate::estimators::{threshold_vec, PenaltySpec};

/// Relative size of σ̂² below which the data are treated as exactly rank one.
const DEGENERATE_SIGMA2: f64 = 1e-12;

/// One evaluated BIC candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BicValue {
    pub lambda: f64,
    /// `‖Y - Ŷ‖² / (nd σ̂²)`; 0 when σ̂² is degenerate.
    pub rss_term: f64,
    /// `log(nd)/(nd) · df`.
    pub df_term: f64,
    pub total: f64,
    /// Number of exactly non-zero entries of the candidate.
    pub df: usize,
    pub sigma2: f64,
    /// σ̂² vanished (rank-one data, or n = 1); the score is the df term alone.
    pub degenerate: bool,
}

/// Precomputed quantities for scoring many candidates against one right vector.
#[derive(Debug, Clone)]
pub struct BicContext {
    nd: f64,
    row_norms_sq: Vec<f64>,
    projection: Vec<f64>,
    sigma2: f64,
    degenerate: bool,
}

impl BicContext {
    pub fn new(x: &DataMatrix, v: &[f64]) -> Result<Self> {
        check_unit(x, v)?;
        let w = x.mul_vec(v);
        Self::with_projection(x, v, w)
    }

    /// Builds the context from an already computed `w = X v`.
    pub fn with_projection(x: &DataMatrix, v: &[f64], w: Vec<f64>) -> Result<Self> {
        check_unit(x, v)?;
        if w.len() != x.dim() {
            return Err(SpcaError::Dimension(format!(
                "projection has length {}, expected {}",
                w.len(),
                x.dim()
            )));
        }
        let (d, n) = (x.dim(), x.samples());
        let nd = (n * d) as f64;
        let row_norms_sq = x.row_norms_sq();
        let total_ss: f64 = row_norms_sq.iter().sum();
        let resid: f64 = row_norms_sq
            .iter()
            .zip(&w)
            .map(|(r, wi)| (r - wi * wi).max(0.0))
            .sum();
        let dof = n * d - d;
        let sigma2 = if dof == 0 { 0.0 } else { resid / dof as f64 };
        let degenerate = dof == 0 || sigma2 <= DEGENERATE_SIGMA2 * total_ss / nd;
        Ok(Self {
            nd,
            row_norms_sq,
            projection: w,
            sigma2,
            degenerate,
        })
    }

    /// `X v`, the unpenalized coefficients.
    pub fn projection(&self) -> &[f64] {
        &self.projection
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `‖X - u vᵀ‖²_F` for a candidate `u`.
    pub fn rss(&self, candidate: &[f64]) -> f64 {
        self.row_norms_sq
            .iter()
            .zip(&self.projection)
            .zip(candidate)
            .map(|((r, w), u)| {
                if *u == 0.0 {
                    *r
                } else {
                    (r - 2.0 * u * w + u * u).max(0.0)
                }
            })
            .sum()
    }

    pub fn evaluate(&self, candidate: &[f64], lambda: f64) -> BicValue {
        assert_eq!(candidate.len(), self.projection.len(), "candidate length must equal dimension");
        let df = candidate.iter().filter(|&&u| u != 0.0).count();
        let rss_term = if self.degenerate {
            0.0
        } else {
            self.rss(candidate) / (self.nd * self.sigma2)
        };
        let df_term = self.nd.ln() / self.nd * df as f64;
        BicValue {
            lambda,
            rss_term,
            df_term,
            total: rss_term + df_term,
            df,
            sigma2: self.sigma2,
            degenerate: self.degenerate,
        }
    }

    /// Scores `h_λ(Xv)` for every λ in the ascending `grid` and returns the
    /// index and value of the minimizer with every score. Ties go to the
    /// larger λ.
    pub fn select(&self, grid: &[f64], penalty: &PenaltySpec) -> Result<(usize, BicValue, Vec<BicValue>)> {
        check_grid(grid)?;
        let values: Vec<BicValue> = grid
            .iter()
            .map(|&lambda| {
                let candidate = threshold_vec(&self.projection, &penalty.with_lambda(lambda));
                self.evaluate(&candidate, lambda)
            })
            .collect();
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if v.total <= values[best].total {
                best = i;
            }
        }
        Ok((best, values[best], values))
    }
}

fn check_unit(x: &DataMatrix, v: &[f64]) -> Result<()> {
    if v.len() != x.samples() {
        return Err(SpcaError::Dimension(format!(
            "right vector has length {}, expected {}",
            v.len(),
            x.samples()
        )));
    }
    let norm = l2_norm(v);
    if (norm - 1.0).abs() > 1e-8 {
        return Err(SpcaError::Domain(format!("right vector must have unit norm, got {norm}")));
    }
    Ok(())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(SpcaError::Domain("lambda grid must be non-empty".into()));
    }
    if grid.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(SpcaError::Domain("lambda grid values must be finite and >= 0".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(SpcaError::Domain("lambda grid must be ascending".into()));
    }
    Ok(())
}

/// BIC of one candidate loading vector `candidate` for right vector `v1`.
pub fn bic(x: &DataMatrix, v1: &[f64], candidate: &[f64], lambda: f64) -> Result<BicValue> {
    if candidate.len() != x.dim() {
        return Err(SpcaError::Dimension(format!(
            "candidate has length {}, expected {}",
            candidate.len(),
            x.dim()
        )));
    }
    Ok(BicContext::new(x, v1)?.evaluate(candidate, lambda))
}

/// The grid λ minimizing BIC for candidates `h_λ(X v1)`, ties toward larger λ,
/// together with every score.
pub fn select_lambda_bic(
    x: &DataMatrix,
    v1: &[f64],
    grid: &[f64],
    penalty: &PenaltySpec,
) -> Result<(f64, Vec<BicValue>)> {
    let (_, best, all) = BicContext::new(x, v1)?.select(grid, penalty)?;
    Ok((best.lambda, all))
}

/// Shape of the default λ grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGridSpec {
    /// Number of log-spaced points.
    pub points: usize,
    pub min: f64,
    /// Upper end; `None` means `1.5 · max_i |ũ_i|`.
    pub max: Option<f64>,
    /// Prepend λ = 0 (plain PCA).
    pub include_zero: bool,
}

impl Default for LambdaGridSpec {
    fn default() -> Self {
        Self {
            points: 50,
            min: 1e-3,
            max: None,
            include_zero: true,
        }
    }
}

/// Ascending λ grid: optionally 0, then `points` values log-spaced from `min`
/// to `max`.
pub fn default_lambda_grid(u_tilde: &[f64], spec: &LambdaGridSpec) -> Vec<f64> {
    let max_abs = u_tilde.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lo = spec.min;
    let mut hi = spec.max.unwrap_or(1.5 * max_abs);
    if !(hi > lo) {
        hi = lo * 10.0;
    }
    let mut grid = Vec::with_capacity(spec.points + 1);
    if spec.include_zero {
        grid.push(0.0);
    }
    match spec.points {
        0 => {}
        1 => grid.push(hi),
        p => {
            let ratio = (hi / lo).ln();
            for t in 0..p {
                let frac = t as f64 / (p - 1) as f64;
                grid.push(if t == p - 1 { hi } else { lo * (ratio * frac).exp() });
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dual_first_component;

    fn toy() -> DataMatrix {
        DataMatrix::from_row_major(
            5,
            3,
            vec![
                2.0, -1.0, 0.5, //
                1.5, -0.8, 0.7, //
                0.1, 0.3, -0.2, //
                -0.4, 0.2, 0.1, //
                0.05, -0.6, 0.3,
            ],
        )
        .unwrap()
    }

    #[test]
    fn total_is_sum_of_terms_and_df_counts_non_zeros() {
        let x = toy();
        let dual = dual_first_component(&x).unwrap();
        let mut cand = dual.u_tilde.clone();
        cand[2] = 0.0;
        let b = bic(&x, &dual.v1, &cand, 0.7).unwrap();
        assert_eq!(b.total, b.rss_term + b.df_term);
        assert_eq!(b.df, 4);
        assert_eq!(b.lambda, 0.7);
    }

    #[test]
    fn unpenalized_and_all_zero_candidates() {
        let x = toy();
        let dual = dual_first_component(&x).unwrap();
        let (n, d) = (3.0, 5.0);
        let ols = bic(&x, &dual.v1, &dual.u_tilde, 0.0).unwrap();
        // RSS of the OLS fit is (nd - d) σ̂² by construction of σ̂².
        assert!((ols.rss_term - (n * d - d) / (n * d)).abs() < 1e-12);
        assert_eq!(ols.df, 5);
        let zero = bic(&x, &dual.v1, &[0.0; 5], 1e9).unwrap();
        let total_ss: f64 = x.as_row_major().iter().map(|v| v * v).sum();
        assert_eq!(zero.df, 0);
        assert!((zero.rss_term - total_ss / (n * d * zero.sigma2)).abs() < 1e-12);
    }

    #[test]
    fn rank_one_data_is_degenerate() {
        let u = [1.0, 2.0, -1.0, 0.5];
        let v = [0.6, 0.8];
        let cols: Vec<Vec<f64>> = v.iter().map(|&vj| u.iter().map(|&ui| ui * vj).collect()).collect();
        let x = DataMatrix::from_columns(&cols).unwrap();
        let dual = dual_first_component(&x).unwrap();
        let b = bic(&x, &dual.v1, &dual.u_tilde, 0.0).unwrap();
        assert!(b.degenerate);
        assert_eq!(b.rss_term, 0.0);
        assert_eq!(b.total, b.df_term);
    }

    #[test]
    fn selection_tie_breaks_toward_larger_lambda() {
        let x = toy();
        let dual = dual_first_component(&x).unwrap();
        let min_abs = dual.u_tilde.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let grid = [0.0, min_abs * 0.25, min_abs * 0.5];
        let hard = PenaltySpec::hard(0.0).unwrap();
        let (lambda, all) = select_lambda_bic(&x, &dual.v1, &grid, &hard).unwrap();
        assert_eq!(all[0].total, all[2].total);
        assert_eq!(lambda, grid[2]);
        let (single, _) = select_lambda_bic(&x, &dual.v1, &[0.3], &hard).unwrap();
        assert_eq!(single, 0.3);
    }

    #[test]
    fn grid_validation_and_vector_checks() {
        let x = toy();
        let dual = dual_first_component(&x).unwrap();
        let hard = PenaltySpec::hard(0.0).unwrap();
        assert!(select_lambda_bic(&x, &dual.v1, &[], &hard).is_err());
        assert!(select_lambda_bic(&x, &dual.v1, &[1.0, 0.5], &hard).is_err());
        assert!(bic(&x, &[1.0, 1.0, 0.0], &dual.u_tilde, 0.0).is_err());
        assert!(bic(&x, &dual.v1, &[0.0; 4], 0.0).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_lambda_grid(&[0.5, -4.0, 2.0], &LambdaGridSpec::default());
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 1e-3);
        assert_eq!(g[50], 6.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let ratios: Vec<f64> = g[1..].windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 1e-9));
    }
}

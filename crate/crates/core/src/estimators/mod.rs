//! Estimators of the leading principal direction.
//!
//! * [`pca_first`]: conventional PCA through the dual covariance.
//! * [`st_estimator`]: hard-threshold the entries of `X v1` once, then normalize.
//! * [`rspca`]: alternate `u ← h_λ(X v)` and `v ← Xᵀu / ‖Xᵀu‖` until the
//!   iterates settle, optionally re-selecting λ by BIC at every update.
//! * [`oracle_estimator`]: PCA restricted to a known support.

mod penalty;

pub use penalty::{threshold_scalar, threshold_vec, PenaltyFamily, PenaltySpec, DEFAULT_SCAD_A};

use crate::data::{l2_norm, DataMatrix, LoadingVector};
use crate::error::{Result, SpcaError};
use crate::selection::{self, BicContext, BicValue};
use crate::spectral::dual_first_component;

/// Normalized leading sample eigenvector.
pub fn pca_first(x: &DataMatrix) -> Result<LoadingVector> {
    let dual = dual_first_component(x)?;
    Ok(LoadingVector::normalize(dual.u_tilde))
}

/// Simple thresholding: keep the entries of `X v1` whose magnitude exceeds
/// `lambda` and normalize. All entries thresholded away yields the zero vector.
pub fn st_estimator(x: &DataMatrix, lambda: f64) -> Result<LoadingVector> {
    let penalty = PenaltySpec::hard(lambda)?;
    let dual = dual_first_component(x)?;
    Ok(LoadingVector::normalize(threshold_vec(&dual.u_tilde, &penalty)))
}

/// Simple thresholding at the BIC-selected λ of the first step.
///
/// `grid` defaults to [`selection::default_lambda_grid`] built from `X v1`.
pub fn st_estimator_bic(x: &DataMatrix, grid: Option<&[f64]>) -> Result<(LoadingVector, BicValue)> {
    let dual = dual_first_component(x)?;
    let default_grid;
    let grid = match grid {
        Some(g) => g,
        None => {
            default_grid = selection::default_lambda_grid(&dual.u_tilde, &Default::default());
            &default_grid
        }
    };
    let ctx = BicContext::with_projection(x, &dual.v1, dual.u_tilde.clone())?;
    let hard = PenaltySpec::hard(0.0)?;
    let (_, best, _) = ctx.select(grid, &hard)?;
    let u = threshold_vec(&dual.u_tilde, &hard.with_lambda(best.lambda));
    Ok((LoadingVector::normalize(u), best))
}

/// PCA on the rows in `support`, embedded back with exact zeros elsewhere.
pub fn oracle_estimator(x: &DataMatrix, support: &[usize]) -> Result<LoadingVector> {
    if support.is_empty() {
        return Err(SpcaError::Domain("oracle support must be non-empty".into()));
    }
    let mut rows = support.to_vec();
    rows.sort_unstable();
    rows.dedup();
    let sub = x.select_rows(&rows)?;
    let local = pca_first(&sub)?;
    let mut entries = vec![0.0; x.dim()];
    for (&r, &v) in rows.iter().zip(local.entries()) {
        entries[r] = v;
    }
    Ok(LoadingVector::embed_normalized(entries, local.is_normalized()))
}

/// Iteration controls for [`rspca`].
#[derive(Debug, Clone, PartialEq)]
pub struct RspcaOptions {
    pub max_iter: usize,
    /// Stop once consecutive iterates are within this angle, in degrees.
    pub tol_deg: f64,
    /// Re-select λ by BIC at every update instead of using the penalty's λ.
    pub bic_per_iteration: bool,
    /// λ candidates for BIC. `None` builds the default grid from the initial
    /// `X v1` and keeps it fixed for the whole run.
    pub lambda_grid: Option<Vec<f64>>,
}

impl Default for RspcaOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol_deg: 1e-8,
            bic_per_iteration: false,
            lambda_grid: None,
        }
    }
}

impl RspcaOptions {
    pub fn with_bic(mut self, grid: Option<Vec<f64>>) -> Self {
        self.bic_per_iteration = true;
        self.lambda_grid = grid;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// One update of the RSPCA loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub lambda: f64,
    pub support_size: usize,
    /// Angle between this iterate and the previous one, in degrees.
    pub angle_change_deg: f64,
    /// Error variance estimate used by BIC at this step, when BIC ran.
    pub sigma2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RspcaTrace {
    pub iterations: usize,
    pub steps: Vec<IterationRecord>,
    pub converged: bool,
    /// The leading dual eigenvalue used for initialization was repeated.
    pub ambiguous_start: bool,
    /// An update thresholded every entry away.
    pub all_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RspcaFit {
    pub loading: LoadingVector,
    pub trace: RspcaTrace,
    /// BIC of the last update, evaluated against the right vector that
    /// produced it.
    pub last_bic: BicValue,
}

impl RspcaFit {
    /// λ used in the last update.
    pub fn lambda(&self) -> f64 {
        self.last_bic.lambda
    }
}

/// Regularized sparse PCA by alternating thresholded rank-one updates.
///
/// Stops when the angle between consecutive iterates is at most
/// `opts.tol_deg`, when the support has not changed for two consecutive
/// updates, or after `opts.max_iter` updates (`converged = false`).
pub fn rspca(x: &DataMatrix, penalty: &PenaltySpec, opts: &RspcaOptions) -> Result<RspcaFit> {
    if opts.max_iter == 0 {
        return Err(SpcaError::Domain("max_iter must be at least 1".into()));
    }
    let dual = dual_first_component(x)?;
    let grid = if opts.bic_per_iteration {
        let g = opts
            .lambda_grid
            .clone()
            .unwrap_or_else(|| selection::default_lambda_grid(&dual.u_tilde, &Default::default()));
        if g.is_empty() {
            return Err(SpcaError::Domain("lambda grid must be non-empty".into()));
        }
        Some(g)
    } else {
        None
    };

    let mut u_old = dual.u_tilde;
    let mut v_old = dual.v1;
    let mut steps = Vec::new();
    let mut converged = false;
    let mut all_zero = false;
    let mut stable = 0;
    let mut last_bic = None;

    for _ in 0..opts.max_iter {
        let w = x.mul_vec(&v_old);
        let ctx = BicContext::with_projection(x, &v_old, w)?;
        let (step_penalty, bic) = match &grid {
            Some(g) => {
                let (_, best, _) = ctx.select(g, penalty)?;
                (penalty.with_lambda(best.lambda), best)
            }
            None => {
                let candidate = threshold_vec(ctx.projection(), penalty);
                let bic = ctx.evaluate(&candidate, penalty.lambda);
                (*penalty, bic)
            }
        };
        let u_new = threshold_vec(ctx.projection(), &step_penalty);
        let support_size = u_new.iter().filter(|&&v| v != 0.0).count();
        let angle_change = selection::angle_between(&u_new, &u_old);
        steps.push(IterationRecord {
            lambda: step_penalty.lambda,
            support_size,
            angle_change_deg: angle_change,
            sigma2: grid.as_ref().map(|_| ctx.sigma2()),
        });
        last_bic = Some(bic);

        if support_size == 0 {
            all_zero = true;
            u_old = u_new;
            break;
        }
        let same_support = u_new
            .iter()
            .zip(&u_old)
            .all(|(a, b)| (*a == 0.0) == (*b == 0.0));
        stable = if same_support { stable + 1 } else { 0 };

        let xu = x.tr_mul_vec(&u_new);
        let norm = l2_norm(&xu);
        u_old = u_new;
        if angle_change <= opts.tol_deg || stable >= 2 {
            converged = true;
            break;
        }
        if norm == 0.0 {
            // Xᵀu vanishes: no right vector to continue from.
            break;
        }
        v_old = xu.into_iter().map(|v| v / norm).collect();
    }

    Ok(RspcaFit {
        loading: LoadingVector::normalize(u_old),
        trace: RspcaTrace {
            iterations: steps.len(),
            steps,
            converged,
            ambiguous_start: dual.ambiguous,
            all_zero,
        },
        last_bic: last_bic.expect("at least one update ran"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_eigensystem, sample_gaussian, SpikedSpec};
    use crate::selection::angle;

    fn spiked(d: usize, alpha: f64, beta: f64, seed: u64) -> (DataMatrix, LoadingVector, Vec<usize>) {
        let sys = build_eigensystem(SpikedSpec::new(d, 25, alpha, beta).unwrap());
        (sample_gaussian(&sys, seed), LoadingVector::normalize(sys.u1()), sys.u1_support())
    }

    #[test]
    fn st_with_zero_lambda_is_pca() {
        let (x, _, _) = spiked(200, 0.6, 0.3, 1);
        assert_eq!(st_estimator(&x, 0.0).unwrap(), pca_first(&x).unwrap());
    }

    #[test]
    fn st_with_huge_lambda_is_zero() {
        let (x, _, _) = spiked(200, 0.6, 0.3, 2);
        let dual = dual_first_component(&x).unwrap();
        let max = dual.u_tilde.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let st = st_estimator(&x, max).unwrap();
        assert!(st.is_zero());
        assert_eq!(st.dim(), 200);
    }

    #[test]
    fn rspca_zero_lambda_converges_to_pca_in_one_update() {
        let (x, _, _) = spiked(300, 0.5, 0.5, 3);
        let fit = rspca(&x, &PenaltySpec::hard(0.0).unwrap(), &RspcaOptions::default()).unwrap();
        assert_eq!(fit.trace.iterations, 1);
        assert!(fit.trace.converged);
        assert_eq!(fit.loading, pca_first(&x).unwrap());
    }

    #[test]
    fn first_hard_iteration_equals_st() {
        let (x, _, _) = spiked(500, 0.6, 0.1, 4);
        for lambda in [0.5, 2.0, 4.0, 8.0] {
            let fit = rspca(
                &x,
                &PenaltySpec::hard(lambda).unwrap(),
                &RspcaOptions::default().max_iter(1),
            )
            .unwrap();
            assert_eq!(fit.loading, st_estimator(&x, lambda).unwrap());
        }
    }

    #[test]
    fn rspca_reports_all_zero_mid_run() {
        let (x, _, _) = spiked(100, 0.3, 0.5, 5);
        let fit = rspca(&x, &PenaltySpec::soft(1e6).unwrap(), &RspcaOptions::default()).unwrap();
        assert!(fit.trace.all_zero);
        assert!(!fit.trace.converged);
        assert!(fit.loading.is_zero());
        assert_eq!(fit.trace.iterations, 1);
    }

    #[test]
    fn non_convergence_is_reported() {
        let (x, _, _) = spiked(400, 0.4, 0.5, 6);
        let opts = RspcaOptions {
            max_iter: 1,
            tol_deg: 0.0,
            ..Default::default()
        };
        let fit = rspca(&x, &PenaltySpec::soft(1.0).unwrap(), &opts).unwrap();
        assert!(!fit.trace.converged);
        assert_eq!(fit.trace.iterations, 1);
        assert!(rspca(&x, &PenaltySpec::soft(1.0).unwrap(), &opts.clone().max_iter(0)).is_err());
    }

    #[test]
    fn every_penalty_family_recovers_a_strong_sparse_spike() {
        let (x, truth, _) = spiked(2000, 0.8, 0.1, 7);
        for p in [
            PenaltySpec::hard(4.0).unwrap(),
            PenaltySpec::soft(4.0).unwrap(),
            PenaltySpec::scad(4.0, 3.7).unwrap(),
        ] {
            let fit = rspca(&x, &p, &RspcaOptions::default()).unwrap();
            let a = angle(&fit.loading, &truth).unwrap();
            assert!(a < 10.0, "{:?}: angle {a}", p.family);
        }
    }

    #[test]
    fn bic_mode_records_sigma_and_lambda_each_step() {
        let (x, _, _) = spiked(1000, 0.6, 0.1, 8);
        let fit = rspca(
            &x,
            &PenaltySpec::hard(0.0).unwrap(),
            &RspcaOptions::default().with_bic(None),
        )
        .unwrap();
        assert!(fit.trace.iterations >= 1);
        for s in &fit.trace.steps {
            assert!(s.sigma2.is_some_and(|v| v > 0.0));
            assert!(s.lambda > 0.0);
        }
        assert_eq!(fit.lambda(), fit.trace.steps.last().unwrap().lambda);
    }

    #[test]
    fn oracle_with_full_support_is_pca() {
        let (x, _, _) = spiked(60, 0.6, 0.5, 9);
        let all: Vec<usize> = (0..60).collect();
        assert_eq!(oracle_estimator(&x, &all).unwrap(), pca_first(&x).unwrap());
        assert!(oracle_estimator(&x, &[]).is_err());
        assert!(oracle_estimator(&x, &[60]).is_err());
    }

    #[test]
    fn oracle_matches_pca_when_off_support_rows_vanish() {
        let (x, _, _) = spiked(30, 0.6, 0.5, 10);
        let keep = [0usize, 3, 4, 17];
        let mut values = vec![0.0; 30 * 25];
        for &r in &keep {
            values[r * 25..(r + 1) * 25].copy_from_slice(x.row(r));
        }
        let masked = DataMatrix::from_row_major(30, 25, values).unwrap();
        let or = oracle_estimator(&masked, &keep).unwrap();
        let pca = pca_first(&masked).unwrap();
        assert_eq!(or.support(), &keep);
        assert!(angle(&or, &pca).unwrap() < 1e-6);
    }
}

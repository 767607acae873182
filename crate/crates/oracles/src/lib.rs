//! Slow, independent reference computations used by the test suites.
//!
//! Nothing here calls into `spca-core`; every routine recomputes its answer
//! from the defining formula.

/// Eigenvalue counting and bisection on leading principal minors.
pub mod eigen {
    /// Number of eigenvalues of `m` below `x`: sign changes in the sequence
    /// of leading principal minors of `m - xI`, read off the pivots of an
    /// unpivoted LDLᵀ factorization.
    pub fn count_below(m: &[Vec<f64>], x: f64) -> usize {
        let n = m.len();
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| m[i][j] - if i == j { x } else { 0.0 }).collect())
            .collect();
        let mut negatives = 0;
        for k in 0..n {
            let mut pivot = a[k][k];
            if pivot == 0.0 {
                pivot = -1e-300;
            }
            if pivot < 0.0 {
                negatives += 1;
            }
            for i in (k + 1)..n {
                let f = a[i][k] / pivot;
                for j in (k + 1)..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        negatives
    }

    /// Eigenvalues in descending order by bisection on [`count_below`].
    pub fn bisection_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
        let n = m.len();
        let radius = m
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        (0..n)
            .map(|k| {
                let target = n - k;
                let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if count_below(m, mid) >= target {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Leading eigenvector of the explicit d x d covariance `XXᵀ/n`, with X
    /// given row-major (d rows of n values).
    pub fn direct_leading_eigenvector(d: usize, n: usize, row_major: &[f64]) -> Vec<f64> {
        let xm = nalgebra::DMatrix::from_row_slice(d, n, row_major);
        let cov = &xm * xm.transpose() / n as f64;
        let eig = nalgebra::SymmetricEigen::new(cov);
        let mut best = 0;
        for i in 0..d {
            if eig.eigenvalues[i] > eig.eigenvalues[best] {
                best = i;
            }
        }
        eig.eigenvectors.column(best).iter().copied().collect()
    }
}

/// Scalar penalized least squares, `½(x - u)² + p_λ(|u|)`, minimized by search.
pub mod scalar {
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub enum Penalty {
        Soft,
        Hard,
        Scad { a: f64 },
    }

    /// The penalty function `p_λ(t)` for `t = |u|`.
    ///
    /// Hard uses half the Fan–Li hard penalty, `(λ² - (t - λ)² 1{t < λ}) / 2`,
    /// matching the ½ on the squared loss.
    pub fn penalty(p: Penalty, lambda: f64, t: f64) -> f64 {
        match p {
            Penalty::Soft => lambda * t,
            Penalty::Hard => {
                if t < lambda {
                    0.5 * (lambda * lambda - (t - lambda) * (t - lambda))
                } else {
                    0.5 * lambda * lambda
                }
            }
            Penalty::Scad { a } => {
                if t <= lambda {
                    lambda * t
                } else if t <= a * lambda {
                    -(t * t - 2.0 * a * lambda * t + lambda * lambda) / (2.0 * (a - 1.0))
                } else {
                    (a + 1.0) * lambda * lambda / 2.0
                }
            }
        }
    }

    pub fn objective(p: Penalty, lambda: f64, x: f64, u: f64) -> f64 {
        0.5 * (x - u) * (x - u) + penalty(p, lambda, u.abs())
    }

    /// Global minimizer over `u` by a 1e-3 grid on `[-|x|-1, |x|+1]` (which
    /// contains 0 exactly), refined by nested grids down to a 1e-10 spacing.
    pub fn brute_force_minimizer(p: Penalty, lambda: f64, x: f64) -> f64 {
        let half = x.abs() + 1.0;
        let mut step = 1e-3;
        let steps = (2.0 * half / step).ceil() as i64;
        let mut best = 0.0;
        let mut best_val = objective(p, lambda, x, 0.0);
        for k in 0..=steps {
            let u = -half + k as f64 * step;
            let val = objective(p, lambda, x, u);
            if val < best_val {
                best = u;
                best_val = val;
            }
        }
        while step > 1e-10 {
            let center = best;
            let fine = step / 100.0;
            for k in -200..=200 {
                let u = center + k as f64 * fine;
                let val = objective(p, lambda, x, u);
                if val < best_val {
                    best = u;
                    best_val = val;
                }
            }
            step = fine;
        }
        best
    }
}

/// BIC evaluated by forming the stacked regression explicitly.
pub mod bic {
    /// `‖Y - (I_d ⊗ v) u‖² / (nd σ̂²) + log(nd)/(nd) · df`, where Y stacks the
    /// rows of X, σ̂² is the OLS residual variance with d coefficients and
    /// df counts the non-zeros of `u`. Returns `(rss_term, df_term)`.
    pub fn direct(d: usize, n: usize, row_major: &[f64], v: &[f64], u: &[f64]) -> (f64, f64) {
        let nd = d * n;
        let y = nalgebra::DVector::from_row_slice(row_major);
        let mut design = nalgebra::DMatrix::<f64>::zeros(nd, d);
        for i in 0..d {
            for t in 0..n {
                design[(i * n + t, i)] = v[t];
            }
        }
        let xtx = design.transpose() * &design;
        let ols = xtx.lu().solve(&(design.transpose() * &y)).expect("full-rank design");
        let resid_ols = &y - &design * ols;
        let sigma2 = resid_ols.norm_squared() / (nd - d) as f64;
        let fit = &design * nalgebra::DVector::from_row_slice(u);
        let rss = (&y - fit).norm_squared();
        let df = u.iter().filter(|&&x| x != 0.0).count() as f64;
        let ndf = nd as f64;
        (rss / (ndf * sigma2), ndf.ln() / ndf * df)
    }
}

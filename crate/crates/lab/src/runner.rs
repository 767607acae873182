//! Seeded, parallel Monte-Carlo execution.
//!
//! Every (pair, replication) task draws one data matrix from its own
//! generator and evaluates all requested methods on it. Tasks run on a rayon
//! pool; results are sorted canonically afterwards, so the output does not
//! depend on the number of workers.

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use spca_core::estimators::{oracle_estimator, rspca, threshold_vec, PenaltySpec, RspcaOptions};
use spca_core::model::rng::replication_seed;
use spca_core::model::{build_eigensystem, sample_gaussian, EigenSystem, SpikedSpec};
use spca_core::selection::{
    angle, default_gamma, default_lambda_grid, support_errors, theorem_lambda_bounds, BicContext, LambdaBounds,
    LambdaGridSpec,
};
use spca_core::spectral::dual_first_component;
use spca_core::{DataMatrix, LoadingVector};

use crate::config::{ExperimentConfig, Method};
use crate::error::{LabError, Result};

/// What a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every method over the full λ grid, plus BIC-selected rows when enabled.
    Sweep,
    /// One row per method and replication, penalized methods at the BIC λ.
    Bic,
}

/// The `method` column of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordMethod {
    Pca,
    St,
    Rspca,
    Oracle,
    StBic,
    RspcaBic,
}

impl RecordMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordMethod::Pca => "pca",
            RecordMethod::St => "st",
            RecordMethod::Rspca => "rspca",
            RecordMethod::Oracle => "oracle",
            RecordMethod::StBic => "st_bic",
            RecordMethod::RspcaBic => "rspca_bic",
        }
    }

    pub fn is_bic(&self) -> bool {
        matches!(self, RecordMethod::StBic | RecordMethod::RspcaBic)
    }

    /// The BIC-selected counterpart of a swept penalized method.
    pub fn bic_variant(&self) -> Option<RecordMethod> {
        match self {
            RecordMethod::St => Some(RecordMethod::StBic),
            RecordMethod::Rspca => Some(RecordMethod::RspcaBic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    /// Position of the pair in the configuration.
    pub pair: usize,
    pub alpha: f64,
    pub beta: f64,
    pub method: RecordMethod,
    pub rep: usize,
    pub lambda: f64,
    pub angle_deg: f64,
    pub type1: f64,
    pub type2: f64,
    pub df: usize,
    pub bic_total: Option<f64>,
    pub converged: Option<bool>,
    pub runtime_ms: Option<f64>,
}

/// Theorem bounds on λ for one pair; `None` when no γ in `(θ, α − η)` exists.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBounds {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: Option<f64>,
    pub bounds: Option<LambdaBounds>,
}

/// Quartiles of one statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    /// Linear-interpolation quartiles; `values` must be non-empty.
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Self {
            q1: at(0.25),
            median: at(0.5),
            q3: at(0.75),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub alpha: f64,
    pub beta: f64,
    pub method: RecordMethod,
    pub count: usize,
    pub angle: Quartiles,
    pub type1: Quartiles,
    pub type2: Quartiles,
    pub lambda: Quartiles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub d: usize,
    pub records: Vec<ReplicationRecord>,
    pub summary: Vec<SummaryRow>,
    pub bounds: Vec<PairBounds>,
}

impl ResultSet {
    pub fn summary_for(&self, alpha: f64, beta: f64, method: RecordMethod) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.alpha == alpha && s.beta == beta && s.method == method)
    }
}

pub fn pair_bounds(cfg: &ExperimentConfig, alpha: f64, beta: f64) -> Result<PairBounds> {
    let spec = SpikedSpec::new(cfg.d, cfg.n, alpha, beta)?;
    let gamma = match cfg.gamma {
        Some(g) => Some(g),
        None => default_gamma(spec.theta, alpha, spec.eta),
    };
    let bounds = match gamma {
        Some(g) if g > spec.theta => Some(theorem_lambda_bounds(cfg.d, spec.theta, g, cfg.delta)?),
        _ => None,
    };
    Ok(PairBounds {
        alpha,
        beta,
        gamma,
        bounds,
    })
}

struct Truth {
    u1: LoadingVector,
    support: Vec<usize>,
    d: usize,
}

impl Truth {
    fn score(&self, est: &LoadingVector) -> Result<(f64, f64, f64, usize)> {
        let errors = support_errors(est, &self.support, self.d)?;
        Ok((angle(est, &self.u1)?, errors.type1, errors.type2, est.nnz()))
    }
}

struct Task<'a> {
    cfg: &'a ExperimentConfig,
    mode: Mode,
    pair: usize,
    rep: usize,
    sys: &'a EigenSystem,
    truth: &'a Truth,
}

impl Task<'_> {
    fn record(&self, method: RecordMethod, lambda: f64, est: &LoadingVector) -> Result<ReplicationRecord> {
        let (angle_deg, type1, type2, df) = self.truth.score(est)?;
        let spec = self.sys.spec();
        Ok(ReplicationRecord {
            pair: self.pair,
            alpha: spec.alpha,
            beta: spec.beta,
            method,
            rep: self.rep,
            lambda,
            angle_deg,
            type1,
            type2,
            df,
            bic_total: None,
            converged: None,
            runtime_ms: None,
        })
    }

    fn run(&self) -> Result<Vec<ReplicationRecord>> {
        let cfg = self.cfg;
        let timing = cfg.record_timing;
        let x: DataMatrix = sample_gaussian(self.sys, replication_seed(cfg.base_seed, self.pair as u64, self.rep as u64));
        let dual = dual_first_component(&x)?;
        let grid = default_lambda_grid(
            &dual.u_tilde,
            &LambdaGridSpec {
                points: cfg.lambda_points,
                min: cfg.lambda_min,
                max: cfg.lambda_max,
                include_zero: true,
            },
        );
        let sweep_grid: &[f64] = if self.mode == Mode::Sweep { &grid } else { &[0.0] };
        let with_bic = self.mode == Mode::Bic || cfg.bic;
        let penalty = PenaltySpec::new(cfg.penalty, 0.0, cfg.scad_a)?;
        let hard = PenaltySpec::hard(0.0)?;
        let first_step = BicContext::with_projection(&x, &dual.v1, dual.u_tilde.clone())?;

        let mut out = Vec::new();
        let mut push = |mut rec: ReplicationRecord, started: Instant| {
            if timing {
                rec.runtime_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            out.push(rec);
        };

        for &method in &cfg.methods {
            match method {
                Method::Pca => {
                    let t = Instant::now();
                    let est = LoadingVector::normalize(dual.u_tilde.clone());
                    for &lambda in sweep_grid {
                        push(self.record(RecordMethod::Pca, lambda, &est)?, t);
                    }
                }
                Method::Oracle => {
                    let t = Instant::now();
                    let est = oracle_estimator(&x, &self.truth.support)?;
                    for &lambda in sweep_grid {
                        push(self.record(RecordMethod::Oracle, lambda, &est)?, t);
                    }
                }
                Method::St => {
                    if self.mode == Mode::Sweep {
                        for &lambda in &grid {
                            let t = Instant::now();
                            let raw = threshold_vec(&dual.u_tilde, &hard.with_lambda(lambda));
                            let bic = first_step.evaluate(&raw, lambda);
                            let mut rec = self.record(RecordMethod::St, lambda, &LoadingVector::normalize(raw))?;
                            rec.bic_total = Some(bic.total);
                            push(rec, t);
                        }
                    }
                    if with_bic {
                        let t = Instant::now();
                        let (_, best, _) = first_step.select(&grid, &hard)?;
                        let raw = threshold_vec(&dual.u_tilde, &hard.with_lambda(best.lambda));
                        let mut rec = self.record(RecordMethod::StBic, best.lambda, &LoadingVector::normalize(raw))?;
                        rec.bic_total = Some(best.total);
                        push(rec, t);
                    }
                }
                Method::Rspca => {
                    let opts = RspcaOptions::default().max_iter(cfg.max_iter);
                    if self.mode == Mode::Sweep {
                        for &lambda in &grid {
                            let t = Instant::now();
                            let fit = rspca(&x, &penalty.with_lambda(lambda), &opts)?;
                            let mut rec = self.record(RecordMethod::Rspca, lambda, &fit.loading)?;
                            rec.bic_total = Some(fit.last_bic.total);
                            rec.converged = Some(fit.trace.converged);
                            push(rec, t);
                        }
                    }
                    if with_bic {
                        let t = Instant::now();
                        let fit = rspca(&x, &penalty, &opts.clone().with_bic(Some(grid.clone())))?;
                        let mut rec = self.record(RecordMethod::RspcaBic, fit.lambda(), &fit.loading)?;
                        rec.bic_total = Some(fit.last_bic.total);
                        rec.converged = Some(fit.trace.converged);
                        push(rec, t);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn canonical_order(a: &ReplicationRecord, b: &ReplicationRecord) -> Ordering {
    a.pair
        .cmp(&b.pair)
        .then(a.method.cmp(&b.method))
        .then(a.rep.cmp(&b.rep))
        .then(a.lambda.total_cmp(&b.lambda))
}

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Domain(format!("cannot start worker pool: {e}")))
}

/// Runs every (pair, replication) task and summarizes the records.
pub fn run_experiment(cfg: &ExperimentConfig, mode: Mode) -> Result<ResultSet> {
    cfg.validate()?;
    let mut systems = Vec::with_capacity(cfg.pairs.len());
    let mut truths = Vec::with_capacity(cfg.pairs.len());
    let mut bounds = Vec::with_capacity(cfg.pairs.len());
    for &(alpha, beta) in &cfg.pairs {
        let sys = build_eigensystem(SpikedSpec::new(cfg.d, cfg.n, alpha, beta)?);
        truths.push(Truth {
            u1: LoadingVector::normalize(sys.u1()),
            support: sys.u1_support(),
            d: cfg.d,
        });
        systems.push(sys);
        bounds.push(pair_bounds(cfg, alpha, beta)?);
    }
    let tasks: Vec<(usize, usize)> = (0..cfg.pairs.len())
        .flat_map(|p| (0..cfg.replications).map(move |r| (p, r)))
        .collect();

    let pool = thread_pool(cfg.threads)?;
    let chunks: Vec<Vec<ReplicationRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(pair, rep)| {
                Task {
                    cfg,
                    mode,
                    pair,
                    rep,
                    sys: &systems[pair],
                    truth: &truths[pair],
                }
                .run()
            })
            .collect::<Result<_>>()
    })?;
    let mut records: Vec<ReplicationRecord> = chunks.into_iter().flatten().collect();
    records.sort_by(canonical_order);
    let summary = summarize(&records);
    Ok(ResultSet {
        d: cfg.d,
        records,
        summary,
        bounds,
    })
}

/// Per (pair, method) quartiles over replications.
///
/// Swept `st`/`rspca` rows have no single λ per replication and are left out;
/// their BIC-selected rows are summarized instead. For `pca` and `oracle` the
/// estimate does not depend on λ, so one row per replication is used.
pub fn summarize(records: &[ReplicationRecord]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let head = &records[start];
        let end = start
            + records[start..]
                .iter()
                .take_while(|r| r.pair == head.pair && r.method == head.method)
                .count();
        let group = &records[start..end];
        start = end;
        if matches!(head.method, RecordMethod::St | RecordMethod::Rspca) {
            continue;
        }
        let mut per_rep: Vec<&ReplicationRecord> = Vec::new();
        for r in group {
            if per_rep.last().is_none_or(|p| p.rep != r.rep) {
                per_rep.push(r);
            }
        }
        let col = |f: fn(&ReplicationRecord) -> f64| Quartiles::of(&per_rep.iter().map(|r| f(r)).collect::<Vec<_>>());
        out.push(SummaryRow {
            alpha: head.alpha,
            beta: head.beta,
            method: head.method,
            count: per_rep.len(),
            angle: col(|r| r.angle_deg),
            type1: col(|r| r.type1),
            type2: col(|r| r.type2),
            lambda: col(|r| r.lambda),
        });
    }
    out
}

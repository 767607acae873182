//! Single-sample demonstration on the discrete counterexample model: how
//! often the largest entry of the sample eigenvector sits on the spike
//! coordinate, against the closed-form probability.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use spca_core::estimators::pca_first;
use spca_core::model::rng::{replication_seed, seeded_rng, DISCRETE_STREAM};
use spca_core::model::{failure_probability, CounterexampleModel};

use crate::error::{LabError, Result};
use crate::output::{ensure_dir, write_file};
use crate::runner::thread_pool;

pub const DEFAULT_DIMS: [usize; 4] = [50, 100, 200, 400];

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRow {
    pub d: usize,
    pub alpha: f64,
    pub reps: usize,
    /// Replications whose largest |û_i| is at i = 1.
    pub hits: usize,
    pub frequency: f64,
    pub failure_probability: f64,
    /// Binomial standard error at `failure_probability`.
    pub std_error: f64,
}

impl CounterexampleRow {
    pub fn z_score(&self) -> f64 {
        if self.std_error == 0.0 {
            if self.frequency == self.failure_probability { 0.0 } else { f64::INFINITY }
        } else {
            (self.frequency - self.failure_probability) / self.std_error
        }
    }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

pub fn run_counterexample(dims: &[usize], alpha: f64, reps: usize, seed: u64, threads: usize) -> Result<Vec<CounterexampleRow>> {
    if dims.is_empty() || reps == 0 {
        return Err(LabError::Config("need at least one dimension and one replication".into()));
    }
    let models = dims
        .iter()
        .map(|&d| CounterexampleModel::new(d, alpha).map_err(|e| LabError::Config(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if dims.iter().any(|&d| d < 2) {
        return Err(LabError::Config("dimensions must be at least 2".into()));
    }
    let pool = thread_pool(threads)?;
    models
        .iter()
        .enumerate()
        .map(|(idx, model)| {
            let hits = pool.install(|| {
                (0..reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = seeded_rng(replication_seed(seed, idx as u64, rep as u64), DISCRETE_STREAM);
                        let x = model.sample_with(1, &mut rng);
                        Ok(usize::from(argmax_abs(pca_first(&x)?.entries()) == 0))
                    })
                    .sum::<Result<usize>>()
            })?;
            let p = failure_probability(model.d, alpha);
            Ok(CounterexampleRow {
                d: model.d,
                alpha,
                reps,
                hits,
                frequency: hits as f64 / reps as f64,
                failure_probability: p,
                std_error: (p * (1.0 - p) / reps as f64).sqrt(),
            })
        })
        .collect()
}

pub fn counterexample_csv(rows: &[CounterexampleRow]) -> String {
    let mut s = String::from("d,alpha,reps,hits,frequency,failure_probability,std_error\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.d, r.alpha, r.reps, r.hits, r.frequency, r.failure_probability, r.std_error
        );
    }
    s
}

/// Empirical frequencies with ±3 SE bars over the closed-form curve, log-d axis.
pub fn render_counterexample_svg(rows: &[CounterexampleRow]) -> String {
    let (w, h, left, right, top, bottom) = (560.0, 360.0, 60.0, 20.0, 40.0, 50.0);
    let lo = rows.iter().map(|r| r.d).min().unwrap_or(2).max(2) as f64;
    let hi = (rows.iter().map(|r| r.d).max().unwrap_or(4) as f64).max(lo * 2.0);
    let (lx0, lx1) = (lo.log10() - 0.1, hi.log10() + 0.1);
    let px = |d: f64| left + (d.log10() - lx0) / (lx1 - lx0) * (w - left - right);
    let py = |p: f64| top + (1.0 - p.clamp(0.0, 1.0)) * (h - top - bottom);
    let alpha = rows.first().map_or(0.5, |r| r.alpha);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="10" y="20" font-size="13">P(argmax |û_i| = 1), n = 1, α = {alpha}</text>"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        w - left - right,
        h - top - bottom
    );
    let curve: Vec<String> = (0..=100)
        .map(|i| {
            let d = 10f64.powf(lx0 + (lx1 - lx0) * i as f64 / 100.0).max(2.0);
            let p = failure_probability(d.round() as usize, alpha);
            format!("{:.2},{:.2}", px(d), py(p))
        })
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline class="theory" points="{}" fill="none" stroke="black"/>"#,
        curve.join(" ")
    );
    for r in rows {
        let x = px(r.d as f64);
        let _ = writeln!(
            s,
            r##"<line class="error-bar" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#b2182b"/>"##,
            py(r.frequency - 3.0 * r.std_error),
            py(r.frequency + 3.0 * r.std_error)
        );
        let _ = writeln!(
            s,
            r##"<circle class="empirical" cx="{x:.2}" cy="{:.2}" r="3.5" fill="#b2182b"/>"##,
            py(r.frequency)
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            h - bottom + 14.0,
            r.d
        );
    }
    for p in [0.0, 0.5, 1.0] {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{p}</text>"#, left - 4.0, py(p) + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">d (log scale)</text>"#,
        left + (w - left - right) / 2.0,
        h - 14.0
    );
    s.push_str("</svg>\n");
    s
}

pub fn emit_counterexample(rows: &[CounterexampleRow], dir: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(LabError::Precondition("no counterexample rows to write".into()));
    }
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir.join("counterexample.csv"), &counterexample_csv(rows))?,
        write_file(dir.join("counterexample.svg"), &render_counterexample_svg(rows))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_the_lowest_index_on_ties() {
        assert_eq!(argmax_abs(&[1.0, -3.0, 3.0]), 1);
        assert_eq!(argmax_abs(&[0.0, 0.0]), 0);
    }

    #[test]
    fn small_run_is_deterministic_across_pools() {
        let a = run_counterexample(&[20, 40], 0.5, 300, 9, 1).unwrap();
        let b = run_counterexample(&[20, 40], 0.5, 300, 9, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].reps, 300);
        assert!(counterexample_csv(&a).lines().count() == 3);
        assert!(render_counterexample_svg(&a).contains(r#"class="empirical""#));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(run_counterexample(&[], 0.5, 10, 1, 1).is_err());
        assert!(run_counterexample(&[10], 1.0, 10, 1, 1).is_err());
        assert!(run_counterexample(&[10], 0.5, 0, 1, 1).is_err());
    }
}

//! CSV tables and the resolved-configuration echo.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::runner::{Quartiles, ReplicationRecord, SummaryRow};

pub const REPLICATIONS_HEADER: &str =
    "alpha,beta,method,rep,lambda,angle_deg,type1,type2,df,bic_total,converged,runtime_ms";

pub const SUMMARY_HEADER: &str = "alpha,beta,method,count,\
angle_q1,angle_median,angle_q3,\
type1_q1,type1_median,type1_q3,\
type2_q1,type2_median,type2_q3,\
lambda_q1,lambda_median,lambda_q3";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn replications_csv(records: &[ReplicationRecord]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(REPLICATIONS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.alpha,
            r.beta,
            r.method.as_str(),
            r.rep,
            r.lambda,
            r.angle_deg,
            r.type1,
            r.type2,
            r.df,
            opt(r.bic_total),
            opt(r.converged),
            opt(r.runtime_ms),
        );
    }
    s
}

pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let q = |q: &Quartiles| format!("{},{},{}", q.q1, q.median, q.q3);
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for row in summary {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            row.alpha,
            row.beta,
            row.method.as_str(),
            row.count,
            q(&row.angle),
            q(&row.type1),
            q(&row.type2),
            q(&row.lambda),
        );
    }
    s
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

pub(crate) fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| LabError::io(&path, e))?;
    Ok(path)
}

/// Writes `replications.csv` and `summary.csv` into `dir`.
///
/// Refuses an empty record set without touching the file system.
pub fn emit_csv(records: &[ReplicationRecord], summary: &[SummaryRow], dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(LabError::Precondition("no records to write".into()));
    }
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir.join("replications.csv"), &replications_csv(records))?,
        write_file(dir.join("summary.csv"), &summary_csv(summary))?,
    ])
}

/// Echoes the configuration to `dir/config.resolved`.
pub fn write_resolved(cfg: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    ensure_dir(dir)?;
    write_file(dir.join("config.resolved"), &cfg.to_resolved_string())
}

//! Experiment configuration.
//!
//! Values are layered: built-in defaults, then the profile, then the
//! `key=value` file, then command-line flags. The resolved configuration is
//! written back in the same file format, so it can be fed to `--config`.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use spca_core::estimators::{PenaltyFamily, DEFAULT_SCAD_A};
use spca_core::model::SpikedSpec;

use crate::error::{LabError, Result};

/// An estimator evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Pca,
    St,
    Rspca,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pca, Method::St, Method::Rspca, Method::Oracle];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::St => "st",
            Method::Rspca => "rspca",
            Method::Oracle => "oracle",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pca" => Ok(Method::Pca),
            "st" => Ok(Method::St),
            "rspca" => Ok(Method::Rspca),
            "oracle" | "or" => Ok(Method::Oracle),
            other => Err(format!("unknown method `{other}` (expected pca, st, rspca or oracle)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    /// d = 10,000 and 100 replications.
    #[default]
    Paper,
    /// d = 2,000 and 50 replications.
    Desk,
}

impl Profile {
    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::Paper => "paper",
            Profile::Desk => "desk",
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "paper" => Ok(Profile::Paper),
            "desk" => Ok(Profile::Desk),
            other => Err(format!("unknown profile `{other}` (expected paper or desk)")),
        }
    }
}

/// The twenty (α, β) pairs of the simulation study.
pub fn default_pairs() -> Vec<(f64, f64)> {
    let mut pairs = Vec::with_capacity(20);
    for alpha in [0.2, 0.4, 0.6, 0.8] {
        for beta in [0.0, 0.1, 0.3, 0.5, 0.7] {
            pairs.push((alpha, beta));
        }
    }
    pairs
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub profile: Profile,
    pub pairs: Vec<(f64, f64)>,
    pub d: usize,
    pub n: usize,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub penalty: PenaltyFamily,
    pub scad_a: f64,
    pub lambda_min: f64,
    /// `None` scales the grid to each replication: `1.5 · max |X v1|`.
    pub lambda_max: Option<f64>,
    pub lambda_points: usize,
    /// Add BIC-selected rows to a λ sweep.
    pub bic: bool,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub max_iter: usize,
    /// Exponent for the upper λ bound; `None` takes the midpoint of `(θ, α − η)`.
    pub gamma: Option<f64>,
    pub delta: f64,
    /// Fill the `runtime_ms` column. Off by default so that outputs are
    /// reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Paper,
            pairs: default_pairs(),
            d: 10_000,
            n: 25,
            replications: 100,
            methods: Method::ALL.to_vec(),
            penalty: PenaltyFamily::Hard,
            scad_a: DEFAULT_SCAD_A,
            lambda_min: 1e-3,
            lambda_max: None,
            lambda_points: 50,
            bic: true,
            base_seed: 20_240_601,
            output_dir: PathBuf::from("spca-out"),
            threads: 0,
            max_iter: 200,
            gamma: None,
            delta: 1.0,
            record_timing: false,
        }
    }
}

/// Partial configuration from one source (file or flags).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub profile: Option<Profile>,
    pub pairs: Option<Vec<(f64, f64)>>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub replications: Option<usize>,
    pub methods: Option<Vec<Method>>,
    pub penalty: Option<PenaltyFamily>,
    pub scad_a: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<Option<f64>>,
    pub lambda_points: Option<usize>,
    pub bic: Option<bool>,
    pub base_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub max_iter: Option<usize>,
    pub gamma: Option<Option<f64>>,
    pub delta: Option<f64>,
    pub record_timing: Option<bool>,
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_auto(key: &str, value: &str) -> std::result::Result<Option<f64>, String> {
    if value == "auto" {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}

fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("invalid boolean `{value}` for `{key}`")),
    }
}

/// Parses `0.6:0.1, 0.2:0.7` into (α, β) pairs.
pub fn parse_pairs(value: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| format!("pair `{item}` must look like alpha:beta"))?;
            Ok((parse_num("pairs", a.trim())?, parse_num("pairs", b.trim())?))
        })
        .collect()
}

pub fn parse_methods(value: &str) -> std::result::Result<Vec<Method>, String> {
    let mut methods: Vec<Method> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()?;
    methods.sort();
    methods.dedup();
    Ok(methods)
}

impl ConfigOverrides {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "profile" => self.profile = Some(value.parse()?),
            "pairs" => self.pairs = Some(parse_pairs(value)?),
            "d" => self.d = Some(parse_num(key, value)?),
            "n" => self.n = Some(parse_num(key, value)?),
            "replications" | "reps" => self.replications = Some(parse_num(key, value)?),
            "methods" => self.methods = Some(parse_methods(value)?),
            "penalty" => self.penalty = Some(value.parse().map_err(|e: spca_core::SpcaError| e.to_string())?),
            "scad_a" => self.scad_a = Some(parse_num(key, value)?),
            "lambda_min" => self.lambda_min = Some(parse_num(key, value)?),
            "lambda_max" => self.lambda_max = Some(parse_auto(key, value)?),
            "lambda_points" => self.lambda_points = Some(parse_num(key, value)?),
            "bic" => self.bic = Some(parse_bool(key, value)?),
            "seed" | "base_seed" => self.base_seed = Some(parse_num(key, value)?),
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(parse_num(key, value)?),
            "max_iter" => self.max_iter = Some(parse_num(key, value)?),
            "gamma" => self.gamma = Some(parse_auto(key, value)?),
            "delta" => self.delta = Some(parse_num(key, value)?),
            "record_timing" => self.record_timing = Some(parse_bool(key, value)?),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Parses a `key=value` file. Blank lines and `#` comments are skipped.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {lineno}: expected key=value, got `{line}`")))?;
            out.set(key.trim(), value.trim())
                .map_err(|e| LabError::Config(format!("line {lineno}: {e}")))?;
        }
        Ok(out)
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
            };
        }
        take!(
            profile, pairs, d, n, replications, methods, penalty, scad_a, lambda_min, lambda_max,
            lambda_points, bic, base_seed, output_dir, threads, max_iter, gamma, delta, record_timing
        );
    }
}

/// Layers defaults, profile, file and flags, then validates.
pub fn parse_config(file: Option<&str>, flags: &ConfigOverrides) -> Result<ExperimentConfig> {
    let file = file.map(ConfigOverrides::parse_file).transpose()?.unwrap_or_default();
    let mut cfg = ExperimentConfig::default();
    let profile = flags.profile.or(file.profile).unwrap_or_default();
    cfg.profile = profile;
    if profile == Profile::Desk {
        cfg.d = 2_000;
        cfg.replications = 50;
    }
    file.apply(&mut cfg);
    flags.apply(&mut cfg);
    cfg.profile = profile;
    cfg.methods.sort();
    cfg.methods.dedup();
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(LabError::Config(msg));
        if self.replications == 0 {
            return fail("replications must be at least 1".into());
        }
        if self.pairs.is_empty() {
            return fail("pairs must be non-empty".into());
        }
        if self.methods.is_empty() {
            return fail("methods must be non-empty".into());
        }
        if self.d < 2 || self.n == 0 {
            return fail(format!("need d >= 2 and n >= 1, got d={} n={}", self.d, self.n));
        }
        for &(alpha, beta) in &self.pairs {
            SpikedSpec::new(self.d, self.n, alpha, beta)
                .map_err(|e| LabError::Config(format!("pair ({alpha}, {beta}): {e}")))?;
        }
        if !(self.lambda_min > 0.0 && self.lambda_min.is_finite()) {
            return fail(format!("lambda_min must be positive, got {}", self.lambda_min));
        }
        if let Some(max) = self.lambda_max {
            if !(max > self.lambda_min && max.is_finite()) {
                return fail(format!("lambda_max ({max}) must exceed lambda_min ({})", self.lambda_min));
            }
        }
        if self.penalty == PenaltyFamily::Scad && !(self.scad_a > 2.0) {
            return fail(format!("scad_a must exceed 2, got {}", self.scad_a));
        }
        if self.max_iter == 0 {
            return fail("max_iter must be at least 1".into());
        }
        if !(self.delta > 0.5) {
            return fail(format!("delta must exceed 1/2, got {}", self.delta));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return fail(format!("gamma must be positive, got {g}"));
            }
        }
        Ok(())
    }

    /// The configuration in `key=value` form, readable by [`parse_config`].
    pub fn to_resolved_string(&self) -> String {
        let auto = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), |x| x.to_string());
        let pairs: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        let methods: Vec<&str> = self.methods.iter().map(Method::as_str).collect();
        let mut s = String::new();
        let _ = writeln!(s, "profile={}", self.profile.as_str());
        let _ = writeln!(s, "pairs={}", pairs.join(","));
        let _ = writeln!(s, "d={}", self.d);
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "replications={}", self.replications);
        let _ = writeln!(s, "methods={}", methods.join(","));
        let _ = writeln!(s, "penalty={}", self.penalty);
        let _ = writeln!(s, "scad_a={}", self.scad_a);
        let _ = writeln!(s, "lambda_min={}", self.lambda_min);
        let _ = writeln!(s, "lambda_max={}", auto(self.lambda_max));
        let _ = writeln!(s, "lambda_points={}", self.lambda_points);
        let _ = writeln!(s, "bic={}", self.bic);
        let _ = writeln!(s, "seed={}", self.base_seed);
        let _ = writeln!(s, "output_dir={}", self.output_dir.display());
        let _ = writeln!(s, "threads={}", self.threads);
        let _ = writeln!(s, "max_iter={}", self.max_iter);
        let _ = writeln!(s, "gamma={}", auto(self.gamma));
        let _ = writeln!(s, "delta={}", self.delta);
        let _ = writeln!(s, "record_timing={}", self.record_timing);
        s
    }
}

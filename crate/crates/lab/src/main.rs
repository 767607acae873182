use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spca_core::estimators::PenaltyFamily;
use spca_lab::config::parse_methods;
use spca_lab::counterexample::{emit_counterexample, run_counterexample, DEFAULT_DIMS};
use spca_lab::output::{emit_csv, write_resolved};
use spca_lab::plot::{emit_phase_diagram, emit_plots};
use spca_lab::{parse_config, run_experiment, ConfigOverrides, LabError, Mode, Profile};

#[derive(Parser)]
#[command(name = "spca-lab", version, about = "Sparse PCA experiments in the high-dimension, low-sample-size regime")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Angle and support-error curves over a λ grid, with BIC markers
    Sweep(ExperimentArgs),
    /// One BIC-selected fit per method and replication
    Bic(ExperimentArgs),
    /// BIC runs over every (α, β) pair and the phase diagram
    Phase(ExperimentArgs),
    /// Argmax frequency on the discrete counterexample model versus its closed form
    Counterexample(CounterexampleArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// key=value configuration file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Spike index of a single-pair run (requires --beta)
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    /// Sparsity index of a single-pair run (requires --alpha)
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated subset of pca, st, rspca, oracle
    #[arg(long)]
    method: Option<String>,
    /// soft, hard or scad
    #[arg(long)]
    penalty: Option<String>,
    #[arg(long)]
    scad_a: Option<f64>,
    #[arg(long)]
    lambda_min: Option<f64>,
    /// Upper end of the λ grid, or `auto`
    #[arg(long)]
    lambda_max: Option<String>,
    #[arg(long)]
    lambda_points: Option<usize>,
    /// Add BIC-selected rows to a sweep (`--bic false` turns them off)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    bic: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["paper", "desk"])]
    profile: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Comma-separated dimensions
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DIMS)]
    d: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    #[arg(long, value_name = "DIR", default_value = "spca-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl ExperimentArgs {
    fn overrides(&self) -> Result<ConfigOverrides, LabError> {
        let bad = |e: String| LabError::Config(e);
        let mut o = ConfigOverrides {
            pairs: self.alpha.zip(self.beta).map(|p| vec![p]),
            d: self.d,
            n: self.n,
            replications: self.reps,
            scad_a: self.scad_a,
            lambda_min: self.lambda_min,
            lambda_points: self.lambda_points,
            bic: self.bic,
            base_seed: self.seed,
            output_dir: self.out.clone(),
            threads: self.threads,
            ..Default::default()
        };
        if let Some(m) = &self.method {
            o.methods = Some(parse_methods(m).map_err(bad)?);
        }
        if let Some(p) = &self.penalty {
            o.penalty = Some(p.parse::<PenaltyFamily>().map_err(|e| bad(e.to_string()))?);
        }
        if let Some(max) = &self.lambda_max {
            o.set("lambda_max", max).map_err(bad)?;
        }
        if let Some(p) = &self.profile {
            o.profile = Some(p.parse::<Profile>().map_err(bad)?);
        }
        Ok(o)
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn experiment(args: &ExperimentArgs, mode: Mode, phase: bool) -> Result<(), LabError> {
    let text = match &args.config {
        Some(path) => Some(
            fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let cfg = parse_config(text.as_deref(), &args.overrides()?)?;
    let out: &Path = &cfg.output_dir;
    let result = run_experiment(&cfg, mode)?;
    let mut paths = emit_csv(&result.records, &result.summary, out)?;
    paths.push(write_resolved(&cfg, out)?);
    if mode == Mode::Sweep {
        paths.extend(emit_plots(&result.records, &result.bounds, cfg.d, out)?);
    }
    let has_bic = result.summary.iter().any(|s| s.method.is_bic());
    if phase || has_bic {
        paths.push(emit_phase_diagram(&result.summary, cfg.d, out)?);
    }
    report(&paths);
    for s in &result.summary {
        println!(
            "alpha={} beta={} {:<10} median angle {:.2} deg, type1 {:.3}, type2 {:.3}",
            s.alpha,
            s.beta,
            s.method.as_str(),
            s.angle.median,
            s.type1.median,
            s.type2.median
        );
    }
    Ok(())
}

fn counterexample(args: &CounterexampleArgs) -> Result<(), LabError> {
    let rows = run_counterexample(&args.d, args.alpha, args.reps, args.seed, args.threads)?;
    report(&emit_counterexample(&rows, &args.out)?);
    for r in &rows {
        println!(
            "d={:<6} frequency {:.4}  closed form {:.4}  z {:+.2}",
            r.d,
            r.frequency,
            r.failure_probability,
            r.z_score()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(a) => experiment(a, Mode::Sweep, false),
        Command::Bic(a) => experiment(a, Mode::Bic, false),
        Command::Phase(a) => experiment(a, Mode::Bic, true),
        Command::Counterexample(a) => counterexample(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spca-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

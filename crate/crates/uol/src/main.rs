use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use uol::runner::{self, ExperimentConfig};

/// Batch driver for the unstable-obstacle laboratory.
///
/// Experiments are single JSON documents; see the library examples for
/// programmatic use. CSV artifact columns per task:
///   solve-max/solve-min/minimize: free_boundary.csv = polyline,vertex,x,y,grad_norm;
///     minimize additionally writes descent_<start>.csv = step,energy,grad_norm,step_size
///   monotonicity: monotonicity_<k>.csv = r,phi,drift_from_prev
///   blowup: blowup.csv = r,s_value,s_over_r2,a,b,c,fit_residual,rotation_angle,regime_code;
///     rotation.csv = r,theta,distance; phi_fit.csv = r,rho,phi_hat
///   instability-probe: probe.csv = delta,dirichlet,boundary,total
#[derive(Parser)]
#[command(name = "uol", version, about, verbatim_doc_comment)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment configuration and write a hashed report.
    Run {
        config: PathBuf,
        /// Output directory; defaults to $UOL_OUTPUT_ROOT/<task> or
        /// ./uol-runs/<task>.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a configuration, echoing it with defaults applied.
    Validate { config: PathBuf },
    /// Re-verify a run directory: artifact existence and content hashes.
    Report { run_dir: PathBuf },
}

fn default_out_dir(config: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = &config.output_dir {
        return PathBuf::from(dir);
    }
    let root = std::env::var("UOL_OUTPUT_ROOT").unwrap_or_else(|_| "uol-runs".into());
    PathBuf::from(root).join(config.task.name())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> uol::Result<ExitCode> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let out_dir = out.unwrap_or_else(|| default_out_dir(&cfg));
            let report = runner::run(&cfg, &out_dir)?;
            println!("task: {}", cfg.task.name());
            for (k, v) in &report.metrics {
                println!("  {k} = {v:.12e}");
            }
            for (k, v) in &report.summary {
                println!("  {k} = {v}");
            }
            println!(
                "  wall clock: {:.3}s, {} artifacts in {}",
                report.wall_clock_seconds,
                report.artifacts.len(),
                out_dir.display()
            );
            if report.is_success() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &report.failures {
                    eprintln!("FAIL: {f}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            println!("{}", serde_json::to_string_pretty(&cfg).map_err(uol::Error::from)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { run_dir } => {
            let report = runner::verify_run_dir(&run_dir)?;
            println!("task: {} — manifest verified", report.config.task.name());
            for (k, v) in &report.metrics {
                println!("  {k} = {v:.12e}");
            }
            if report.is_success() {
                println!("  status: ok");
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &report.failures {
                    println!("  recorded failure: {f}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

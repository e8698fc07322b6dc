//! Command-line driver.
//!
//! Exit codes: 0 = target ratio reached, 2 = target not reached within the
//! iteration budget, 1 = error.
//!
//!   qaoa-depth solve --instance data/maxcut7.txt --algorithm apg --lambda 0.72 --tol 0 --out run.csv
//!   qaoa-depth sweep --instance data/maxcut7.txt --lambda-grid 2,1.2,0.72,0.432
//!   qaoa-depth oracle --instance data/maxcut10.txt

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qaoa_depth::harness::{
    self, config_file_args, format_oracle, init_from_flags, ExitStatus, ExperimentSpec,
    LambdaChoice, OutputFormat, ReplicaSpec, SwitchRule,
};
use qaoa_depth::optimizer::{Algorithm, GradientBackend, OptimizerConfig};
use qaoa_depth::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "qaoa-depth",
    version,
    about = "L1-regularized control-depth selection for QAOA on Max-Cut"
)]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one optimization and write its trace.
    Solve(RunArgs),
    /// Regularized phase, then fixed-support gradient descent.
    TwoPhase {
        #[command(flatten)]
        run: RunArgs,
        /// Switch after this many regularized iterations instead of at the target ratio.
        #[arg(long)]
        switch_at: Option<usize>,
        /// Continue into phase 2 even if phase 1 missed the target.
        #[arg(long)]
        allow_unreached: bool,
    },
    /// Try a decreasing lambda grid and keep the first that reaches the target.
    Sweep(RunArgs),
    /// Random-initialization ensemble statistics.
    Ensemble(RunArgs),
    /// Final ratio/depth/length over several initial depths.
    DepthScan {
        #[command(flatten)]
        run: RunArgs,
        /// Initial control depths (even), e.g. 20,24,28.
        #[arg(long, value_delimiter = ',', required = true)]
        depths: Vec<usize>,
    },
    /// Exhaustive spectrum of an instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Pg,
    Apg,
    Gd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GradArg {
    Fd,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Instance file (`nodes N` / `edge i j w` lines).
    #[arg(long)]
    instance: PathBuf,
    /// Flat key=value file mirroring these flags; flags given here win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of layer pairs; the control depth is 2p.
    #[arg(long, default_value_t = 7)]
    p: usize,
    #[arg(long, default_value_t = 0.006)]
    eta: f64,
    #[arg(long, conflicts_with = "lambda_grid")]
    lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Early-stop threshold on the composite objective; 0 disables it.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 2)]
    q: usize,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 0.9)]
    r_star: f64,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Apg)]
    algorithm: AlgorithmArg,
    /// Constant initial angle.
    #[arg(long, conflicts_with = "init_range")]
    init: Option<f64>,
    /// Uniform initial angles, LOW,HIGH.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    init_range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long, value_enum, default_value_t = GradArg::Fd)]
    grad: GradArg,
    /// Total iteration budget of the two-phase protocol.
    #[arg(long = "phase2-total")]
    phase2_total: Option<usize>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

impl RunArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let range = match self.init_range.as_deref() {
            None => None,
            Some([low, high]) => Some((*low, *high)),
            Some(other) => {
                return Err(Error::Config(format!(
                    "--init-range takes LOW,HIGH, got {other:?}"
                )))
            }
        };
        let config = OptimizerConfig {
            eta: self.eta,
            lambda: self.lambda.unwrap_or(0.0),
            epsilon: self.epsilon,
            tol: self.tol,
            q: self.q,
            max_iters: self.max_iters,
            algorithm: match self.algorithm {
                AlgorithmArg::Pg => Algorithm::Pg,
                AlgorithmArg::Apg => Algorithm::Apg,
                AlgorithmArg::Gd => Algorithm::Gd,
            },
            r_star: self.r_star,
            init: init_from_flags(self.init, range, self.seed),
            gradient: match self.grad {
                GradArg::Fd => GradientBackend::CentralDifference,
                GradArg::Exact => GradientBackend::Exact,
            },
        };
        let lambdas = match &self.lambda_grid {
            Some(grid) => LambdaChoice::Grid(grid.clone()),
            None => LambdaChoice::Single(config.lambda),
        };
        let replicas = self.replicas.map(|count| {
            let (low, high) = range.unwrap_or((0.27, 0.33));
            ReplicaSpec {
                count,
                seed: self.seed,
                low,
                high,
            }
        });
        Ok(ExperimentSpec {
            instance: self.instance.clone(),
            config,
            lambdas,
            layers: self.p,
            replicas,
            phase2_total: self.phase2_total,
            switch: SwitchRule::Threshold,
            allow_unreached: false,
            workers: self.workers,
            out: self.out.clone(),
            format: match self.format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            },
        })
    }
}

/// Splices `--config FILE` contents in front of the command-line flags so
/// that explicit flags override file values.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(
            args.get(pos + 1)
                .ok_or_else(|| Error::Config("--config needs a path".into()))?,
        ),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let from_file = config_file_args(&text, &path)?;
    // argv[0] and the subcommand come first.
    let split = 2.min(args.len());
    let mut out = args[..split].to_vec();
    out.extend(from_file);
    out.extend_from_slice(&args[split..]);
    Ok(out)
}

fn summarize(result: &qaoa_depth::RunResult) {
    let last = result.last();
    println!(
        "final: iter {} r {:.6} f {:.6} active_depth {} l1_length {:.6} ops {} evals {}",
        last.iter,
        last.r,
        last.f,
        last.active_depth,
        last.l1_length,
        qaoa_depth::schedule::control_op_count(&result.schedule, 0.0),
        last.evals
    );
    match result.first_hit_iteration {
        Some(k) => println!(
            "target reached at iteration {k} (active_depth {})",
            result.trace[k].active_depth
        ),
        None => println!("target not reached"),
    }
    println!("max |angle| {:.6}", result.max_abs_angle);
}

fn execute(cli: Cli) -> Result<ExitStatus> {
    match cli.command {
        Command::Solve(args) => {
            let result = harness::run_single(&args.spec()?)?;
            summarize(&result);
            Ok(ExitStatus::from_reached(result.reached_target()))
        }
        Command::TwoPhase {
            run,
            switch_at,
            allow_unreached,
        } => {
            let mut spec = run.spec()?;
            spec.switch = switch_at.map_or(SwitchRule::Threshold, SwitchRule::AtIteration);
            spec.allow_unreached = allow_unreached;
            let outcome = harness::run_two_phase(&spec)?;
            println!(
                "switched after {} iterations (phase 1 target {}, phase 2 {})",
                outcome.switch_iteration,
                if outcome.phase1_reached {
                    "reached"
                } else {
                    "missed"
                },
                if outcome.phase2_ran { "ran" } else { "skipped" },
            );
            summarize(&outcome.result);
            Ok(ExitStatus::from_reached(outcome.result.reached_target()))
        }
        Command::Sweep(args) => {
            let mut spec = args.spec()?;
            if let LambdaChoice::Single(l) = spec.lambdas {
                spec.lambdas = LambdaChoice::Grid(vec![l]);
            }
            let report = harness::run_sweep(&spec)?;
            for entry in &report.rejected {
                println!(
                    "lambda {}: rejected (final r {:.6}, depth {})",
                    entry.lambda,
                    entry.result.last().r,
                    entry.result.last().active_depth
                );
            }
            match &report.selected {
                Some(entry) => {
                    println!("lambda {}: selected", entry.lambda);
                    summarize(&entry.result);
                }
                None => println!("no lambda reached the target"),
            }
            Ok(ExitStatus::from_reached(report.selected.is_some()))
        }
        Command::Ensemble(args) => {
            let spec = args.spec()?;
            let outcome = harness::run_random_init_ensemble(&spec)?;
            let s = &outcome.summary;
            let k = s.mean.len() - 1;
            println!(
                "{} replicas ({} failed); iteration {k}: mean r {:.6} std {:.3e}",
                s.replicas, s.failed, s.mean[k], s.std[k]
            );
            Ok(ExitStatus::from_reached(s.mean[k] >= spec.config.r_star))
        }
        Command::DepthScan { run, depths } => {
            let spec = run.spec()?;
            let rows = harness::run_depth_scan(&spec, &depths)?;
            println!("{}", harness::DEPTH_SCAN_HEADER);
            for r in &rows {
                let hit = r
                    .at_threshold
                    .map(|s| format!("{},{},{:.5}", s.iteration, s.active_depth, s.l1_length))
                    .unwrap_or_else(|| ",,".into());
                println!(
                    "{},{},{:.4},{},{:.5},{hit}",
                    r.initial_depth, r.lambda, r.final_r, r.final_depth, r.final_length
                );
            }
            Ok(ExitStatus::from_reached(
                rows.iter().all(|r| r.final_r >= spec.config.r_star),
            ))
        }
        Command::Oracle { instance } => {
            let (graph, spectrum) = harness::oracle(&instance)?;
            print!("{}", format_oracle(&graph, &spectrum));
            Ok(ExitStatus::TargetReached)
        }
    }
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ExitStatus::Error as u8);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(ExitStatus::Error as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match execute(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::Error as u8)
        }
    }
}

//! Experiment driver: single runs, two-phase refinement, lambda sweeps,
//! random-initialization ensembles and initial-depth scans, with CSV/JSON
//! trace output.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxcut::{bitstring, load_instance, SpectrumSummary, WeightedGraph};
use crate::optimizer::{
    self, lambda_sweep, refine_fixed_support, run_until_target, uniform_schedule, Init,
    IterateRecord, OptimizerConfig, Problem, RunResult, SweepReport,
};
use crate::schedule::{merged_operations, ControlOp, ControlSchedule};

/// Exact header of trace CSV files.
pub const TRACE_HEADER: &str =
    "iter,phase,f,F,r,active_depth,l1_length,evals,accepted_extrapolation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    TargetReached = 0,
    Error = 1,
    TargetMissed = 2,
}

impl ExitStatus {
    pub fn from_reached(reached: bool) -> Self {
        if reached {
            Self::TargetReached
        } else {
            Self::TargetMissed
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaChoice {
    Single(f64),
    Grid(Vec<f64>),
}

impl LambdaChoice {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::Single(l) => vec![*l],
            Self::Grid(g) => g.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSpec {
    pub count: usize,
    pub seed: u64,
    pub low: f64,
    pub high: f64,
}

/// When the two-phase protocol drops the regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchRule {
    /// At the first iteration with `r >= r_star`; phase 1 is capped by `max_iters`.
    Threshold,
    /// After exactly this many regularized iterations.
    AtIteration(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instance: PathBuf,
    pub config: OptimizerConfig,
    pub lambdas: LambdaChoice,
    pub layers: usize,
    pub replicas: Option<ReplicaSpec>,
    pub phase2_total: Option<usize>,
    pub switch: SwitchRule,
    /// Run phase 2 from the phase-1 endpoint even if the target was missed.
    pub allow_unreached: bool,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentSpec {
    /// Defaults for `instance`: p = 7, lambda = 0, csv output.
    pub fn new(instance: impl Into<PathBuf>) -> Self {
        Self {
            instance: instance.into(),
            config: OptimizerConfig::default(),
            lambdas: LambdaChoice::Single(0.0),
            layers: 7,
            replicas: None,
            phase2_total: None,
            switch: SwitchRule::Threshold,
            allow_unreached: false,
            workers: 1,
            out: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.layers == 0 {
            return Err(Error::Config("p must be >= 1".into()));
        }
        if let LambdaChoice::Grid(g) = &self.lambdas {
            if g.is_empty() {
                return Err(Error::Config("lambda grid is empty".into()));
            }
        }
        if let Some(r) = &self.replicas {
            if r.count == 0 {
                return Err(Error::Config("replicas must be >= 1".into()));
            }
            if !(r.low <= r.high) {
                return Err(Error::Config(format!(
                    "bad init range [{}, {}]",
                    r.low, r.high
                )));
            }
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    fn single_lambda(&self) -> Result<f64> {
        match self.lambdas {
            LambdaChoice::Single(l) => Ok(l),
            LambdaChoice::Grid(_) => Err(Error::Config(
                "this command takes a single --lambda, not a grid".into(),
            )),
        }
    }

    fn config_for(&self, lambda: f64) -> OptimizerConfig {
        OptimizerConfig {
            lambda,
            ..self.config.clone()
        }
    }

    fn problem(&self) -> Result<Problem> {
        Problem::from_graph(&load_instance(&self.instance)?)
    }

    fn initial_schedule(&self) -> Result<ControlSchedule> {
        self.config.init.schedule(self.layers)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))
    }
}

// ---------------------------------------------------------------------------
// Trace files
// ---------------------------------------------------------------------------

fn trace_row(out: &mut String, r: &IterateRecord) {
    let _ = writeln!(
        out,
        "{},{},{:?},{:?},{:?},{},{:?},{},{}",
        r.iter,
        r.phase,
        r.f,
        r.composite,
        r.r,
        r.active_depth,
        r.l1_length,
        r.evals,
        r.accepted_extrapolation
    );
}

pub fn write_trace_csv(mut w: impl Write, trace: &[IterateRecord]) -> Result<()> {
    let mut buf = String::with_capacity(64 * (trace.len() + 1));
    buf.push_str(TRACE_HEADER);
    buf.push('\n');
    for r in trace {
        trace_row(&mut buf, r);
    }
    w.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn read_trace_csv(r: impl Read) -> Result<Vec<IterateRecord>> {
    let reader = BufReader::new(r);
    let path = PathBuf::from("<trace>");
    let mut lines = reader.lines().enumerate();
    let bad = |line: usize, message: String| Error::Parse {
        path: path.clone(),
        line,
        message,
    };
    match lines.next() {
        Some((_, Ok(h))) if h == TRACE_HEADER => {}
        Some((_, Ok(h))) => return Err(bad(1, format!("unexpected header '{h}'"))),
        Some((_, Err(e))) => return Err(e.into()),
        None => return Err(bad(1, "empty trace".into())),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            return Err(bad(
                line_no,
                format!("expected 9 columns, got {}", cols.len()),
            ));
        }
        fn field<T: FromStr>(s: &str) -> Option<T> {
            s.parse().ok()
        }
        let rec = (|| {
            Some(IterateRecord {
                iter: field(cols[0])?,
                phase: field(cols[1])?,
                f: field(cols[2])?,
                composite: field(cols[3])?,
                r: field(cols[4])?,
                active_depth: field(cols[5])?,
                l1_length: field(cols[6])?,
                evals: field(cols[7])?,
                accepted_extrapolation: field(cols[8])?,
            })
        })()
        .ok_or_else(|| bad(line_no, format!("malformed row '{line}'")))?;
        out.push(rec);
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// `out.csv` + `ops` -> `out.ops.json`
fn sidecar(path: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

pub fn write_run(path: &Path, format: OutputFormat, result: &RunResult) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = create(path)?;
            write_trace_csv(&mut w, &result.trace)?;
            w.flush()?;
            let mut s = create(&sidecar(path, "schedule", "json"))?;
            serde_json::to_writer_pretty(&mut s, &result.schedule)?;
            s.flush()?;
        }
        OutputFormat::Json => {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, result)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_partial(path: &Path, trace: &[IterateRecord]) -> Result<()> {
    let mut w = create(path)?;
    write_trace_csv(&mut w, trace)?;
    w.flush()?;
    Ok(())
}

/// Saves the partial trace of a diverged run before handing the error back.
fn preserve_partial(spec: &ExperimentSpec, err: Error) -> Error {
    if let (Error::Divergence { partial, .. }, Some(out)) = (&err, &spec.out) {
        if let Err(io) = write_partial(out, partial) {
            return io;
        }
    }
    err
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// One run of the configured algorithm.
pub fn run_single(spec: &ExperimentSpec) -> Result<RunResult> {
    spec.validate()?;
    let lambda = spec.single_lambda()?;
    let problem = spec.problem()?;
    let x0 = spec.initial_schedule()?;
    let result = optimizer::run(&spec.config_for(lambda), &problem, &x0)
        .map_err(|e| preserve_partial(spec, e))?;
    if let Some(out) = &spec.out {
        write_run(out, spec.format, &result)?;
    }
    Ok(result)
}

/// Decreasing-lambda selection.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepReport> {
    spec.validate()?;
    let grid = spec.lambdas.values();
    let problem = spec.problem()?;
    let x0 = spec.initial_schedule()?;
    let report = lambda_sweep(&grid, &spec.config, &problem, &x0)?;
    if let Some(out) = &spec.out {
        match spec.format {
            OutputFormat::Json => {
                let mut w = create(out)?;
                serde_json::to_writer_pretty(&mut w, &report)?;
                w.flush()?;
            }
            OutputFormat::Csv => {
                let entries = report.rejected.iter().chain(report.selected.as_ref());
                let mut index =
                    String::from("lambda,selected,first_hit_iteration,final_r,final_depth,trace\n");
                for entry in entries {
                    let path = sidecar(out, &format!("lambda{}", entry.lambda), "csv");
                    write_run(&path, OutputFormat::Csv, &entry.result)?;
                    let selected = report
                        .selected
                        .as_ref()
                        .is_some_and(|s| s.lambda == entry.lambda);
                    let _ = writeln!(
                        index,
                        "{:?},{},{},{:?},{},{}",
                        entry.lambda,
                        selected,
                        entry
                            .result
                            .first_hit_iteration
                            .map(|k| k.to_string())
                            .unwrap_or_default(),
                        entry.result.last().r,
                        entry.result.last().active_depth,
                        path.file_name()
                            .and_then(|n| n.to_str())
                            .unwrap_or_default(),
                    );
                }
                let mut w = create(out)?;
                w.write_all(index.as_bytes())?;
                w.flush()?;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseOutcome {
    /// Combined trace; phase-2 rows continue the iteration and evaluation counts.
    pub result: RunResult,
    /// Number of regularized iterations before the switch.
    pub switch_iteration: usize,
    pub phase1_reached: bool,
    pub phase2_ran: bool,
    /// Merged control operations of the final schedule.
    pub operations: Vec<ControlOp>,
}

/// Regularized phase followed by fixed-support gradient descent up to
/// `phase2_total` iterations in total.
pub fn run_two_phase(spec: &ExperimentSpec) -> Result<TwoPhaseOutcome> {
    spec.validate()?;
    let total = spec
        .phase2_total
        .ok_or_else(|| Error::Config("two-phase needs --phase2-total".into()))?;
    let lambda = spec.single_lambda()?;
    let problem = spec.problem()?;
    let x0 = spec.initial_schedule()?;
    let mut cfg = spec.config_for(lambda);
    cfg.tol = 0.0;
    let phase1 = match spec.switch {
        SwitchRule::Threshold => {
            cfg.max_iters = cfg.max_iters.min(total);
            run_until_target(&cfg, &problem, &x0)
        }
        SwitchRule::AtIteration(n) => {
            cfg.max_iters = n.min(total);
            optimizer::run(&cfg, &problem, &x0)
        }
    }
    .map_err(|e| preserve_partial(spec, e))?;

    let switch_iteration = phase1.last().iter;
    let phase1_reached = phase1.reached_target();
    let run_phase2 = match spec.switch {
        SwitchRule::Threshold => phase1_reached || spec.allow_unreached,
        SwitchRule::AtIteration(_) => true,
    };
    let remaining = total.saturating_sub(switch_iteration);

    let mut combined = phase1.clone();
    let phase2_ran = run_phase2 && remaining > 0;
    if phase2_ran {
        let refine = refine_fixed_support(&cfg, &problem, &phase1.schedule, remaining).map_err(
            |e| match e {
                Error::Divergence {
                    iter,
                    value,
                    partial,
                } => {
                    let mut joined = phase1.trace.clone();
                    joined.extend(shift(&partial[1.min(partial.len())..], &phase1));
                    preserve_partial(
                        spec,
                        Error::Divergence {
                            iter: iter + switch_iteration,
                            value,
                            partial: Box::new(joined),
                        },
                    )
                }
                other => other,
            },
        )?;
        combined.trace.extend(shift(&refine.trace[1..], &phase1));
        combined.schedule = refine.schedule;
        combined.max_abs_angle = combined.max_abs_angle.max(refine.max_abs_angle);
        if combined.first_hit_iteration.is_none() {
            combined.first_hit_iteration = refine
                .first_hit_iteration
                .filter(|&k| k > 0)
                .map(|k| k + switch_iteration);
        }
    }

    let outcome = TwoPhaseOutcome {
        operations: merged_operations(&combined.schedule, 0.0),
        result: combined,
        switch_iteration,
        phase1_reached,
        phase2_ran,
    };
    if let Some(out) = &spec.out {
        write_run(out, spec.format, &outcome.result)?;
        let mut w = create(&sidecar(out, "ops", "json"))?;
        serde_json::to_writer_pretty(&mut w, &outcome.operations)?;
        w.flush()?;
    }
    Ok(outcome)
}

fn shift<'a>(
    records: &'a [IterateRecord],
    phase1: &'a RunResult,
) -> impl Iterator<Item = IterateRecord> + 'a {
    let last = phase1.last();
    records.iter().map(move |r| IterateRecord {
        iter: r.iter + last.iter,
        evals: r.evals + last.evals,
        ..*r
    })
}

/// Per-iteration statistics of r over replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub replicas: usize,
    pub failed: usize,
    pub mean: Vec<f64>,
    /// Sample standard deviation (n - 1).
    pub std: Vec<f64>,
}

impl EnsembleSummary {
    /// Shorter traces (early stops) are extended with their last value.
    pub fn from_traces(traces: &[Vec<f64>], failed: usize) -> Result<Self> {
        if traces.len() < 2 {
            return Err(Error::Config(format!(
                "ensemble statistics need at least 2 successful replicas, got {}",
                traces.len()
            )));
        }
        let len = traces.iter().map(Vec::len).max().unwrap_or(0);
        let n = traces.len() as f64;
        let at = |t: &Vec<f64>, k: usize| t.get(k).or(t.last()).copied().unwrap_or(f64::NAN);
        let mut mean = Vec::with_capacity(len);
        let mut std = Vec::with_capacity(len);
        for k in 0..len {
            let m = traces.iter().map(|t| at(t, k)).sum::<f64>() / n;
            let var = traces.iter().map(|t| (at(t, k) - m).powi(2)).sum::<f64>() / (n - 1.0);
            mean.push(m);
            std.push(var.sqrt());
        }
        Ok(Self {
            replicas: traces.len(),
            failed,
            mean,
            std,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleOutcome {
    pub summary: EnsembleSummary,
    /// One entry per replica; `None` for replicas that failed.
    pub runs: Vec<Option<RunResult>>,
}

/// Initial schedules for `count` replicas; replica i draws from stream i of
/// a ChaCha8 generator seeded with `seed`.
pub fn replica_inits(spec: &ReplicaSpec, layers: usize) -> Result<Vec<ControlSchedule>> {
    (0..spec.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            uniform_schedule(&mut rng, layers, spec.low, spec.high)
        })
        .collect()
}

/// Runs one optimization per initial schedule on a pool of `workers` threads.
pub fn ensemble_from_inits(
    config: &OptimizerConfig,
    problem: &Problem,
    inits: &[ControlSchedule],
    workers: usize,
) -> Result<EnsembleOutcome> {
    if inits.len() < 2 {
        return Err(Error::Config(format!(
            "an ensemble needs at least 2 replicas, got {}",
            inits.len()
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<Result<RunResult>> = pool.install(|| {
        inits
            .par_iter()
            .map(|x| optimizer::run(config, problem, x))
            .collect()
    });
    let mut runs = Vec::with_capacity(results.len());
    let mut failed = 0;
    for r in results {
        match r {
            Ok(run) => runs.push(Some(run)),
            Err(Error::Divergence { .. }) => {
                failed += 1;
                runs.push(None);
            }
            Err(other) => return Err(other),
        }
    }
    let traces: Vec<Vec<f64>> = runs
        .iter()
        .flatten()
        .map(|run| run.trace.iter().map(|rec| rec.r).collect())
        .collect();
    let summary = EnsembleSummary::from_traces(&traces, failed)?;
    Ok(EnsembleOutcome { summary, runs })
}

pub fn run_random_init_ensemble(spec: &ExperimentSpec) -> Result<EnsembleOutcome> {
    spec.validate()?;
    let replicas = spec
        .replicas
        .ok_or_else(|| Error::Config("ensemble needs --replicas and --init-range".into()))?;
    if replicas.count < 2 {
        return Err(Error::Config(format!(
            "ensemble needs at least 2 replicas, got {}",
            replicas.count
        )));
    }
    let lambda = spec.single_lambda()?;
    let problem = spec.problem()?;
    let inits = replica_inits(&replicas, spec.layers)?;
    let outcome = ensemble_from_inits(&spec.config_for(lambda), &problem, &inits, spec.workers)?;
    if outcome.summary.failed > 0 {
        eprintln!(
            "warning: {} of {} replicas diverged and were excluded",
            outcome.summary.failed, replicas.count
        );
    }
    if let Some(out) = &spec.out {
        write_ensemble(out, spec.format, &outcome)?;
    }
    Ok(outcome)
}

pub const ENSEMBLE_HEADER: &str = "iter,mean_r,std_r";

fn write_ensemble(path: &Path, format: OutputFormat, outcome: &EnsembleOutcome) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, outcome)?;
            w.flush()?;
        }
        OutputFormat::Csv => {
            let s = &outcome.summary;
            let mut buf = format!("{ENSEMBLE_HEADER}\n");
            for (k, (m, sd)) in s.mean.iter().zip(&s.std).enumerate() {
                let _ = writeln!(buf, "{k},{m:?},{sd:?}");
            }
            let mut w = create(path)?;
            w.write_all(buf.as_bytes())?;
            w.flush()?;

            let mut buf = format!("replica,{TRACE_HEADER}\n");
            for (i, run) in outcome.runs.iter().enumerate() {
                for rec in run.iter().flat_map(|r| &r.trace) {
                    buf.push_str(&i.to_string());
                    buf.push(',');
                    trace_row(&mut buf, rec);
                }
            }
            let mut w = create(&sidecar(path, "replicas", "csv"))?;
            w.write_all(buf.as_bytes())?;
            w.flush()?;
        }
    }
    Ok(())
}

/// State at the first iteration whose ratio reached `r_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSnapshot {
    pub iteration: usize,
    pub active_depth: usize,
    pub l1_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthScanRow {
    pub initial_depth: usize,
    pub lambda: f64,
    pub final_r: f64,
    pub final_depth: usize,
    pub final_length: f64,
    pub at_threshold: Option<ThresholdSnapshot>,
}

impl DepthScanRow {
    fn from_run(initial_depth: usize, lambda: f64, run: &RunResult) -> Self {
        let last = run.last();
        Self {
            initial_depth,
            lambda,
            final_r: last.r,
            final_depth: last.active_depth,
            final_length: last.l1_length,
            at_threshold: run.first_hit_iteration.map(|k| ThresholdSnapshot {
                iteration: k,
                active_depth: run.trace[k].active_depth,
                l1_length: run.trace[k].l1_length,
            }),
        }
    }
}

pub const DEPTH_SCAN_HEADER: &str =
    "initial_depth,lambda,final_r,final_depth,final_length,hit_iteration,hit_depth,hit_length";

/// Runs every (initial depth, lambda) cell for `config.max_iters` iterations.
pub fn run_depth_scan(spec: &ExperimentSpec, depths: &[usize]) -> Result<Vec<DepthScanRow>> {
    spec.validate()?;
    if depths.is_empty() {
        return Err(Error::Config("no depths given".into()));
    }
    if let Some(d) = depths.iter().find(|&&d| d < 2 || d % 2 != 0) {
        return Err(Error::Config(format!(
            "initial depth must be even and >= 2, got {d}"
        )));
    }
    let problem = spec.problem()?;
    let cells: Vec<(usize, f64)> = depths
        .iter()
        .flat_map(|&d| spec.lambdas.values().into_iter().map(move |l| (d, l)))
        .collect();
    let pool = spec.pool()?;
    let rows: Vec<Result<DepthScanRow>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(depth, lambda)| {
                let x0 = spec.config.init.schedule(depth / 2)?;
                let run = optimizer::run(&spec.config_for(lambda), &problem, &x0)?;
                Ok(DepthScanRow::from_run(depth, lambda, &run))
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(out) = &spec.out {
        let mut w = create(out)?;
        match spec.format {
            OutputFormat::Json => serde_json::to_writer_pretty(&mut w, &rows)?,
            OutputFormat::Csv => {
                let mut buf = format!("{DEPTH_SCAN_HEADER}\n");
                for r in &rows {
                    let (hi, hd, hl) = match r.at_threshold {
                        Some(s) => (
                            s.iteration.to_string(),
                            s.active_depth.to_string(),
                            format!("{:?}", s.l1_length),
                        ),
                        None => Default::default(),
                    };
                    let _ = writeln!(
                        buf,
                        "{},{:?},{:?},{},{:?},{hi},{hd},{hl}",
                        r.initial_depth, r.lambda, r.final_r, r.final_depth, r.final_length
                    );
                }
                w.write_all(buf.as_bytes())?;
            }
        }
        w.flush()?;
    }
    Ok(rows)
}

/// Exhaustive spectrum of an instance file.
pub fn oracle(path: impl AsRef<Path>) -> Result<(WeightedGraph, SpectrumSummary)> {
    let graph = load_instance(path)?;
    let spectrum = Problem::from_graph(&graph)
        .map(|p| p.spectrum().clone())
        .or_else(|e| match e {
            // A flat spectrum is still worth printing.
            Error::MetricUndefined(_) => {
                crate::maxcut::brute_force_extrema(&crate::maxcut::diagonal_energies(&graph)?)
            }
            other => Err(other),
        })?;
    Ok((graph, spectrum))
}

pub fn format_oracle(graph: &WeightedGraph, s: &SpectrumSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "nodes {} edges {}",
        graph.num_nodes(),
        graph.edges().len()
    );
    let _ = writeln!(out, "c_min {:?}", s.c_min);
    let _ = writeln!(out, "c_max {:?}", s.c_max);
    let _ = writeln!(out, "minimizers {}", s.minimizer_count);
    for &z in &s.minimizers {
        let _ = writeln!(out, "  {}", bitstring(z, graph.num_nodes()));
    }
    out
}

/// Turns a flat `key = value` file into `--key value` arguments. Boolean
/// `true` becomes a bare flag; `false` is dropped. `#` starts a comment.
pub fn config_file_args(text: &str, path: &Path) -> Result<Vec<String>> {
    let mut args = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("expected key=value, got '{line}'"),
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

/// Init from the optional scalar/range flags.
pub fn init_from_flags(fill: Option<f64>, range: Option<(f64, f64)>, seed: u64) -> Init {
    match (fill, range) {
        (_, Some((low, high))) => Init::Uniform { seed, low, high },
        (Some(v), None) => Init::Fill(v),
        (None, None) => Init::Fill(0.3),
    }
}

//! L1-regularized descent on the QAOA energy: proximal gradient, the
//! non-convex accelerated variant with a q-window monitor, fixed-support
//! refinement and the decreasing-lambda sweep.

mod objective;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{active_depth, l1_length, shrink, ControlSchedule};

pub use objective::{adjoint_gradient, central_difference, Objective, Problem, DIVERGENCE_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Proximal gradient.
    Pg,
    /// Non-convex accelerated proximal gradient.
    Apg,
    /// Plain gradient descent; lambda is ignored.
    Gd,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pg" => Ok(Self::Pg),
            "apg" => Ok(Self::Apg),
            "gd" => Ok(Self::Gd),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pg => "pg",
            Self::Apg => "apg",
            Self::Gd => "gd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientBackend {
    CentralDifference,
    Exact,
}

/// Initial angles: a constant fill or i.i.d. uniform draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Fill(f64),
    Uniform { seed: u64, low: f64, high: f64 },
}

impl Init {
    pub fn schedule(&self, layers: usize) -> Result<ControlSchedule> {
        match *self {
            Init::Fill(v) => ControlSchedule::uniform(layers, v),
            Init::Uniform { seed, low, high } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                uniform_schedule(&mut rng, layers, low, high)
            }
        }
    }
}

pub(crate) fn uniform_schedule(
    rng: &mut impl Rng,
    layers: usize,
    low: f64,
    high: f64,
) -> Result<ControlSchedule> {
    if !(low <= high) || !low.is_finite() || !high.is_finite() {
        return Err(Error::Config(format!("bad init range [{low}, {high}]")));
    }
    let packed = (0..2 * layers)
        .map(|_| {
            if low == high {
                low
            } else {
                rng.gen_range(low..=high)
            }
        })
        .collect();
    ControlSchedule::from_packed(packed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub eta: f64,
    pub lambda: f64,
    pub epsilon: f64,
    /// Early-stop threshold; 0 disables early stopping.
    pub tol: f64,
    /// Monitor window of the accelerated method.
    pub q: usize,
    pub max_iters: usize,
    pub algorithm: Algorithm,
    pub r_star: f64,
    pub init: Init,
    pub gradient: GradientBackend,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            eta: 0.006,
            lambda: 0.0,
            epsilon: 1e-3,
            tol: 1e-6,
            q: 2,
            max_iters: 200,
            algorithm: Algorithm::Apg,
            r_star: 0.9,
            init: Init::Fill(0.3),
            gradient: GradientBackend::CentralDifference,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return bad(format!("eta must be > 0, got {}", self.eta));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be > 0, got {}", self.epsilon));
        }
        if !(self.tol >= 0.0) {
            return bad(format!("tol must be >= 0, got {}", self.tol));
        }
        if !(self.r_star > 0.0 && self.r_star <= 1.0) {
            return bad(format!("r_star must lie in (0, 1], got {}", self.r_star));
        }
        if let Init::Uniform { low, high, .. } = self.init {
            if !(low <= high) || !low.is_finite() || !high.is_finite() {
                return bad(format!("bad init range [{low}, {high}]"));
            }
        }
        Ok(())
    }
}

/// One row of a run trace. Row `iter = k` describes the iterate after k updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub iter: usize,
    pub phase: u8,
    pub f: f64,
    #[serde(rename = "F")]
    pub composite: f64,
    pub r: f64,
    pub active_depth: usize,
    pub l1_length: f64,
    /// Objective evaluations spent by the iterations so far.
    pub evals: u64,
    /// The extrapolated point was used for this update (accelerated runs only).
    pub accepted_extrapolation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schedule: ControlSchedule,
    pub trace: Vec<IterateRecord>,
    pub first_hit_iteration: Option<usize>,
    pub converged_early: bool,
    /// Largest |angle| seen at any recorded iterate.
    pub max_abs_angle: f64,
}

impl RunResult {
    pub fn last(&self) -> &IterateRecord {
        self.trace
            .last()
            .expect("trace always holds the initial record")
    }

    pub fn reached_target(&self) -> bool {
        self.first_hit_iteration.is_some()
    }
}

/// Settings shared by every descent variant.
#[derive(Debug, Clone)]
struct Descent<'c> {
    config: &'c OptimizerConfig,
    lambda: f64,
    accelerate: bool,
    /// Coordinates allowed to move; `None` moves all of them without thresholding
    /// only when `lambda == 0`.
    support: Option<Vec<bool>>,
    max_iters: usize,
    tol: f64,
    stop_at_target: bool,
    phase: u8,
}

#[allow(clippy::too_many_arguments)]
fn record(
    problem: &Problem,
    x: &[f64],
    f: f64,
    lambda: f64,
    iter: usize,
    phase: u8,
    evals: u64,
    accepted: bool,
) -> IterateRecord {
    let l1 = l1_length(x);
    IterateRecord {
        iter,
        phase,
        f,
        composite: f + lambda * l1,
        r: problem.ratio(f),
        active_depth: active_depth(x, 0.0),
        l1_length: l1,
        evals,
        accepted_extrapolation: accepted,
    }
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

impl Descent<'_> {
    fn gradient(&self, obj: &mut Objective, v: &[f64]) -> Result<Vec<f64>> {
        let mask = self.support.as_deref();
        match self.config.gradient {
            GradientBackend::CentralDifference => {
                obj.grad_central_difference_on(v, self.config.epsilon, mask)
            }
            GradientBackend::Exact => {
                let mut g = obj.exact_gradient(v)?;
                if let Some(m) = mask {
                    g.iter_mut()
                        .zip(m)
                        .filter(|(_, &keep)| !keep)
                        .for_each(|(gi, _)| *gi = 0.0);
                }
                Ok(g)
            }
        }
    }

    fn update(&self, v: &[f64], grad: &[f64]) -> Vec<f64> {
        let eta = self.config.eta;
        let tau = self.lambda * eta;
        match &self.support {
            Some(mask) => v
                .iter()
                .zip(grad)
                .zip(mask)
                .map(|((&vi, &gi), &keep)| if keep { vi - eta * gi } else { vi })
                .collect(),
            None if tau == 0.0 => v.iter().zip(grad).map(|(&vi, &gi)| vi - eta * gi).collect(),
            None => v
                .iter()
                .zip(grad)
                .map(|(&vi, &gi)| shrink(vi - eta * gi, tau))
                .collect(),
        }
    }

    fn run(&self, problem: &Problem, x_init: &ControlSchedule) -> Result<RunResult> {
        let mut trace = Vec::with_capacity(self.max_iters + 1);
        self.iterate(problem, x_init, &mut trace)
            .map_err(|e| match e {
                Error::Divergence { value, .. } => Error::Divergence {
                    iter: trace.len(),
                    value,
                    partial: Box::new(trace.clone()),
                },
                other => other,
            })
    }

    fn iterate(
        &self,
        problem: &Problem,
        x_init: &ControlSchedule,
        trace: &mut Vec<IterateRecord>,
    ) -> Result<RunResult> {
        let mut obj = Objective::new(problem);
        let lambda = self.lambda;
        let r_star = self.config.r_star;

        let mut x = x_init.packed().to_vec();
        let mut x_prev = x.clone();
        let f0 = obj.value(&x)?;
        let base_evals = obj.evals();
        let first = record(problem, &x, f0, lambda, 0, self.phase, 0, false);
        let mut first_hit = (first.r >= r_star).then_some(0);
        let mut max_angle = max_abs(&x);
        // history[t - 1] = F(x_t) in the 1-based iterate numbering
        let mut history = vec![first.composite];
        trace.push(first);

        let mut result_x = None;
        let mut converged_early = false;
        if !(self.stop_at_target && first_hit.is_some()) {
            for k in 1..=self.max_iters {
                let (v, reference, accepted) = if self.accelerate {
                    let momentum = (k as f64 - 1.0) / (k as f64 + 2.0);
                    let y: Vec<f64> = x
                        .iter()
                        .zip(&x_prev)
                        .map(|(&xk, &xp)| xk + momentum * (xk - xp))
                        .collect();
                    let lo = k.saturating_sub(self.config.q).max(1);
                    let window_max = history[lo - 1..k]
                        .iter()
                        .copied()
                        .fold(f64::NEG_INFINITY, f64::max);
                    let fy = obj.regularized(&y, lambda)?;
                    if fy <= window_max {
                        (y, window_max, true)
                    } else {
                        (x.clone(), window_max, false)
                    }
                } else {
                    (x.clone(), history[k - 1], false)
                };

                let grad = self.gradient(&mut obj, &v)?;
                let x_next = self.update(&v, &grad);
                let f_next = obj.value(&x_next)?;
                let rec = record(
                    problem,
                    &x_next,
                    f_next,
                    lambda,
                    k,
                    self.phase,
                    obj.evals() - base_evals,
                    accepted,
                );
                max_angle = max_angle.max(max_abs(&x_next));
                if first_hit.is_none() && rec.r >= r_star {
                    first_hit = Some(k);
                }
                history.push(rec.composite);
                trace.push(rec);
                x_prev = std::mem::replace(&mut x, x_next);

                if (rec.composite - reference).abs() < self.tol {
                    converged_early = true;
                    // The accelerated method hands back x_k on early exit.
                    if self.accelerate {
                        result_x = Some(x_prev.clone());
                    }
                    break;
                }
                if self.stop_at_target && first_hit.is_some() {
                    break;
                }
            }
        }

        Ok(RunResult {
            schedule: ControlSchedule::from_packed(result_x.unwrap_or(x))?,
            trace: std::mem::take(trace),
            first_hit_iteration: first_hit,
            converged_early,
            max_abs_angle: max_angle,
        })
    }
}

fn check_run_inputs(
    config: &OptimizerConfig,
    problem: &Problem,
    x: &ControlSchedule,
) -> Result<()> {
    config.validate()?;
    let _ = problem;
    if x.packed().iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("non-finite initial angle".into()));
    }
    Ok(())
}

/// Iterates `x <- S_{lambda eta}(x - eta grad f(x))`.
pub fn pg_run(
    config: &OptimizerConfig,
    problem: &Problem,
    x_init: &ControlSchedule,
) -> Result<RunResult> {
    check_run_inputs(config, problem, x_init)?;
    Descent {
        config,
        lambda: config.lambda,
        accelerate: false,
        support: None,
        max_iters: config.max_iters,
        tol: config.tol,
        stop_at_target: false,
        phase: 1,
    }
    .run(problem, x_init)
}

/// Non-convex accelerated proximal gradient with the q-window monitor.
pub fn apg_run(
    config: &OptimizerConfig,
    problem: &Problem,
    x_init: &ControlSchedule,
) -> Result<RunResult> {
    check_run_inputs(config, problem, x_init)?;
    Descent {
        config,
        lambda: config.lambda,
        accelerate: true,
        support: None,
        max_iters: config.max_iters,
        tol: config.tol,
        stop_at_target: false,
        phase: 1,
    }
    .run(problem, x_init)
}

/// Unregularized gradient descent on every coordinate.
pub fn gd_run(
    config: &OptimizerConfig,
    problem: &Problem,
    x_init: &ControlSchedule,
) -> Result<RunResult> {
    check_run_inputs(config, problem, x_init)?;
    Descent {
        config,
        lambda: 0.0,
        accelerate: false,
        support: None,
        max_iters: config.max_iters,
        tol: config.tol,
        stop_at_target: false,
        phase: 1,
    }
    .run(problem, x_init)
}

/// Dispatches on `config.algorithm`.
pub fn run(
    config: &OptimizerConfig,
    problem: &Problem,
    x_init: &ControlSchedule,
) -> Result<RunResult> {
    match config.algorithm {
        Algorithm::Pg => pg_run(config, problem, x_init),
        Algorithm::Apg => apg_run(config, problem, x_init),
        Algorithm::Gd => gd_run(config, problem, x_init),
    }
}

/// Runs the regularized algorithm until the ratio first reaches `r_star`
/// or `max_iters` updates are spent.
pub fn run_until_target(
    config: &OptimizerConfig,
    problem: &Problem,
    x_init: &ControlSchedule,
) -> Result<RunResult> {
    check_run_inputs(config, problem, x_init)?;
    let (lambda, accelerate) = match config.algorithm {
        Algorithm::Pg => (config.lambda, false),
        Algorithm::Apg => (config.lambda, true),
        Algorithm::Gd => (0.0, false),
    };
    Descent {
        config,
        lambda,
        accelerate,
        support: None,
        max_iters: config.max_iters,
        tol: config.tol,
        stop_at_target: true,
        phase: 1,
    }
    .run(problem, x_init)
}

/// Gradient descent without regularization on the nonzero coordinates of `x`;
/// zero coordinates stay exactly zero. Uses `config.eta`, `epsilon`,
/// `gradient` and `r_star`; `lambda` and the algorithm are ignored, and
/// early stopping is off.
pub fn refine_fixed_support(
    config: &OptimizerConfig,
    problem: &Problem,
    x: &ControlSchedule,
    iters: usize,
) -> Result<RunResult> {
    check_run_inputs(config, problem, x)?;
    let support = x.packed().iter().map(|v| *v != 0.0).collect();
    Descent {
        config,
        lambda: 0.0,
        accelerate: false,
        support: Some(support),
        max_iters: iters,
        tol: 0.0,
        stop_at_target: false,
        phase: 2,
    }
    .run(problem, x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub result: RunResult,
}

/// Outcome of a decreasing-lambda sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// The largest lambda whose run reached `r_star`.
    pub selected: Option<SweepEntry>,
    /// Runs that missed the target, in grid order.
    pub rejected: Vec<SweepEntry>,
}

/// Tries each lambda in decreasing order and stops at the first run that
/// reaches `config.r_star`.
pub fn lambda_sweep(
    grid: &[f64],
    config: &OptimizerConfig,
    problem: &Problem,
    x_init: &ControlSchedule,
) -> Result<SweepReport> {
    if grid.is_empty() {
        return Err(Error::Config("lambda grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Config(format!(
            "lambda grid must be strictly decreasing: {grid:?}"
        )));
    }
    let mut rejected = Vec::new();
    for &lambda in grid {
        let cfg = OptimizerConfig {
            lambda,
            ..config.clone()
        };
        let result = run(&cfg, problem, x_init)?;
        let entry = SweepEntry { lambda, result };
        if entry.result.reached_target() {
            return Ok(SweepReport {
                selected: Some(entry),
                rejected,
            });
        }
        rejected.push(entry);
    }
    Ok(SweepReport {
        selected: None,
        rejected,
    })
}

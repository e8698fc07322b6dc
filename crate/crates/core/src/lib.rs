//! Sparse control-depth selection for QAOA.
//!
//! A dense statevector simulator evaluates the alternating phase/mixer
//! circuit on weighted Max-Cut instances. The energy is minimized together
//! with an L1 penalty on the control angles using proximal gradient or the
//! non-convex accelerated proximal gradient method, which drives unneeded
//! angles to exactly zero. A decreasing sweep over the penalty strength then
//! picks the sparsest schedule that still meets a target approximation ratio.

// NaN must fail range checks, so `!(x > 0.0)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod maxcut;
pub mod optimizer;
pub mod schedule;
pub mod statevector;

pub use error::{Error, Result};
pub use maxcut::{SpectrumSummary, WeightedGraph};
pub use optimizer::{Algorithm, IterateRecord, OptimizerConfig, Problem, RunResult};
pub use schedule::ControlSchedule;
pub use statevector::{DiagonalObservable, QubitState};

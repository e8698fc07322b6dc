//! Control-angle vectors, soft-thresholding and sparsity accounting.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angles `(beta_1..beta_p, gamma_1..gamma_p)` for p alternating layer pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRecord", into = "ScheduleRecord")]
pub struct ControlSchedule {
    packed: Vec<f64>,
}

/// JSON form `{p, betas, gammas}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScheduleRecord {
    p: usize,
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl TryFrom<ScheduleRecord> for ControlSchedule {
    type Error = Error;

    fn try_from(rec: ScheduleRecord) -> Result<Self> {
        if rec.betas.len() != rec.p || rec.gammas.len() != rec.p {
            return Err(Error::Parameter(format!(
                "schedule record has p = {} but {} betas and {} gammas",
                rec.p,
                rec.betas.len(),
                rec.gammas.len()
            )));
        }
        Self::new(rec.betas, rec.gammas)
    }
}

impl From<ControlSchedule> for ScheduleRecord {
    fn from(s: ControlSchedule) -> Self {
        ScheduleRecord {
            p: s.layers(),
            betas: s.betas().to_vec(),
            gammas: s.gammas().to_vec(),
        }
    }
}

impl ControlSchedule {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.len() != gammas.len() {
            return Err(Error::Parameter(format!(
                "{} betas but {} gammas",
                betas.len(),
                gammas.len()
            )));
        }
        let mut packed = betas;
        packed.extend(gammas);
        Self::from_packed(packed)
    }

    /// Takes the packed layout `(betas.., gammas..)`.
    pub fn from_packed(packed: Vec<f64>) -> Result<Self> {
        if packed.is_empty() || !packed.len().is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "packed schedule length must be a positive even number, got {}",
                packed.len()
            )));
        }
        if let Some(v) = packed.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite control angle {v}")));
        }
        Ok(Self { packed })
    }

    /// Every angle set to `value`.
    pub fn uniform(layers: usize, value: f64) -> Result<Self> {
        Self::from_packed(vec![value; 2 * layers])
    }

    pub fn layers(&self) -> usize {
        self.packed.len() / 2
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn into_packed(self) -> Vec<f64> {
        self.packed
    }

    pub fn betas(&self) -> &[f64] {
        &self.packed[..self.layers()]
    }

    pub fn gammas(&self) -> &[f64] {
        &self.packed[self.layers()..]
    }

    /// Copy with every angle mapped into `(-pi, pi]`. Display only.
    pub fn wrapped(&self) -> Self {
        Self {
            packed: self.packed.iter().map(|&a| wrap_angle(a)).collect(),
        }
    }

    pub fn sparsity(&self, zero_tol: f64) -> SparsityReport {
        SparsityReport {
            active_depth: active_depth(&self.packed, zero_tol),
            op_count: control_op_count(self, zero_tol),
            l1_length: l1_length(&self.packed),
        }
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub active_depth: usize,
    pub op_count: usize,
    pub l1_length: f64,
}

/// Proximal operator of `tau * ||x||_1`.
pub fn soft_threshold(x: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::Parameter(format!(
            "threshold must be >= 0, got {tau}"
        )));
    }
    Ok(x.iter().map(|&v| shrink(v, tau)).collect())
}

#[inline]
pub(crate) fn shrink(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

pub fn l1_length(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Number of entries with `|x_i| > zero_tol`.
pub fn active_depth(x: &[f64], zero_tol: f64) -> usize {
    x.iter().filter(|v| v.abs() > zero_tol).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// exp(-i gamma H_o)
    Phase,
    /// exp(-i beta H_c)
    Mixer,
}

/// One physical control operation after merging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlOp {
    pub generator: Generator,
    pub angle: f64,
    pub duration: f64,
}

/// Interleaves `(gamma_1, beta_1, .., gamma_p, beta_p)`, drops angles with
/// `|angle| <= zero_tol` and merges adjacent runs of the same generator
/// into one operation with the summed angle.
pub fn merged_operations(schedule: &ControlSchedule, zero_tol: f64) -> Vec<ControlOp> {
    let interleaved = schedule
        .gammas()
        .iter()
        .zip(schedule.betas())
        .flat_map(|(&g, &b)| [(Generator::Phase, g), (Generator::Mixer, b)]);
    let mut ops: Vec<ControlOp> = Vec::new();
    for (generator, angle) in interleaved {
        if angle.abs() <= zero_tol {
            continue;
        }
        match ops.last_mut() {
            Some(last) if last.generator == generator => {
                last.angle += angle;
                last.duration = last.angle.abs();
            }
            _ => ops.push(ControlOp {
                generator,
                angle,
                duration: angle.abs(),
            }),
        }
    }
    ops
}

pub fn control_op_count(schedule: &ControlSchedule, zero_tol: f64) -> usize {
    merged_operations(schedule, zero_tol).len()
}

//! Dense statevector simulation of the alternating phase/mixer circuit.
//!
//! Qubit `n` is bit `n` of the amplitude index (little-endian). A bit value
//! of 0 is spin +1 and a bit value of 1 is spin -1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schedule::ControlSchedule;

/// Largest register the simulator will allocate (2^24 amplitudes, ~256 MB).
pub const MAX_QUBITS: usize = 24;

/// Norm drift beyond this is reported as an error rather than renormalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

pub(crate) fn check_num_qubits(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Size(format!(
            "num_qubits must be in 1..={MAX_QUBITS}, got {num_qubits}"
        )));
    }
    Ok(())
}

/// Real diagonal of an observable in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalObservable {
    num_qubits: usize,
    energies: Vec<f64>,
}

impl DiagonalObservable {
    pub fn new(num_qubits: usize, energies: Vec<f64>) -> Result<Self> {
        check_num_qubits(num_qubits)?;
        if energies.len() != 1 << num_qubits {
            return Err(Error::Size(format!(
                "observable on {num_qubits} qubits needs {} energies, got {}",
                1usize << num_qubits,
                energies.len()
            )));
        }
        if let Some(z) = energies.iter().position(|e| !e.is_finite()) {
            return Err(Error::Parameter(format!("non-finite energy at index {z}")));
        }
        Ok(Self {
            num_qubits,
            energies,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, z: usize) -> f64 {
        self.energies[z]
    }

    /// `(min, max)` of the diagonal.
    pub fn bounds(&self) -> (f64, f64) {
        self.energies
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                (lo.min(e), hi.max(e))
            })
    }
}

/// A pure state on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QubitState {
    /// The uniform superposition |+>^N.
    pub fn plus(num_qubits: usize) -> Result<Self> {
        check_num_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: vec![amp; dim],
        })
    }

    /// Computational basis state |z>.
    pub fn basis(num_qubits: usize, z: usize) -> Result<Self> {
        check_num_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        if z >= dim {
            return Err(Error::Parameter(format!(
                "basis index {z} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[z] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes, checking length and unit norm.
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_num_qubits(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::Size(format!(
                "state on {num_qubits} qubits needs {} amplitudes, got {}",
                1usize << num_qubits,
                amplitudes.len()
            )));
        }
        let state = Self {
            num_qubits,
            amplitudes,
        };
        state.check_norm()?;
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn check_norm(&self) -> Result<()> {
        let drift = (self.norm() - 1.0).abs();
        if drift.is_nan() || drift > NORM_TOLERANCE {
            return Err(Error::NormDrift { drift });
        }
        Ok(())
    }

    fn check_shape(&self, obs: &DiagonalObservable) -> Result<()> {
        if obs.num_qubits != self.num_qubits {
            return Err(Error::Shape {
                expected: self.num_qubits,
                found: obs.num_qubits,
            });
        }
        Ok(())
    }

    /// Applies exp(-i gamma H_o): amplitude z picks up the phase exp(-i gamma E(z)).
    pub fn apply_phase_layer(&mut self, obs: &DiagonalObservable, gamma: f64) -> Result<()> {
        self.check_shape(obs)?;
        if gamma == 0.0 {
            return Ok(());
        }
        for (amp, &energy) in self.amplitudes.iter_mut().zip(&obs.energies) {
            let (sin, cos) = (-gamma * energy).sin_cos();
            *amp *= Complex64::new(cos, sin);
        }
        Ok(())
    }

    /// Applies exp(-i beta sum_n X_n) as N independent single-qubit rotations.
    pub fn apply_mixer_layer(&mut self, beta: f64) {
        if beta == 0.0 {
            return;
        }
        let (sin, cos) = beta.sin_cos();
        let minus_i_sin = Complex64::new(0.0, -sin);
        for qubit in 0..self.num_qubits {
            let stride = 1usize << qubit;
            for block in (0..self.amplitudes.len()).step_by(stride << 1) {
                for lo in block..block + stride {
                    let hi = lo | stride;
                    let a = self.amplitudes[lo];
                    let b = self.amplitudes[hi];
                    self.amplitudes[lo] = a * cos + b * minus_i_sin;
                    self.amplitudes[hi] = b * cos + a * minus_i_sin;
                }
            }
        }
    }

    /// Writes `sum_n X_n |self>` into `out`.
    pub(crate) fn apply_mixer_generator(&self, out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for qubit in 0..self.num_qubits {
            let bit = 1usize << qubit;
            for (z, o) in out.iter_mut().enumerate() {
                *o += self.amplitudes[z ^ bit];
            }
        }
    }

    /// <self| H_o |self> for a diagonal observable.
    pub fn expectation(&self, obs: &DiagonalObservable) -> Result<f64> {
        self.check_shape(obs)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&obs.energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }

    /// <self|other>, conjugate-linear in `self`.
    pub(crate) fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Unnormalized vector sharing the layer operations; used for costates.
    pub(crate) fn from_raw(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self {
            num_qubits,
            amplitudes,
        }
    }
}

/// Prepares |+>^N and applies `mixer(beta_k) phase(gamma_k)` for k = 1..p.
pub fn evolve(schedule: &ControlSchedule, obs: &DiagonalObservable) -> Result<QubitState> {
    if let Some(v) = schedule.packed().iter().find(|v| !v.is_finite()) {
        return Err(Error::Parameter(format!("non-finite control angle {v}")));
    }
    let mut state = QubitState::plus(obs.num_qubits())?;
    for (&beta, &gamma) in schedule.betas().iter().zip(schedule.gammas()) {
        state.apply_phase_layer(obs, gamma)?;
        state.apply_mixer_layer(beta);
    }
    state.check_norm()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn single_edge() -> DiagonalObservable {
        DiagonalObservable::new(2, vec![1.0, -1.0, -1.0, 1.0]).unwrap()
    }

    #[test]
    fn plus_state_amplitudes() {
        let s = QubitState::plus(1).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15 && a.im == 0.0);
        }
        let s = QubitState::plus(2).unwrap();
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| *a == Complex64::new(0.5, 0.0)));
        let s = QubitState::plus(7).unwrap();
        assert_eq!(s.amplitudes().len(), 128);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plus_state_rejects_bad_sizes() {
        assert!(matches!(QubitState::plus(0), Err(Error::Size(_))));
        assert!(matches!(QubitState::plus(25), Err(Error::Size(_))));
    }

    #[test]
    fn phase_layer_zero_is_identity() {
        let obs = single_edge();
        let mut s = QubitState::plus(2).unwrap();
        s.apply_mixer_layer(0.4);
        let before = s.clone();
        s.apply_phase_layer(&obs, 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn phase_layer_on_basis_state() {
        let obs = single_edge();
        let mut s = QubitState::basis(2, 0).unwrap();
        s.apply_phase_layer(&obs, FRAC_PI_2).unwrap();
        let a = s.amplitudes()[0];
        assert!(a.re.abs() < 1e-15 && (a.im + 1.0).abs() < 1e-15);
        assert_eq!(s.probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn phase_layer_shape_mismatch() {
        let obs = single_edge();
        let mut s = QubitState::plus(3).unwrap();
        assert!(matches!(
            s.apply_phase_layer(&obs, 0.1),
            Err(Error::Shape {
                expected: 3,
                found: 2
            })
        ));
        assert!(s.expectation(&obs).is_err());
    }

    #[test]
    fn mixer_zero_is_identity() {
        let mut s = QubitState::basis(3, 5).unwrap();
        let before = s.clone();
        s.apply_mixer_layer(0.0);
        assert_eq!(s, before);
    }

    #[test]
    fn mixer_on_plus_is_global_phase() {
        let beta = 0.37;
        let n = 4;
        let mut s = QubitState::plus(n).unwrap();
        s.apply_mixer_layer(beta);
        let phase = Complex64::from_polar(1.0, -beta * n as f64);
        for a in s.amplitudes() {
            assert!((a - phase * 0.25).norm() < 1e-14);
        }
    }

    #[test]
    fn mixer_half_pi_flips_single_qubit() {
        let mut s = QubitState::basis(1, 0).unwrap();
        s.apply_mixer_layer(FRAC_PI_2);
        let [a0, a1] = [s.amplitudes()[0], s.amplitudes()[1]];
        assert!(a0.norm() < 1e-15);
        assert!((a1 - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn mixer_periodicity() {
        let mut a = QubitState::plus(3).unwrap();
        a.apply_phase_layer(
            &DiagonalObservable::new(3, vec![0.3, -1.0, 2.0, 0.1, 0.0, 0.7, -0.4, 1.2]).unwrap(),
            0.9,
        )
        .unwrap();
        let mut b = a.clone();
        a.apply_mixer_layer(0.61);
        b.apply_mixer_layer(0.61 + 2.0 * PI);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_of_basis_and_plus() {
        let obs = single_edge();
        for z in 0..4 {
            let s = QubitState::basis(2, z).unwrap();
            assert_eq!(s.expectation(&obs).unwrap(), obs.energy(z));
        }
        let s = QubitState::plus(2).unwrap();
        assert!(s.expectation(&obs).unwrap().abs() < 1e-12);
    }

    #[test]
    fn evolve_zero_schedule_is_plus_state() {
        let obs = single_edge();
        let sched = ControlSchedule::uniform(3, 0.0).unwrap();
        assert_eq!(evolve(&sched, &obs).unwrap(), QubitState::plus(2).unwrap());
    }

    #[test]
    fn evolve_phase_only_keeps_uniform_probabilities() {
        let obs = single_edge();
        let sched = ControlSchedule::new(vec![0.0], vec![0.8]).unwrap();
        let s = evolve(&sched, &obs).unwrap();
        for p in s.probabilities() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn from_amplitudes_rejects_unnormalized() {
        let amps = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(
            QubitState::from_amplitudes(1, amps),
            Err(Error::NormDrift { .. })
        ));
    }
}

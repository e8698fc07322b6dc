//! The energy objective and its gradients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maxcut::{
    approximation_ratio, brute_force_extrema, diagonal_energies, SpectrumSummary, WeightedGraph,
};
use crate::schedule::{l1_length, ControlSchedule};
use crate::statevector::{evolve, DiagonalObservable, QubitState};

/// Slack allowed past the spectrum bounds before a value counts as divergence.
pub const DIVERGENCE_SLACK: f64 = 1e-6;

/// An observable together with its exact spectrum bounds.
#[derive(Debug, Clone)]
pub struct Problem {
    obs: DiagonalObservable,
    spectrum: SpectrumSummary,
}

impl Problem {
    pub fn new(obs: DiagonalObservable) -> Result<Self> {
        let spectrum = brute_force_extrema(&obs)?;
        if spectrum.c_max <= spectrum.c_min {
            return Err(Error::MetricUndefined(spectrum.c_min));
        }
        Ok(Self { obs, spectrum })
    }

    pub fn from_graph(graph: &WeightedGraph) -> Result<Self> {
        Self::new(diagonal_energies(graph)?)
    }

    pub fn observable(&self) -> &DiagonalObservable {
        &self.obs
    }

    pub fn spectrum(&self) -> &SpectrumSummary {
        &self.spectrum
    }

    pub fn ratio(&self, f_value: f64) -> f64 {
        approximation_ratio(f_value, &self.spectrum).expect("spectrum checked at construction")
    }
}

/// Counts every evaluation of f(x) = <psi(x)|H_o|psi(x)>.
#[derive(Debug)]
pub struct Objective<'a> {
    problem: &'a Problem,
    evals: u64,
}

impl<'a> Objective<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Self { problem, evals: 0 }
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn evals(&self) -> u64 {
        self.evals
    }

    /// f(x) for packed `x = (betas.., gammas..)`.
    pub fn value(&mut self, x: &[f64]) -> Result<f64> {
        let schedule = ControlSchedule::from_packed(x.to_vec())?;
        let state = evolve(&schedule, &self.problem.obs)?;
        self.evals += 1;
        let value = state.expectation(&self.problem.obs)?;
        let SpectrumSummary { c_min, c_max, .. } = self.problem.spectrum;
        if !value.is_finite()
            || value < c_min - DIVERGENCE_SLACK
            || value > c_max + DIVERGENCE_SLACK
        {
            return Err(Error::Divergence {
                iter: 0,
                value,
                partial: Box::default(),
            });
        }
        Ok(value)
    }

    /// f(x) + lambda ||x||_1.
    pub fn regularized(&mut self, x: &[f64], lambda: f64) -> Result<f64> {
        Ok(self.value(x)? + lambda * l1_length(x))
    }

    /// Central differences over every coordinate (2 evaluations each).
    pub fn grad_central_difference(&mut self, x: &[f64], epsilon: f64) -> Result<Vec<f64>> {
        self.grad_central_difference_on(x, epsilon, None)
    }

    /// Central differences restricted to `mask`; masked-out entries are 0.
    pub fn grad_central_difference_on(
        &mut self,
        x: &[f64],
        epsilon: f64,
        mask: Option<&[bool]>,
    ) -> Result<Vec<f64>> {
        central_difference(|v| self.value(v), x, epsilon, mask)
    }

    /// Analytic gradient by a reverse sweep over the layered circuit.
    pub fn exact_gradient(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        let schedule = ControlSchedule::from_packed(x.to_vec())?;
        self.evals += 1;
        adjoint_gradient(&schedule, &self.problem.obs)
    }
}

/// `(f(x + eps e_i) - f(x - eps e_i)) / (2 eps)` for each selected coordinate.
pub fn central_difference(
    mut f: impl FnMut(&[f64]) -> Result<f64>,
    x: &[f64],
    epsilon: f64,
    mask: Option<&[bool]>,
) -> Result<Vec<f64>> {
    if !(epsilon > 0.0) {
        return Err(Error::Parameter(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    let mut probe = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        if mask.is_some_and(|m| !m[i]) {
            continue;
        }
        probe[i] = x[i] + epsilon;
        let plus = f(&probe)?;
        probe[i] = x[i] - epsilon;
        let minus = f(&probe)?;
        probe[i] = x[i];
        grad[i] = (plus - minus) / (2.0 * epsilon);
    }
    Ok(grad)
}

enum Gate {
    Phase,
    Mixer,
}

/// d/dtheta of exp(-i theta G) is -i G exp(-i theta G), so each component is
/// 2 Im <lambda_j | G_j psi_j> with lambda_j the back-propagated H_o psi.
pub fn adjoint_gradient(schedule: &ControlSchedule, obs: &DiagonalObservable) -> Result<Vec<f64>> {
    let p = schedule.layers();
    let mut psi = evolve(schedule, obs)?;
    let energies = obs.energies();
    let costate: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .zip(energies)
        .map(|(a, e)| a * e)
        .collect();
    let mut lambda = QubitState::from_raw(obs.num_qubits(), costate);

    let mut grad = vec![0.0; 2 * p];
    let mut scratch = vec![Complex64::new(0.0, 0.0); energies.len()];
    for k in (0..p).rev() {
        for (gate, index, angle) in [
            (Gate::Mixer, k, schedule.betas()[k]),
            (Gate::Phase, p + k, schedule.gammas()[k]),
        ] {
            match gate {
                Gate::Mixer => psi.apply_mixer_generator(&mut scratch),
                Gate::Phase => {
                    for ((s, a), e) in scratch.iter_mut().zip(psi.amplitudes()).zip(energies) {
                        *s = a * e;
                    }
                }
            }
            grad[index] = 2.0 * lambda.inner(&scratch).im;
            match gate {
                Gate::Mixer => {
                    psi.apply_mixer_layer(-angle);
                    lambda.apply_mixer_layer(-angle);
                }
                Gate::Phase => {
                    psi.apply_phase_layer(obs, -angle)?;
                    lambda.apply_phase_layer(obs, -angle)?;
                }
            }
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxcut::{seven_node_instance, Edge};
    use std::f64::consts::{FRAC_PI_8, SQRT_2};

    fn single_edge() -> Problem {
        let g = WeightedGraph::new(
            2,
            vec![Edge {
                i: 0,
                j: 1,
                weight: 1.0,
            }],
        )
        .unwrap();
        Problem::from_graph(&g).unwrap()
    }

    #[test]
    fn central_difference_exact_on_quadratic() {
        let g = central_difference(|v| Ok(v[0] * v[0]), &[1.0], 0.1, None).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-12);
        // dyadic step: no rounding anywhere
        let g = central_difference(|v| Ok(v[0] * v[0]), &[1.0], 0.5, None).unwrap();
        assert_eq!(g, vec![2.0]);
        assert!(central_difference(|v| Ok(v[0]), &[1.0], 0.0, None).is_err());
    }

    #[test]
    fn gradient_at_origin_vanishes() {
        let problem = Problem::from_graph(&seven_node_instance()).unwrap();
        let mut obj = Objective::new(&problem);
        let x = vec![0.0; 14];
        assert!(obj.value(&x).unwrap().abs() < 1e-12);
        let fd = obj.grad_central_difference(&x, 1e-3).unwrap();
        assert!(fd.iter().all(|g| g.abs() < 1e-12), "{fd:?}");
        assert_eq!(obj.evals(), 1 + 28);
        let exact = obj.exact_gradient(&x).unwrap();
        assert!(exact.iter().all(|g| g.abs() < 1e-14), "{exact:?}");
    }

    // Closed form for one ZZ edge at p = 1: f = sin(4 beta) sin(2 gamma).
    #[test]
    fn single_edge_closed_form() {
        let problem = single_edge();
        let mut obj = Objective::new(&problem);
        let (b, g) = (FRAC_PI_8, FRAC_PI_8);
        let f = obj.value(&[b, g]).unwrap();
        assert!((f - (4.0 * b).sin() * (2.0 * g).sin()).abs() < 1e-14);
        let grad = obj.exact_gradient(&[b, g]).unwrap();
        assert!(grad[0].abs() < 1e-14);
        assert!((grad[1] - SQRT_2).abs() < 1e-14);

        let (b, g) = (0.31, -0.77);
        let grad = obj.exact_gradient(&[b, g]).unwrap();
        assert!((grad[0] - 4.0 * (4.0 * b).cos() * (2.0 * g).sin()).abs() < 1e-13);
        assert!((grad[1] - 2.0 * (4.0 * b).sin() * (2.0 * g).cos()).abs() < 1e-13);
    }

    #[test]
    fn masked_difference_skips_coordinates() {
        let problem = single_edge();
        let mut obj = Objective::new(&problem);
        let g = obj
            .grad_central_difference_on(
                &[0.2, 0.0, 0.4, 0.5],
                1e-3,
                Some(&[true, false, true, true]),
            )
            .unwrap();
        assert_eq!(g[1], 0.0);
        assert_eq!(obj.evals(), 6);
    }

    #[test]
    fn richardson_order_two() {
        let problem = Problem::from_graph(&seven_node_instance()).unwrap();
        let mut obj = Objective::new(&problem);
        let x: Vec<f64> = (0..8).map(|i| 0.1 + 0.07 * i as f64).collect();
        let exact = obj.exact_gradient(&x).unwrap();
        let err = |eps: f64, obj: &mut Objective| {
            let fd = obj.grad_central_difference(&x, eps).unwrap();
            fd.iter()
                .zip(&exact)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let e2 = err(1e-2, &mut obj);
        let e3 = err(1e-3, &mut obj);
        let e4 = err(1e-4, &mut obj);
        // O(eps^2): each decade shrinks the error by about 100x until roundoff.
        assert!(e3 < e2 / 50.0, "{e2} {e3}");
        assert!(e4 < 5e-7, "{e4}");
    }
}

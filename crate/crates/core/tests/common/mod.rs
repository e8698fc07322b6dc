//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use qaoa_depth::schedule::soft_threshold;
use qaoa_depth::statevector::evolve;
use qaoa_depth::{ControlSchedule, OptimizerConfig, Problem, WeightedGraph};

/// Cost written out edge by edge from spins s = 1 - 2 * bit.
pub fn edge_sum_energy(graph: &WeightedGraph, z: usize) -> f64 {
    graph
        .edges()
        .iter()
        .map(|e| {
            let si = 1.0 - 2.0 * ((z >> e.i) & 1) as f64;
            let sj = 1.0 - 2.0 * ((z >> e.j) & 1) as f64;
            e.weight * si * sj
        })
        .sum()
}

/// Plain transcription of the accelerated scheme, evaluating the objective
/// straight from the simulator. Returns composite values per iterate and,
/// per step, `(F(y_k), F_k)`.
pub fn reference_apg(
    problem: &Problem,
    cfg: &OptimizerConfig,
    x_init: &[f64],
) -> (Vec<f64>, Vec<(f64, f64)>) {
    let obs = problem.observable();
    let f = |x: &[f64]| {
        let s = ControlSchedule::from_packed(x.to_vec()).unwrap();
        evolve(&s, obs).unwrap().expectation(obs).unwrap()
    };
    let big_f = |x: &[f64]| f(x) + cfg.lambda * x.iter().map(|v| v.abs()).sum::<f64>();
    let grad = |x: &[f64]| -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut up = x.to_vec();
                let mut dn = x.to_vec();
                up[i] += cfg.epsilon;
                dn[i] -= cfg.epsilon;
                (f(&up) - f(&dn)) / (2.0 * cfg.epsilon)
            })
            .collect()
    };

    // One-based numbering: xs[t] = x_t with x_0 = x_1 = x_init.
    let mut xs = vec![x_init.to_vec(), x_init.to_vec()];
    let mut composites = vec![big_f(x_init)];
    let mut checks = Vec::new();
    for k in 1..=cfg.max_iters {
        let beta = (k as f64 - 1.0) / (k as f64 + 2.0);
        let y: Vec<f64> = xs[k]
            .iter()
            .zip(&xs[k - 1])
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        let lo = k.saturating_sub(cfg.q).max(1);
        let f_k = (lo..=k)
            .map(|t| composites[t - 1])
            .fold(f64::NEG_INFINITY, f64::max);
        let fy = big_f(&y);
        let v = if fy <= f_k { y } else { xs[k].clone() };
        let g = grad(&v);
        let step: Vec<f64> = v.iter().zip(&g).map(|(vi, gi)| vi - cfg.eta * gi).collect();
        let next = soft_threshold(&step, cfg.lambda * cfg.eta).unwrap();
        composites.push(big_f(&next));
        checks.push((fy, f_k));
        xs.push(next);
    }
    (composites, checks)
}

//! Polynomial schedule generators and their training.
//!
//! A depth-`p` schedule is `β_i = g(θ_β, i/p)`, `γ_i = g(θ_γ, i/p)` with
//! `g(θ, x) = Σ_d θ_d x^d`. Training minimises the mean normalised gap
//! `(⟨C⟩ - C*) / |C*|` over a training set, which equals `1 - r` for
//! negative optima, using L-BFGS on central-difference gradients.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::QaoaProblem;
use super::QaoaError;
use crate::instances::rng_from_seed;

pub const DEFAULT_DEGREE: usize = 4;
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub theta_beta: Vec<f64>,
    pub theta_gamma: Vec<f64>,
}

impl GeneratorParams {
    pub fn zeros(degree: usize) -> Self {
        GeneratorParams { theta_beta: vec![0.0; degree + 1], theta_gamma: vec![0.0; degree + 1] }
    }

    /// `β_i = 1 - i/p`, `γ_i = i/p` at the given degree (at least 1).
    pub fn linear_ramp(degree: usize) -> Self {
        let mut g = Self::zeros(degree.max(1));
        g.theta_beta[0] = 1.0;
        g.theta_beta[1] = -1.0;
        g.theta_gamma[1] = 1.0;
        g
    }

    fn to_vec(&self) -> Vec<f64> {
        self.theta_beta.iter().chain(&self.theta_gamma).copied().collect()
    }

    fn from_vec(v: &[f64], nb: usize) -> Self {
        GeneratorParams { theta_beta: v[..nb].to_vec(), theta_gamma: v[nb..].to_vec() }
    }
}

fn poly_at(theta: &[f64], x: f64) -> f64 {
    theta.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Schedules `(β, γ)` for `i = 1..=p`.
pub fn expand_generator(gp: &GeneratorParams, p: usize) -> Result<(Vec<f64>, Vec<f64>), QaoaError> {
    if p == 0 {
        return Err(QaoaError::ZeroDepth);
    }
    let xs = (1..=p).map(|i| i as f64 / p as f64);
    let beta = xs.clone().map(|x| poly_at(&gp.theta_beta, x)).collect();
    let gamma = xs.map(|x| poly_at(&gp.theta_gamma, x)).collect();
    Ok((beta, gamma))
}

/// Normalised gap of one problem under a schedule.
pub fn instance_gap(problem: &QaoaProblem, beta: &[f64], gamma: &[f64]) -> Result<f64, QaoaError> {
    let d = problem.simulate(beta, gamma)?;
    let reference = problem.reference_cost;
    if reference == 0.0 {
        return Err(QaoaError::Unknown("optimal cost is zero; ratio undefined".into()));
    }
    Ok((d.expected_cost() - reference) / reference.abs())
}

/// Mean normalised gap over a set of problems.
pub fn mean_gap(problems: &[QaoaProblem], gp: &GeneratorParams, p: usize) -> Result<f64, QaoaError> {
    let (beta, gamma) = expand_generator(gp, p)?;
    let gaps: Result<Vec<f64>, QaoaError> = problems.par_iter().map(|q| instance_gap(q, &beta, &gamma)).collect();
    let gaps = gaps?;
    Ok(gaps.iter().sum::<f64>() / gaps.len() as f64)
}

/// Mean approximation ratio `⟨C⟩ / C*` over the problems.
pub fn mean_ratio(problems: &[QaoaProblem], gp: &GeneratorParams, p: usize) -> Result<f64, QaoaError> {
    let (beta, gamma) = expand_generator(gp, p)?;
    let ratios: Result<Vec<f64>, QaoaError> = problems
        .par_iter()
        .map(|q| Ok(q.simulate(&beta, &gamma)?.approximation_ratio()?))
        .collect();
    let ratios = ratios?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// Central-difference gradient with step `h`.
pub fn fd_gradient<F>(f: &F, x: &[f64], h: f64) -> Result<Vec<f64>, QaoaError>
where
    F: Fn(&[f64]) -> Result<f64, QaoaError>,
{
    let mut g = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe)?;
        probe[i] = x[i] - h;
        let down = f(&probe)?;
        probe[i] = x[i];
        g.push((up - down) / (2.0 * h));
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub degree: usize,
    /// Random restarts after the initial point.
    pub restarts: usize,
    /// L-BFGS iterations per start.
    pub max_iterations: usize,
    /// Cap on objective evaluations over all starts.
    pub max_evaluations: usize,
    pub grad_tol: f64,
    /// Half-width of the uniform perturbation added to the initial
    /// coefficients for random restarts.
    pub restart_spread: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            degree: DEFAULT_DEGREE,
            restarts: 4,
            max_iterations: 40,
            max_evaluations: 20_000,
            grad_tol: 1e-6,
            restart_spread: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub params: GeneratorParams,
    /// Mean normalised gap of `params`.
    pub loss: f64,
    pub initial_loss: f64,
    /// Start that produced the result (0 is the supplied initial point).
    pub best_start: usize,
    pub evaluations: usize,
    /// Set when the evaluation budget ran out before all starts finished.
    pub budget_exhausted: bool,
}

/// Trains generator coefficients for depth `p` over `problems`.
pub fn train_generator(
    problems: &[QaoaProblem],
    p: usize,
    init: &GeneratorParams,
    cfg: &TrainConfig,
) -> Result<TrainResult, QaoaError> {
    if problems.is_empty() {
        return Err(QaoaError::Unknown("empty training set".into()));
    }
    let nb = init.theta_beta.len();
    let evaluations = std::cell::Cell::new(0usize);
    let objective = |v: &[f64]| -> Result<f64, QaoaError> {
        evaluations.set(evaluations.get() + 1);
        mean_gap(problems, &GeneratorParams::from_vec(v, nb), p)
    };

    let x0 = init.to_vec();
    let initial_loss = objective(&x0)?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut starts = vec![x0.clone()];
    for _ in 0..cfg.restarts {
        starts.push(x0.iter().map(|&c| c + rng.random_range(-cfg.restart_spread..=cfg.restart_spread)).collect());
    }

    let mut best = (x0, initial_loss, 0usize);
    let mut budget_exhausted = false;
    for (s, start) in starts.into_iter().enumerate() {
        if evaluations.get() >= cfg.max_evaluations {
            budget_exhausted = true;
            break;
        }
        let remaining = cfg.max_evaluations - evaluations.get();
        let out = lbfgs(&objective, start, cfg.max_iterations, cfg.grad_tol, remaining, &evaluations)?;
        budget_exhausted |= out.budget_hit;
        if out.value < best.1 {
            best = (out.x, out.value, s);
        }
    }
    Ok(TrainResult {
        params: GeneratorParams::from_vec(&best.0, nb),
        loss: best.1,
        initial_loss,
        best_start: best.2,
        evaluations: evaluations.get(),
        budget_exhausted,
    })
}

struct Minimum {
    x: Vec<f64>,
    value: f64,
    budget_hit: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Limited-memory BFGS (two-loop recursion, memory 8) with Armijo
/// backtracking. Never returns a point worse than the start.
fn lbfgs<F>(
    f: &F,
    mut x: Vec<f64>,
    max_iterations: usize,
    grad_tol: f64,
    budget: usize,
    counter: &std::cell::Cell<usize>,
) -> Result<Minimum, QaoaError>
where
    F: Fn(&[f64]) -> Result<f64, QaoaError>,
{
    const MEMORY: usize = 8;
    const ARMIJO: f64 = 1e-4;
    let start_count = counter.get();
    let over = || counter.get() - start_count >= budget;

    let mut fx = f(&x)?;
    let mut g = fd_gradient(f, &x, FD_STEP)?;
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = std::collections::VecDeque::new();
    let mut budget_hit = false;

    for _ in 0..max_iterations {
        if dot(&g, &g).sqrt() < grad_tol {
            break;
        }
        if over() {
            budget_hit = true;
            break;
        }
        // two-loop recursion for the search direction -H g
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let scale = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|qi| *qi *= scale);
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            // not a descent direction: restart from steepest descent
            hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let mut step = if hist.is_empty() { 1.0 / dot(&g, &g).sqrt().max(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let ft = f(&trial)?;
            if ft <= fx + ARMIJO * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
            if over() {
                break;
            }
        }
        let Some((xn, fxn)) = accepted else { break };
        let gn = fd_gradient(f, &xn, FD_STEP)?;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            hist.push_back((s, y, 1.0 / sy));
            if hist.len() > MEMORY {
                hist.pop_front();
            }
        }
        let improvement = fx - fxn;
        x = xn;
        fx = fxn;
        g = gn;
        if improvement.abs() < 1e-12 * fx.abs().max(1.0) {
            break;
        }
    }
    Ok(Minimum { x, value: fx, budget_hit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_regular;
    use crate::model::BinaryPolynomial;
    use crate::qaoa::QaoaCaps;

    #[test]
    fn ramp_expansion() {
        let (b, g) = expand_generator(&GeneratorParams::linear_ramp(4), 4).unwrap();
        assert_eq!(b, vec![0.75, 0.5, 0.25, 0.0]);
        assert_eq!(g, vec![0.25, 0.5, 0.75, 1.0]);
        for p in [1, 2, 7, 32] {
            let (b, g) = expand_generator(&GeneratorParams::linear_ramp(4), p).unwrap();
            for i in 1..=p {
                assert_eq!(b[i - 1], 1.0 - i as f64 / p as f64);
                assert_eq!(g[i - 1], i as f64 / p as f64);
            }
            assert!(b.windows(2).all(|w| w[1] <= w[0]) && g.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn zero_and_constant_generators() {
        let (b, g) = expand_generator(&GeneratorParams::zeros(4), 5).unwrap();
        assert!(b.iter().chain(&g).all(|&v| v == 0.0));
        let c = GeneratorParams { theta_beta: vec![0.7], theta_gamma: vec![0.2] };
        let (b, _) = expand_generator(&c, 3).unwrap();
        assert_eq!(b, vec![0.7; 3]);
        assert!(matches!(expand_generator(&c, 0), Err(QaoaError::ZeroDepth)));
    }

    #[test]
    fn lbfgs_minimises_a_quadratic() {
        let f = |v: &[f64]| Ok((v[0] - 1.0).powi(2) + 10.0 * (v[1] + 2.0).powi(2));
        let counter = std::cell::Cell::new(0);
        let m = lbfgs(&f, vec![5.0, 5.0], 100, 1e-8, 10_000, &counter).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] + 2.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn training_improves_one_qubit_and_is_deterministic() {
        let poly = BinaryPolynomial::from_terms(1, [(&[0usize][..], -1.0)]).unwrap();
        let probs = vec![QaoaProblem::from_polynomial(&poly, &QaoaCaps::default()).unwrap()];
        let init = GeneratorParams::linear_ramp(4);
        let cfg = TrainConfig { restarts: 2, max_iterations: 15, seed: 3, ..Default::default() };
        let a = train_generator(&probs, 1, &init, &cfg).unwrap();
        assert!(a.loss <= a.initial_loss);
        assert!(mean_ratio(&probs, &a.params, 1).unwrap() >= mean_ratio(&probs, &init, 1).unwrap());
        let b = train_generator(&probs, 1, &init, &cfg).unwrap();
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn gradient_agrees_with_richardson() {
        let probs: Vec<QaoaProblem> = (0..2)
            .map(|s| QaoaProblem::from_polynomial(&gen_regular(6, 3, s).unwrap().to_qubo(), &QaoaCaps::default()).unwrap())
            .collect();
        let f = |v: &[f64]| mean_gap(&probs, &GeneratorParams::from_vec(v, 5), 3);
        let mut rng = rng_from_seed(17);
        for _ in 0..10 {
            let x: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g = fd_gradient(&f, &x, FD_STEP).unwrap();
            let h = 1e-5;
            let d1 = fd_gradient(&f, &x, h).unwrap();
            let d2 = fd_gradient(&f, &x, h / 2.0).unwrap();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            for i in 0..10 {
                let rich = (4.0 * d2[i] - d1[i]) / 3.0;
                assert!((g[i] - rich).abs() <= 1e-3 * norm.max(1e-3), "component {i}: {} vs {}", g[i], rich);
            }
        }
    }
}

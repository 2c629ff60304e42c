//! Limited-memory BFGS with a backtracking (Armijo) line search.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::CrfError;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsConfig {
    pub history: usize,
    pub max_iterations: usize,
    /// Relative objective change below which the run has converged.
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the start point and after every accepted step.
    pub trace: Vec<f64>,
}

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 40;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f`, which returns the objective and writes the gradient into
/// its second argument.
pub fn minimize<F>(x0: Vec<f64>, cfg: &LbfgsConfig, mut f: F) -> Result<LbfgsResult, CrfError>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    if !fx.is_finite() {
        return Err(CrfError::NonFiniteObjective { iteration: 0 });
    }
    let mut trace = vec![fx];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.history);
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        if libm::sqrt(dot(&g, &g)) <= 1e-12 * (1.0 + fx.abs()) {
            converged = true;
            break;
        }
        let mut direction = two_loop(&g, &pairs);
        let mut slope = dot(&direction, &g);
        if slope >= 0.0 {
            // not a descent direction; fall back to steepest descent
            pairs.clear();
            direction = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if pairs.is_empty() {
            1.0 / libm::sqrt(dot(&g, &g)).max(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                x_new[i] = x[i] + step * direction[i];
            }
            let f_new = f(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= fx + ARMIJO_C1 * step * slope {
                accepted = Some(f_new);
                break;
            }
            if !f_new.is_finite() && f_new != f64::INFINITY {
                return Err(CrfError::NonFiniteObjective {
                    iteration: iterations + 1,
                });
            }
            step *= BACKTRACK;
        }
        let Some(f_new) = accepted else {
            if pairs.is_empty() {
                // no progress possible along the gradient either
                converged = true;
                break;
            }
            pairs.clear();
            continue;
        };
        iterations += 1;

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * libm::sqrt(dot(&y, &y) * dot(&s, &s)) {
            if pairs.len() == cfg.history {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }

        let change = (fx - f_new).abs() / fx.abs().max(f_new.abs()).max(1.0);
        core::mem::swap(&mut x, &mut x_new);
        core::mem::swap(&mut g, &mut g_new);
        fx = f_new;
        trace.push(fx);
        if change < cfg.tolerance {
            converged = true;
            break;
        }
    }

    Ok(LbfgsResult {
        x,
        objective: fx,
        iterations,
        converged,
        trace,
    })
}

fn two_loop(g: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), alpha) in pairs.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

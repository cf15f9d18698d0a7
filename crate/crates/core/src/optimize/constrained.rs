//! Minimization under the execution-time budget `Σₖ(γₖ + βₖ) ≤ t_max`.
//!
//! Local searches run on an exterior quadratic penalty with escalating
//! weight, are mapped back into the feasible set by radial scaling, and are
//! then polished by projected gradient descent on the polytope
//! `{0 ≤ x ≤ box, Σx ≤ t_max}`.

use rayon::prelude::*;

use super::{best_of, finish, lbfgs, task_rng, MinimizeOptions, OptResult};
use crate::ansatz::ParamMap;
use crate::circuit::Circuit;
use crate::hamiltonian::Hamiltonian;
use crate::{Error, Result};

const PENALTY_WEIGHTS: [f64; 6] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e6];
const POLISH_ITERS: usize = 400;

/// Wraps into the parameter boxes, then scales all angles by
/// `t_max / t_exec` when the budget is exceeded.
pub fn project_radial(pm: &ParamMap, params: &[f64], t_max: f64) -> Vec<f64> {
    let mut x = pm.wrap(params);
    let total: f64 = x.iter().sum();
    if total > t_max {
        let scale = if total > 0.0 { t_max / total } else { 0.0 };
        x.iter_mut().for_each(|v| *v *= scale);
    }
    x
}

/// Euclidean projection onto `{0 ≤ xᵢ ≤ uᵢ, Σ xᵢ ≤ t_max}`.
fn project_polytope(upper: &[f64], y: &[f64], t_max: f64) -> Vec<f64> {
    let shifted = |lambda: f64| -> Vec<f64> { y.iter().zip(upper).map(|(v, u)| (v - lambda).clamp(0.0, *u)).collect() };
    let x = shifted(0.0);
    if x.iter().sum::<f64>() <= t_max {
        return x;
    }
    let (mut lo, mut hi) = (0.0, y.iter().cloned().fold(0.0, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shifted(mid).iter().sum::<f64>() > t_max {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    shifted(hi)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

struct Candidate {
    params: Vec<f64>,
    energy: f64,
    iterations: usize,
    converged: bool,
}

fn search_from(circuit: &Circuit, pm: &ParamMap, h: &Hamiltonian, t_max: f64, start: Vec<f64>, opts: &MinimizeOptions) -> Candidate {
    let start_energy = circuit.energy(&start, h).expect("dimensions checked");
    let mut x = start.clone();
    let mut iterations = 0;
    for mu in PENALTY_WEIGHTS {
        let f = |p: &[f64]| {
            let (e, mut g) = circuit.energy_and_adjoint_gradient(p, h).expect("dimensions checked");
            let excess = pm.wrap(p).iter().sum::<f64>() - t_max;
            if excess > 0.0 {
                g.iter_mut().for_each(|gi| *gi += 2.0 * mu * excess);
                (e + mu * excess * excess, g)
            } else {
                (e, g)
            }
        };
        let r = lbfgs::minimize(f, x, &opts.lbfgs());
        iterations += r.iterations;
        x = r.x;
    }
    let (x, polish_iters, converged) = polish(circuit, pm, h, t_max, project_radial(pm, &x, t_max));
    iterations += polish_iters;
    let energy = circuit.energy(&x, h).expect("dimensions checked");
    if energy <= start_energy {
        Candidate { params: x, energy, iterations, converged }
    } else {
        Candidate { params: start, energy: start_energy, iterations, converged: false }
    }
}

// Projected gradient with Armijo backtracking. Returns the final point, the
// iteration count and whether the projected step became stationary.
fn polish(circuit: &Circuit, pm: &ParamMap, h: &Hamiltonian, t_max: f64, mut x: Vec<f64>) -> (Vec<f64>, usize, bool) {
    let upper: Vec<f64> = pm.labels.iter().map(|l| l.period()).collect();
    let mut step = 1.0;
    for it in 0..POLISH_ITERS {
        let (e, g) = circuit.energy_and_adjoint_gradient(&x, h).expect("dimensions checked");
        let unit = project_polytope(&upper, &x.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>(), t_max);
        if max_abs_diff(&unit, &x) < 1e-7 {
            return (x, it, true);
        }
        let mut accepted = None;
        while step > 1e-12 {
            let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let xn = project_polytope(&upper, &y, t_max);
            let decrease: f64 = g.iter().zip(x.iter().zip(&xn)).map(|(gi, (a, b))| gi * (a - b)).sum();
            let en = circuit.energy(&xn, h).expect("dimensions checked");
            if en <= e - 1e-4 * decrease {
                accepted = Some(xn);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some(xn) => {
                let moved = max_abs_diff(&xn, &x);
                x = xn;
                step = (step * 2.0).min(1e3);
                if moved < 1e-12 {
                    return (x, it + 1, true);
                }
            }
            None => return (x, it, false),
        }
    }
    (x, POLISH_ITERS, false)
}

/// Minimizes the energy subject to `execution_time ≤ t_max`.
///
/// Warm starts are projected into the feasible set and always compete with
/// the random restarts, so the result is never worse than any warm start.
pub fn minimize_constrained(
    circuit: &Circuit,
    pm: &ParamMap,
    h: &Hamiltonian,
    t_max: f64,
    opts: &MinimizeOptions,
    warm_starts: &[Vec<f64>],
) -> Result<OptResult> {
    if !(t_max >= 0.0) {
        return Err(Error::invalid(format!("execution-time budget {t_max} is negative")));
    }
    if !pm.is_qaoa() {
        return Err(Error::invalid("constrained minimization needs a QAOA parameter map"));
    }
    super::gradient::check_map(circuit, pm, &vec![0.0; circuit.num_params()])?;
    for w in warm_starts {
        circuit.check_params(w)?;
    }
    let mut starts: Vec<Vec<f64>> = warm_starts.iter().map(|w| project_radial(pm, w, t_max)).collect();
    for r in 0..opts.restarts {
        let x0 = pm.random_point(&mut task_rng(opts.seed, 0, r as u64));
        starts.push(project_radial(pm, &x0, t_max));
    }
    if starts.is_empty() {
        starts.push(vec![0.0; circuit.num_params()]);
    }
    let runs: Vec<Candidate> =
        starts.into_par_iter().map(|s| search_from(circuit, pm, h, t_max, s, opts)).collect();
    let restarts_used = runs.len();
    let total_iters = runs.iter().map(|c| c.iterations).sum();
    let (_, _, best) = best_of(runs.into_iter().map(|c| (c.energy, c))).expect("non-empty");
    finish(circuit, pm, h, best.params, total_iters, restarts_used, best.converged)
}

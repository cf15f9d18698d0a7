//! Limited-memory BFGS with a weak-Wolfe bisection line search.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
pub struct LbfgsOptions {
    pub memory: usize,
    /// Stop once the gradient max-norm falls below this.
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self { memory: 10, grad_tol: 1e-7, max_iter: 2000 }
    }
}

#[derive(Clone, Debug)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Minimizes `f`, which returns the value and gradient at a point.
///
/// Non-finite values are treated as `+∞` by the line search, so the method
/// never returns a worse point than `x0`.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, opts: &LbfgsOptions) -> LocalResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let dim = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    if dim == 0 || !fx.is_finite() {
        let grad_norm = max_norm(&g);
        return LocalResult { x, value: fx, grad_norm, iterations: 0, converged: dim == 0 };
    }
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut converged = max_norm(&g) < opts.grad_tol;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let mut d = two_loop(&g, &history);
        let mut slope = dot(&g, &d);
        if slope >= 0.0 || !slope.is_finite() {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let t0 = if history.is_empty() { (1.0 / max_norm(&g)).min(1.0) } else { 1.0 };
        match wolfe_search(&mut f, &x, fx, &d, slope, t0) {
            Some((t, fnew, gnew)) => {
                let s: Vec<f64> = d.iter().map(|v| v * t).collect();
                let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                x.iter_mut().zip(&s).for_each(|(xi, si)| *xi += si);
                let decrease = fx - fnew;
                fx = fnew;
                g = gnew;
                if sy > 1e-16 * dot(&y, &y).max(1e-300) {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back((s, y, 1.0 / sy));
                }
                converged = max_norm(&g) < opts.grad_tol;
                if !converged && decrease <= 0.0 && history.is_empty() {
                    break;
                }
            }
            None => {
                if history.is_empty() {
                    break;
                }
                history.clear();
            }
        }
    }
    let grad_norm = max_norm(&g);
    LocalResult { x, value: fx, grad_norm, iterations, converged }
}

fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

// Lewis–Overton bisection for the weak Wolfe conditions. Falls back to the
// best sufficient-decrease point seen when the curvature condition cannot be
// met within the iteration budget.
fn wolfe_search<F>(f: &mut F, x: &[f64], fx: f64, d: &[f64], slope: f64, t0: f64) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut t = t0;
    let mut fallback: Option<(f64, f64, Vec<f64>)> = None;
    let mut trial = vec![0.0; x.len()];
    for _ in 0..60 {
        trial.iter_mut().zip(x.iter().zip(d)).for_each(|(v, (xi, di))| *v = xi + t * di);
        let (ft, gt) = f(&trial);
        if !ft.is_finite() || ft > fx + C1 * t * slope {
            hi = t;
        } else {
            if fallback.as_ref().map_or(true, |(_, fb, _)| ft < *fb) {
                fallback = Some((t, ft, gt.clone()));
            }
            if dot(&gt, d) < C2 * slope {
                lo = t;
            } else {
                return Some((t, ft, gt));
            }
        }
        t = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo };
        if hi.is_finite() && hi - lo < 1e-16 * hi.max(1.0) {
            break;
        }
    }
    fallback.filter(|(_, ft, _)| *ft < fx)
}

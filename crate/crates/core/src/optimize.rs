//! Derivative-free minimizers used by the likelihood fits.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Stop when `|f_worst - f_best| <= rel_tol * max(|f_best|, 1)`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { rel_tol: 1e-9, max_iter: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead simplex minimization. `f` may return `f64::INFINITY` (or NaN)
/// for infeasible points; such vertices are never accepted over finite ones.
pub fn nelder_mead<F>(mut f: F, start: &[f64], step: &[f64], opts: SimplexOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    values.push(eval(start));
    for i in 0..dim {
        let mut v = start.to_vec();
        let mut h = if step[i] != 0.0 { step[i] } else { 1e-3 };
        // pull infeasible initial vertices back toward the start
        let mut fv = f64::INFINITY;
        for _ in 0..40 {
            v[i] = start[i] + h;
            fv = eval(&v);
            if fv.is_finite() {
                break;
            }
            h = if h > 0.0 { -h } else { -h * 0.5 };
        }
        simplex.push(v);
        values.push(fv);
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut order: Vec<usize> = (0..=dim).collect();
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut trial2 = vec![0.0; dim];

    while iterations < opts.max_iter {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second = order[dim.saturating_sub(1)];
        let (fb, fw) = (values[best], values[worst]);
        if fb.is_finite() && fw.is_finite() && (fw - fb).abs() <= opts.rel_tol * fb.abs().max(1.0) {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x / dim as f64;
            }
        }

        for k in 0..dim {
            trial[k] = centroid[k] + alpha * (centroid[k] - simplex[worst][k]);
        }
        let fr = eval(&trial);
        if fr < fb {
            for k in 0..dim {
                trial2[k] = centroid[k] + gamma * (trial[k] - centroid[k]);
            }
            let fe = eval(&trial2);
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        // contraction, outside if the reflection improved on the worst vertex
        let outside = fr < fw;
        for k in 0..dim {
            trial2[k] = if outside {
                centroid[k] + rho * (trial[k] - centroid[k])
            } else {
                centroid[k] + rho * (simplex[worst][k] - centroid[k])
            };
        }
        let fc = eval(&trial2);
        if fc < if outside { fr } else { fw } {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            for k in 0..dim {
                simplex[idx][k] = anchor[k] + sigma * (simplex[idx][k] - anchor[k]);
            }
            values[idx] = eval(&simplex[idx]);
        }
    }

    let best = (0..=dim).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Minimum { point: simplex[best].clone(), value: values[best], iterations, converged }
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > abs_tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Central-difference gradient norm, used for convergence diagnostics.
pub fn gradient_norm<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64]) -> f64 {
    let mut p = x.to_vec();
    let mut sq = 0.0;
    for i in 0..x.len() {
        let h = 1e-6 * x[i].abs().max(1.0);
        p[i] = x[i] + h;
        let up = f(&p);
        p[i] = x[i] - h;
        let down = f(&p);
        p[i] = x[i];
        let g = (up - down) / (2.0 * h);
        sq += g * g;
    }
    libm::sqrt(sq)
}

//! Nelder-Mead simplex with projection onto the box.
//!
//! Pinned dimensions (`lo == hi`) are removed from the simplex so the search
//! runs only over the free coordinates.

use serde::{Deserialize, Serialize};

use super::{clamp_into, validate_bounds, Bounds};
use crate::{Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Initial vertex offset as a fraction of each dimension's range.
    pub initial_step: f64,
    /// Stop when every vertex is within this distance (max norm) of the best.
    pub x_tol: f64,
    /// ... and the objective spread over the simplex is at most this.
    pub f_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { initial_step: 1e-3, x_tol: 1e-12, f_tol: 1e-15, max_iterations: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fun: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0` (clamped into the box).
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    bounds: &Bounds,
    options: &NelderMeadOptions,
) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    validate_bounds(bounds)?;
    if x0.len() != bounds.len() {
        return Err(Error::Domain("starting point has wrong dimension".into()));
    }
    let mut start = x0.to_vec();
    clamp_into(&mut start, bounds);

    let free: Vec<usize> = (0..bounds.len()).filter(|&i| bounds[i].1 > bounds[i].0).collect();
    let free_bounds: Vec<(f64, f64)> = free.iter().map(|&i| bounds[i]).collect();
    let n = free.len();

    let mut full = start.clone();
    let mut eval = |y: &[f64], evaluations: &mut usize| {
        for (k, &i) in free.iter().enumerate() {
            full[i] = y[k];
        }
        *evaluations += 1;
        f(&full)
    };
    let expand_point = |y: &[f64]| {
        let mut x = start.clone();
        for (k, &i) in free.iter().enumerate() {
            x[i] = y[k];
        }
        x
    };

    let mut evaluations = 0;
    let y0: Vec<f64> = free.iter().map(|&i| start[i]).collect();
    if n == 0 {
        let fun = eval(&y0, &mut evaluations);
        return Ok(NelderMeadResult { x: start, fun, evaluations, iterations: 0, converged: true });
    }

    let mut simplex = vec![y0.clone()];
    for k in 0..n {
        let (lo, hi) = free_bounds[k];
        let step = options.initial_step * (hi - lo);
        let mut v = y0.clone();
        v[k] = if v[k] + step <= hi { v[k] + step } else { v[k] - step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evaluations)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size <= options.x_tol && spread <= options.f_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let toward = |coef: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&worst).map(|(c, w)| c + coef * (c - w)).collect();
            clamp_into(&mut p, &free_bounds);
            p
        };

        let reflected = toward(REFLECT);
        let f_r = eval(&reflected, &mut evaluations);
        if f_r < values[0] {
            let expanded = toward(EXPAND);
            let f_e = eval(&expanded, &mut evaluations);
            if f_e < f_r {
                simplex[n] = expanded;
                values[n] = f_e;
            } else {
                simplex[n] = reflected;
                values[n] = f_r;
            }
            continue;
        }
        if f_r < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[n] {
            let p = toward(CONTRACT * REFLECT);
            let v = eval(&p, &mut evaluations);
            (p, v)
        } else {
            let p = toward(-CONTRACT);
            let v = eval(&p, &mut evaluations);
            (p, v)
        };
        if f_c < values[n].min(f_r) {
            simplex[n] = contracted;
            values[n] = f_c;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> =
                simplex[0].iter().zip(&simplex[i]).map(|(b, x)| b + SHRINK * (x - b)).collect();
            values[i] = eval(&shrunk, &mut evaluations);
            simplex[i] = shrunk;
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Ok(NelderMeadResult {
        x: expand_point(&simplex[best]),
        fun: values[best],
        evaluations,
        iterations,
        converged,
    })
}

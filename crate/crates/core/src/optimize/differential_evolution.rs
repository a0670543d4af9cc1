//! Differential evolution, `best/1/bin` with per-generation dithering of the
//! mutation factor and immediate (in-place) replacement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{clamp_into, validate_bounds, Bounds};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeOptions {
    pub population: usize,
    /// Mutation factor range; a fresh factor is drawn each generation.
    pub mutation: (f64, f64),
    pub crossover: f64,
    pub max_generations: usize,
    /// Stop as soon as the best objective value is at or below this.
    pub target: f64,
    /// Stop when the population's objective spread falls to this value
    /// (`0` disables the check).
    pub spread_tol: f64,
}

impl Default for DeOptions {
    fn default() -> Self {
        Self {
            population: 32,
            mutation: (0.5, 1.0),
            crossover: 0.7,
            max_generations: 300,
            target: 1e-12,
            spread_tol: 0.0,
        }
    }
}

impl DeOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        let (m0, m1) = self.mutation;
        if self.population < 4
            || !(0.0..=2.0).contains(&m0)
            || !(m0..=2.0).contains(&m1)
            || !(0.0..=1.0).contains(&self.crossover)
        {
            return Err(Error::Domain(format!("invalid differential evolution options: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeResult {
    pub x: Vec<f64>,
    pub fun: f64,
    /// Final population and objective values.
    pub population: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub evaluations: usize,
    pub generations: usize,
}

/// Minimizes `f` over the box.
///
/// `initial` points are clamped and placed at the front of the population
/// (extra points beyond the population size are ignored); the remainder is
/// drawn uniformly. Selection is greedy, so the best value never increases
/// and is never worse than any initial point.
pub fn differential_evolution<F, R>(
    mut f: F,
    bounds: &Bounds,
    initial: &[Vec<f64>],
    options: &DeOptions,
    rng: &mut R,
) -> Result<DeResult>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    validate_bounds(bounds)?;
    options.validate()?;
    let n = bounds.len();
    let np = options.population;

    let mut population: Vec<Vec<f64>> = Vec::with_capacity(np);
    for p in initial.iter().take(np) {
        if p.len() != n {
            return Err(Error::Domain("initial point has wrong dimension".into()));
        }
        let mut x = p.clone();
        clamp_into(&mut x, bounds);
        population.push(x);
    }
    while population.len() < np {
        population.push(bounds.iter().map(|&(lo, hi)| sample(rng, lo, hi)).collect());
    }

    let mut fitness: Vec<f64> = population.iter().map(|x| f(x)).collect();
    let mut evaluations = np;
    let mut best = argmin(&fitness);

    let mut generations = 0;
    let mut trial = vec![0.0; n];
    while generations < options.max_generations && !converged(&fitness, best, options) {
        generations += 1;
        let scale = sample(rng, options.mutation.0, options.mutation.1);
        for i in 0..np {
            let (r1, r2) = pick_two(rng, np, i);
            let forced = rng.random_range(0..n);
            for j in 0..n {
                trial[j] = if j == forced || rng.random::<f64>() < options.crossover {
                    population[best][j] + scale * (population[r1][j] - population[r2][j])
                } else {
                    population[i][j]
                };
            }
            clamp_into(&mut trial, bounds);
            let value = f(&trial);
            evaluations += 1;
            if value <= fitness[i] {
                population[i].copy_from_slice(&trial);
                fitness[i] = value;
                if value < fitness[best] {
                    best = i;
                }
            }
        }
    }

    Ok(DeResult {
        x: population[best].clone(),
        fun: fitness[best],
        population,
        fitness,
        evaluations,
        generations,
    })
}

fn converged(fitness: &[f64], best: usize, options: &DeOptions) -> bool {
    if fitness[best] <= options.target {
        return true;
    }
    if options.spread_tol <= 0.0 {
        return false;
    }
    let worst = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    worst - fitness[best] <= options.spread_tol
}

fn sample<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn pick_two<R: Rng + ?Sized>(rng: &mut R, np: usize, exclude: usize) -> (usize, usize) {
    let r1 = loop {
        let r = rng.random_range(0..np);
        if r != exclude {
            break r;
        }
    };
    let r2 = loop {
        let r = rng.random_range(0..np);
        if r != exclude && r != r1 {
            break r;
        }
    };
    (r1, r2)
}

// First index of the smallest value; NaN never wins.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}

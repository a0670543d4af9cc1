//! Inverse design: the twisted waveguide that best approximates a target
//! rotation inside a box of admissible twist angles and lengths.
//!
//! The search is a seeded differential evolution over `(θ, L)` followed by a
//! Nelder-Mead polish from the best few members of the final population.
//!
//! The objective oscillates with a period of roughly π in `θ`, so a box with
//! `θ_max = 20π` holds dozens of basins and a plain random population tends
//! to settle in one of them. The initial population is therefore built from
//! deterministic candidates before random fill:
//!
//! - designs supplied by the caller (e.g. optima for a smaller box),
//! - the families that are reachable exactly: untwisted guides (pure
//!   z-rotations) and guides with retardance `φ = 2πk` (pure y-rotations),
//! - the best cells of a coarse lattice over the box.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::optimize::{differential_evolution, nelder_mead, DeOptions, NelderMeadOptions};
use crate::su2::{axis_angle_to_unitary, gate_fidelity, RotationSpec, Unitary2};
use crate::waveguide::{gate_matrix, length_for_retardance, TwistDesign};
use crate::{Error, Result};

/// Search box `θ ∈ [−theta_max, theta_max]`, `L ∈ [0, length_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConstraints {
    pub theta_max: f64,
    pub length_max: f64,
}

impl DesignConstraints {
    /// Both bounds must be finite and nonnegative. A zero bound pins that
    /// parameter (e.g. `theta_max = 0` restricts to untwisted guides).
    pub fn new(theta_max: f64, length_max: f64) -> Result<Self> {
        let c = Self { theta_max, length_max };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.theta_max) || !ok(self.length_max) {
            return Err(Error::Domain(format!(
                "constraints must be finite and nonnegative (theta_max = {}, length_max = {})",
                self.theta_max, self.length_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, d: &TwistDesign) -> bool {
        d.theta.abs() <= self.theta_max && (0.0..=self.length_max).contains(&d.length)
    }

    /// Whether `other`'s box lies inside this one.
    pub fn includes(&self, other: &DesignConstraints) -> bool {
        other.theta_max <= self.theta_max && other.length_max <= self.length_max
    }

    fn bounds(&self) -> [(f64, f64); 2] {
        [(-self.theta_max, self.theta_max), (0.0, self.length_max)]
    }
}

/// Coarse lattice scanned before the evolutionary search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSeeding {
    /// Lattice spacing in `θ` (radians).
    pub theta_step: f64,
    /// Lattice spacing in `L` (beat lengths).
    pub length_step: f64,
    /// Upper bound on lattice points; steps are widened to respect it.
    pub max_points: usize,
}

impl Default for LatticeSeeding {
    fn default() -> Self {
        Self { theta_step: 0.25, length_step: 0.05, max_points: 250_000 }
    }
}

impl LatticeSeeding {
    fn points(&self, c: &DesignConstraints) -> Vec<TwistDesign> {
        let count = |span: f64, step: f64| {
            if span > 0.0 && step > 0.0 {
                (span / step).ceil() as usize + 1
            } else {
                1
            }
        };
        let mut nt = count(2.0 * c.theta_max, self.theta_step);
        let mut nl = count(c.length_max, self.length_step);
        let cap = self.max_points.max(1);
        if nt * nl > cap {
            let shrink = ((nt * nl) as f64 / cap as f64).sqrt();
            nt = ((nt as f64 / shrink).floor() as usize).max(1);
            nl = ((nl as f64 / shrink).floor() as usize).max(1);
        }
        let thetas = crate::sweep::linspace(-c.theta_max, c.theta_max, nt);
        let lengths = crate::sweep::linspace(0.0, c.length_max, nl);
        thetas
            .iter()
            .flat_map(|&theta| lengths.iter().map(move |&length| TwistDesign { theta, length }))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub seed: u64,
    pub de: DeOptions,
    pub polish: NelderMeadOptions,
    /// Designs inserted at the front of the initial population.
    pub initial: Vec<TwistDesign>,
    /// Consider the exact z- and y-rotation families as initial members.
    pub structured_seeds: bool,
    /// Consider the cells of a coarse lattice as initial members.
    pub lattice: Option<LatticeSeeding>,
    /// How many of the best structured/lattice candidates enter the
    /// population (after the caller's designs).
    pub seeded_members: usize,
    /// Number of distinct final-population members polished.
    pub polish_starts: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            de: DeOptions::default(),
            polish: NelderMeadOptions::default(),
            initial: Vec::new(),
            structured_seeds: true,
            lattice: Some(LatticeSeeding::default()),
            seeded_members: 16,
            polish_starts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub design: TwistDesign,
    pub fidelity: f64,
    pub target: RotationSpec,
    pub evaluations: usize,
    pub seed: u64,
}

/// Gate fidelity of the waveguide `d` with respect to `target`.
pub fn fidelity_objective(d: &TwistDesign, target: &Unitary2) -> f64 {
    gate_fidelity(&gate_matrix(d), target)
}

/// Best design for `target` within `constraints`.
///
/// The returned fidelity is the largest value seen over every design probed,
/// and the design always lies inside the box. Results are reproducible for a
/// fixed `options.seed`.
pub fn fit_gate(
    target: &RotationSpec,
    constraints: &DesignConstraints,
    options: &FitOptions,
) -> Result<FitResult> {
    constraints.validate()?;
    let u = axis_angle_to_unitary(target);
    let bounds = constraints.bounds();

    let mut best = (f64::NEG_INFINITY, TwistDesign { theta: 0.0, length: 0.0 });
    let mut objective = |x: &[f64]| {
        let d = TwistDesign { theta: x[0], length: x[1] };
        let fid = fidelity_objective(&d, &u);
        if fid > best.0 {
            best = (fid, d);
        }
        1.0 - fid
    };

    let mut initial: Vec<Vec<f64>> = options.initial.iter().map(|d| vec![d.theta, d.length]).collect();
    let mut pool = Vec::new();
    if options.structured_seeds {
        pool.extend(structured_designs(target, constraints));
    }
    if let Some(lattice) = &options.lattice {
        pool.extend(lattice.points(constraints));
    }
    let mut scored: Vec<(f64, TwistDesign)> =
        pool.into_iter().map(|d| (objective(&[d.theta, d.length]), d)).collect();
    // stable: ties keep generation order
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    initial.extend(scored.iter().take(options.seeded_members).map(|(_, d)| vec![d.theta, d.length]));
    let mut evaluations = scored.len();

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let de = differential_evolution(&mut objective, &bounds, &initial, &options.de, &mut rng)?;
    evaluations += de.evaluations;
    if de.fun > options.de.target {
        let mut order: Vec<usize> = (0..de.fitness.len()).collect();
        order.sort_by(|&a, &b| de.fitness[a].total_cmp(&de.fitness[b]));
        let mut starts: Vec<&Vec<f64>> = Vec::new();
        for i in order {
            if starts.len() >= options.polish_starts {
                break;
            }
            let x = &de.population[i];
            if !starts.contains(&x) {
                starts.push(x);
            }
        }
        for x in starts {
            let nm = nelder_mead(&mut objective, x, &bounds, &options.polish)?;
            evaluations += nm.evaluations;
        }
    }

    let (fidelity, design) = best;
    Ok(FitResult { design, fidelity, target: *target, evaluations, seed: options.seed })
}

/// Designs realizing exact z- or y-rotations with the target's angle.
///
/// Untwisted guides give `exp(-iσ_z πL)`, so `L = χ/2π` (axis +z) or
/// `L = 1 − χ/2π` (axis −z), each repeated every beat length. A guide with
/// `φ = 2πk` has `D_HV = ±1`, leaving the y-rotation `exp(+iσ_y θ)`; the
/// candidates are `θ = ±χ/2 + mπ` with the shortest admissible `k`.
pub fn structured_designs(target: &RotationSpec, constraints: &DesignConstraints) -> Vec<TwistDesign> {
    let chi = target.canonical().angle();
    let mut out = vec![TwistDesign { theta: 0.0, length: 0.0 }];

    let base = chi / TAU;
    for start in [base, 1.0 - base] {
        let mut length = start;
        while length <= constraints.length_max && out.len() < 8 {
            out.push(TwistDesign { theta: 0.0, length });
            length += 1.0;
        }
    }

    for m in [0.0, -1.0, 1.0] {
        for sign in [1.0, -1.0] {
            let theta: f64 = sign * 0.5 * chi + m * PI;
            if theta.abs() > constraints.theta_max {
                continue;
            }
            let k = (theta.abs() / PI).ceil().max(1.0);
            for kk in [k, k + 1.0] {
                if let Some(length) = length_for_retardance(theta, TAU * kk) {
                    if length <= constraints.length_max {
                        out.push(TwistDesign { theta, length });
                    }
                }
            }
        }
    }
    out
}

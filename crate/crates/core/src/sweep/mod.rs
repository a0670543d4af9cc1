//! Sweeps over a grid of single-qubit rotations.
//!
//! Targets are parametrized by the polar and azimuthal angles of the axis
//! and the rotation angle `χ`, each sampled inclusively on its full range.
//! Every target is fitted independently with a per-target seed derived from
//! the base seed and the target index, so results do not depend on how the
//! work is scheduled across threads.

mod report;

pub use report::{write_csv, write_json, write_scan_csv, write_scan_json, SCHEMA_VERSION};

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{fit_gate, DesignConstraints, FitOptions};
use crate::su2::{spherical_to_axis, RotationSpec, SphericalAxis};
use crate::waveguide::TwistDesign;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n_polar: usize,
    pub n_azimuth: usize,
    pub n_angle: usize,
}

impl SweepGrid {
    /// 33 × 65 × 17 = 36465 gates.
    pub const FULL: SweepGrid = SweepGrid { n_polar: 33, n_azimuth: 65, n_angle: 17 };
    /// Small grid for quick runs and CI.
    pub const DESK: SweepGrid = SweepGrid { n_polar: 9, n_azimuth: 17, n_angle: 5 };

    pub fn new(n_polar: usize, n_azimuth: usize, n_angle: usize) -> Result<Self> {
        let g = Self { n_polar, n_azimuth, n_angle };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_polar == 0 || self.n_azimuth == 0 || self.n_angle == 0 {
            return Err(Error::Domain(format!("grid counts must be positive: {self:?}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_polar * self.n_azimuth * self.n_angle
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self::DESK
    }
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTarget {
    pub index: usize,
    pub polar: f64,
    pub azimuth: f64,
    pub chi: f64,
    pub rotation: RotationSpec,
}

/// Inclusive linear spacing; a single sample sits at `lo`.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
        }
    }
}

/// All grid targets in row-major `(polar, azimuth, angle)` order. Degenerate
/// points (poles, `χ = 0`, azimuth `0` and `2π`) are kept.
pub fn generate_grid(g: &SweepGrid) -> Result<Vec<SweepTarget>> {
    g.validate()?;
    let polars = linspace(0.0, PI, g.n_polar);
    let azimuths = linspace(0.0, TAU, g.n_azimuth);
    let chis = linspace(0.0, TAU, g.n_angle);
    let mut out = Vec::with_capacity(g.len());
    for &polar in &polars {
        for &azimuth in &azimuths {
            let axis = spherical_to_axis(&SphericalAxis::new(polar, azimuth)?);
            for &chi in &chis {
                out.push(SweepTarget {
                    index: out.len(),
                    polar,
                    azimuth,
                    chi,
                    rotation: RotationSpec::new(axis, chi)?,
                });
            }
        }
    }
    Ok(out)
}

/// SplitMix64 finalizer.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base_seed XOR mix64(index)`.
pub fn target_seed(base_seed: u64, index: usize) -> u64 {
    base_seed ^ mix64(index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub seed: u64,
    /// Per-target optimizer settings; the seed and initial designs are
    /// replaced per target.
    pub fit: FitOptions,
    pub histogram_min: f64,
    pub histogram_bins: usize,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { seed: 0, fit: FitOptions::default(), histogram_min: 0.9, histogram_bins: 50, jobs: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub index: usize,
    pub polar: f64,
    pub azimuth: f64,
    pub chi: f64,
    pub axis: [f64; 3],
    pub theta_opt: f64,
    pub length_opt: f64,
    pub fidelity: f64,
    pub evaluations: usize,
    pub seed: u64,
}

impl TargetRecord {
    pub fn design(&self) -> TwistDesign {
        TwistDesign { theta: self.theta_opt, length: self.length_opt }
    }
}

/// Worst fidelity over all rotation angles about one grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisWorst {
    pub polar: f64,
    pub azimuth: f64,
    pub worst_fidelity: f64,
}

/// Uniform bins over `[min, 1]`; fidelities below `min` are counted in
/// `below`, so `below + Σ counts` is the number of targets. The last bin is
/// closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub below: usize,
}

impl Histogram {
    pub fn new(values: &[f64], min: f64, bins: usize) -> Result<Self> {
        if !(min.is_finite() && (0.0..1.0).contains(&min)) || bins == 0 {
            return Err(Error::Domain(format!(
                "histogram needs 0 <= min < 1 and at least one bin (min = {min}, bins = {bins})"
            )));
        }
        let edges = linspace(min, 1.0, bins + 1);
        let width = (1.0 - min) / bins as f64;
        let mut counts = vec![0; bins];
        let mut below = 0;
        for &v in values {
            if v < min {
                below += 1;
            } else {
                let k = (((v - min) / width) as usize).min(bins - 1);
                counts[k] += 1;
            }
        }
        Ok(Self { edges, counts, below })
    }

    pub fn total(&self) -> usize {
        self.below + self.counts.iter().sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub grid: SweepGrid,
    pub constraints: DesignConstraints,
    pub options: SweepOptions,
    pub records: Vec<TargetRecord>,
    pub f_min: f64,
    pub axis_worst: Vec<AxisWorst>,
    pub histogram: Histogram,
}

impl SweepSummary {
    pub fn fidelities(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.fidelity)
    }

    /// Fraction of targets with fidelity at least `threshold`.
    pub fn mass_at_least(&self, threshold: f64) -> f64 {
        let n = self.fidelities().filter(|&f| f >= threshold).count();
        n as f64 / self.records.len() as f64
    }
}

/// Fits every grid target under `constraints` and aggregates the results.
pub fn run_sweep(
    g: &SweepGrid,
    constraints: &DesignConstraints,
    options: &SweepOptions,
) -> Result<SweepSummary> {
    run_sweep_with_seeds(g, constraints, options, &[])
}

/// Like [`run_sweep`], with extra initial designs per target (indexed like
/// the grid); `seeds` may be empty.
pub fn run_sweep_with_seeds(
    g: &SweepGrid,
    constraints: &DesignConstraints,
    options: &SweepOptions,
    seeds: &[Vec<TwistDesign>],
) -> Result<SweepSummary> {
    constraints.validate()?;
    let targets = generate_grid(g)?;
    // fail before fitting anything
    Histogram::new(&[], options.histogram_min, options.histogram_bins)?;

    let fit_one = |t: &SweepTarget| -> Result<TargetRecord> {
        let mut fit = options.fit.clone();
        fit.seed = target_seed(options.seed, t.index);
        fit.initial = seeds.get(t.index).cloned().unwrap_or_default();
        let r = fit_gate(&t.rotation, constraints, &fit)?;
        Ok(TargetRecord {
            index: t.index,
            polar: t.polar,
            azimuth: t.azimuth,
            chi: t.chi,
            axis: t.rotation.axis(),
            theta_opt: r.design.theta,
            length_opt: r.design.length,
            fidelity: r.fidelity,
            evaluations: r.evaluations,
            seed: r.seed,
        })
    };
    let run = || targets.par_iter().map(fit_one).collect::<Result<Vec<_>>>();
    let records = match options.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let fidelities: Vec<f64> = records.iter().map(|r| r.fidelity).collect();
    let f_min = fidelities.iter().copied().fold(f64::INFINITY, f64::min);
    let axis_worst = records
        .chunks(g.n_angle)
        .map(|chunk| AxisWorst {
            polar: chunk[0].polar,
            azimuth: chunk[0].azimuth,
            worst_fidelity: chunk.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min),
        })
        .collect();
    let histogram = Histogram::new(&fidelities, options.histogram_min, options.histogram_bins)?;

    Ok(SweepSummary {
        grid: *g,
        constraints: *constraints,
        options: options.clone(),
        records,
        f_min,
        axis_worst,
        histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub theta_max: f64,
    pub length_max: f64,
    pub f_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintScan {
    pub nested_seeding: bool,
    pub entries: Vec<ScanEntry>,
    pub summaries: Vec<SweepSummary>,
}

/// Runs a sweep for each constraint box in order.
///
/// With `nested_seeding`, every target's search also starts from its optima
/// under all earlier boxes contained in the current one, so the worst
/// fidelity cannot drop as the box grows.
pub fn constraint_scan(
    boxes: &[DesignConstraints],
    g: &SweepGrid,
    options: &SweepOptions,
    nested_seeding: bool,
) -> Result<ConstraintScan> {
    if boxes.is_empty() {
        return Err(Error::Domain("constraint scan needs at least one (theta_max, length_max) pair".into()));
    }
    for c in boxes {
        c.validate()?;
    }
    g.validate()?;

    let mut summaries: Vec<SweepSummary> = Vec::with_capacity(boxes.len());
    for c in boxes {
        let mut seeds: Vec<Vec<TwistDesign>> = Vec::new();
        if nested_seeding {
            let inner: Vec<&SweepSummary> = summaries.iter().filter(|s| c.includes(&s.constraints)).collect();
            if !inner.is_empty() {
                seeds = (0..g.len()).map(|i| inner.iter().map(|s| s.records[i].design()).collect()).collect();
            }
        }
        summaries.push(run_sweep_with_seeds(g, c, options, &seeds)?);
    }
    let entries = summaries
        .iter()
        .map(|s| ScanEntry {
            theta_max: s.constraints.theta_max,
            length_max: s.constraints.length_max,
            f_min: s.f_min,
        })
        .collect();
    Ok(ConstraintScan { nested_seeding, entries, summaries })
}

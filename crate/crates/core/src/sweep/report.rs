//! JSON report and CSV table export.
//!
//! The JSON report is
//!
//! ```text
//! { schema_version, config: { grid, constraints, seed, histogram_min,
//!   histogram_bins, optimizer }, targets: [...], aggregates: { f_min,
//!   axis_worst, histogram } }
//! ```
//!
//! and a constraint scan nests one `{ constraints, f_min, targets,
//! aggregates }` object per box under `scan`. The per-target CSV columns are
//! `polar,azimuth,chi,theta_opt,L_opt,fidelity`; the scan CSV columns are
//! `theta_max,length_max,f_min`.

use std::io::Write;

use serde::Serialize;

use super::{AxisWorst, ConstraintScan, Histogram, SweepGrid, SweepSummary, TargetRecord};
use crate::design::{DesignConstraints, FitOptions};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Optimizer<'a> {
    de: &'a crate::optimize::DeOptions,
    polish: &'a crate::optimize::NelderMeadOptions,
    structured_seeds: bool,
}

impl<'a> From<&'a FitOptions> for Optimizer<'a> {
    fn from(f: &'a FitOptions) -> Self {
        Self { de: &f.de, polish: &f.polish, structured_seeds: f.structured_seeds }
    }
}

#[derive(Serialize)]
struct Config<'a> {
    grid: &'a SweepGrid,
    #[serde(skip_serializing_if = "Option::is_none")]
    constraints: Option<&'a DesignConstraints>,
    seed: u64,
    histogram_min: f64,
    histogram_bins: usize,
    optimizer: Optimizer<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nested_seeding: Option<bool>,
}

#[derive(Serialize)]
struct Aggregates<'a> {
    f_min: f64,
    axis_worst: &'a [AxisWorst],
    histogram: &'a Histogram,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    config: Config<'a>,
    targets: &'a [TargetRecord],
    aggregates: Aggregates<'a>,
}

#[derive(Serialize)]
struct ScanItem<'a> {
    constraints: &'a DesignConstraints,
    f_min: f64,
    targets: &'a [TargetRecord],
    aggregates: Aggregates<'a>,
}

#[derive(Serialize)]
struct ScanReport<'a> {
    schema_version: u32,
    config: Config<'a>,
    scan: Vec<ScanItem<'a>>,
}

fn aggregates(s: &SweepSummary) -> Aggregates<'_> {
    Aggregates { f_min: s.f_min, axis_worst: &s.axis_worst, histogram: &s.histogram }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("write failed: {e}"))
}

pub fn write_json<W: Write>(summary: &SweepSummary, mut out: W) -> Result<()> {
    let o = &summary.options;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: Config {
            grid: &summary.grid,
            constraints: Some(&summary.constraints),
            seed: o.seed,
            histogram_min: o.histogram_min,
            histogram_bins: o.histogram_bins,
            optimizer: (&o.fit).into(),
            nested_seeding: None,
        },
        targets: &summary.records,
        aggregates: aggregates(summary),
    };
    serde_json::to_writer_pretty(&mut out, &report).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}

pub fn write_scan_json<W: Write>(scan: &ConstraintScan, mut out: W) -> Result<()> {
    let first = scan.summaries.first().ok_or_else(|| Error::Domain("empty constraint scan".into()))?;
    let o = &first.options;
    let report = ScanReport {
        schema_version: SCHEMA_VERSION,
        config: Config {
            grid: &first.grid,
            constraints: None,
            seed: o.seed,
            histogram_min: o.histogram_min,
            histogram_bins: o.histogram_bins,
            optimizer: (&o.fit).into(),
            nested_seeding: Some(scan.nested_seeding),
        },
        scan: scan
            .summaries
            .iter()
            .map(|s| ScanItem {
                constraints: &s.constraints,
                f_min: s.f_min,
                targets: &s.records,
                aggregates: aggregates(s),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut out, &report).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}

pub fn write_csv<W: Write>(summary: &SweepSummary, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["polar", "azimuth", "chi", "theta_opt", "L_opt", "fidelity"]).map_err(io_err)?;
    for r in &summary.records {
        w.serialize((r.polar, r.azimuth, r.chi, r.theta_opt, r.length_opt, r.fidelity)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_scan_csv<W: Write>(scan: &ConstraintScan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta_max", "length_max", "f_min"]).map_err(io_err)?;
    for e in &scan.entries {
        w.serialize((e.theta_max, e.length_max, e.f_min)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

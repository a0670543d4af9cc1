//! The `twistgate` command line.
//!
//! Exit codes: `0` success, `2` usage or parse error, `1` computation or
//! I/O error. Numbers accept multiples of π (`pi`, `20pi`, `-0.5pi`,
//! `pi/2`, `3pi/4`). A `--config FILE` of `key = value` lines supplies
//! default values for the subcommand's long flags; flags given on the
//! command line take precedence.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::design::{fit_gate, DesignConstraints, FitOptions, FitResult};
use crate::su2::{spherical_to_axis, RotationSpec, SphericalAxis};
use crate::sweep::{self, SweepGrid, SweepOptions};
use crate::waveguide::{
    beat_length, derive_angles, gate_axis_angle, gate_matrix, mode_analysis, physical_design, PhysicalParams,
    TwistDesign,
};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "TWISTGATE_SEED";

const SUBCOMMANDS: [&str; 5] = ["gate", "modes", "fit", "sweep", "units"];

#[derive(Debug, Parser)]
#[command(name = "twistgate", version, about = "Twisted waveguides as single-qubit gates")]
pub struct Cli {
    /// Digits after the decimal point in printed numbers.
    #[arg(long, global = true, default_value_t = 9)]
    pub digits: usize,
    /// key = value file with defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gate matrix and axis-angle form of a design.
    Gate(DesignArgs),
    /// Eigenmode polarizations and propagation-constant splitting.
    Modes(DesignArgs),
    /// Best design approximating a target rotation.
    Fit(FitArgs),
    /// Fit every gate on a grid and report worst fidelities.
    Sweep(SweepArgs),
    /// Beat length and physical dimensions.
    Units(UnitsArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DesignArgs {
    /// Total twist angle in radians.
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub theta: f64,
    /// Length in linear beat lengths.
    #[arg(long, value_parser = parse_number)]
    pub length: f64,
}

#[derive(Debug, Args, Clone)]
pub struct OptimizerArgs {
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Differential evolution population size.
    #[arg(long)]
    pub population: Option<usize>,
    /// Maximum differential evolution generations.
    #[arg(long)]
    pub generations: Option<usize>,
    /// Crossover probability.
    #[arg(long, value_parser = parse_number)]
    pub crossover: Option<f64>,
}

impl OptimizerArgs {
    fn fit_options(&self) -> FitOptions {
        let mut o = FitOptions { seed: self.seed, ..Default::default() };
        if let Some(p) = self.population {
            o.de.population = p;
        }
        if let Some(g) = self.generations {
            o.de.max_generations = g;
        }
        if let Some(c) = self.crossover {
            o.de.crossover = c;
        }
        o
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct FitArgs {
    /// Rotation axis as x,y,z (normalized).
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, conflicts_with_all = ["polar", "azimuth"])]
    pub axis: Option<[f64; 3]>,
    /// Polar angle of the axis.
    #[arg(long, value_parser = parse_number, requires = "azimuth")]
    pub polar: Option<f64>,
    /// Azimuthal angle of the axis.
    #[arg(long, value_parser = parse_number, requires = "polar")]
    pub azimuth: Option<f64>,
    /// Rotation angle.
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub chi: f64,
    #[arg(long, value_parser = parse_number)]
    pub theta_max: f64,
    #[arg(long, value_parser = parse_number)]
    pub length_max: f64,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Write the fit result as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    /// Grid counts n_polar,n_azimuth,n_angle.
    #[arg(long, value_parser = parse_grid, default_value = "9,17,5", conflicts_with = "full_grid")]
    pub grid: SweepGrid,
    /// Use the 33,65,17 grid (36465 gates).
    #[arg(long)]
    pub full_grid: bool,
    #[arg(long, value_parser = parse_number, default_value = "20pi")]
    pub theta_max: f64,
    #[arg(long, value_parser = parse_number, default_value = "3")]
    pub length_max: f64,
    /// Constraint scan as theta_max:length_max pairs, comma separated.
    #[arg(long, value_parser = parse_scan, conflicts_with_all = ["theta_max", "length_max"])]
    pub scan: Option<ScanList>,
    /// Disable seeding each scan box with optima from contained boxes.
    #[arg(long)]
    pub no_nested: bool,
    /// Lower edge of the fidelity histogram.
    #[arg(long, value_parser = parse_number, default_value = "0.9")]
    pub hist_min: f64,
    #[arg(long, default_value_t = 50)]
    pub hist_bins: usize,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV table path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct UnitsArgs {
    /// Modal birefringence.
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub dn: f64,
    /// Vacuum wavelength in meters.
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub wl: f64,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true, requires = "length")]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_number, requires = "theta")]
    pub length: Option<f64>,
}

/// Parses a real number, optionally a multiple or fraction of π.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let bad = || format!("invalid number '{s}'");
    let lower = t.to_ascii_lowercase().replace('π', "pi");
    let v = if let Some(pos) = lower.find("pi") {
        let (coef, rest) = lower.split_at(pos);
        let rest = &rest[2..];
        let coef = match coef.trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let den = match rest.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad()),
        };
        coef * PI / den
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s.split(',').map(parse_number).collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| format!("expected three comma-separated numbers, got '{s}'"))
}

fn parse_grid(s: &str) -> Result<SweepGrid, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("invalid grid count '{p}'")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => Ok(SweepGrid { n_polar: a, n_azimuth: b, n_angle: c }),
        _ => Err(format!("expected n_polar,n_azimuth,n_angle, got '{s}'")),
    }
}

/// Constraint boxes given as `theta_max:length_max,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanList(pub Vec<DesignConstraints>);

fn parse_scan(s: &str) -> Result<ScanList, String> {
    s.split(',')
        .map(|pair| {
            let (t, l) =
                pair.split_once(':').ok_or_else(|| format!("expected theta_max:length_max, got '{pair}'"))?;
            Ok(DesignConstraints { theta_max: parse_number(t)?, length_max: parse_number(l)? })
        })
        .collect::<Result<_, String>>()
        .map(ScanList)
}

/// Turns `key = value` lines into `--key value` arguments.
fn config_args(path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut args = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => args.push(format!("--{key}={value}")),
        }
    }
    Ok(args)
}

fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

// Config values go right after the subcommand name so that later
// command-line occurrences override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let extra = config_args(&path)?;
    let at = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())).map_or(args.len(), |i| i + 1);
    let mut out = args[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum RunError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), RunError> {
    let p = Printer { digits: cli.digits };
    match &cli.command {
        Command::Gate(a) => cmd_gate(a, &p, out),
        Command::Modes(a) => cmd_modes(a, &p, out),
        Command::Fit(a) => cmd_fit(a, &p, out),
        Command::Sweep(a) => cmd_sweep(a, &p, out),
        Command::Units(a) => cmd_units(a, &p, out),
    }
}

struct Printer {
    digits: usize,
}

impl Printer {
    fn num(&self, v: f64) -> String {
        format!("{:.*}", self.digits, v)
    }

    fn vec3(&self, v: [f64; 3]) -> String {
        format!("({}, {}, {})", self.num(v[0]), self.num(v[1]), self.num(v[2]))
    }
}

fn cmd_gate(a: &DesignArgs, p: &Printer, out: &mut dyn Write) -> Result<(), RunError> {
    let d = TwistDesign::new(a.theta, a.length)?;
    let angles = derive_angles(&d);
    let t = gate_matrix(&d);
    let r = gate_axis_angle(&d);
    writeln!(out, "theta = {}", p.num(d.theta))?;
    writeln!(out, "length = {} L_B", p.num(d.length))?;
    writeln!(out, "psi = {}", p.num(angles.psi))?;
    writeln!(out, "phi = {}", p.num(angles.phi))?;
    let [m00, m01, m10, m11] = t.entries();
    let z = |c: num_complex::Complex64| format!("{}{:+.*}i", p.num(c.re), p.digits, c.im);
    writeln!(out, "T = [[{}, {}],", z(m00), z(m01))?;
    writeln!(out, "     [{}, {}]]", z(m10), z(m11))?;
    writeln!(out, "axis = {}", p.vec3(r.axis()))?;
    writeln!(out, "chi = {}", p.num(r.angle()))?;
    Ok(())
}

fn cmd_modes(a: &DesignArgs, p: &Printer, out: &mut dyn Write) -> Result<(), RunError> {
    let d = TwistDesign::new(a.theta, a.length)?;
    let m = mode_analysis(&d);
    writeln!(out, "psi = {}", p.num(m.psi))?;
    writeln!(out, "delta_beta / delta_beta0 = {}", p.num(m.delta_beta_norm))?;
    writeln!(out, "tau0 stokes = {}", p.vec3(m.stokes0))?;
    writeln!(out, "tau1 stokes = {}", p.vec3(m.stokes1))?;
    writeln!(
        out,
        "(beta - beta_mean) / delta_beta0 = {}, {}",
        p.num(m.beta_split_norm[0]),
        p.num(m.beta_split_norm[1])
    )?;
    Ok(())
}

#[derive(Serialize)]
struct FitReport<'a> {
    schema_version: u32,
    constraints: &'a DesignConstraints,
    fit: &'a FitResult,
}

fn cmd_fit(a: &FitArgs, p: &Printer, out: &mut dyn Write) -> Result<(), RunError> {
    let direction = match (a.axis, a.polar, a.azimuth) {
        (Some(axis), _, _) => axis,
        (None, Some(polar), Some(azimuth)) => spherical_to_axis(&SphericalAxis::new(polar, azimuth)?),
        _ => return Err(Error::Precondition("give --axis or --polar and --azimuth".into()).into()),
    };
    let target = RotationSpec::from_direction(direction, a.chi)?;
    let constraints = DesignConstraints::new(a.theta_max, a.length_max)?;
    let options = a.optimizer.fit_options();
    options.de.validate()?;
    let mut json = a.out.as_deref().map(create).transpose()?;

    let r = fit_gate(&target, &constraints, &options)?;
    writeln!(out, "target axis = {}", p.vec3(r.target.axis()))?;
    writeln!(out, "target chi = {}", p.num(r.target.angle()))?;
    writeln!(out, "theta = {}", p.num(r.design.theta))?;
    writeln!(out, "length = {} L_B", p.num(r.design.length))?;
    writeln!(out, "fidelity = {}", p.num(r.fidelity))?;
    writeln!(out, "infidelity = {:.3e}", 1.0 - r.fidelity)?;
    writeln!(out, "evaluations = {}", r.evaluations)?;
    writeln!(out, "seed = {}", r.seed)?;
    if let Some(w) = json.as_mut() {
        let report = FitReport { schema_version: sweep::SCHEMA_VERSION, constraints: &constraints, fit: &r };
        serde_json::to_writer_pretty(&mut *w, &report).map_err(|e| RunError::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs, p: &Printer, out: &mut dyn Write) -> Result<(), RunError> {
    let grid = if a.full_grid { SweepGrid::FULL } else { a.grid };
    grid.validate()?;
    let boxes = match &a.scan {
        Some(b) => b.0.clone(),
        None => vec![DesignConstraints { theta_max: a.theta_max, length_max: a.length_max }],
    };
    for c in &boxes {
        c.validate()?;
    }
    if a.jobs == Some(0) {
        return Err(Error::Domain("--jobs must be at least 1".into()).into());
    }
    let options = SweepOptions {
        seed: a.optimizer.seed,
        fit: a.optimizer.fit_options(),
        histogram_min: a.hist_min,
        histogram_bins: a.hist_bins,
        jobs: a.jobs,
    };
    options.fit.de.validate()?;
    sweep::Histogram::new(&[], options.histogram_min, options.histogram_bins)?;
    let mut json = a.out.as_deref().map(create).transpose()?;
    let mut csv = a.csv.as_deref().map(create).transpose()?;

    writeln!(out, "grid = {},{},{} ({} targets)", grid.n_polar, grid.n_azimuth, grid.n_angle, grid.len())?;
    if a.scan.is_some() {
        let scan = sweep::constraint_scan(&boxes, &grid, &options, !a.no_nested)?;
        for e in &scan.entries {
            writeln!(
                out,
                "theta_max = {}  length_max = {}  F_min = {}",
                p.num(e.theta_max),
                p.num(e.length_max),
                p.num(e.f_min)
            )?;
        }
        if let Some(w) = json.as_mut() {
            sweep::write_scan_json(&scan, &mut *w)?;
            w.flush()?;
        }
        if let Some(w) = csv.as_mut() {
            sweep::write_scan_csv(&scan, &mut *w)?;
            w.flush()?;
        }
    } else {
        let s = sweep::run_sweep(&grid, &boxes[0], &options)?;
        writeln!(out, "F_min = {}", p.num(s.f_min))?;
        writeln!(out, "fraction >= 0.99 = {}", p.num(s.mass_at_least(0.99)))?;
        if let Some(w) = json.as_mut() {
            sweep::write_json(&s, &mut *w)?;
            w.flush()?;
        }
        if let Some(w) = csv.as_mut() {
            sweep::write_csv(&s, &mut *w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_units(a: &UnitsArgs, p: &Printer, out: &mut dyn Write) -> Result<(), RunError> {
    let params = PhysicalParams { delta_n: a.dn, wavelength: a.wl };
    let lb = beat_length(&params)?;
    writeln!(out, "L_B = {} cm", p.num(lb * 100.0))?;
    if let (Some(theta), Some(length)) = (a.theta, a.length) {
        let pd = physical_design(&TwistDesign::new(theta, length)?, &params)?;
        writeln!(out, "length = {} mm", p.num(pd.length * 1e3))?;
        match pd.pitch {
            Some(pitch) => writeln!(out, "pitch = {} mm", p.num(pitch * 1e3))?,
            None => writeln!(out, "pitch = none (untwisted)")?,
        }
    }
    Ok(())
}

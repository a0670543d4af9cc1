//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistgate::design::{fit_gate, DesignConstraints, FitOptions};
use twistgate::su2::{
    axis_angle_to_unitary, gate_fidelity, gate_fidelity_pauli_sum, random_unitary, RotationSpec, Unitary2,
};
use twistgate::sweep::{
    constraint_scan, generate_grid, run_sweep, target_seed, write_json, SweepGrid, SweepOptions,
};
use twistgate::waveguide::{
    beat_length, derive_angles, gate_axis_angle, gate_matrix, PhysicalParams, TwistDesign,
};

const SAMPLE_SEED: u64 = 0x5eed_0001;
const SAMPLE_SIZE: usize = 10_000;

// Frozen from the first calibrated run (desk grid 9,17,5, θ_max = 20π,
// nested seeding, seed 0); the bounds sit just below the observed values.
const DESK_F_MIN_FLOOR: [f64; 3] = [0.6496, 0.9235, 0.9737];
const DESK_MASS99_FLOOR: [f64; 3] = [0.64, 0.84, 0.96];
// Full grid at θ_max = 20π, L_max = 3; the observed F_min (0.947073) equals
// a brute-force scan of the worst targets.
const FULL_F_MIN_FLOOR: f64 = 0.9470;
const FULL_MASS99_FLOOR: f64 = 0.935;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_designs() -> Vec<TwistDesign> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..SAMPLE_SIZE)
        .map(|_| TwistDesign {
            theta: rng.random_range(-20.0 * PI..=20.0 * PI),
            length: rng.random_range(0.0..=5.0),
        })
        .collect()
}

fn closed_form_vs_composition() -> Outcome {
    let designs = random_designs();
    let start = Instant::now();
    let worst = designs
        .iter()
        .map(|d| gate_fidelity(&gate_matrix(d), &axis_angle_to_unitary(&gate_axis_angle(d))))
        .fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    outcome(
        1.0 - worst <= 1e-10 && elapsed < Duration::from_secs(5),
        format!("min F = {worst:.15}, 1-F = {:.2e}, {SAMPLE_SIZE} designs in {elapsed:.2?}", 1.0 - worst),
    )
}

fn constraint_invariant() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in random_designs() {
        let a = derive_angles(&d);
        let lhs = a.phi * a.psi.sin();
        let rhs = 2.0 * d.theta.abs();
        let rel = if rhs == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / rhs };
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-10, format!("max relative error = {worst:.2e}"))
}

fn limit_regimes() -> Outcome {
    let fast =
        gate_fidelity(&gate_matrix(&TwistDesign { theta: 10.0 * PI, length: 0.01 }), &Unitary2::IDENTITY);
    let y_rot = axis_angle_to_unitary(&RotationSpec::new([0.0, 1.0, 0.0], PI).unwrap());
    let slow = gate_fidelity(&gate_matrix(&TwistDesign { theta: FRAC_PI_2, length: 100.0 }), &y_rot);
    outcome(
        1.0 - fast <= 1e-6 && 1.0 - slow <= 1e-3,
        format!("fast twist 1-F = {:.2e}, slow twist 1-F = {:.2e}", 1.0 - fast, 1.0 - slow),
    )
}

fn reachability_anchors() -> Outcome {
    let box_ = DesignConstraints::new(20.0 * PI, 3.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, axis) in [("z", [0.0, 0.0, 1.0]), ("y", [0.0, 1.0, 0.0])] {
        let target = RotationSpec::new(axis, PI).unwrap();
        let start = Instant::now();
        let r = fit_gate(&target, &box_, &FitOptions::default()).unwrap();
        let elapsed = start.elapsed();
        pass &= 1.0 - r.fidelity <= 1e-9 && elapsed < Duration::from_secs(10);
        parts.push(format!(
            "{name}: 1-F = {:.2e} at theta = {:.6}, L = {:.6} in {elapsed:.2?}",
            1.0 - r.fidelity,
            r.design.theta,
            r.design.length
        ));
    }
    outcome(pass, parts.join("; "))
}

fn analytic_worst_case() -> Outcome {
    let targets = generate_grid(&SweepGrid::DESK).unwrap();
    let has_equatorial_half_turn = targets.iter().any(|t| t.rotation.axis()[2].abs() < 1e-12 && t.chi == PI);
    let s = run_sweep(&SweepGrid::DESK, &DesignConstraints::new(0.0, 3.0).unwrap(), &SweepOptions::default())
        .unwrap();
    outcome(
        has_equatorial_half_turn && (s.f_min - 1.0 / 3.0).abs() <= 1e-6,
        format!("F_min = {:.12} (1/3 = {:.12})", s.f_min, 1.0 / 3.0),
    )
}

fn full_grid() -> Outcome {
    let count = generate_grid(&SweepGrid::FULL).unwrap().len();
    let c = DesignConstraints::new(20.0 * PI, 3.0).unwrap();
    let options = SweepOptions::default();
    let start = Instant::now();
    let s = run_sweep(&SweepGrid::FULL, &c, &options).unwrap();
    let elapsed = start.elapsed();

    let targets = generate_grid(&SweepGrid::FULL).unwrap();
    let mut mismatches = 0;
    let mut checked = 0;
    for t in targets.iter().step_by(97) {
        let fit = FitOptions { seed: target_seed(options.seed, t.index), ..options.fit.clone() };
        let r = fit_gate(&t.rotation, &c, &fit).unwrap();
        let rec = &s.records[t.index];
        checked += 1;
        if r.design.theta.to_bits() != rec.theta_opt.to_bits()
            || r.design.length.to_bits() != rec.length_opt.to_bits()
            || r.fidelity.to_bits() != rec.fidelity.to_bits()
        {
            mismatches += 1;
        }
    }
    let mass = s.mass_at_least(0.99);
    outcome(
        count == 36465
            && elapsed < Duration::from_secs(30 * 60)
            && mismatches == 0
            && s.f_min >= FULL_F_MIN_FLOOR
            && mass >= FULL_MASS99_FLOOR,
        format!(
            "{count} targets, sweep in {elapsed:.1?}, F_min = {:.6}, mass >= 0.99 = {mass:.4}, \
             {mismatches}/{checked} re-fits differ",
            s.f_min
        ),
    )
}

fn desk_scan() -> Outcome {
    let boxes: Vec<DesignConstraints> =
        [1.0, 2.0, 3.0].iter().map(|&l| DesignConstraints::new(20.0 * PI, l).unwrap()).collect();
    let scan = constraint_scan(&boxes, &SweepGrid::DESK, &SweepOptions::default(), true).unwrap();
    let f_min: Vec<f64> = scan.entries.iter().map(|e| e.f_min).collect();
    let mass: Vec<f64> = scan.summaries.iter().map(|s| s.mass_at_least(0.99)).collect();
    let monotone = f_min.windows(2).all(|w| w[0] <= w[1]) && mass.windows(2).all(|w| w[0] <= w[1]);
    let floors = (0..3).all(|i| f_min[i] >= DESK_F_MIN_FLOOR[i] && mass[i] >= DESK_MASS99_FLOOR[i]);
    outcome(monotone && floors, format!("F_min = {f_min:.6?}, mass >= 0.99 = {mass:.4?}"))
}

fn physical_units() -> Outcome {
    let a = beat_length(&PhysicalParams { delta_n: 1e-5, wavelength: 800e-9 }).unwrap();
    let b = beat_length(&PhysicalParams { delta_n: 1e-4, wavelength: 800e-9 }).unwrap();
    outcome(
        a == 800e-9 / 1e-5 && b == 800e-9 / 1e-4 && (a - 0.08).abs() < 1e-15 && (b - 0.008).abs() < 1e-15,
        format!("L_B = {a} m and {b} m"),
    )
}

fn fidelity_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 9);
    let mut worst_identity: f64 = 0.0;
    let mut worst_phase: f64 = 0.0;
    for _ in 0..1000 {
        let t = random_unitary(&mut rng);
        let u = random_unitary(&mut rng);
        let f = gate_fidelity(&t, &u);
        worst_identity = worst_identity.max((f - gate_fidelity_pauli_sum(&t, &u)).abs());
        let shifted = gate_fidelity(
            &t.with_phase(rng.random_range(0.0..7.0)),
            &u.with_phase(rng.random_range(0.0..7.0)),
        );
        worst_phase = worst_phase.max((f - shifted).abs());
    }
    outcome(
        worst_identity <= 1e-12 && worst_phase <= 1e-12,
        format!(
            "max |trace - three-Pauli| = {worst_identity:.2e}, max phase shift change = {worst_phase:.2e}"
        ),
    )
}

fn determinism() -> Outcome {
    let c = DesignConstraints::new(20.0 * PI, 2.0).unwrap();
    let grid = SweepGrid::new(5, 9, 5).unwrap();
    let report = |jobs| {
        let options = SweepOptions { seed: 42, jobs: Some(jobs), ..Default::default() };
        let mut buf = Vec::new();
        write_json(&run_sweep(&grid, &c, &options).unwrap(), &mut buf).unwrap();
        buf
    };
    let one = report(1);
    let two = report(2);
    let four = report(4);
    outcome(
        one == two && one == four,
        format!("{} bytes, jobs 1/2/4 identical = {}", one.len(), one == two && one == four),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed form matches composition", closed_form_vs_composition),
        ("retardance and mixing-angle invariant", constraint_invariant),
        ("fast and slow twist limits", limit_regimes),
        ("exact z and y half-turns", reachability_anchors),
        ("untwisted worst case is 1/3", analytic_worst_case),
        ("full 33x65x17 grid", full_grid),
        ("desk scan over length bound", desk_scan),
        ("beat length in physical units", physical_units),
        ("fidelity identity and phase invariance", fidelity_identity),
        ("sweep output independent of worker count", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

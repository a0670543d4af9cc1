use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistgate::su2::{
    axis_angle_to_unitary, gate_fidelity, gate_fidelity_pauli_sum, random_rotation, random_unitary,
    unitary_to_axis_angle, RotationSpec, Unitary2,
};
use twistgate::waveguide::{
    derive_angles, frame_rotation, gate_axis_angle, gate_matrix, helical_propagator, mode_analysis,
    TwistDesign,
};

type M = [[Complex64; 2]; 2];

fn mul(a: &M, b: &M) -> M {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

// exp(-i H) for Hermitian H by scaling, a Taylor series and squaring.
fn expm_i(h: &M) -> M {
    let norm = h.iter().flatten().map(|z| z.norm()).sum::<f64>();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let s = Complex64::new(0.0, -1.0) / 2f64.powi(squarings);
    let a = h.map(|row| row.map(|z| z * s));
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut sum = [[one, zero], [zero, one]];
    let mut term = sum;
    for k in 1..30 {
        term = mul(&term, &a).map(|row| row.map(|z| z / k as f64));
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

fn pauli_combo(x: f64, y: f64, z: f64) -> M {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [[c(z, 0.0), c(x, -y)], [c(x, y), c(-z, 0.0)]]
}

fn to_unitary(m: &M) -> Unitary2 {
    Unitary2::from_entries(m[0][0], m[0][1], m[1][0], m[1][1])
}

// Helical propagator and frame rotation built from their generators.
fn oracle_gate(d: &TwistDesign) -> Unitary2 {
    let a = derive_angles(d);
    let sin_psi = a.psi.sin() * if d.theta < 0.0 { -1.0 } else { 1.0 };
    let half = 0.5 * a.phi;
    let dhv = expm_i(&pauli_combo(0.0, sin_psi * half, a.psi.cos() * half));
    let frame = expm_i(&pauli_combo(0.0, -d.theta, 0.0));
    to_unitary(&mul(&dhv, &frame))
}

fn design() -> impl Strategy<Value = TwistDesign> {
    (-20.0 * PI..=20.0 * PI, 0.0..=5.0f64).prop_map(|(theta, length)| TwistDesign { theta, length })
}

#[test]
fn composition_matches_generator_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let d = TwistDesign {
            theta: rand::Rng::random_range(&mut rng, -20.0 * PI..=20.0 * PI),
            length: rand::Rng::random_range(&mut rng, 0.0..=5.0),
        };
        let t = gate_matrix(&d);
        let o = oracle_gate(&d);
        assert!(t.max_abs_diff(&o) < 1e-9, "{d:?}: {}", t.max_abs_diff(&o));
        let closed = axis_angle_to_unitary(&gate_axis_angle(&d));
        assert!(gate_fidelity(&closed, &o) >= 1.0 - 1e-10, "{d:?}");
    }
}

#[test]
fn y_rotation_anchor_is_exact() {
    let d = TwistDesign { theta: PI / 2.0, length: 3f64.sqrt() / 2.0 };
    let r = gate_axis_angle(&d);
    assert!((r.angle() - PI).abs() < 1e-12);
    assert!((r.axis()[1].abs() - 1.0).abs() < 1e-12);
}

#[test]
fn fidelity_forms_agree_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let t = random_unitary(&mut rng);
        let u = random_unitary(&mut rng);
        let f = gate_fidelity(&t, &u);
        assert!((f - gate_fidelity_pauli_sum(&t, &u)).abs() <= 1e-12);
        assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn slow_twist_on_whole_beat_lengths_is_the_frame_rotation() {
    for &theta in &[-PI, -2.0, -0.7, 0.3, 1.0, PI / 2.0, 2.5, PI] {
        // ratio 2|θ| / (2π L) at most 1e-3
        let length = (theta.abs() / (PI * 1e-3)).ceil().max(1.0);
        let d = TwistDesign { theta, length };
        let f = gate_fidelity(&gate_matrix(&d), &frame_rotation(&d));
        assert!(f >= 1.0 - 1e-4, "theta {theta}: 1-F = {}", 1.0 - f);
    }
}

#[test]
fn fast_twist_is_near_identity() {
    for &(theta, length) in &[(10.0 * PI, 0.01), (-10.0 * PI, 0.01), (20.0 * PI, 0.003)] {
        let d = TwistDesign { theta, length };
        let a = derive_angles(&d);
        assert!(2.0 * theta.abs() / (TAU * length) >= 1e2);
        let f = gate_fidelity(&gate_matrix(&d), &Unitary2::IDENTITY);
        assert!(f >= 1.0 - 1e-6, "{d:?} psi {}: 1-F = {}", a.psi, 1.0 - f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn canonical_round_trip(axis_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(axis_seed);
        let r = random_rotation(&mut rng);
        let u = axis_angle_to_unitary(&r);
        let back = unitary_to_axis_angle(&u);
        prop_assert!(axis_angle_to_unitary(&back).phase_insensitive_diff(&u) < 1e-10);
        prop_assert!((0.0..=PI).contains(&back.angle()));
        prop_assert!((back.angle() - r.angle()).abs() < 1e-10);
    }

    #[test]
    fn fidelity_ignores_global_phase(seed in any::<u64>(), a in 0.0..TAU, b in 0.0..TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_unitary(&mut rng);
        let u = random_unitary(&mut rng);
        let f = gate_fidelity(&t, &u);
        prop_assert!((f - gate_fidelity(&t.with_phase(a), &u.with_phase(b))).abs() < 1e-12);
        prop_assert!((gate_fidelity(&t, &t.with_phase(a)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gates_are_unitary(d in design()) {
        prop_assert!(gate_matrix(&d).unitarity_error() < 1e-13);
        prop_assert!(helical_propagator(&d).unitarity_error() < 1e-13);
    }

    #[test]
    fn retardance_invariant(d in design()) {
        let a = derive_angles(&d);
        let lhs = a.phi * a.psi.sin();
        let rhs = 2.0 * d.theta.abs();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(f64::MIN_POSITIVE));
        prop_assert!((0.0..=PI / 2.0).contains(&a.psi));
    }

    #[test]
    fn mirror_designs_share_rotation_angle(d in design()) {
        let m = TwistDesign { theta: -d.theta, length: d.length };
        prop_assert!((gate_axis_angle(&d).angle() - gate_axis_angle(&m).angle()).abs() < 1e-10);
        let z = Unitary2::PAULI_Z;
        let mirrored = z * gate_matrix(&d) * z;
        prop_assert!(mirrored.phase_insensitive_diff(&gate_matrix(&m)) < 1e-10);
    }

    #[test]
    fn propagator_has_spinor_period(d in design()) {
        // same ψ, φ larger by 4π: scale θ and L together
        let phi = derive_angles(&d).phi;
        prop_assume!(phi > 1e-3);
        let k = (phi + 2.0 * TAU) / phi;
        let longer = TwistDesign { theta: d.theta * k, length: d.length * k };
        let a = helical_propagator(&d);
        let b = helical_propagator(&longer);
        prop_assert!((derive_angles(&longer).psi - derive_angles(&d).psi).abs() < 1e-12);
        prop_assert!(a.max_abs_diff(&b) < 1e-10, "{}", a.max_abs_diff(&b));
    }

    #[test]
    fn modes_are_antipodal_unit_vectors(d in design()) {
        let m = mode_analysis(&d);
        let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        prop_assert!((norm(m.stokes0) - 1.0).abs() < 1e-12);
        for i in 0..3 {
            prop_assert!((m.stokes0[i] + m.stokes1[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn modes_are_propagator_eigenstates(d in design()) {
        // the Stokes vector of |τ₀⟩ is the rotation axis of the propagator
        let m = mode_analysis(&d);
        let r = RotationSpec::new(m.stokes0, derive_angles(&d).phi).unwrap();
        let rebuilt = axis_angle_to_unitary(&r);
        prop_assert!(rebuilt.phase_insensitive_diff(&helical_propagator(&d)) < 1e-9);
    }
}

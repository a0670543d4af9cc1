//! SU(2) algebra for single-qubit (polarization) gates.
//!
//! Gates are stored as plain 2×2 complex matrices. Rotations of the Bloch
//! sphere are written `exp(-i n·σ χ/2)`; [`RotationSpec`] holds the pair
//! `(n, χ)` in a canonical form with the global phase removed.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default absolute tolerance for numerical comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance on `‖n‖ = 1` accepted by [`RotationSpec::new`].
pub const AXIS_NORM_TOL: f64 = 1e-12;

// Below this magnitude a quaternion component is treated as zero during
// canonicalization (χ = 0 or χ = π branches).
const CANON_EPS: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix, row-major `[[a, b], [c, d]]`.
///
/// Values built through [`Unitary2::new`] are checked for unitarity; the
/// arithmetic helpers do not re-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [Complex64; 4],
}

impl Unitary2 {
    pub const IDENTITY: Unitary2 = Unitary2 { m: [ONE, ZERO, ZERO, ONE] };
    /// Pauli σ_x.
    pub const PAULI_X: Unitary2 = Unitary2 { m: [ZERO, ONE, ONE, ZERO] };
    /// Pauli σ_y.
    pub const PAULI_Y: Unitary2 = Unitary2 { m: [ZERO, Complex64::new(0.0, -1.0), I, ZERO] };
    /// Pauli σ_z.
    pub const PAULI_Z: Unitary2 = Unitary2 { m: [ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0)] };

    /// Builds a matrix from its entries, rejecting non-unitary input
    /// (`U†U = I` and `|det U| = 1` within `1e-12`).
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let u = Self::from_entries(a, b, c, d);
        if !u.is_unitary(1e-12) {
            return Err(Error::Precondition(format!("matrix is not unitary: {u}")));
        }
        Ok(u)
    }

    /// Builds a matrix without checking unitarity.
    pub const fn from_entries(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [a, b, c, d] }
    }

    /// Entries in row-major order `[a, b, c, d]`.
    pub fn entries(&self) -> [Complex64; 4] {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        let [a, b, c, d] = self.m;
        Self { m: [a.conj(), c.conj(), b.conj(), d.conj()] }
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&self, s: Complex64) -> Self {
        Self { m: self.m.map(|z| z * s) }
    }

    /// Multiplies by the global phase `e^{iγ}`.
    pub fn with_phase(&self, gamma: f64) -> Self {
        self.scale(Complex64::from_polar(1.0, gamma))
    }

    /// Largest entrywise deviation of `U†U` from the identity, combined with
    /// the deviation of `|det U|` from one.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint() * *self;
        let gram = p.m.iter().zip(Self::IDENTITY.m.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        gram.max((self.det().norm() - 1.0).abs())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Entrywise distance to `other` after removing the relative global phase.
    pub fn phase_insensitive_diff(&self, other: &Self) -> f64 {
        let overlap = (other.adjoint() * *self).trace();
        let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { ONE };
        self.scale(phase).max_abs_diff(other)
    }

    /// Unit quaternion `(w, x, y, z)` of the SU(2) representative with
    /// `U ∝ w·I − i(x σ_x + y σ_y + z σ_z)`. The sign of the quaternion is
    /// whatever the principal square root of `det U` leaves.
    pub(crate) fn su2_components(&self) -> [f64; 4] {
        let root = self.det().sqrt();
        let root = if root.norm() > 0.0 { root } else { ONE };
        let [a, b, c, d] = self.m.map(|z| z / root);
        [0.5 * (a + d).re, -0.5 * (b + c).im, 0.5 * (c - b).re, 0.5 * (d - a).im]
    }

    pub(crate) fn from_su2_components([w, x, y, z]: [f64; 4]) -> Self {
        Self {
            m: [Complex64::new(w, -z), Complex64::new(-y, -x), Complex64::new(y, -x), Complex64::new(w, z)],
        }
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = rhs.m;
        Unitary2 { m: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h] }
    }
}

impl fmt::Display for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = f.precision().unwrap_or(6);
        let z = |c: Complex64| format!("{:.p$}{:+.p$}i", c.re, c.im, p = p);
        write!(f, "[[{}, {}], [{}, {}]]", z(self.m[0]), z(self.m[1]), z(self.m[2]), z(self.m[3]))
    }
}

/// Axis-angle form `(n, χ)` of the rotation `exp(-i n·σ χ/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    axis: [f64; 3],
    angle: f64,
}

impl RotationSpec {
    /// `axis` must have unit norm within [`AXIS_NORM_TOL`]; it is stored
    /// renormalized. Any finite angle is accepted.
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = norm3(axis);
        if !(norm - 1.0).abs().le(&AXIS_NORM_TOL) || !angle.is_finite() {
            return Err(Error::Precondition(format!(
                "rotation axis must be a unit vector and angle finite (|n| = {norm}, chi = {angle})"
            )));
        }
        Ok(Self { axis: axis.map(|c| c / norm), angle })
    }

    /// Normalizes an arbitrary nonzero axis.
    pub fn from_direction(direction: [f64; 3], angle: f64) -> Result<Self> {
        let norm = norm3(direction);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Precondition("rotation axis must be nonzero".into()));
        }
        Self::new(direction.map(|c| c / norm), angle)
    }

    pub fn identity() -> Self {
        Self { axis: [0.0, 0.0, 1.0], angle: 0.0 }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Representative of the same gate (up to global phase) with
    /// `χ ∈ [0, π]` and the axis conventions used throughout the crate.
    pub fn canonical(&self) -> Self {
        let (s, c) = (0.5 * self.angle).sin_cos();
        canonical_from_components([c, self.axis[0] * s, self.axis[1] * s, self.axis[2] * s])
    }
}

/// Canonical rotation from quaternion components `(cos χ/2, n sin χ/2)`.
///
/// The global phase is fixed by making `cos χ/2 ≥ 0`. For `χ = 0` the axis is
/// `(0, 0, 1)`; for `χ = π` the sign is chosen so that the first nonzero of
/// `(n_z, n_y, n_x)` is positive.
pub(crate) fn canonical_from_components(q: [f64; 4]) -> RotationSpec {
    let [mut w, mut x, mut y, mut z] = q;
    if w < 0.0 {
        (w, x, y, z) = (-w, -x, -y, -z);
    }
    let v = norm3([x, y, z]);
    if v <= CANON_EPS {
        return RotationSpec::identity();
    }
    let mut axis = [x / v, y / v, z / v];
    if w <= CANON_EPS {
        let lead = [axis[2], axis[1], axis[0]].into_iter().find(|c| c.abs() > CANON_EPS).unwrap_or(1.0);
        if lead < 0.0 {
            axis = axis.map(|c| -c);
        }
        return RotationSpec { axis, angle: PI };
    }
    RotationSpec { axis, angle: 2.0 * v.atan2(w) }
}

/// `cos(χ/2)·I − i sin(χ/2)·(n·σ)`.
pub fn axis_angle_to_unitary(spec: &RotationSpec) -> Unitary2 {
    let (s, c) = (0.5 * spec.angle).sin_cos();
    let [nx, ny, nz] = spec.axis;
    Unitary2::from_su2_components([c, nx * s, ny * s, nz * s])
}

/// Canonical axis-angle form of `u`, ignoring its global phase.
pub fn unitary_to_axis_angle(u: &Unitary2) -> RotationSpec {
    canonical_from_components(u.su2_components())
}

/// Average gate fidelity `(2 + |Tr(U†T)|²)/6` between a realized gate `t`
/// and an ideal gate `u`, clamped to `[0, 1]`.
pub fn gate_fidelity(t: &Unitary2, u: &Unitary2) -> f64 {
    let overlap = (u.adjoint() * *t).trace();
    ((2.0 + overlap.norm_sqr()) / 6.0).clamp(0.0, 1.0)
}

/// The same fidelity as [`gate_fidelity`] evaluated through the Pauli sum
/// `1/2 + 1/12 Σ_j Tr(T σ_j T† U σ_j U†)`.
pub fn gate_fidelity_pauli_sum(t: &Unitary2, u: &Unitary2) -> f64 {
    let (td, ud) = (t.adjoint(), u.adjoint());
    let sum: f64 = [Unitary2::PAULI_X, Unitary2::PAULI_Y, Unitary2::PAULI_Z]
        .into_iter()
        .map(|s| (*t * s * td * *u * s * ud).trace().re)
        .sum();
    0.5 + sum / 12.0
}

/// Axis direction given by polar and azimuthal angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalAxis {
    polar: f64,
    azimuth: f64,
}

impl SphericalAxis {
    /// `polar ∈ [0, π]`, `azimuth ∈ [0, 2π]`. The closed upper azimuth bound
    /// lets inclusive sweep grids use `2π` directly.
    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&polar) || !(0.0..=TAU).contains(&azimuth) {
            return Err(Error::Precondition(format!(
                "spherical angles out of range (polar = {polar}, azimuth = {azimuth})"
            )));
        }
        Ok(Self { polar, azimuth })
    }

    pub fn polar(&self) -> f64 {
        self.polar
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }
}

pub fn spherical_to_axis(s: &SphericalAxis) -> [f64; 3] {
    let (sp, cp) = s.polar.sin_cos();
    let (sa, ca) = s.azimuth.sin_cos();
    [sp * ca, sp * sa, cp]
}

/// Uniform axis on the sphere and `χ` uniform in `[0, 2π)`, canonicalized.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationSpec {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let axis = [r * phi.cos(), r * phi.sin(), z];
    let angle = rng.random_range(0.0..TAU);
    RotationSpec::new(axis, angle).expect("sampled axis has unit norm").canonical()
}

/// Random gate with a random global phase attached.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Unitary2 {
    let gamma = rng.random_range(0.0..TAU);
    axis_angle_to_unitary(&random_rotation(rng)).with_phase(gamma)
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

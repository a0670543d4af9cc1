//! Twisted-waveguide model.
//!
//! Lengths are measured in linear beat lengths `L_B = 2π/δβ₀`, so the
//! linear birefringence is `δβ₀ = 2π` in these units. A design is the pair
//! `(θ, L)`: total twist angle and length. With twist rate `α = θ/L`,
//!
//! ```text
//! ψ = atan2(2|θ|, 2πL)            mixing angle of the eigenmodes
//! φ = sqrt((2πL)² + (2θ)²)        retardance δβ·L
//! ```
//!
//! so `φ sin ψ = 2|θ|` always holds.
//!
//! # Sign convention
//!
//! The lab-frame gate is
//!
//! ```text
//! T = D_HV(ψ, φ) · exp(+i σ_y θ),   D_HV = exp(-i (σ_z cos ψ + σ_y sin ψ) φ/2)
//! ```
//!
//! and its closed form is
//!
//! ```text
//! cos χ/2       = cos θ cos φ/2 + sin θ sin φ/2 sin ψ
//! n_x sin χ/2   = cos ψ sin θ sin φ/2
//! n_y sin χ/2   = cos θ sin φ/2 sin ψ − sin θ cos φ/2
//! n_z sin χ/2   = cos θ cos ψ sin φ/2
//! ```
//!
//! This is the only ordering/sign combination that stays unitary and sends
//! a rapidly twisted (or zero-length) waveguide to the identity. For `θ < 0`
//! the waveguide is the mirror image of the `|θ|` design: the gate is
//! `σ_z T(|θ|) σ_z`, equivalently the formulas above with `θ` and `ψ` both
//! signed. [`gate_matrix`] and [`gate_axis_angle`] must agree on this, which
//! the tests check.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::su2::{canonical_from_components, RotationSpec, Unitary2};
use crate::{Error, Result};

/// Twist angle `theta` (radians, any sign) and length in beat lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistDesign {
    pub theta: f64,
    pub length: f64,
}

impl TwistDesign {
    pub fn new(theta: f64, length: f64) -> Result<Self> {
        if !theta.is_finite() || !length.is_finite() || length < 0.0 {
            return Err(Error::Domain(format!(
                "design needs finite theta and length >= 0 (theta = {theta}, length = {length})"
            )));
        }
        Ok(Self { theta, length })
    }

    /// Twist rate `α = θ/L` in radians per beat length; `None` for `L = 0`.
    pub fn twist_rate(&self) -> Option<f64> {
        (self.length > 0.0).then(|| self.theta / self.length)
    }
}

/// Mixing angle `psi ∈ [0, π/2]` and retardance `phi ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedAngles {
    pub psi: f64,
    pub phi: f64,
}

pub fn derive_angles(d: &TwistDesign) -> DerivedAngles {
    let linear = TAU * d.length;
    let circular = 2.0 * d.theta.abs();
    let psi = if d.length == 0.0 { FRAC_PI_2 } else { circular.atan2(linear) };
    DerivedAngles { psi, phi: linear.hypot(circular) }
}

// (cos ψ, ±sin ψ) with the sign of θ, and φ/2.
struct Trig {
    cos_psi: f64,
    sin_psi: f64,
    half_phi: f64,
}

fn trig(d: &TwistDesign) -> Trig {
    let DerivedAngles { psi, phi } = derive_angles(d);
    let (sin_psi, cos_psi) = psi.sin_cos();
    let sin_psi = if d.theta < 0.0 { -sin_psi } else { sin_psi };
    Trig { cos_psi, sin_psi, half_phi: 0.5 * phi }
}

/// Propagation in the helical frame, expressed in the H/V basis.
pub fn helical_propagator(d: &TwistDesign) -> Unitary2 {
    let t = trig(d);
    let (s, c) = t.half_phi.sin_cos();
    Unitary2::from_su2_components([c, 0.0, t.sin_psi * s, t.cos_psi * s])
}

/// Helical-to-lab frame conversion at the output facet, `exp(+i σ_y θ)`.
pub fn frame_rotation(d: &TwistDesign) -> Unitary2 {
    let (s, c) = d.theta.sin_cos();
    Unitary2::from_su2_components([c, 0.0, -s, 0.0])
}

/// Lab-frame gate by matrix composition of the two rotations.
pub fn gate_matrix(d: &TwistDesign) -> Unitary2 {
    helical_propagator(d) * frame_rotation(d)
}

/// Unnormalized quaternion `(cos χ/2, n sin χ/2)` from the closed form.
pub(crate) fn closed_form_components(d: &TwistDesign) -> [f64; 4] {
    let t = trig(d);
    let (s, c) = t.half_phi.sin_cos();
    let (st, ct) = d.theta.sin_cos();
    [ct * c + st * s * t.sin_psi, t.cos_psi * st * s, ct * s * t.sin_psi - st * c, ct * t.cos_psi * s]
}

/// Canonical axis-angle form of the gate from the closed-form expressions.
pub fn gate_axis_angle(d: &TwistDesign) -> RotationSpec {
    canonical_from_components(closed_form_components(d))
}

/// Eigenmode geometry of the twisted waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeAnalysis {
    pub psi: f64,
    /// δβ/δβ₀; infinite for a zero-length twisted design.
    pub delta_beta_norm: f64,
    /// Poincaré-sphere position of the faster mode |τ₀⟩.
    pub stokes0: [f64; 3],
    /// Poincaré-sphere position of |τ₁⟩, antipodal to `stokes0`.
    pub stokes1: [f64; 3],
    /// `(β₀ − β̄)/δβ₀` and `(β₁ − β̄)/δβ₀`.
    pub beta_split_norm: [f64; 2],
}

/// The modes are the H/V poles rotated about the x axis (through the ±45°
/// points) by `ψ`, toward the circular pole that matches the twist handedness.
pub fn mode_analysis(d: &TwistDesign) -> ModeAnalysis {
    let angles = derive_angles(d);
    let t = trig(d);
    let delta_beta_norm = if d.length > 0.0 {
        angles.phi / (TAU * d.length)
    } else if d.theta == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let stokes0 = [0.0, t.sin_psi, t.cos_psi];
    ModeAnalysis {
        psi: angles.psi,
        delta_beta_norm,
        stokes0,
        stokes1: stokes0.map(|c| -c),
        beta_split_norm: [0.5 * delta_beta_norm, -0.5 * delta_beta_norm],
    }
}

/// Modal birefringence and vacuum wavelength (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub delta_n: f64,
    pub wavelength: f64,
}

impl PhysicalParams {
    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.delta_n) || !ok(self.wavelength) {
            return Err(Error::Domain(format!(
                "birefringence and wavelength must be positive (delta_n = {}, wavelength = {})",
                self.delta_n, self.wavelength
            )));
        }
        Ok(())
    }
}

/// Linear beat length `λ/δn` in meters.
pub fn beat_length(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    Ok(p.wavelength / p.delta_n)
}

/// A design converted to fabrication units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalDesign {
    pub beat_length: f64,
    pub length: f64,
    /// Helix pitch `2π·length/|θ|`; `None` for an untwisted guide.
    pub pitch: Option<f64>,
}

pub fn physical_design(d: &TwistDesign, p: &PhysicalParams) -> Result<PhysicalDesign> {
    let lb = beat_length(p)?;
    if d.length.is_nan() || d.length <= 0.0 {
        return Err(Error::Precondition("physical design needs length > 0".into()));
    }
    let length = d.length * lb;
    let pitch = (d.theta != 0.0).then(|| TAU * length / d.theta.abs());
    Ok(PhysicalDesign { beat_length: lb, length, pitch })
}

/// Length (beat lengths) of the design with twist `theta` whose retardance
/// is `phi`, if one exists (`phi ≥ 2|θ|`).
pub fn length_for_retardance(theta: f64, phi: f64) -> Option<f64> {
    let circular = 2.0 * theta.abs();
    (phi >= circular).then(|| (phi * phi - circular * circular).sqrt() / TAU)
}

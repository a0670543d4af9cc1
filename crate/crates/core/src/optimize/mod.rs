//! Derivative-free box-constrained minimizers used by the inverse design.
//!
//! Both work on a list of `(lo, hi)` bounds; a dimension with `lo == hi` is
//! pinned. Every candidate point is clamped into the box before evaluation.

mod differential_evolution;
mod nelder_mead;

pub use differential_evolution::{differential_evolution, DeOptions, DeResult};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};

use crate::{Error, Result};

pub type Bounds = [(f64, f64)];

pub(crate) fn validate_bounds(bounds: &Bounds) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::Domain("empty bounds".into()));
    }
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Domain(format!("invalid bounds for dimension {i}: [{lo}, {hi}]")));
        }
    }
    Ok(())
}

pub(crate) fn clamp_into(x: &mut [f64], bounds: &Bounds) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

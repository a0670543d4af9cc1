//! Twisted optical waveguides as single-qubit polarization gates.
//!
//! A waveguide with a rectangular cross-section, twisted by a total angle
//! `theta` over a length `L` (in linear beat lengths), acts on polarization
//! as an SU(2) rotation of the Poincaré sphere. This crate provides
//!
//! - [`su2`]: exact 2×2 unitary algebra, axis-angle conversion and gate fidelity,
//! - [`waveguide`]: the design → gate map, eigenmode geometry and unit conversion,
//! - [`design`]: inverse design of a waveguide approximating a target rotation,
//! - [`sweep`]: gate-set sweeps with worst-fidelity aggregation and report export,
//! - [`cli`]: the `twistgate` command line.

pub mod cli;
pub mod design;
mod error;
pub mod optimize;
pub mod su2;
pub mod sweep;
pub mod waveguide;

pub use error::{Error, Result};

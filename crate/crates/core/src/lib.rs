//! Numerical laboratory for the Aharonov–Bohm effect with a time-varying
//! solenoid flux.
//!
//! Two electron beams circle a long solenoid in opposite directions until
//! their swept angles add up to 2π. Along the way the crate integrates the
//! beams' equations of motion, accumulates the Aharonov–Bohm and kinetic
//! WKB phases by quadrature, and compares them with closed-form results.
//! Units are natural (ħ = 1); the speed of light is a solenoid parameter.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN-rejecting parameter checks

pub mod bessel;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod flux;
pub mod output;
pub mod phase;
pub mod quadrature;
pub mod scenario;

pub use error::{Error, Result};

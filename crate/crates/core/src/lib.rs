//! Millimeter-wave interaction with layered human tissue.
//!
//! The crate is organised the way a dosimetry calculation flows:
//!
//! * [`dielectrics`] holds the bundled skin and tissue data and the
//!   conductivity / loss-factor conversions.
//! * [`planewave`] evaluates half-space Fresnel optics at the air/skin
//!   interface.
//! * [`multilayer`] solves the normal-incidence field in a stratified stack
//!   and turns it into a volumetric heat source.
//! * [`bioheat`] solves the steady (and, as a check, transient) Pennes
//!   equation for the temperature elevation driven by that source.
//! * [`compliance`] encodes power-density exposure limits and far-field
//!   estimates.

#[macro_use]
mod macros;

pub mod bioheat;
pub mod compliance;
pub mod constants;
pub mod dielectrics;
mod error;
pub mod multilayer;
pub mod planewave;

pub use error::{Error, Result};
pub use num_complex::Complex64;

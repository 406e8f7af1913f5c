//! Allocation-light numerics for the magnetic Dirac quasimode construction.
//!
//! This crate carries everything that is closed-form or pointwise: the 4×4
//! Dirac algebra, the smooth cutoffs, the homogeneous potential and its exact
//! Taylor remainder, the standing-wave evaluators built from a 2D eigenmode,
//! the exponent calculator, log-log fitting and Gauss–Legendre quadrature.
//! Grids, FFTs, eigensolvers and file formats live in `magdirac-lab`.
#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod cutoff;
pub mod dirac;
pub mod exponents;
pub mod fit;
pub mod interp;
pub mod params;
pub mod potential;
pub mod quad;
pub mod quasimode;

mod error;

pub use error::Error;
pub use num_complex::Complex64;

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

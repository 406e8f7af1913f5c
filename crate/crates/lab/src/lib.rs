//! Grids, spectral solvers, norms and propagators for the magnetic Dirac
//! quasimode construction, plus the experiment drivers behind the `magdirac`
//! binary.

pub mod cli;
pub mod config;
pub mod cylinder;
pub mod error;
pub mod evolve;
pub mod fft;
pub mod grid;
pub mod io;
pub mod landau;
pub mod norms;
pub mod oracle;
pub mod residual;
pub mod scaling;
pub mod spectral;
pub mod square;
pub mod sweep;

pub use error::{LabError, Result};

use thiserror::Error;

/// Failures of the grid, solver, norm and campaign layers.
#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] magdirac_core::Error),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("field does not decay at the box boundary: edge/peak = {ratio:.3e} (limit {limit:.1e})")]
    Padding { ratio: f64, limit: f64 },
    #[error("mode {index} (λ = {lambda:.6}) does not decay at the boundary: ring/peak = {ratio:.3e}")]
    BoundaryDecay { index: usize, lambda: f64, ratio: f64 },
    #[error("mode {index} (λ = {lambda:.6}) fails the Gaussian decay fit: slope {slope:.4}, R² {r2:.5}")]
    DecayFit { index: usize, lambda: f64, slope: f64, r2: f64 },
    #[error("no convergence after {iterations} iterations: {detail}")]
    NonConvergence { iterations: usize, detail: String },
    #[error("quadrature did not converge: last estimates {previous:.8e} and {last:.8e}")]
    Quadrature { previous: f64, last: f64 },
    #[error("support reached the box boundary at step {step}: edge/peak = {ratio:.3e}")]
    Truncation { step: usize, ratio: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

//! Randomized exact-arithmetic sweep of the exponent formulas.

use magdirac_core::exponents::{exponents, AdmissiblePair, Exact, ExponentInputs};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;

/// Offset above the `β` threshold for the window check.
pub fn window_offset() -> Exact {
    Exact::new(1, 1_000_000)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub samples: usize,
    pub seed: u64,
    /// Tuples with `κ ≠ μ`.
    pub kappa_mismatches: usize,
    /// Tuples at `β = δ − γ + 10⁻⁶` where `μ > 0` disagrees with `γ ∈ (δ/2, 1)`.
    pub window_mismatches: usize,
    /// How many window samples fell inside the window.
    pub inside_window: usize,
    pub first_failure: Option<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.kappa_mismatches == 0 && self.window_mismatches == 0
    }
}

/// Draws `samples` rational tuples `δ ∈ (1, 2)`, `γ ∈ (1/2, 1)`, `β ∈ (0, 2)`
/// and admissible `1/p ∈ [0, 1/2)`, all on a `1/1000` lattice, and checks
/// `κ = μ` exactly, then the sign of `μ` against the `γ`-window at `β` just
/// above threshold.
pub fn exponent_sweep(samples: usize, seed: u64) -> Result<SweepReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out =
        SweepReport { samples, seed, kappa_mismatches: 0, window_mismatches: 0, inside_window: 0, first_failure: None };
    let lattice = |rng: &mut StdRng, lo: i128, hi: i128| Exact::new(rng.random_range(lo..hi), 1000);
    for _ in 0..samples {
        let delta = lattice(&mut rng, 1001, 2000);
        let gamma = lattice(&mut rng, 501, 1000);
        let beta = lattice(&mut rng, 1, 2000);
        let inv_p = lattice(&mut rng, 0, 500);
        let pair = AdmissiblePair::from_inverse(inv_p, Exact::new(1, 2) - inv_p)?;
        let e = exponents(&ExponentInputs { delta, gamma, beta }, &pair);
        if e.kappa != e.mu {
            out.kappa_mismatches += 1;
            out.first_failure.get_or_insert(format!(
                "kappa {} != mu {} at delta={delta} gamma={gamma} beta={beta} 1/p={inv_p}",
                e.kappa, e.mu
            ));
        }
        let at = ExponentInputs { delta, gamma, beta: delta - gamma + window_offset() };
        let e = exponents(&at, &pair);
        let inside = gamma > delta / Exact::new(2, 1) && gamma < Exact::new(1, 1);
        out.inside_window += inside as usize;
        if e.mu_positive() != inside {
            out.window_mismatches += 1;
            out.first_failure.get_or_insert(format!(
                "mu = {} at delta={delta} gamma={gamma} 1/p={inv_p}, window says {inside}",
                e.mu
            ));
        }
    }
    Ok(out)
}

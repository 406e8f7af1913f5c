//! Construction parameters `(δ, γ, β, R)` and their range checks.

use crate::{Error, Result};

/// Parameters of the counterexample construction. The eigenmode is supplied
/// separately to the evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructionParams {
    /// Homogeneity `δ ∈ (1, 2)` of the potential.
    pub delta: f64,
    /// Cutoff width exponent `γ ∈ (1/2, 1)`.
    pub gamma: f64,
    /// Time horizon exponent: `T = R^β`.
    pub beta: f64,
    /// Localisation radius `R > 2`.
    pub r: f64,
}

impl ConstructionParams {
    /// Validated constructor. `β` is only required to be positive here; the
    /// blow-up threshold is checked by [`ConstructionParams::beta_above_threshold`].
    pub fn new(delta: f64, gamma: f64, beta: f64, r: f64) -> Result<Self> {
        let p = Self { delta, gamma, beta, r };
        p.validate()?;
        Ok(p)
    }

    /// Re-checks every range invariant.
    pub fn validate(&self) -> Result<()> {
        check("delta", self.delta, self.delta > 1.0 && self.delta < 2.0, "1 < delta < 2")?;
        check("gamma", self.gamma, self.gamma > 0.5 && self.gamma < 1.0, "1/2 < gamma < 1")?;
        check("beta", self.beta, self.beta > 0.0 && self.beta.is_finite(), "beta > 0")?;
        check("R", self.r, self.r > 2.0 && self.r.is_finite(), "R > 2")?;
        Ok(())
    }

    /// Same parameters at another radius.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(self.delta, self.gamma, self.beta, r)
    }

    /// `β − (δ − γ)`; the blow-up runs need it positive.
    pub fn beta_margin(&self) -> f64 {
        self.beta - (self.delta - self.gamma)
    }

    /// Whether `β > δ − γ`.
    pub fn beta_above_threshold(&self) -> bool {
        self.beta_margin() > 0.0
    }

    /// `R^γ`, the half-width of the `z` window.
    pub fn r_gamma(&self) -> f64 {
        libm::pow(self.r, self.gamma)
    }

    /// Time horizon `T = R^β`.
    pub fn horizon(&self) -> f64 {
        libm::pow(self.r, self.beta)
    }
}

fn check(name: &'static str, value: f64, ok: bool, constraint: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter { name, value, constraint })
    }
}

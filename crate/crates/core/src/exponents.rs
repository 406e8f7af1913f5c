//! Closed-form `R`-exponents of the truncated standing wave and its sources.
//!
//! Everything here is generic over [`Scalar`], implemented for `f64` and for
//! exact rationals ([`Exact`]), so identities between the two routes to
//! `κ`/`μ` can be checked without rounding.

use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;

use crate::{Error, Result};

/// Exact rational scalar.
pub type Exact = Ratio<i128>;

/// Arithmetic needed by the exponent formulas.
pub trait Scalar:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `n / d`.
    fn ratio(n: i64, d: i64) -> Self;
    /// Conversion for reporting.
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for Exact {
    fn ratio(n: i64, d: i64) -> Self {
        Ratio::new(n as i128, d as i128)
    }
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

fn min<T: Scalar>(a: T, b: T) -> T {
    match a.partial_cmp(&b) {
        Some(Ordering::Greater) => b,
        _ => a,
    }
}

fn max<T: Scalar>(a: T, b: T) -> T {
    match a.partial_cmp(&b) {
        Some(Ordering::Less) => b,
        _ => a,
    }
}

/// A wave-admissible pair, stored through reciprocals so that `p = ∞` is `inv_p = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissiblePair<T> {
    /// `1/p`.
    pub inv_p: T,
    /// `1/q`.
    pub inv_q: T,
}

impl<T: Scalar> AdmissiblePair<T> {
    /// `σ = 1/p − 1/q + 1/2`.
    pub fn sigma(&self) -> T {
        self.inv_p - self.inv_q + T::ratio(1, 2)
    }

    /// `1/p'` of the dual exponent.
    pub fn inv_p_dual(&self) -> T {
        T::ratio(1, 1) - self.inv_p
    }

    /// `1/q'` of the dual exponent.
    pub fn inv_q_dual(&self) -> T {
        T::ratio(1, 1) - self.inv_q
    }

    /// `(p, q) = (∞, 2)`, the pair excluded from the counterexample.
    pub fn is_excluded(&self) -> bool {
        self.inv_p == T::ratio(0, 1) && self.inv_q == T::ratio(1, 2)
    }

    /// Builds from reciprocals, checking `2/p + 2/q = 1`, `2 < p ≤ ∞`, `2 ≤ q < ∞`.
    pub fn from_inverse(inv_p: T, inv_q: T) -> Result<Self> {
        let zero = T::ratio(0, 1);
        let half = T::ratio(1, 2);
        let (p, q) = (recip(inv_p), recip(inv_q));
        if !(inv_p >= zero && inv_p < half) {
            return Err(Error::Inadmissible { p, q, reason: "need 2 < p <= inf" });
        }
        if !(inv_q > zero && inv_q <= half) {
            return Err(Error::Inadmissible { p, q, reason: "need 2 <= q < inf" });
        }
        let two = T::ratio(2, 1);
        if two * inv_p + two * inv_q != T::ratio(1, 1) {
            return Err(Error::Inadmissible { p, q, reason: "need 2/p + 2/q = 1" });
        }
        Ok(Self { inv_p, inv_q })
    }
}

fn recip<T: Scalar>(x: T) -> f64 {
    let v = x.to_f64();
    if v == 0.0 {
        f64::INFINITY
    } else {
        1.0 / v
    }
}

impl AdmissiblePair<f64> {
    /// `p` (possibly infinite).
    pub fn p(&self) -> f64 {
        recip(self.inv_p)
    }

    /// `q`.
    pub fn q(&self) -> f64 {
        recip(self.inv_q)
    }

    /// Dual `p'`.
    pub fn p_dual(&self) -> f64 {
        recip(self.inv_p_dual())
    }

    /// Dual `q'`.
    pub fn q_dual(&self) -> f64 {
        recip(self.inv_q_dual())
    }
}

/// Validates a floating-point pair; `p = f64::INFINITY` is allowed.
pub fn admissible(p: f64, q: f64) -> Result<AdmissiblePair<f64>> {
    if p.is_nan() || q.is_nan() || !(p > 2.0) {
        return Err(Error::Inadmissible { p, q, reason: "need 2 < p <= inf" });
    }
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::Inadmissible { p, q, reason: "need 2 <= q < inf" });
    }
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let inv_q = 1.0 / q;
    if (2.0 * inv_p + 2.0 * inv_q - 1.0).abs() > 1e-12 {
        return Err(Error::Inadmissible { p, q, reason: "need 2/p + 2/q = 1" });
    }
    Ok(AdmissiblePair { inv_p, inv_q })
}

/// Exponent inputs `(δ, γ, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentInputs<T> {
    /// `δ`.
    pub delta: T,
    /// `γ`.
    pub gamma: T,
    /// `β`.
    pub beta: T,
}

/// Every closed-form exponent of the construction, with `T = R^β` wired in
/// where a time horizon appears.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentReport<T> {
    /// `σ = 1/p − 1/q + 1/2`.
    pub sigma: T,
    /// `‖f_R‖_{Ḣ^σ} ≲ R^{(δ+γ)/2 − σγ}`.
    pub f_r_exp: T,
    /// `‖f_R‖_{L²} ≲ R^{(δ+γ)/2}`.
    pub f_r_l2_exp: T,
    /// `‖f_R‖_{Ḣ¹} ≲ R^{(δ+γ)/2 − γ}`.
    pub f_r_h1_exp: T,
    /// Spatial part of `‖W_R‖_{L^p_T L^q} ≳ T^{1/p} R^{(δ+γ)/q}`.
    pub w_r_exp: T,
    /// `‖W_R‖_{L^p((0,R^β); L^q)}` with the horizon folded in.
    pub w_r_mixed_exp: T,
    /// Spatial part `(δ+γ)/q − 2σγ` of the `F_R` bound.
    pub f_source_exp: T,
    /// Exponent of `max{R^{−γ}, T R^{−(1+δ/2)}, R^{−(2−δ/2)}}` at `T = R^β`.
    pub f_source_penalty: T,
    /// Same with the `R^{−1}` branch of the `ψ_Rψχ F` estimate in place of `R^{−γ}`.
    pub f_source_penalty_alt: T,
    /// `‖F_R‖_{L^{p'}((0,R^β); Ḣ^{2σ}_{q'})}` exponent, lemma-statement penalty.
    pub f_source_dual_exp: T,
    /// Same with the alternative penalty.
    pub f_source_dual_exp_alt: T,
    /// `(β − (δ − γ))/p`: growth of `‖W_R‖ / ‖f_R‖_{Ḣ^σ}`.
    pub ratio25_exp: T,
    /// `κ`, obtained by composing the `W_R` and dual `F_R` exponents.
    pub kappa: T,
    /// `μ(δ, γ, β, p)` in closed form.
    pub mu: T,
    /// `δ − γ`.
    pub beta_threshold: T,
    /// `(δ/2, 1)`, the `γ`-window on which `μ(δ, γ, δ − γ, p) > 0`.
    pub gamma_window: (T, T),
}

impl<T: Scalar> ExponentReport<T> {
    /// Whether `μ > 0`, i.e. the blow-up certificate is present.
    pub fn mu_positive(&self) -> bool {
        self.mu > T::ratio(0, 1)
    }
}

/// `κ` as the difference of the `W_R` exponent and the dual `F_R` exponent.
pub fn kappa<T: Scalar>(inp: &ExponentInputs<T>, pair: &AdmissiblePair<T>) -> T {
    let (d, g, b) = (inp.delta, inp.gamma, inp.beta);
    let w = b * pair.inv_p + (d + g) * pair.inv_q;
    let f = b * pair.inv_p_dual() + (d + g) * pair.inv_q_dual() - T::ratio(2, 1) * pair.sigma() * g + penalty(inp);
    w - f
}

/// `μ = 2(β − (δ − γ))/p + min{γ − β, 1 + δ/2 − 2β, 2 − δ/2 − β}`.
pub fn mu<T: Scalar>(inp: &ExponentInputs<T>, pair: &AdmissiblePair<T>) -> T {
    let (d, g, b) = (inp.delta, inp.gamma, inp.beta);
    let one = T::ratio(1, 1);
    let two = T::ratio(2, 1);
    let half_d = d * T::ratio(1, 2);
    two * (b - (d - g)) * pair.inv_p + min(min(g - b, one + half_d - two * b), two - half_d - b)
}

fn penalty<T: Scalar>(inp: &ExponentInputs<T>) -> T {
    let (d, g, b) = (inp.delta, inp.gamma, inp.beta);
    let half_d = d * T::ratio(1, 2);
    max(max(-g, b - (T::ratio(1, 1) + half_d)), -(T::ratio(2, 1) - half_d))
}

fn penalty_alt<T: Scalar>(inp: &ExponentInputs<T>) -> T {
    let (d, b) = (inp.delta, inp.beta);
    let half_d = d * T::ratio(1, 2);
    max(max(-T::ratio(1, 1), b - (T::ratio(1, 1) + half_d)), -(T::ratio(2, 1) - half_d))
}

/// All exponents for the given inputs and pair.
pub fn exponents<T: Scalar>(inp: &ExponentInputs<T>, pair: &AdmissiblePair<T>) -> ExponentReport<T> {
    let (d, g, b) = (inp.delta, inp.gamma, inp.beta);
    let half = T::ratio(1, 2);
    let two = T::ratio(2, 1);
    let sigma = pair.sigma();
    let f_source_exp = (d + g) * pair.inv_q - two * sigma * g;
    let dual_base = b * pair.inv_p_dual() + (d + g) * pair.inv_q_dual() - two * sigma * g;
    ExponentReport {
        sigma,
        f_r_exp: (d + g) * half - sigma * g,
        f_r_l2_exp: (d + g) * half,
        f_r_h1_exp: (d + g) * half - g,
        w_r_exp: (d + g) * pair.inv_q,
        w_r_mixed_exp: b * pair.inv_p + (d + g) * pair.inv_q,
        f_source_exp,
        f_source_penalty: penalty(inp),
        f_source_penalty_alt: penalty_alt(inp),
        f_source_dual_exp: dual_base + penalty(inp),
        f_source_dual_exp_alt: dual_base + penalty_alt(inp),
        ratio25_exp: (b - (d - g)) * pair.inv_p,
        kappa: kappa(inp, pair),
        mu: mu(inp, pair),
        beta_threshold: d - g,
        gamma_window: (d * half, T::ratio(1, 1)),
    }
}

/// Floating-point convenience wrapper.
pub fn exponents_f64(delta: f64, gamma: f64, beta: f64, pair: &AdmissiblePair<f64>) -> ExponentReport<f64> {
    exponents(&ExponentInputs { delta, gamma, beta }, pair)
}

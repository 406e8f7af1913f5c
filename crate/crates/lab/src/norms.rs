//! Lebesgue, homogeneous Sobolev, mixed space-time and weighted-profile norms.

use magdirac_core::cutoff::Cutoffs;
use magdirac_core::params::ConstructionParams;
use magdirac_core::quad::{composite_gauss_legendre, gauss_legendre_on, pairwise_sum};

use crate::error::{LabError, Result};
use crate::grid::SpinorField3D;
use crate::landau::EigenMode2D;
use crate::spectral::Spectral3;

/// Largest edge/peak ratio tolerated before a Fourier multiplier is applied.
pub const PADDING_TOL: f64 = 1e-6;

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0) {
        return Err(LabError::Parameter(format!("Lebesgue exponent must be >= 1, got {q}")));
    }
    Ok(())
}

/// `(Σ |f|^q ΔV)^{1/q}` of pointwise moduli sampled with cell volume `dv`;
/// `q = ∞` gives the max.
pub fn lq_of_moduli(m: &[f64], dv: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if q.is_infinite() {
        return Ok(m.iter().cloned().fold(0.0, f64::max));
    }
    let peak = m.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    // Scaling by the peak keeps large q away from underflow.
    let terms: Vec<f64> = m.iter().map(|x| (x / peak).powf(q)).collect();
    Ok(peak * (pairwise_sum(&terms) * dv).powf(1.0 / q))
}

/// `‖f‖_{L^q}` with `|f(x)|` the spinor 2-norm.
pub fn lq_norm(field: &SpinorField3D, q: f64) -> Result<f64> {
    lq_of_moduli(&field.modulus(), field.grid.cell_volume(), q)
}

fn check_padding(field: &SpinorField3D) -> Result<()> {
    let ratio = field.edge_ratio();
    if ratio > PADDING_TOL {
        return Err(LabError::Padding { ratio, limit: PADDING_TOL });
    }
    Ok(())
}

/// `|ξ|^s f`, zero multiplier at `ξ = 0` for `s > 0`.
pub fn apply_abs_d(sp: &Spectral3, field: &SpinorField3D, s: f64) -> SpinorField3D {
    let mut out = field.clone();
    for c in 0..4 {
        out.data[c] = sp.multiply(&field.data[c], |xi| {
            let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if k2 == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                k2.powf(0.5 * s)
            }
        });
    }
    out
}

/// `‖|D|^s f‖_{L^q}` through the discrete Fourier transform of the box.
pub fn fractional_sobolev(field: &SpinorField3D, s: f64, q: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(LabError::Parameter(format!("smoothness must be >= 0, got {s}")));
    }
    check_q(q)?;
    check_padding(field)?;
    let sp = Spectral3::new(field.grid);
    lq_norm(&apply_abs_d(&sp, field, s), q)
}

/// `‖|D|^s f‖_{L²}` by the discrete Plancherel identity
/// `Σ|f|²ΔV = (ΔV/n) Σ|f̂|²`.
pub fn sobolev_plancherel(field: &SpinorField3D, s: f64) -> Result<f64> {
    check_padding(field)?;
    let sp = Spectral3::new(field.grid);
    let mut terms = Vec::with_capacity(4 * field.grid.len());
    for c in 0..4 {
        let hat = sp.forward(&field.data[c]);
        for (idx, v) in hat.iter().enumerate() {
            let xi = sp.xi(idx);
            let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            let w = if s == 0.0 {
                1.0
            } else if k2 == 0.0 {
                0.0
            } else {
                k2.powf(s)
            };
            terms.push(w * v.norm_sqr());
        }
    }
    Ok((pairwise_sum(&terms) * field.grid.cell_volume() / field.grid.len() as f64).sqrt())
}

/// Exponents and horizon of an `L^p((0, T); Ḣ^s_q)` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNormSpec {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub horizon: f64,
}

impl MixedNormSpec {
    pub fn new(p: f64, q: f64, s: f64, horizon: f64) -> Result<Self> {
        if !(p > 1.0) || !(q > 1.0 && q.is_finite()) || !(s >= 0.0) || !(horizon > 0.0 && horizon.is_finite()) {
            return Err(LabError::Parameter(format!("bad mixed norm spec p={p} q={q} s={s} T={horizon}")));
        }
        Ok(Self { p, q, s, horizon })
    }
}

/// A converged mixed norm with its node-doubling history.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedNorm {
    pub value: f64,
    pub nodes: usize,
    /// Estimates for 2, 4, 8, … Gauss–Legendre nodes.
    pub history: Vec<f64>,
}

/// Relative change that stops node doubling.
pub const MIXED_RTOL: f64 = 1e-4;
/// Node cap for the time quadrature.
pub const MIXED_MAX_NODES: usize = 256;

/// `‖ ‖g(t)‖ ‖_{L^p(0,T)}` for a per-slice spatial norm `slice(t)`, by
/// Gauss–Legendre quadrature with node doubling from `start` nodes.
pub fn mixed_time_norm_from<F>(slice: F, p: f64, horizon: f64, start: usize) -> Result<MixedNorm>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut history = Vec::new();
    let mut n = start.max(1);
    loop {
        let (t, w) = gauss_legendre_on(n, 0.0, horizon);
        let vals = t.iter().map(|&ti| slice(ti)).collect::<Result<Vec<f64>>>()?;
        let est = if p.is_infinite() {
            vals.iter().cloned().fold(0.0, f64::max)
        } else {
            let terms: Vec<f64> = vals.iter().zip(&w).map(|(v, wi)| wi * v.powf(p)).collect();
            pairwise_sum(&terms).powf(1.0 / p)
        };
        history.push(est);
        if history.len() >= 2 {
            let prev = history[history.len() - 2];
            if (est - prev).abs() <= MIXED_RTOL * est.abs().max(f64::MIN_POSITIVE) {
                return Ok(MixedNorm { value: est, nodes: n, history });
            }
        }
        if 2 * n > MIXED_MAX_NODES {
            return Err(LabError::Quadrature { previous: history[history.len().saturating_sub(2)], last: est });
        }
        n *= 2;
    }
}

/// `‖u‖_{L^p((0,T); Ḣ^s_q)}` for a field-valued evaluator.
pub fn mixed_time_norm<F>(evaluator: F, spec: MixedNormSpec) -> Result<MixedNorm>
where
    F: Fn(f64) -> Result<SpinorField3D>,
{
    mixed_time_norm_from(|t| fractional_sobolev(&evaluator(t)?, spec.s, spec.q), spec.p, spec.horizon, 2)
}

/// Which profile `L` a [`WeightedProfile`] weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileBase {
    /// `|v|`.
    Mode,
    /// `|∇v|`.
    Gradient,
}

/// `Λ_w(y, z) = (|y|/z^{δ/2})^w L(y/z^{δ/2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedProfile {
    pub weight: f64,
    pub base: ProfileBase,
}

impl WeightedProfile {
    /// `Λ`, `Ψ`, `Θ`.
    pub const LAMBDA: Self = Self { weight: 0.0, base: ProfileBase::Mode };
    pub const PSI: Self = Self { weight: 1.0, base: ProfileBase::Mode };
    pub const THETA: Self = Self { weight: 2.0, base: ProfileBase::Mode };

    /// Gradient profile with weight `a`, which must exceed `(γ − δ/2)/(1 − δ/2)`.
    pub fn gradient(a: f64, params: &ConstructionParams) -> Result<Self> {
        let floor = (params.gamma - params.delta / 2.0) / (1.0 - params.delta / 2.0);
        if !(a > floor) || !(a >= 0.0) {
            return Err(LabError::Parameter(format!("weight a = {a} must exceed {floor}")));
        }
        Ok(Self { weight: a, base: ProfileBase::Gradient })
    }
}

/// Which cutoffs are replaced by their derivatives in [`profile_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DerivFlags {
    /// `ψ_R → ψ_R' = R^{−γ} ψ'((z − R)/R^γ)`.
    pub psi_r: bool,
    /// `ψ(w) → ψ'(w)`.
    pub psi: bool,
    /// `χ(w) → χ'(w)`.
    pub chi: bool,
}

/// `‖Λ_w c₁ c₂ c₃‖_{L^q(ℝ³)}` with `cᵢ ∈ {ψ_R, ψ, χ}` or derivatives, in the
/// scaled variables `u = y/z^{δ/2}`: `∫ dz z^δ ∫ du |u|^{wq} L(u)^q ⋯`, the
/// `u`-integral on the mode grid and the `z`-integral by composite
/// Gauss–Legendre.
pub fn profile_norm(
    profile: WeightedProfile,
    mode: &EigenMode2D,
    params: &ConstructionParams,
    cutoffs: &Cutoffs,
    q: f64,
    flags: DerivFlags,
) -> Result<f64> {
    check_q(q)?;
    if q.is_infinite() {
        return Err(LabError::Parameter("profile norms need finite q".into()));
    }
    let grid = mode.grid;
    let base: Vec<f64> = match profile.base {
        ProfileBase::Mode => {
            (0..grid.len()).map(|k| mode.at(k).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).collect()
        }
        ProfileBase::Gradient => {
            let (g1, g2) = crate::landau::mode_gradient(mode);
            (0..grid.len())
                .map(|k| (0..4).map(|c| g1[c][k].norm_sqr() + g2[c][k].norm_sqr()).sum::<f64>().sqrt())
                .collect()
        }
    };
    let pts: Vec<(f64, f64)> = (0..grid.len())
        .filter(|&k| base[k] > 0.0)
        .map(|k| {
            let [u1, u2] = grid.point(k);
            let r2 = u1 * u1 + u2 * u2;
            (r2, base[k].powf(q) * if profile.weight == 0.0 { 1.0 } else { r2.powf(0.5 * profile.weight * q) })
        })
        .collect();
    let h2 = grid.h() * grid.h();
    let (r, rg) = (params.r, params.r_gamma());
    let (zs, ws) = composite_gauss_legendre(8, 64, r - rg, r + rg);
    let mut terms = Vec::with_capacity(zs.len());
    for (z, wz) in zs.iter().zip(&ws) {
        let zeta = (z - r) / rg;
        let c1 = if flags.psi_r { cutoffs.dpsi(zeta) / rg } else { cutoffs.psi(zeta) };
        if c1 == 0.0 {
            continue;
        }
        let scale = z.powf(params.delta - 2.0);
        let inner: Vec<f64> = pts
            .iter()
            .map(|(r2, val)| {
                let w = r2 * scale;
                let c2 = if flags.psi { cutoffs.dpsi(w) } else { cutoffs.psi(w) };
                let c3 = if flags.chi { cutoffs.dchi(w) } else { cutoffs.chi(w) };
                val * (c2 * c3).abs().powf(q)
            })
            .collect();
        terms.push(wz * z.powf(params.delta) * c1.abs().powf(q) * pairwise_sum(&inner) * h2);
    }
    Ok(pairwise_sum(&terms).powf(1.0 / q))
}

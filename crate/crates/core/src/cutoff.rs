//! Smooth compactly supported cutoffs `ψ` and `χ`.
//!
//! Built from `e(t) = exp(−1/t)` (zero for `t ≤ 0`) and the smooth step
//! `s(t) = e(t) / (e(t) + e(1 − t))`:
//!
//! * `ψ(z) = s(4(1 − |z|))`: equal to 1 on `|z| ≤ 3/4`, zero for `|z| ≥ 1`;
//! * `χ(z) = s(8(|z| − 1/4)) · s(4(1 − |z|))`: zero on `|z| ≤ 1/4` and
//!   `|z| ≥ 1`, equal to 1 on `3/8 ≤ |z| ≤ 3/4` (so in particular on `(1/2, 3/4)`).

/// `exp(−1/t)` for `t > 0`, else 0.
#[inline]
fn bump_edge(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        libm::exp(-1.0 / t)
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = bump_edge(t);
    let b = bump_edge(1.0 - t);
    a / (a + b)
}

/// Derivative of [`smooth_step`].
#[inline]
pub fn smooth_step_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = bump_edge(t);
    let b = bump_edge(1.0 - t);
    let u = 1.0 - t;
    a * b * (1.0 / (t * t) + 1.0 / (u * u)) / ((a + b) * (a + b))
}

/// Support and plateau descriptors of a cutoff, in `|z|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    /// Vanishes for `|z|` below this.
    pub support_lo: f64,
    /// Vanishes for `|z|` above this.
    pub support_hi: f64,
    /// Equal to one on `[plateau_lo, plateau_hi]`.
    pub plateau_lo: f64,
    /// See `plateau_lo`.
    pub plateau_hi: f64,
}

/// The pair `(ψ, χ)` of concrete cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoffs {
    /// Descriptor of `ψ`.
    pub psi_window: Window,
    /// Descriptor of `χ`.
    pub chi_window: Window,
}

impl Default for Cutoffs {
    fn default() -> Self {
        make_cutoffs()
    }
}

/// Concrete smooth realisations of `ψ` and `χ`.
pub fn make_cutoffs() -> Cutoffs {
    Cutoffs {
        psi_window: Window { support_lo: 0.0, support_hi: 1.0, plateau_lo: 0.0, plateau_hi: 0.75 },
        chi_window: Window { support_lo: 0.25, support_hi: 1.0, plateau_lo: 0.375, plateau_hi: 0.75 },
    }
}

impl Cutoffs {
    /// `ψ(z)`.
    #[inline]
    pub fn psi(&self, z: f64) -> f64 {
        smooth_step(4.0 * (1.0 - libm::fabs(z)))
    }

    /// `ψ'(z)`.
    #[inline]
    pub fn dpsi(&self, z: f64) -> f64 {
        let a = libm::fabs(z);
        if a <= 0.75 || a >= 1.0 {
            return 0.0;
        }
        -4.0 * libm::copysign(1.0, z) * smooth_step_deriv(4.0 * (1.0 - a))
    }

    /// `χ(z)`.
    #[inline]
    pub fn chi(&self, z: f64) -> f64 {
        let a = libm::fabs(z);
        smooth_step(8.0 * (a - 0.25)) * smooth_step(4.0 * (1.0 - a))
    }

    /// `χ'(z)`.
    #[inline]
    pub fn dchi(&self, z: f64) -> f64 {
        let a = libm::fabs(z);
        if a <= 0.25 || a >= 1.0 {
            return 0.0;
        }
        let (u, w) = (8.0 * (a - 0.25), 4.0 * (1.0 - a));
        let d = 8.0 * smooth_step_deriv(u) * smooth_step(w) - 4.0 * smooth_step(u) * smooth_step_deriv(w);
        libm::copysign(1.0, z) * d
    }

    /// Product `ψ(w)χ(w)` together with its derivative in `w`.
    #[inline]
    pub fn psi_chi(&self, w: f64) -> (f64, f64) {
        let (p, c) = (self.psi(w), self.chi(w));
        (p * c, self.dpsi(w) * c + p * self.dchi(w))
    }
}

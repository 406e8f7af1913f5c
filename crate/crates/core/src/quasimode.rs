//! Pointwise evaluators for the standing wave `W`, its truncation `W_R`, the
//! datum `f_R`, and the sources `F`, `G_R`, `F_R`, `F̃_R`.
//!
//! With `s = z^{δ/2}`, `u = y/s` and `w = |y|²/z²`:
//!
//! * `ω(y, z) = v(u)`, `W(t, x) = e^{iλt/s} ω`;
//! * `Φ = ψ_R(z) ψ(w) χ(w)`, `W_R = Φ W`, `f_R = W_R(0, ·)`;
//! * `F = −(i e^{iλt/s}/z) α₃ {−(δ/2)(iλt/s) v(u) − (δ/2) u·∇v(u)}`;
//! * `G_R = −i (α·∇Φ) W`, `F_R = Φ F + G_R`;
//! * `F̃_R = 𝟙_{(0,R^β)}(t) {F_R − z^{1−δ} α·R₁(y/z) W_R}`.
//!
//! These satisfy `i∂_t W_R + D_{A_lin} W_R = F_R` and `i∂_t W_R + D_A W_R = F̃_R`
//! on `(0, R^β)`, where `D_A = −iα·∇ − α·A` and `A_lin = z^{−δ}(y₂, −y₁, 0)`.

use crate::cutoff::Cutoffs;
use crate::dirac::{alpha_dot, spinor_add, spinor_scale, Spinor, ZERO_SPINOR};
use crate::interp::{HermiteGrid, SpinorJet};
use crate::params::ConstructionParams;
use crate::potential::remainder_term;
use crate::{Complex64, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2D eigenmode `Tv = λv` available with its gradient.
pub trait Profile {
    /// Eigenvalue `λ`.
    fn lambda(&self) -> f64;
    /// `v(u)`, `∂₁v(u)`, `∂₂v(u)`.
    fn jet(&self, u: [f64; 2]) -> SpinorJet;
}

/// A sampled eigenmode interpolated by [`HermiteGrid`].
#[derive(Debug, Clone)]
pub struct InterpolatedMode {
    /// Eigenvalue.
    pub lambda: f64,
    /// Interpolant of the mode and its derivatives.
    pub grid: HermiteGrid,
}

impl Profile for InterpolatedMode {
    fn lambda(&self) -> f64 {
        self.lambda
    }
    fn jet(&self, u: [f64; 2]) -> SpinorJet {
        self.grid.eval(u)
    }
}

/// Closed-form radial members of the lowest Landau levels of
/// `T = −iα·∇_y − α·(y₂, −y₁, 0)`.
///
/// With `φ₀ = e^{−|y|²/2}/√π` and `ζ̄ = y₁ − i y₂`:
/// `Zero = (0, φ₀, 0, φ₀)/√2`, and `Plus`/`Minus` (λ = ±2) are
/// `(±iζ̄φ₀, (1 − |y|²)φ₀, ±iζ̄φ₀, (1 − |y|²)φ₀)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandauMode {
    /// `λ = 0`.
    Zero,
    /// `λ = 2`.
    Plus,
    /// `λ = −2`.
    Minus,
}

impl Profile for LandauMode {
    fn lambda(&self) -> f64 {
        match self {
            LandauMode::Zero => 0.0,
            LandauMode::Plus => 2.0,
            LandauMode::Minus => -2.0,
        }
    }

    fn jet(&self, u: [f64; 2]) -> SpinorJet {
        let (y1, y2) = (u[0], u[1]);
        let r2 = y1 * y1 + y2 * y2;
        let phi = libm::exp(-0.5 * r2) / libm::sqrt(core::f64::consts::PI);
        let c = |x: f64| Complex64::new(x, 0.0);
        match self {
            LandauMode::Zero => {
                let a = phi * core::f64::consts::FRAC_1_SQRT_2;
                SpinorJet {
                    value: [c(0.0), c(a), c(0.0), c(a)],
                    d1: [c(0.0), c(-y1 * a), c(0.0), c(-y1 * a)],
                    d2: [c(0.0), c(-y2 * a), c(0.0), c(-y2 * a)],
                }
            }
            LandauMode::Plus | LandauMode::Minus => {
                let sgn = if *self == LandauMode::Plus { 0.5 } else { -0.5 };
                let zb = Complex64::new(y1, -y2);
                // i ζ̄ φ₀ and its partials.
                let top = I * zb * phi * sgn;
                let top1 = I * (Complex64::new(1.0, 0.0) - zb * y1) * phi * sgn;
                let top2 = I * (Complex64::new(0.0, -1.0) - zb * y2) * phi * sgn;
                let bot = c(0.5 * (1.0 - r2) * phi);
                let bot1 = c(-0.5 * y1 * (3.0 - r2) * phi);
                let bot2 = c(-0.5 * y2 * (3.0 - r2) * phi);
                SpinorJet { value: [top, bot, top, bot], d1: [top1, bot1, top1, bot1], d2: [top2, bot2, top2, bot2] }
            }
        }
    }
}

/// The five pieces of `G_R`, each already multiplied by `−i` and `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrTerms {
    /// `−i ψ_R ψ'χ (2/z²)(α₁y₁ + α₂y₂) W`.
    pub transverse_dpsi: Spinor,
    /// `−i ψ_R ψχ' (2/z²)(α₁y₁ + α₂y₂) W`.
    pub transverse_dchi: Spinor,
    /// `−i α₃ ψ_R' ψχ W`.
    pub psi_r_prime: Spinor,
    /// `+i α₃ ψ_R ψ'χ (2|y|²/z³) W`.
    pub radial_dpsi: Spinor,
    /// `+i α₃ ψ_R ψχ' (2|y|²/z³) W`.
    pub radial_dchi: Spinor,
}

impl GrTerms {
    /// Sum of all five pieces.
    pub fn total(&self) -> Spinor {
        let mut s = spinor_add(&self.transverse_dpsi, &self.transverse_dchi);
        s = spinor_add(&s, &self.psi_r_prime);
        s = spinor_add(&s, &self.radial_dpsi);
        spinor_add(&s, &self.radial_dchi)
    }

    /// The pieces as an array, in field order.
    pub fn as_array(&self) -> [Spinor; 5] {
        [self.transverse_dpsi, self.transverse_dchi, self.psi_r_prime, self.radial_dpsi, self.radial_dchi]
    }
}

/// Cutoff products at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSample {
    /// `ψ_R(z)`.
    pub psi_r: f64,
    /// `ψ_R'(z) = ψ'((z − R)/R^γ)/R^γ`.
    pub dpsi_r: f64,
    /// `ψ(w)`.
    pub psi: f64,
    /// `ψ'(w)`.
    pub dpsi: f64,
    /// `χ(w)`.
    pub chi: f64,
    /// `χ'(w)`.
    pub dchi: f64,
}

impl CutoffSample {
    /// `Φ = ψ_R ψ χ`.
    pub fn phi(&self) -> f64 {
        self.psi_r * self.psi * self.chi
    }
}

/// The construction at fixed parameters, cutoffs and eigenmode.
#[derive(Debug, Clone, Copy)]
pub struct Quasimode<'a, P: Profile + ?Sized> {
    /// `(δ, γ, β, R)`.
    pub params: ConstructionParams,
    /// `ψ`, `χ`.
    pub cutoffs: Cutoffs,
    /// The eigenmode `v`.
    pub profile: &'a P,
}

impl<'a, P: Profile + ?Sized> Quasimode<'a, P> {
    /// Bundles the ingredients.
    pub fn new(params: ConstructionParams, cutoffs: Cutoffs, profile: &'a P) -> Self {
        Self { params, cutoffs, profile }
    }

    fn scale(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(Error::Domain("profile needs z > 0"));
        }
        Ok(libm::pow(z, 0.5 * self.params.delta))
    }

    /// `ω(x) = v(y / z^{δ/2})`.
    pub fn omega(&self, x: [f64; 3]) -> Result<Spinor> {
        let s = self.scale(x[2])?;
        Ok(self.profile.jet([x[0] / s, x[1] / s]).value)
    }

    /// `W(t, x) = e^{iλt/z^{δ/2}} ω(x)`.
    pub fn w(&self, t: f64, x: [f64; 3]) -> Result<Spinor> {
        let s = self.scale(x[2])?;
        let v = self.profile.jet([x[0] / s, x[1] / s]).value;
        Ok(spinor_scale(&v, phase(self.profile.lambda() * t / s)))
    }

    /// All cutoff factors at `x`.
    pub fn cutoffs_at(&self, x: [f64; 3]) -> CutoffSample {
        let rg = self.params.r_gamma();
        let zeta = (x[2] - self.params.r) / rg;
        let w = if x[2] != 0.0 { (x[0] * x[0] + x[1] * x[1]) / (x[2] * x[2]) } else { f64::INFINITY };
        let c = &self.cutoffs;
        CutoffSample {
            psi_r: c.psi(zeta),
            dpsi_r: c.dpsi(zeta) / rg,
            psi: c.psi(w),
            dpsi: c.dpsi(w),
            chi: c.chi(w),
            dchi: c.dchi(w),
        }
    }

    /// Whether `x` lies in the closed `z`-window where `ψ_R` may be nonzero.
    fn in_window(&self, x: [f64; 3]) -> bool {
        (x[2] - self.params.r).abs() < self.params.r_gamma()
    }

    /// `W_R(t, x)`; zero off the support.
    pub fn w_r(&self, t: f64, x: [f64; 3]) -> Spinor {
        if !self.in_window(x) {
            return ZERO_SPINOR;
        }
        let phi = self.cutoffs_at(x).phi();
        if phi == 0.0 {
            return ZERO_SPINOR;
        }
        // In the window z > R − R^γ > 0, so the profile is defined.
        let w = self.w(t, x).unwrap_or(ZERO_SPINOR);
        spinor_scale(&w, Complex64::new(phi, 0.0))
    }

    /// `f_R(x) = W_R(0, x)`.
    pub fn f_r(&self, x: [f64; 3]) -> Spinor {
        self.w_r(0.0, x)
    }

    /// The untruncated source `F(t, x)`.
    pub fn f(&self, t: f64, x: [f64; 3]) -> Result<Spinor> {
        let s = self.scale(x[2])?;
        let z = x[2];
        let u = [x[0] / s, x[1] / s];
        let jet = self.profile.jet(u);
        let lam = self.profile.lambda();
        let hd = 0.5 * self.params.delta;
        let a = Complex64::new(0.0, -hd * lam * t / s);
        let mut brace = ZERO_SPINOR;
        for c in 0..4 {
            let g = jet.d1[c] * u[0] + jet.d2[c] * u[1];
            brace[c] = a * jet.value[c] - g * hd;
        }
        let pref = -I * phase(lam * t / s) / z;
        Ok(spinor_scale(&alpha_dot([0.0, 0.0, 1.0], &brace), pref))
    }

    /// `G(u) = u·∇v(u)` at a scaled point.
    pub fn g_profile(&self, u: [f64; 2]) -> Spinor {
        let jet = self.profile.jet(u);
        let mut g = ZERO_SPINOR;
        for c in 0..4 {
            g[c] = jet.d1[c] * u[0] + jet.d2[c] * u[1];
        }
        g
    }

    /// The five pieces of `G_R(t, x)`; all zero off the support.
    pub fn g_r_terms(&self, t: f64, x: [f64; 3]) -> GrTerms {
        let zero = GrTerms {
            transverse_dpsi: ZERO_SPINOR,
            transverse_dchi: ZERO_SPINOR,
            psi_r_prime: ZERO_SPINOR,
            radial_dpsi: ZERO_SPINOR,
            radial_dchi: ZERO_SPINOR,
        };
        if !self.in_window(x) {
            return zero;
        }
        let c = self.cutoffs_at(x);
        let Ok(w) = self.w(t, x) else { return zero };
        let z = x[2];
        let y2 = x[0] * x[0] + x[1] * x[1];
        let at = alpha_dot([x[0], x[1], 0.0], &w);
        let a3 = alpha_dot([0.0, 0.0, 1.0], &w);
        let tr = 2.0 / (z * z);
        let rad = 2.0 * y2 / (z * z * z);
        let m = |v: &Spinor, f: f64| spinor_scale(v, Complex64::new(0.0, f));
        GrTerms {
            transverse_dpsi: m(&at, -c.psi_r * c.dpsi * c.chi * tr),
            transverse_dchi: m(&at, -c.psi_r * c.psi * c.dchi * tr),
            psi_r_prime: m(&a3, -c.dpsi_r * c.psi * c.chi),
            radial_dpsi: m(&a3, c.psi_r * c.dpsi * c.chi * rad),
            radial_dchi: m(&a3, c.psi_r * c.psi * c.dchi * rad),
        }
    }

    /// `G_R(t, x)`.
    pub fn g_r(&self, t: f64, x: [f64; 3]) -> Spinor {
        self.g_r_terms(t, x).total()
    }

    /// `F_R = ψ_R ψ χ F + G_R`; zero off the support.
    pub fn f_r_source(&self, t: f64, x: [f64; 3]) -> Spinor {
        if !self.in_window(x) {
            return ZERO_SPINOR;
        }
        let phi = self.cutoffs_at(x).phi();
        let g = self.g_r(t, x);
        if phi == 0.0 {
            return g;
        }
        let f = self.f(t, x).unwrap_or(ZERO_SPINOR);
        spinor_add(&spinor_scale(&f, Complex64::new(phi, 0.0)), &g)
    }

    /// `F̃_R(t, x)`.
    pub fn f_tilde(&self, t: f64, x: [f64; 3]) -> Spinor {
        if !(t > 0.0 && t < self.params.horizon()) || !self.in_window(x) {
            return ZERO_SPINOR;
        }
        let fr = self.f_r_source(t, x);
        let wr = self.w_r(t, x);
        let Ok(rem) = remainder_term(self.params.delta, x) else { return fr };
        let corr = alpha_dot(rem, &wr);
        let mut out = fr;
        for c in 0..4 {
            out[c] -= corr[c];
        }
        out
    }

    /// `F_R` with the time indicator of `F̃_R` but no remainder term.
    pub fn f_r_windowed(&self, t: f64, x: [f64; 3]) -> Spinor {
        if !(t > 0.0 && t < self.params.horizon()) {
            return ZERO_SPINOR;
        }
        self.f_r_source(t, x)
    }
}

#[inline]
fn phase(theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(theta);
    Complex64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::make_cutoffs;
    use crate::dirac::{spinor_norm, spinor_norm_sqr};
    use crate::potential::linear_part;

    fn params() -> ConstructionParams {
        ConstructionParams::new(1.5, 0.8, 0.75, 8.0).unwrap()
    }

    fn diff(a: &Spinor, b: &Spinor) -> f64 {
        let mut d = ZERO_SPINOR;
        for c in 0..4 {
            d[c] = a[c] - b[c];
        }
        spinor_norm(&d)
    }

    /// `T v` from the analytic jet.
    fn apply_t(p: &dyn Profile, u: [f64; 2]) -> Spinor {
        let j = p.jet(u);
        let a = alpha_dot([u[1], -u[0], 0.0], &j.value);
        let g1 = alpha_dot([1.0, 0.0, 0.0], &j.d1);
        let g2 = alpha_dot([0.0, 1.0, 0.0], &j.d2);
        let mut out = ZERO_SPINOR;
        for c in 0..4 {
            out[c] = -I * (g1[c] + g2[c]) - a[c];
        }
        out
    }

    #[test]
    fn analytic_landau_modes_are_eigenmodes() {
        for m in [LandauMode::Zero, LandauMode::Plus, LandauMode::Minus] {
            for u in [[0.3, -0.7], [1.1, 0.4], [-0.2, 1.9], [0.0, 0.0]] {
                let tv = apply_t(&m, u);
                let lv = spinor_scale(&m.jet(u).value, Complex64::new(m.lambda(), 0.0));
                assert!(diff(&tv, &lv) < 1e-13, "{m:?} at {u:?}");
            }
        }
    }

    #[test]
    fn analytic_jets_match_finite_differences() {
        let h = 1e-6;
        for m in [LandauMode::Zero, LandauMode::Plus] {
            let u = [0.37, -0.81];
            let j = m.jet(u);
            let fd1 = {
                let (a, b) = (m.jet([u[0] + h, u[1]]).value, m.jet([u[0] - h, u[1]]).value);
                core::array::from_fn::<_, 4, _>(|c| (a[c] - b[c]) / (2.0 * h))
            };
            let fd2 = {
                let (a, b) = (m.jet([u[0], u[1] + h]).value, m.jet([u[0], u[1] - h]).value);
                core::array::from_fn::<_, 4, _>(|c| (a[c] - b[c]) / (2.0 * h))
            };
            assert!(diff(&fd1, &j.d1) < 1e-8);
            assert!(diff(&fd2, &j.d2) < 1e-8);
        }
    }

    #[test]
    fn analytic_modes_are_normalised() {
        for m in [LandauMode::Zero, LandauMode::Plus] {
            let (n, l) = (400, 8.0);
            let h = 2.0 * l / n as f64;
            let mut acc = 0.0;
            for j2 in 0..n {
                for j1 in 0..n {
                    let u = [-l + (j1 as f64 + 0.5) * h, -l + (j2 as f64 + 0.5) * h];
                    acc += spinor_norm_sqr(&m.jet(u).value) * h * h;
                }
            }
            assert!((acc - 1.0).abs() < 1e-10, "{m:?}: {acc}");
        }
    }

    #[test]
    fn omega_and_standing_wave() {
        let m = LandauMode::Plus;
        let q = Quasimode::new(params(), make_cutoffs(), &m);
        assert_eq!(q.omega([0.0, 0.0, 3.0]).unwrap(), m.jet([0.0, 0.0]).value);
        let z: f64 = 5.0;
        let u = [0.4, -0.3];
        let s = z.powf(0.75);
        assert_eq!(q.omega([s * u[0], s * u[1], z]).unwrap(), m.jet(u).value);
        assert!(q.omega([1.0, 0.0, 0.0]).is_err());
        let x = [2.0, -1.0, 6.0];
        assert_eq!(q.w(0.0, x).unwrap(), q.omega(x).unwrap());
        let n0 = spinor_norm(&q.w(0.0, x).unwrap());
        for t in [1.0, 10.0] {
            assert!((spinor_norm(&q.w(t, x).unwrap()) - n0).abs() < 1e-15);
        }
        let zq = Quasimode::new(params(), make_cutoffs(), &LandauMode::Zero);
        assert_eq!(zq.w(7.0, x).unwrap(), zq.omega(x).unwrap());
    }

    #[test]
    fn omega_l2_slice_scales_like_z_delta() {
        let m = LandauMode::Plus;
        let q = Quasimode::new(params(), make_cutoffs(), &m);
        let z: f64 = 4.0;
        let (n, l) = (600, 8.0 * z.powf(0.75));
        let h = 2.0 * l / n as f64;
        let mut acc = 0.0;
        for j2 in 0..n {
            for j1 in 0..n {
                let x = [-l + (j1 as f64 + 0.5) * h, -l + (j2 as f64 + 0.5) * h, z];
                acc += spinor_norm_sqr(&q.omega(x).unwrap()) * h * h;
            }
        }
        assert!((acc / 8.0 - 1.0).abs() < 1e-3, "{acc}");
    }

    #[test]
    fn truncation_support_and_plateau() {
        let m = LandauMode::Plus;
        let p = params();
        let q = Quasimode::new(p, make_cutoffs(), &m);
        let rg = p.r_gamma();
        assert_eq!(q.w_r(0.0, [5.0, 0.0, p.r + 2.0 * rg]), ZERO_SPINOR);
        let z = 8.5;
        assert_eq!(q.w_r(0.3, [z / 4.0, 0.0, z]), ZERO_SPINOR);
        let xp = [0.8 * z * 0.6, 0.8 * z * 0.8, z];
        assert_eq!(q.w_r(0.3, xp), q.w(0.3, xp).unwrap());
        assert_eq!(q.f_r(xp), q.w_r(0.0, xp));
    }

    #[test]
    fn g_r_vanishes_on_plateau() {
        let m = LandauMode::Plus;
        let q = Quasimode::new(params(), make_cutoffs(), &m);
        let z = 8.2;
        let x = [0.75 * z, 0.2 * z, z];
        assert_eq!(q.g_r(1.3, x), ZERO_SPINOR);
        assert_eq!(q.f_r_source(1.3, x), q.f(1.3, x).unwrap());
    }

    /// On the plateau at `t = 0`, `F = −iα₃∂_zW` with `∂_z` by finite differences.
    #[test]
    fn f_matches_fd_of_w_in_z() {
        let m = LandauMode::Plus;
        let q = Quasimode::new(params(), make_cutoffs(), &m);
        let x = [2.1, -1.3, 3.7];
        let h = 1e-5;
        let wp = q.w(0.0, [x[0], x[1], x[2] + h]).unwrap();
        let wm = q.w(0.0, [x[0], x[1], x[2] - h]).unwrap();
        let dz: Spinor = core::array::from_fn(|c| (wp[c] - wm[c]) / (2.0 * h));
        let want = spinor_scale(&alpha_dot([0.0, 0.0, 1.0], &dz), -I);
        assert!(diff(&q.f(0.0, x).unwrap(), &want) < 1e-8);
    }

    /// Pointwise residual of `i∂_t W_R + D_{A_lin} W_R = F_R` and of the full
    /// equation with `F̃_R`, derivatives by high-order finite differences.
    #[test]
    fn pointwise_pde_residuals() {
        let m = LandauMode::Plus;
        let p = params();
        let q = Quasimode::new(p, make_cutoffs(), &m);
        let h = 1e-3;
        let d5 = |f: &dyn Fn(f64) -> Spinor| -> Spinor {
            let (a, b, c, d) = (f(2.0 * h), f(h), f(-h), f(-2.0 * h));
            core::array::from_fn(|k| (-a[k] + 8.0 * b[k] - 8.0 * c[k] + d[k]) / (12.0 * h))
        };
        let mut worst: f64 = 0.0;
        let mut worst_full: f64 = 0.0;
        for &(t, x) in &[
            (1.0, [3.9, 3.1, 7.9]),
            (1.0, [6.0, 1.0, 8.4]),
            (0.5, [2.4, 3.4, 6.7]),
            (2.0, [-6.9, 2.0, 9.5]),
            (1.0, [4.2, -5.3, 8.0]),
        ] {
            let dt = d5(&|e| q.w_r(t + e, x));
            let dx: [Spinor; 3] = core::array::from_fn(|k| {
                d5(&|e| {
                    let mut xx = x;
                    xx[k] += e;
                    q.w_r(t, xx)
                })
            });
            let wr = q.w_r(t, x);
            let lin = linear_part(p.delta, x).unwrap();
            let alin = alpha_dot(lin, &wr);
            let a = crate::potential::eval_a(p.delta, x).unwrap();
            let afull = alpha_dot(a, &wr);
            let mut grad = ZERO_SPINOR;
            for k in 0..3 {
                let mut e = [0.0; 3];
                e[k] = 1.0;
                let g = alpha_dot(e, &dx[k]);
                for c in 0..4 {
                    grad[c] += g[c];
                }
            }
            let fr = q.f_r_source(t, x);
            let ft = q.f_tilde(t, x);
            let lhs: Spinor = core::array::from_fn(|c| I * dt[c] - I * grad[c] - alin[c]);
            let lhs_full: Spinor = core::array::from_fn(|c| I * dt[c] - I * grad[c] - afull[c]);
            let scale = spinor_norm(&fr).max(1e-3);
            worst = worst.max(diff(&lhs, &fr) / scale);
            worst_full = worst_full.max(diff(&lhs_full, &ft) / scale);
        }
        assert!(worst < 1e-6, "linearised residual {worst}");
        assert!(worst_full < 1e-6, "full residual {worst_full}");
    }

    #[test]
    fn f_tilde_window() {
        let m = LandauMode::Plus;
        let p = params();
        let q = Quasimode::new(p, make_cutoffs(), &m);
        let x = [3.9, 3.1, 7.9];
        assert_eq!(q.f_tilde(p.horizon() + 0.1, x), ZERO_SPINOR);
        assert_ne!(q.f_tilde(1.0, x), ZERO_SPINOR);
        assert_eq!(q.f_r_windowed(1.0, x), q.f_r_source(1.0, x));
    }
}

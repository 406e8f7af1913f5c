//! Fields in a fixed angular-momentum sector, stored on the half-plane
//! `θ = 0` over `(ρ, z)`.
//!
//! A component `f_c = g_c(ρ, z) e^{i m_c θ}` has Fourier transform
//! `2π (−i)^{m_c} e^{i m_c φ} G_c(k, k_z)` with `G_c` the order-`m_c` Hankel
//! transform of the `z`-Fourier transform of `g_c`. In the chiral sector
//! `m = (m₀−1, m₀, m₀−1, m₀)` the symbol `α·ξ` acts on `G` as `α·(0, k, k_z)`,
//! so Sobolev multipliers and the free flow reduce to pointwise operations in
//! `(k, k_z)`.
//!
//! `ρ`-integrals use the midpoint rule on `ρ_j = (j + ½)Δρ` with the `h²/24`
//! Euler–Maclaurin term at the axis. The forward transform is spectrally
//! accurate only for data vanishing near the axis, which holds for every
//! truncated quasimode field (their support lies in `|y| ≥ z/2`).

use std::f64::consts::PI;

use magdirac_core::dirac::{alpha_dot, exp_i_alpha_dot_apply, Spinor};
use magdirac_core::params::ConstructionParams;
use magdirac_core::quad::pairwise_sum;
use magdirac_core::quasimode::Profile;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fft::{wavenumbers, FftNd};
use crate::grid::{zero_components, Components};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Angular momenta `m_c` of the four components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    pub m: [i32; 4],
}

impl Sector {
    /// `(m₀−1, m₀, m₀−1, m₀)`, the only sectors the Dirac operators here preserve.
    pub fn chiral(m0: i32) -> Self {
        Self { m: [m0 - 1, m0, m0 - 1, m0] }
    }

    /// Reads the sector off a planar profile by comparing `v(R_θ u)` with
    /// `v(u)` on a few circles.
    pub fn detect<P: Profile + ?Sized>(profile: &P) -> Result<Self> {
        const THETA: f64 = 0.37;
        let (s, c) = THETA.sin_cos();
        let mut overlap = [ZERO; 4];
        let mut mass = [0.0f64; 4];
        let mut samples: Vec<(Spinor, Spinor)> = Vec::new();
        for r in [0.6, 1.1, 1.7, 2.4] {
            for phi in [0.0, 2.1, 4.4] {
                let (ps, pc) = f64::sin_cos(phi);
                let u = [r * pc, r * ps];
                let v = profile.jet(u).value;
                let w = profile.jet([c * u[0] - s * u[1], s * u[0] + c * u[1]]).value;
                for k in 0..4 {
                    overlap[k] += v[k].conj() * w[k];
                    mass[k] += v[k].norm_sqr();
                }
                samples.push((v, w));
            }
        }
        let peak = mass.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(LabError::Parameter("cannot read the sector of a vanishing profile".into()));
        }
        let mut m: [Option<i32>; 4] = [None; 4];
        for k in 0..4 {
            if mass[k] <= 1e-12 * peak {
                continue;
            }
            let mk = (overlap[k].arg() / THETA).round() as i32;
            let phase = Complex64::from_polar(1.0, mk as f64 * THETA);
            let err: f64 = samples.iter().map(|(v, w)| (w[k] - phase * v[k]).norm_sqr()).sum();
            if err > 1e-6 * mass[k] {
                return Err(LabError::Parameter(format!("component {k} is not an angular-momentum eigenfunction")));
            }
            m[k] = Some(mk);
        }
        let candidates = [m[1], m[3], m[0].map(|x| x + 1), m[2].map(|x| x + 1)];
        let m0 = candidates.iter().flatten().next().copied().unwrap_or(0);
        if candidates.iter().flatten().any(|&x| x != m0) {
            return Err(LabError::Parameter(format!("angular momenta {m:?} do not form a chiral sector")));
        }
        Ok(Self::chiral(m0))
    }
}

/// `(ρ, z)` grid: `ρ_j = (j + ½)Δρ` on `(0, ρ_max)`, `z_k = z_lo + (k + ½)Δz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylGrid {
    pub rho_max: f64,
    pub n_rho: usize,
    pub z_lo: f64,
    pub z_hi: f64,
    pub n_z: usize,
}

impl CylGrid {
    pub fn new(rho_max: f64, n_rho: usize, z_lo: f64, z_hi: f64, n_z: usize) -> Result<Self> {
        if !(rho_max > 0.0) || !(z_hi > z_lo) || n_rho < 4 || n_z < 4 {
            return Err(LabError::Parameter(format!(
                "bad cylinder grid ρ<{rho_max} ({n_rho}), z in [{z_lo}, {z_hi}] ({n_z})"
            )));
        }
        Ok(Self { rho_max, n_rho, z_lo, z_hi, n_z })
    }

    /// Box around the support `|y| ≤ z`, `|z − R| ≤ R^γ` of the truncated
    /// quasimode: `pad` times its radial and axial extent, plus `margin` on
    /// every open side.
    pub fn for_support(params: &ConstructionParams, pad: f64, margin: f64, n_rho: usize, n_z: usize) -> Result<Self> {
        let rg = params.r_gamma();
        let top = params.r + rg;
        Self::new(pad * top + margin, n_rho, params.r - pad * rg - margin, params.r + pad * rg + margin, n_z)
    }

    /// Tight box for local operators: `ρ ≤ 1.1 (R + R^γ)`, `|z − R| ≤ 1.5 R^γ`.
    pub fn reference(params: &ConstructionParams, n_rho: usize, n_z: usize) -> Result<Self> {
        let rg = params.r_gamma();
        Self::new(1.1 * (params.r + rg), n_rho, params.r - 1.5 * rg, params.r + 1.5 * rg, n_z)
    }

    pub fn d_rho(&self) -> f64 {
        self.rho_max / self.n_rho as f64
    }

    pub fn d_z(&self) -> f64 {
        (self.z_hi - self.z_lo) / self.n_z as f64
    }

    pub fn rho(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.d_rho()
    }

    pub fn z(&self, k: usize) -> f64 {
        self.z_lo + (k as f64 + 0.5) * self.d_z()
    }

    pub fn len(&self) -> usize {
        self.n_rho * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index, `ρ` fastest.
    pub fn index(&self, j: usize, k: usize) -> usize {
        k * self.n_rho + j
    }

    /// Same grid with both spacings halved.
    pub fn refined(&self) -> Self {
        Self { n_rho: 2 * self.n_rho, n_z: 2 * self.n_z, ..*self }
    }
}

/// Components `g_c(ρ_j, z_k)` of a sector field, i.e. its values at `θ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylField {
    pub grid: CylGrid,
    pub sector: Sector,
    pub data: Components,
}

impl CylField {
    pub fn zeros(grid: CylGrid, sector: Sector) -> Self {
        Self { grid, sector, data: zero_components(grid.len()) }
    }

    /// Samples `f(ρ, 0, z)`.
    pub fn sample<F>(grid: CylGrid, sector: Sector, f: F) -> Self
    where
        F: Fn([f64; 3]) -> Spinor + Sync,
    {
        let rows: Vec<Vec<Spinor>> = (0..grid.n_z)
            .into_par_iter()
            .map(|k| (0..grid.n_rho).map(|j| f([grid.rho(j), 0.0, grid.z(k)])).collect())
            .collect();
        let mut out = Self::zeros(grid, sector);
        for (k, row) in rows.into_iter().enumerate() {
            for (j, s) in row.into_iter().enumerate() {
                let idx = grid.index(j, k);
                for c in 0..4 {
                    out.data[c][idx] = s[c];
                }
            }
        }
        out
    }

    pub fn modulus(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.data.iter().map(|c| c[i].norm_sqr()).sum::<f64>().sqrt()).collect()
    }

    /// Largest modulus on the outer `ρ` row and both `z` rows over the peak.
    pub fn edge_ratio(&self) -> f64 {
        let m = self.modulus();
        let peak = m.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let g = self.grid;
        let mut edge = 0.0f64;
        for k in 0..g.n_z {
            for j in 0..g.n_rho {
                if j == g.n_rho - 1 || k == 0 || k == g.n_z - 1 {
                    edge = edge.max(m[g.index(j, k)]);
                }
            }
        }
        edge / peak
    }

    /// `‖f‖_{L^q(ℝ³)} = (2π ∫∫ |f|^q ρ dρ dz)^{1/q}`.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(LabError::Parameter(format!("Lebesgue exponent must be >= 1, got {q}")));
        }
        let m = self.modulus();
        let peak = m.iter().cloned().fold(0.0, f64::max);
        if q.is_infinite() || peak == 0.0 {
            return Ok(peak);
        }
        let g = self.grid;
        let (dr, dz) = (g.d_rho(), g.d_z());
        let mut terms = Vec::with_capacity(g.len() + g.n_z);
        for k in 0..g.n_z {
            let at = |j: usize| (m[g.index(j, k)] / peak).powf(q);
            for j in 0..g.n_rho {
                terms.push(g.rho(j) * at(j));
            }
            terms.push(-dr / 24.0 * (9.0 * at(0) - at(1)) / 8.0);
        }
        Ok(peak * (2.0 * PI * dr * dz * pairwise_sum(&terms)).max(0.0).powf(1.0 / q))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}

/// Hankel–Fourier coefficients `G_c(k_i, k_z)`. Row `i = 0` is `k = 0`,
/// rows `i ≥ 1` are `k_i = (i − ½)Δk`; layout `kz_index * (n_k + 1) + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylHat {
    pub data: Components,
}

/// Planned transforms for one grid and sector. The `z` axis is zero-padded
/// to twice its length; `Δk = π/(4ρ_max)` and `n_k = 4n_ρ`, so `k` runs to
/// the `ρ`-Nyquist frequency `π/Δρ`.
///
/// `k`-integrals have the form `∫ k p(k) dk` with `p` even, and use the
/// midpoint nodes plus `k = 0` with the `h²` and `h⁴` Euler–Maclaurin terms
/// folded into the first three weights (`p''(0)` by extrapolation from
/// `p(0), p(Δk/2), p(3Δk/2)`), which is sixth-order accurate.
#[derive(Debug)]
pub struct CylTransform {
    pub grid: CylGrid,
    pub sector: Sector,
    nzp: usize,
    n_k: usize,
    dk: f64,
    kz: Vec<f64>,
    fft: FftNd,
    /// Per distinct `m`: forward `(n_k + 1) × n_ρ` and inverse `n_ρ × (n_k + 1)`.
    kernels: Vec<(i32, DMatrix<f64>, DMatrix<f64>)>,
    /// Quadrature weights of `∫ k p(k) dk` at `k = 0, k₁, k₂, …`.
    kw: Vec<f64>,
}

fn k_weights(n_k: usize, dk: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..=n_k).map(|i| if i == 0 { 0.0 } else { (i as f64 - 0.5) * dk * dk }).collect();
    let c = 7.0 * dk * dk / 960.0;
    w[0] = -2.0 / 27.0 * dk * dk;
    w[1] += 4.5 * c;
    w[2] -= c / 18.0;
    w
}

fn bessel(m: i32, x: f64) -> f64 {
    let j = libm::jn(m.abs(), x);
    if m < 0 && m % 2 != 0 {
        -j
    } else {
        j
    }
}

impl CylTransform {
    pub fn new(grid: CylGrid, sector: Sector) -> Self {
        let nzp = 2 * grid.n_z;
        let n_k = 4 * grid.n_rho;
        let dk = PI / (4.0 * grid.rho_max);
        let kw = k_weights(n_k, dk);
        let dr = grid.d_rho();
        let mut kernels: Vec<(i32, DMatrix<f64>, DMatrix<f64>)> = Vec::new();
        for &m in &sector.m {
            if kernels.iter().any(|(mm, _, _)| *mm == m) {
                continue;
            }
            let k_of = |i: usize| if i == 0 { 0.0 } else { (i as f64 - 0.5) * dk };
            let fwd = DMatrix::from_fn(n_k + 1, grid.n_rho, |i, j| bessel(m, k_of(i) * grid.rho(j)) * grid.rho(j) * dr);
            let inv = Self::inverse_kernel(m, &kw, dk, &(0..grid.n_rho).map(|j| grid.rho(j)).collect::<Vec<_>>());
            kernels.push((m, fwd, inv));
        }
        Self { grid, sector, nzp, n_k, dk, kz: wavenumbers(nzp, grid.d_z()), fft: FftNd::new([nzp, 1, 1]), kernels, kw }
    }

    fn inverse_kernel(m: i32, kw: &[f64], dk: f64, rhos: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(rhos.len(), kw.len(), |j, i| {
            let k = if i == 0 { 0.0 } else { (i as f64 - 0.5) * dk };
            bessel(m, k * rhos[j]) * kw[i]
        })
    }

    fn kernel(&self, m: i32) -> (&DMatrix<f64>, &DMatrix<f64>) {
        let (_, f, i) = self.kernels.iter().find(|(mm, _, _)| *mm == m).expect("kernel planned for every sector entry");
        (f, i)
    }

    pub fn n_k(&self) -> usize {
        self.n_k
    }

    /// Radial frequency of row `i`.
    pub fn k(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            (i as f64 - 0.5) * self.dk
        }
    }

    pub fn kz(&self) -> &[f64] {
        &self.kz
    }

    fn check(&self, f: &CylField) -> Result<()> {
        if f.grid != self.grid || f.sector != self.sector {
            return Err(LabError::GridMismatch("field and transform disagree on grid or sector".into()));
        }
        Ok(())
    }

    pub fn forward(&self, f: &CylField) -> Result<CylHat> {
        self.check(f)?;
        let g = self.grid;
        let (nzp, rows) = (self.nzp, self.n_k + 1);
        let dz = g.d_z();
        let dr = g.d_rho();
        let mut out = zero_components(rows * nzp);
        for c in 0..4 {
            if f.data[c].iter().all(|v| *v == ZERO) {
                continue;
            }
            let m = self.sector.m[c];
            let cols: Vec<Vec<Complex64>> = (0..g.n_rho)
                .map(|j| {
                    let mut col = vec![ZERO; nzp];
                    for k in 0..g.n_z {
                        col[k] = f.data[c][g.index(j, k)] * dz;
                    }
                    self.fft.forward(&mut col);
                    col
                })
                .collect();
            let b =
                DMatrix::from_fn(g.n_rho, 2 * nzp, |j, n| if n < nzp { cols[j][n].re } else { cols[j][n - nzp].im });
            let prod = self.kernel(m).0 * b;
            for n in 0..nzp {
                let axis = if m == 0 { (9.0 * cols[0][n] - cols[1][n]) / 8.0 * (dr * dr / 24.0) } else { ZERO };
                for i in 0..rows {
                    out[c][n * rows + i] = Complex64::new(prod[(i, n)], prod[(i, n + nzp)]) - axis;
                }
            }
        }
        Ok(CylHat { data: out })
    }

    /// Inverse transform sampled at arbitrary radii `rhos` and the grid's
    /// `z` nodes; layout `k * rhos.len() + j`.
    pub fn inverse_at(&self, hat: &CylHat, rhos: &[f64]) -> Components {
        let g = self.grid;
        let (nzp, rows) = (self.nzp, self.n_k + 1);
        let nr = rhos.len();
        let on_grid = nr == g.n_rho && rhos.iter().enumerate().all(|(j, r)| *r == g.rho(j));
        let mut out = zero_components(nr * g.n_z);
        for c in 0..4 {
            if hat.data[c].iter().all(|v| *v == ZERO) {
                continue;
            }
            let m = self.sector.m[c];
            let b = DMatrix::from_fn(rows, 2 * nzp, |i, n| {
                let v = hat.data[c][(n % nzp) * rows + i];
                if n < nzp {
                    v.re
                } else {
                    v.im
                }
            });
            let prod =
                if on_grid { self.kernel(m).1 * b } else { Self::inverse_kernel(m, &self.kw, self.dk, rhos) * b };
            let mut col = vec![ZERO; nzp];
            for j in 0..nr {
                for n in 0..nzp {
                    col[n] = Complex64::new(prod[(j, n)], prod[(j, n + nzp)]);
                }
                self.fft.inverse(&mut col);
                for k in 0..g.n_z {
                    out[c][k * nr + j] = col[k] / g.d_z();
                }
            }
        }
        out
    }

    pub fn inverse(&self, hat: &CylHat) -> CylField {
        let rhos: Vec<f64> = (0..self.grid.n_rho).map(|j| self.grid.rho(j)).collect();
        CylField { grid: self.grid, sector: self.sector, data: self.inverse_at(hat, &rhos) }
    }

    /// Multiplies every coefficient by `m(k, k_z)`.
    pub fn multiply(&self, hat: &CylHat, m: impl Fn(f64, f64) -> f64) -> CylHat {
        let rows = self.n_k + 1;
        let mut out = hat.clone();
        for c in 0..4 {
            for (idx, v) in out.data[c].iter_mut().enumerate() {
                *v *= m(self.k(idx % rows), self.kz[idx / rows]);
            }
        }
        out
    }

    /// `‖|D|^s f‖_{L²}² = ∫∫ (k² + k_z²)^s |G|² k dk dk_z`.
    pub fn sobolev_l2(&self, f: &CylField) -> Result<f64> {
        self.sobolev_l2_of(&self.forward(f)?, 0.0)
    }

    /// `‖|D|^s f‖_{L²}` from precomputed coefficients.
    pub fn sobolev_l2_of(&self, hat: &CylHat, s: f64) -> Result<f64> {
        let rows = self.n_k + 1;
        let dkz = 2.0 * PI / (self.nzp as f64 * self.grid.d_z());
        let mut terms = Vec::with_capacity(4 * hat.data[0].len());
        for c in 0..4 {
            for (idx, v) in hat.data[c].iter().enumerate() {
                let (i, kz) = (idx % rows, self.kz[idx / rows]);
                terms.push(self.kw[i] * weight(self.k(i), kz, 2.0 * s) * v.norm_sqr());
            }
        }
        Ok((pairwise_sum(&terms) * dkz).max(0.0).sqrt())
    }

    /// `|D|^s f`.
    pub fn abs_d(&self, f: &CylField, s: f64) -> Result<CylField> {
        check_padding(f)?;
        let hat = self.forward(f)?;
        Ok(self.inverse(&self.multiply(&hat, |k, kz| weight(k, kz, s))))
    }

    /// `‖|D|^s f‖_{L^q}`.
    pub fn sobolev_q(&self, f: &CylField, s: f64, q: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(LabError::Parameter(format!("smoothness must be >= 0, got {s}")));
        }
        if s == 0.0 {
            return f.lq_norm(q);
        }
        self.abs_d(f, s)?.lq_norm(q)
    }

    /// `e^{itD}` on coefficients: `exp(i t α·(0, k, k_z))` at every `(k, k_z)`.
    /// `D = −iα·∇`, symbol `α·ξ`, on transformed data.
    pub fn dirac(&self, hat: &CylHat) -> CylHat {
        let rows = self.n_k + 1;
        let mut out = hat.clone();
        for idx in 0..hat.data[0].len() {
            let v = [0.0, self.k(idx % rows), self.kz[idx / rows]];
            let s: Spinor = std::array::from_fn(|c| hat.data[c][idx]);
            let e = alpha_dot(v, &s);
            for c in 0..4 {
                out.data[c][idx] = e[c];
            }
        }
        out
    }

    pub fn free_flow(&self, hat: &CylHat, t: f64) -> CylHat {
        let rows = self.n_k + 1;
        let mut out = hat.clone();
        for idx in 0..hat.data[0].len() {
            let v = [0.0, self.k(idx % rows), self.kz[idx / rows]];
            let s: Spinor = std::array::from_fn(|c| hat.data[c][idx]);
            let e = exp_i_alpha_dot_apply(v, t, &s);
            for c in 0..4 {
                out.data[c][idx] = e[c];
            }
        }
        out
    }
}

/// `(k² + k_z²)^{s/2}`, zero at the origin for `s > 0`.
fn weight(k: f64, kz: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    let k2 = k * k + kz * kz;
    if k2 == 0.0 {
        0.0
    } else {
        k2.powf(0.5 * s)
    }
}

pub fn check_padding(f: &CylField) -> Result<()> {
    let ratio = f.edge_ratio();
    if ratio > crate::norms::PADDING_TOL {
        return Err(LabError::Padding { ratio, limit: crate::norms::PADDING_TOL });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid3, SpinorField3D};
    use crate::norms::fractional_sobolev;
    use crate::spectral::Spectral3;
    use magdirac_core::interp::SpinorJet;
    use magdirac_core::quasimode::LandauMode;

    const Z0: f64 = 5.0;
    const B: f64 = 18.0;

    /// Rings around the axis: `e^{−iθ}` and `(1 + x₃ − z₀)` times
    /// `e^{−((ρ−6)² + (z−z₀)²)/2}`, and a wider `e^{−iθ}` ring in the third slot.
    fn field(x: [f64; 3]) -> Spinor {
        let (a, b, z) = (x[0], x[1], x[2] - Z0);
        let rho = (a * a + b * b).sqrt().max(1e-300);
        let turn = Complex64::new(a, -b) / rho;
        let e = (-((rho - 6.0).powi(2) + z * z) / 2.0).exp();
        let e2 = (-((rho - 8.0).powi(2) + z * z) / 3.0).exp();
        [turn * e, Complex64::new((1.0 + z) * e, 0.0), Complex64::new(0.0, 0.5) * turn * e2, ZERO]
    }

    fn cyl(n_rho: usize, n_z: usize) -> (CylTransform, CylField) {
        let g = CylGrid::new(B, n_rho, Z0 - B, Z0 + B, n_z).unwrap();
        let s = Sector::chiral(0);
        (CylTransform::new(g, s), CylField::sample(g, s, field))
    }

    fn cube(n: usize) -> SpinorField3D {
        let g = Grid3::cell_centred([-B, -B, Z0 - B], [B, B, Z0 + B], [n, n, n]).unwrap();
        SpinorField3D::sample(g, 0.0, field)
    }

    #[test]
    fn detects_sectors() {
        assert_eq!(Sector::detect(&LandauMode::Plus).unwrap(), Sector::chiral(0));
        assert_eq!(Sector::detect(&LandauMode::Zero).unwrap(), Sector::chiral(0));
        struct Mixed;
        impl Profile for Mixed {
            fn lambda(&self) -> f64 {
                0.0
            }
            fn jet(&self, u: [f64; 2]) -> SpinorJet {
                let e = (-(u[0] * u[0] + u[1] * u[1])).exp();
                let mut j = SpinorJet::ZERO;
                j.value[1] = Complex64::new(e * (1.0 + u[0]), 0.0);
                j
            }
        }
        assert!(Sector::detect(&Mixed).is_err());
    }

    #[test]
    fn lebesgue_norms_match_cartesian() {
        let (t, f) = cyl(96, 96);
        let c = cube(96);
        for q in [4.0 / 3.0, 2.0, 4.0] {
            let a = f.lq_norm(q).unwrap();
            let b = crate::norms::lq_norm(&c, q).unwrap();
            assert!((a / b - 1.0).abs() < 1e-9, "q={q}: {a} {b}");
        }
        let l2 = f.lq_norm(2.0).unwrap();
        assert!((t.sobolev_l2(&f).unwrap() / l2 - 1.0).abs() < 1e-7);
        assert_eq!(f.lq_norm(f64::INFINITY).unwrap(), f.modulus().iter().cloned().fold(0.0, f64::max));
    }

    #[test]
    fn sobolev_norms_match_cartesian() {
        let (t, f) = cyl(96, 96);
        let c = cube(96);
        let hat = t.forward(&f).unwrap();
        for s in [0.5, 1.0, 2.0] {
            let a = t.sobolev_l2_of(&hat, s).unwrap();
            let b = fractional_sobolev(&c, s, 2.0).unwrap();
            assert!((a / b - 1.0).abs() < 1e-4, "s={s}: {a} {b}");
        }
        for (s, q) in [(0.5, 2.0), (1.0, 2.0), (1.0, 4.0)] {
            let a = t.sobolev_q(&f, s, q).unwrap();
            let b = fractional_sobolev(&c, s, q).unwrap();
            assert!((a / b - 1.0).abs() < 3e-4, "s={s} q={q}: {a} {b}");
        }
        // The |x|⁻⁴ tail of |D|f makes L^{4/3} sensitive to the box shape.
        let a = t.sobolev_q(&f, 1.0, 4.0 / 3.0).unwrap();
        let b = fractional_sobolev(&c, 1.0, 4.0 / 3.0).unwrap();
        assert!((a / b - 1.0).abs() < 5e-3, "{a} {b}");
        let back = t.inverse(&hat);
        let err = (0..4)
            .map(|c| back.data[c].iter().zip(&f.data[c]).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        assert!(err < 5e-6, "{err}");
    }

    #[test]
    fn dirac_matches_cartesian_gradient() {
        let (tr, f) = cyl(96, 96);
        let n = 97;
        let g = Grid3::cell_centred([-B, -B, Z0 - B], [B, B, Z0 + B], [n, n, 96]).unwrap();
        let c = SpinorField3D::sample(g, 0.0, field);
        let sp = Spectral3::new(g);
        let grads: Vec<[Vec<Complex64>; 3]> = (0..4).map(|k| sp.gradient(&c.data[k])).collect();
        let js: Vec<usize> = (n / 2 + 1..n).collect();
        let rhos: Vec<f64> = js.iter().map(|&i| g.coord(0, i)).collect();
        let d = tr.inverse_at(&tr.dirac(&tr.forward(&f).unwrap()), &rhos);
        let mut err = 0.0f64;
        for k in 0..96 {
            for (a, &i) in js.iter().enumerate() {
                let idx = g.index(i, n / 2, k);
                // −iα·∇ = −i Σ α_j ∂_j, assembled column by column.
                let mut expect = [ZERO; 4];
                for j in 0..3 {
                    let mut e = [0.0; 3];
                    e[j] = 1.0;
                    let dj: Spinor = std::array::from_fn(|comp| grads[comp][j][idx]);
                    let t = alpha_dot(e, &dj);
                    for comp in 0..4 {
                        expect[comp] += Complex64::new(0.0, -1.0) * t[comp];
                    }
                }
                for comp in 0..4 {
                    err = err.max((d[comp][k * rhos.len() + a] - expect[comp]).norm());
                }
            }
        }
        assert!(err < 5e-6, "{err}");
        let twice = tr.dirac(&tr.dirac(&tr.forward(&f).unwrap()));
        let lap = tr.multiply(&tr.forward(&f).unwrap(), |k, kz| k * k + kz * kz);
        for comp in 0..4 {
            for (a, b) in twice.data[comp].iter().zip(&lap.data[comp]) {
                assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
            }
        }
    }

    #[test]
    fn free_flow_matches_cartesian_propagator() {
        let (tr, f) = cyl(96, 96);
        let n = 97;
        let g = Grid3::cell_centred([-B, -B, Z0 - B], [B, B, Z0 + B], [n, n, 96]).unwrap();
        let c = SpinorField3D::sample(g, 0.0, field);
        let t = 1.3;
        let sp = Spectral3::new(g);
        let hats: Vec<Vec<Complex64>> = (0..4).map(|k| sp.forward(&c.data[k])).collect();
        let mut evolved: Vec<Vec<Complex64>> = hats.clone();
        for idx in 0..g.len() {
            let s: Spinor = std::array::from_fn(|k| hats[k][idx]);
            let e = exp_i_alpha_dot_apply(sp.xi(idx), t, &s);
            for k in 0..4 {
                evolved[k][idx] = e[k];
            }
        }
        evolved.iter_mut().for_each(|v| sp.fft.inverse(v));
        // Nodes on the half-line y₂ = 0, y₁ > 0 (the middle row of an odd grid).
        let js: Vec<usize> = (n / 2 + 1..n).collect();
        let rhos: Vec<f64> = js.iter().map(|&i| g.coord(0, i)).collect();
        let moved = tr.inverse_at(&tr.free_flow(&tr.forward(&f).unwrap(), t), &rhos);
        let mut err = 0.0f64;
        for k in 0..96 {
            for (a, &i) in js.iter().enumerate() {
                let idx = g.index(i, n / 2, k);
                for comp in 0..4 {
                    err = err.max((moved[comp][k * rhos.len() + a] - evolved[comp][idx]).norm());
                }
            }
        }
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn padding_and_grids() {
        let g = CylGrid::new(3.0, 32, Z0 - 3.0, Z0 + 3.0, 32).unwrap();
        let f = CylField::sample(g, Sector::chiral(0), field);
        assert!(matches!(CylTransform::new(g, f.sector).sobolev_q(&f, 1.0, 2.0), Err(LabError::Padding { .. })));
        assert!(CylGrid::new(0.0, 32, 0.0, 1.0, 32).is_err());
        assert_eq!(g.refined().d_rho(), g.d_rho() / 2.0);
        assert!(f.lq_norm(0.5).is_err());
    }
}

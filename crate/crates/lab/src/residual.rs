//! PDE residuals of the truncated standing wave `W_R`.

use magdirac_core::dirac::{alpha_dot, Spinor};
use magdirac_core::potential::{eval_a, linear_part};
use magdirac_core::quasimode::{Profile, Quasimode};
use num_complex::Complex64;

use crate::cylinder::{check_padding, CylField, CylGrid, CylTransform, Sector};
use crate::error::Result;

/// Which magnetic operator the residual is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// `z^{−δ} M(y, 0)ᵗ` with source `F_R`.
    Linear,
    /// The full `A` with source `F̃_R`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub t: f64,
    pub operator: Operator,
    /// `‖i∂_tW_R + D_A W_R − source‖₂`.
    pub absolute: f64,
    /// `‖source‖₂`.
    pub source: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        self.absolute / self.source
    }
}

/// Residual of `i∂_t u + (−iα·∇ − α·A) u = source` at `u = W_R(t)`, with the
/// time derivative taken from the phase and `∇` spectral on `grid`.
pub fn residual<P>(qm: &Quasimode<'_, P>, grid: CylGrid, t: f64, operator: Operator) -> Result<Residual>
where
    P: Profile + Sync + ?Sized,
{
    let sector = Sector::detect(qm.profile)?;
    let tr = CylTransform::new(grid, sector);
    let w = CylField::sample(grid, sector, |x| qm.w_r(t, x));
    check_padding(&w)?;
    let dw = tr.inverse(&tr.dirac(&tr.forward(&w)?));
    let source = CylField::sample(grid, sector, |x| match operator {
        Operator::Linear => qm.f_r_source(t, x),
        Operator::Full => qm.f_tilde(t, x),
    });
    let (lambda, delta) = (qm.profile.lambda(), qm.params.delta);
    let mut r = CylField::zeros(grid, sector);
    for k in 0..grid.n_z {
        let z = grid.z(k);
        for j in 0..grid.n_rho {
            let idx = grid.index(j, k);
            let x = [grid.rho(j), 0.0, z];
            let wv: Spinor = std::array::from_fn(|c| w.data[c][idx]);
            let aw = if z > 0.0 && wv.iter().any(|v| *v != Complex64::new(0.0, 0.0)) {
                let a = match operator {
                    Operator::Linear => linear_part(delta, x)?,
                    Operator::Full => eval_a(delta, x)?,
                };
                alpha_dot(a, &wv)
            } else {
                [Complex64::new(0.0, 0.0); 4]
            };
            // i∂_t W_R = −λ z^{−δ/2} W_R.
            let dt = if z > 0.0 { -lambda * z.powf(-0.5 * delta) } else { 0.0 };
            for c in 0..4 {
                r.data[c][idx] = wv[c] * dt + dw.data[c][idx] - aw[c] - source.data[c][idx];
            }
        }
    }
    Ok(Residual { t, operator, absolute: r.lq_norm(2.0)?, source: source.lq_norm(2.0)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use magdirac_core::cutoff::make_cutoffs;
    use magdirac_core::params::ConstructionParams;
    use magdirac_core::quasimode::LandauMode;

    fn grid(params: &ConstructionParams, n: usize) -> CylGrid {
        CylGrid::reference(params, n, n).unwrap()
    }

    #[test]
    fn landau_profile_residuals() {
        // The analytic constant-field modes carry the same algebra as the cached ones.
        let params = ConstructionParams::new(1.5, 0.8, 0.75, 8.0).unwrap();
        for profile in [LandauMode::Plus, LandauMode::Zero] {
            let qm = Quasimode::new(params, make_cutoffs(), &profile);
            for t in [0.0, 1.0] {
                let r = residual(&qm, grid(&params, 512), t, Operator::Linear).unwrap();
                assert!(r.relative() < 1e-3, "{profile:?} t={t}: {r:?}");
            }
            let r = residual(&qm, grid(&params, 512), 1.0, Operator::Full).unwrap();
            assert!(r.relative() < 1e-3, "{profile:?} full: {r:?}");
        }
    }

    #[test]
    fn wrong_source_is_detected() {
        let params = ConstructionParams::new(1.5, 0.8, 0.75, 8.0).unwrap();
        let qm = Quasimode::new(params, make_cutoffs(), &LandauMode::Plus);
        // Against the full operator the untilded source misses the remainder term.
        let full = residual(&qm, grid(&params, 384), 1.0, Operator::Full).unwrap();
        assert!(full.relative() < 5e-3, "{full:?}");
        let mixed = {
            let sector = Sector::detect(qm.profile).unwrap();
            let g = grid(&params, 384);
            let a = CylField::sample(g, sector, |x| qm.f_r_source(1.0, x));
            let b = CylField::sample(g, sector, |x| qm.f_tilde(1.0, x));
            let mut d = a.clone();
            for c in 0..4 {
                for (u, v) in d.data[c].iter_mut().zip(&b.data[c]) {
                    *u -= v;
                }
            }
            d.lq_norm(2.0).unwrap() / a.lq_norm(2.0).unwrap()
        };
        assert!(mixed > 10.0 * full.relative(), "{mixed} {full:?}");
    }
}

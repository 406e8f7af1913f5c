//! Numerical check of `D_A² = −Δ_A + 2 S·B` for `D_A = −iα·∇ − α·A`,
//! `Δ_A = (∇ − iA)²`, `S = (i/4) α∧α`, `B = curl A`.

use magdirac_core::dirac::{alpha_dot, mat_vec, DiracMatrixSet, Spinor};
use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{Grid3, SpinorField3D};
use crate::spectral::Spectral3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `D_A u` with spectral derivatives.
pub fn apply_dirac<F>(sp: &Spectral3, a_eval: &F, u: &SpinorField3D) -> SpinorField3D
where
    F: Fn([f64; 3]) -> [f64; 3] + Sync,
{
    let g = sp.grid;
    let grads: Vec<[Vec<Complex64>; 3]> = u.data.iter().map(|c| sp.gradient(c)).collect();
    let mut out = SpinorField3D::zeros(g, u.time);
    for idx in 0..g.len() {
        let a = a_eval(g.point(idx));
        let s = u.get(idx);
        let mut v: Spinor = alpha_dot(a, &s).map(|c| -c);
        for (axis, e) in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].iter().enumerate() {
            let d: Spinor = std::array::from_fn(|c| grads[c][axis][idx]);
            let t = alpha_dot(*e, &d);
            for c in 0..4 {
                v[c] -= I * t[c];
            }
        }
        out.set(idx, &v);
    }
    out
}

/// `curl A` and `div A` by fourth-order central differences with step `h`.
pub fn curl_div<F: Fn([f64; 3]) -> [f64; 3]>(a_eval: &F, x: [f64; 3], h: f64) -> ([f64; 3], f64) {
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let at = |s: f64| {
            let mut y = x;
            y[j] += s * h;
            a_eval(y)
        };
        let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
        for i in 0..3 {
            jac[i][j] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
        }
    }
    let curl = [jac[2][1] - jac[1][2], jac[0][2] - jac[2][0], jac[1][0] - jac[0][1]];
    (curl, jac[0][0] + jac[1][1] + jac[2][2])
}

/// Relative `L²` residual `‖D_A²u − (−Δ_A u + 2(S·B)u)‖ / ‖D_A²u‖` for a
/// Gaussian test spinor centred in the box with width `1/16` of its shortest
/// side. `B` and `div A` come from finite differences of `a_eval`.
pub fn check_square_identity<F>(a_eval: F, grid: Grid3) -> Result<f64>
where
    F: Fn([f64; 3]) -> [f64; 3] + Sync,
{
    square_residual(&a_eval, grid, 1.0)
}

pub(crate) fn square_residual<F>(a_eval: &F, grid: Grid3, spin_sign: f64) -> Result<f64>
where
    F: Fn([f64; 3]) -> [f64; 3] + Sync,
{
    let sp = Spectral3::new(grid);
    let centre: [f64; 3] = std::array::from_fn(|a| grid.origin[a] + 0.5 * (grid.dims[a] - 1) as f64 * grid.spacing[a]);
    let side = (0..3).map(|a| grid.dims[a] as f64 * grid.spacing[a]).fold(f64::INFINITY, f64::min);
    let w = side / 16.0;
    let amp =
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.7), Complex64::new(-0.4, 0.2), Complex64::new(0.3, -0.5)];
    let u = SpinorField3D::sample(grid, 0.0, |x| {
        let r2: f64 = (0..3).map(|a| (x[a] - centre[a]).powi(2)).sum();
        let e = (-r2 / (2.0 * w * w)).exp();
        let ph = Complex64::from_polar(1.0, 0.3 * (x[0] - centre[0]) / w);
        amp.map(|c| c * e * ph)
    });
    let lhs = apply_dirac(&sp, a_eval, &apply_dirac(&sp, a_eval, &u));
    let set = DiracMatrixSet::standard();
    let fd_h = 1e-3 * w;
    let mut rhs = SpinorField3D::zeros(grid, 0.0);
    let lap: Vec<Vec<Complex64>> = u.data.iter().map(|c| sp.laplacian(c)).collect();
    let grads: Vec<[Vec<Complex64>; 3]> = u.data.iter().map(|c| sp.gradient(c)).collect();
    for idx in 0..grid.len() {
        let x = grid.point(idx);
        let a = a_eval(x);
        let (b, div) = curl_div(a_eval, x, fd_h);
        let s = u.get(idx);
        let a2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
        let sb = mat_vec(&set.spin_dot_matrix(b), &s);
        let v: Spinor = std::array::from_fn(|c| {
            let adot: Complex64 = (0..3).map(|k| grads[c][k][idx] * a[k]).sum();
            -lap[c][idx] + I * div * s[c] + 2.0 * I * adot + a2 * s[c] + 2.0 * spin_sign * sb[c]
        });
        rhs.set(idx, &v);
    }
    Ok(lhs.sub(&rhs)?.l2_norm() / lhs.l2_norm())
}

//! Piecewise bicubic Hermite interpolation of a sampled 2D spinor field.

use alloc::vec::Vec;

use crate::dirac::{Spinor, ZERO_SPINOR};
use crate::{Complex64, Error, Result};

/// Value and first partials of an interpolated spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorJet {
    /// `v`.
    pub value: Spinor,
    /// `∂₁v`.
    pub d1: Spinor,
    /// `∂₂v`.
    pub d2: Spinor,
}

impl SpinorJet {
    /// All-zero jet.
    pub const ZERO: SpinorJet = SpinorJet { value: ZERO_SPINOR, d1: ZERO_SPINOR, d2: ZERO_SPINOR };
}

/// Uniform tensor grid carrying `v`, `∂₁v`, `∂₂v`, `∂₁∂₂v` at every node.
///
/// Node `(j1, j2)` sits at `(x0 + j1 h, x0 + j2 h)`; storage is row-major with
/// `y₂` as the slow index. Outside the node hull the interpolant is zero.
#[derive(Debug, Clone)]
pub struct HermiteGrid {
    x0: f64,
    h: f64,
    n: usize,
    v: Vec<Spinor>,
    d1: Vec<Spinor>,
    d2: Vec<Spinor>,
    d12: Vec<Spinor>,
}

impl HermiteGrid {
    /// Assembles a grid; every array must hold `n²` spinors.
    pub fn new(
        x0: f64,
        h: f64,
        n: usize,
        v: Vec<Spinor>,
        d1: Vec<Spinor>,
        d2: Vec<Spinor>,
        d12: Vec<Spinor>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: n });
        }
        if !(h > 0.0) {
            return Err(Error::Domain("grid spacing must be positive"));
        }
        for a in [&v, &d1, &d2, &d12] {
            if a.len() != n * n {
                return Err(Error::Domain("Hermite data length must be n*n"));
            }
        }
        Ok(Self { x0, h, n, v, d1, d2, d12 })
    }

    /// Half-width of the covered square, measured from the origin.
    pub fn extent(&self) -> f64 {
        (self.x0.abs()).max((self.x0 + (self.n - 1) as f64 * self.h).abs())
    }

    /// Value and gradient at `u`.
    pub fn eval(&self, u: [f64; 2]) -> SpinorJet {
        let s1 = (u[0] - self.x0) / self.h;
        let s2 = (u[1] - self.x0) / self.h;
        let last = (self.n - 1) as f64;
        if !(s1 >= 0.0 && s2 >= 0.0 && s1 <= last && s2 <= last) {
            return SpinorJet::ZERO;
        }
        let i1 = (s1 as usize).min(self.n - 2);
        let i2 = (s2 as usize).min(self.n - 2);
        let (t1, t2) = (s1 - i1 as f64, s2 - i2 as f64);
        let (b1, db1) = basis(t1);
        let (b2, db2) = basis(t2);
        let h = self.h;
        let mut out = SpinorJet::ZERO;
        for c2 in 0..2 {
            for c1 in 0..2 {
                let k = (i2 + c2) * self.n + i1 + c1;
                // Weights for (v, ∂₁v, ∂₂v, ∂₁∂₂v) at this corner.
                let wv = [
                    b1[c1][0] * b2[c2][0],
                    h * b1[c1][1] * b2[c2][0],
                    h * b1[c1][0] * b2[c2][1],
                    h * h * b1[c1][1] * b2[c2][1],
                ];
                let wx = [
                    db1[c1][0] * b2[c2][0],
                    h * db1[c1][1] * b2[c2][0],
                    h * db1[c1][0] * b2[c2][1],
                    h * h * db1[c1][1] * b2[c2][1],
                ];
                let wy = [
                    b1[c1][0] * db2[c2][0],
                    h * b1[c1][1] * db2[c2][0],
                    h * b1[c1][0] * db2[c2][1],
                    h * h * b1[c1][1] * db2[c2][1],
                ];
                let data = [&self.v[k], &self.d1[k], &self.d2[k], &self.d12[k]];
                for c in 0..4 {
                    let mut a = Complex64::new(0.0, 0.0);
                    let mut gx = a;
                    let mut gy = a;
                    for (m, d) in data.iter().enumerate() {
                        a += d[c] * wv[m];
                        gx += d[c] * wx[m];
                        gy += d[c] * wy[m];
                    }
                    out.value[c] += a;
                    out.d1[c] += gx / h;
                    out.d2[c] += gy / h;
                }
            }
        }
        out
    }
}

/// Hermite cubic basis at local coordinate `t`: for corner 0 and 1, the
/// (value, slope) shape functions and their `t`-derivatives.
#[inline]
fn basis(t: f64) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let t2 = t * t;
    let t3 = t2 * t;
    let b = [[2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t], [-2.0 * t3 + 3.0 * t2, t3 - t2]];
    let db = [[6.0 * t2 - 6.0 * t, 3.0 * t2 - 4.0 * t + 1.0], [-6.0 * t2 + 6.0 * t, 3.0 * t2 - 2.0 * t]];
    (b, db)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64, f64) -> [f64; 4], x0: f64, h: f64, n: usize) -> HermiteGrid {
        let mut arrs: [Vec<Spinor>; 4] = Default::default();
        for j2 in 0..n {
            for j1 in 0..n {
                let vals = f(x0 + j1 as f64 * h, x0 + j2 as f64 * h);
                for (a, val) in arrs.iter_mut().zip(vals) {
                    a.push([
                        Complex64::new(val, -val),
                        Complex64::new(0.0, 0.0),
                        Complex64::new(2.0 * val, 0.0),
                        Complex64::new(0.0, val),
                    ]);
                }
            }
        }
        let [v, d1, d2, d12] = arrs;
        HermiteGrid::new(x0, h, n, v, d1, d2, d12).unwrap()
    }

    #[test]
    fn reproduces_bicubics_exactly() {
        let f = |x: f64, y: f64| {
            [x * x * x - 2.0 * x * y * y + y + 1.0, 3.0 * x * x - 2.0 * y * y, -4.0 * x * y + 1.0, -4.0 * y]
        };
        let g = sample(f, -2.0, 0.5, 9);
        for &(x, y) in &[(0.3, -1.1), (-1.9, 1.7), (1.2, 0.25)] {
            let j = g.eval([x, y]);
            let e = f(x, y);
            assert!((j.value[0].re - e[0]).abs() < 1e-12);
            assert!((j.value[0].im + e[0]).abs() < 1e-12);
            assert!((j.d1[2].re - 2.0 * e[1]).abs() < 1e-11);
            assert!((j.d2[3].im - e[2]).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_outside_hull() {
        let g = sample(|_, _| [1.0, 0.0, 0.0, 0.0], -1.0, 0.5, 5);
        assert_eq!(g.eval([1.01, 0.0]).value, ZERO_SPINOR);
        assert_eq!(g.eval([0.0, -3.0]).value, ZERO_SPINOR);
        assert_eq!(g.eval([0.2, 0.1]).value[0].re, 1.0);
        assert_eq!(g.extent(), 1.0);
    }

    /// Values converge at fourth order and gradients at third order.
    #[test]
    fn gaussian_convergence_orders() {
        let f = |x: f64, y: f64| {
            let e = (-(x * x + y * y) / 2.0).exp();
            [e, -x * e, -y * e, x * y * e]
        };
        let errors = |h: f64| {
            let n = (16.0 / h) as usize + 1;
            let g = sample(f, -8.0, h, n);
            let (mut ev, mut eg) = (0.0f64, 0.0f64);
            for k in 0..50 {
                let (x, y) = (-2.0 + 0.0837 * k as f64, 1.3 - 0.0511 * k as f64);
                let (j, e) = (g.eval([x, y]), f(x, y));
                ev = ev.max((j.value[0].re - e[0]).abs());
                eg = eg.max((j.d1[0].re - e[1]).abs()).max((j.d2[0].re - e[2]).abs());
            }
            (ev, eg)
        };
        let (v1, g1) = errors(1.0 / 8.0);
        let (v2, g2) = errors(1.0 / 16.0);
        assert!(v2 < 5e-7 && g2 < 2e-5, "{v2} {g2}");
        let (ov, og) = ((v1 / v2).log2(), (g1 / g2).log2());
        assert!(ov > 3.5, "value order {ov}");
        assert!(og > 2.5, "gradient order {og}");
    }
}

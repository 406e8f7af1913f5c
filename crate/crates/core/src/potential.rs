//! The homogeneous magnetic potential `A(x) = |x|^{−δ} M x` and its exact
//! first-order Taylor split around the degenerate direction `P = (0, 0, 1)`.

use crate::{Error, Result};

/// The antisymmetric matrix `M = [[0, 1, 0], [−1, 0, 0], [0, 0, 0]]`.
pub const M: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];

/// `M x`.
#[inline]
pub fn apply_m(x: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (r, o) in out.iter_mut().enumerate() {
        *o = M[r][0] * x[0] + M[r][1] * x[1] + M[r][2] * x[2];
    }
    out
}

/// `A(x) = |x|^{−δ} M x`. The origin is a domain error.
#[inline]
pub fn eval_a(delta: f64, x: [f64; 3]) -> Result<[f64; 3]> {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if r2 == 0.0 {
        return Err(Error::Domain("A is singular at the origin"));
    }
    let f = libm::pow(r2, -0.5 * delta);
    let mx = apply_m(x);
    Ok([f * mx[0], f * mx[1], f * mx[2]])
}

/// Linear part `z^{−δ} M (y, 0)ᵗ = z^{−δ} (y₂, −y₁, 0)`, defined for `z > 0`.
#[inline]
pub fn linear_part(delta: f64, x: [f64; 3]) -> Result<[f64; 3]> {
    if x[2] <= 0.0 {
        return Err(Error::Domain("linearised potential needs z > 0"));
    }
    let f = libm::pow(x[2], -delta);
    let m = apply_m([x[0], x[1], 0.0]);
    Ok([f * m[0], f * m[1], f * m[2]])
}

/// Exact remainder `R₁(w) = [(1 + |w|²)^{−δ/2} − 1] (w₂, −w₁, 0)`.
///
/// With it `A(y, z) = z^{−δ} M(y, 0)ᵗ + z^{1−δ} R₁(y/z)` holds identically for `z > 0`,
/// and `|R₁(w)| ≤ (δ/2)|w|³ ≤ |w|²` on `|w| < 1`.
#[inline]
pub fn remainder_r1(delta: f64, w: [f64; 2]) -> [f64; 3] {
    let r2 = w[0] * w[0] + w[1] * w[1];
    // expm1 keeps the small-|w| regime accurate.
    let f = libm::expm1(-0.5 * delta * libm::log1p(r2));
    let m = apply_m([w[0], w[1], 0.0]);
    [f * m[0], f * m[1], f * m[2]]
}

/// `z^{1−δ} R₁(y/z)` at `x = (y, z)`, `z > 0`.
#[inline]
pub fn remainder_term(delta: f64, x: [f64; 3]) -> Result<[f64; 3]> {
    if x[2] <= 0.0 {
        return Err(Error::Domain("Taylor split needs z > 0"));
    }
    let z = x[2];
    let r = remainder_r1(delta, [x[0] / z, x[1] / z]);
    let f = libm::pow(z, 1.0 - delta);
    Ok([f * r[0], f * r[1], f * r[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direct_values() {
        let a = eval_a(1.5, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(a, [0.0, -1.0, 0.0]);
        assert!(eval_a(1.5, [0.0; 3]).is_err());
    }

    #[test]
    fn remainder_reference_value() {
        // (1.01)^{-0.75} - 1 = -7.43490...e-4, times (0, -0.1, 0).
        let r = remainder_r1(1.5, [0.1, 0.0]);
        assert_eq!(r[0], 0.0);
        assert!((r[1] - 7.434_9e-4).abs() < 1e-7, "{r:?}");
        assert_eq!(r[2], 0.0);
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        assert!(n <= 0.01);
    }

    proptest! {
        #[test]
        fn homogeneity(x in [-5.0..5.0f64, -5.0..5.0f64, 0.1..5.0f64], delta in 1.01..1.99f64) {
            let a1 = eval_a(delta, x).unwrap();
            let a2 = eval_a(delta, [2.0 * x[0], 2.0 * x[1], 2.0 * x[2]]).unwrap();
            let f = 2f64.powf(1.0 - delta);
            for k in 0..3 {
                prop_assert!((a2[k] - f * a1[k]).abs() < 1e-13 * (1.0 + a1[k].abs()));
            }
        }

        #[test]
        fn exact_taylor_identity(x in [-8.0..8.0f64, -8.0..8.0f64, 0.05..10.0f64], delta in 1.01..1.99f64) {
            let a = eval_a(delta, x).unwrap();
            let lin = linear_part(delta, x).unwrap();
            let rem = remainder_term(delta, x).unwrap();
            for k in 0..3 {
                let scale = 1.0 + lin[k].abs() + rem[k].abs();
                prop_assert!((a[k] - lin[k] - rem[k]).abs() < 1e-13 * scale);
            }
        }

        #[test]
        fn remainder_quadratic_bound(w in [-0.7..0.7f64, -0.7..0.7f64], delta in 1.01..1.99f64) {
            let r = remainder_r1(delta, w);
            let w2 = w[0] * w[0] + w[1] * w[1];
            prop_assume!(w2 < 1.0);
            let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            prop_assert!(n <= w2 + 1e-16);
        }
    }
}

//! Dense 4×4 Dirac algebra in the standard (Pauli) representation.
//!
//! `α_k = [[0, σ_k], [σ_k, 0]]`, so every contraction `α·v` is block
//! off-diagonal with the 2×2 block `σ·v = [[v₃, v₁ − i v₂], [v₁ + i v₂, −v₃]]`.
//! The hot paths (`alpha_dot`, `exp_i_alpha_dot_apply`) are unrolled on that
//! block structure; the dense matrices are kept for tests and for assembling
//! spin terms.

use crate::Complex64;

/// Four-component spinor.
pub type Spinor = [Complex64; 4];
/// Dense 4×4 complex matrix, row-major.
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// The zero spinor.
pub const ZERO_SPINOR: Spinor = [ZERO; 4];

/// Dirac matrices `α₁, α₂, α₃` and spin operators `S = (i/4) α∧α`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMatrixSet {
    /// `α₁, α₂, α₃`.
    pub alpha: [Mat4; 3],
    /// `S₁ = (i/4)(α₂α₃ − α₃α₂)` and cyclic.
    pub spin: [Mat4; 3],
}

impl DiracMatrixSet {
    /// Standard representation built from the Pauli matrices.
    pub fn standard() -> Self {
        let sigma = pauli();
        let mut alpha = [[[ZERO; 4]; 4]; 3];
        for (k, s) in sigma.iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    alpha[k][r][c + 2] = s[r][c];
                    alpha[k][r + 2][c] = s[r][c];
                }
            }
        }
        let quarter_i = Complex64::new(0.0, 0.25);
        let mut spin = [[[ZERO; 4]; 4]; 3];
        for k in 0..3 {
            let (l, m) = ((k + 1) % 3, (k + 2) % 3);
            let comm = sub(&mul(&alpha[l], &alpha[m]), &mul(&alpha[m], &alpha[l]));
            spin[k] = scale(&comm, quarter_i);
        }
        Self { alpha, spin }
    }

    /// Dense `v₁α₁ + v₂α₂ + v₃α₃`.
    pub fn alpha_dot_matrix(&self, v: [f64; 3]) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (k, a) in self.alpha.iter().enumerate() {
            out = add(&out, &scale(a, Complex64::new(v[k], 0.0)));
        }
        out
    }

    /// Dense `S·b`.
    pub fn spin_dot_matrix(&self, b: [f64; 3]) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (k, s) in self.spin.iter().enumerate() {
            out = add(&out, &scale(s, Complex64::new(b[k], 0.0)));
        }
        out
    }
}

/// Pauli matrices `σ₁, σ₂, σ₃`.
pub fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    [[[ZERO, ONE], [ONE, ZERO]], [[ZERO, -I], [I, ZERO]], [[ONE, ZERO], [ZERO, -ONE]]]
}

/// `(v₁α₁ + v₂α₂ + v₃α₃) ψ`, unrolled.
#[inline]
pub fn alpha_dot(v: [f64; 3], psi: &Spinor) -> Spinor {
    let lo = Complex64::new(v[0], -v[1]);
    let hi = Complex64::new(v[0], v[1]);
    let v3 = v[2];
    [psi[2] * v3 + lo * psi[3], hi * psi[2] - psi[3] * v3, psi[0] * v3 + lo * psi[1], hi * psi[0] - psi[1] * v3]
}

/// `exp(i t α·v) = cos(t|v|) I + i sin(t|v|) (α·v)/|v|`; identity for `v = 0`.
pub fn exp_i_alpha_dot(v: [f64; 3], t: f64) -> Mat4 {
    let mut out = identity();
    for col in 0..4 {
        let mut e = ZERO_SPINOR;
        e[col] = ONE;
        let c = exp_i_alpha_dot_apply(v, t, &e);
        for row in 0..4 {
            out[row][col] = c[row];
        }
    }
    out
}

/// Applies `exp(i t α·v)` to a spinor without forming the matrix.
#[inline]
pub fn exp_i_alpha_dot_apply(v: [f64; 3], t: f64, psi: &Spinor) -> Spinor {
    let norm = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if norm == 0.0 || t == 0.0 {
        return *psi;
    }
    let (s, c) = libm::sincos(t * norm);
    let unit = [v[0] / norm, v[1] / norm, v[2] / norm];
    let a = alpha_dot(unit, psi);
    let is = Complex64::new(0.0, s);
    [psi[0] * c + is * a[0], psi[1] * c + is * a[1], psi[2] * c + is * a[2], psi[3] * c + is * a[3]]
}

/// The involution `diag(I₂, −I₂)`, which anticommutes with every `α_k`.
#[inline]
pub fn chirality(psi: &Spinor) -> Spinor {
    [psi[0], psi[1], -psi[2], -psi[3]]
}

/// 4×4 identity.
pub fn identity() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ONE;
    }
    m
}

/// Matrix product.
pub fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += a[r][k] * b[k][c];
            }
            out[r][c] = acc;
        }
    }
    out
}

/// Matrix sum.
pub fn add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] += b[r][c];
        }
    }
    out
}

/// Matrix difference.
pub fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] -= b[r][c];
        }
    }
    out
}

/// Scalar multiple.
pub fn scale(a: &Mat4, s: Complex64) -> Mat4 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[c][r].conj();
        }
    }
    out
}

/// Matrix-vector product.
pub fn mat_vec(a: &Mat4, v: &Spinor) -> Spinor {
    let mut out = ZERO_SPINOR;
    for (r, o) in out.iter_mut().enumerate() {
        for c in 0..4 {
            *o += a[r][c] * v[c];
        }
    }
    out
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut m: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            m = m.max((a[r][c] - b[r][c]).norm());
        }
    }
    m
}

/// Euclidean norm of a spinor.
#[inline]
pub fn spinor_norm(v: &Spinor) -> f64 {
    libm::sqrt(spinor_norm_sqr(v))
}

/// Squared Euclidean norm of a spinor.
#[inline]
pub fn spinor_norm_sqr(v: &Spinor) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr() + v[3].norm_sqr()
}

/// `a + b`.
#[inline]
pub fn spinor_add(a: &Spinor, b: &Spinor) -> Spinor {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// `s · a`.
#[inline]
pub fn spinor_scale(a: &Spinor, s: Complex64) -> Spinor {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn approx_identity(m: &Mat4, tol: f64) -> bool {
        max_abs_diff(m, &identity()) <= tol
    }

    #[test]
    fn anticommutation_and_hermiticity() {
        let d = DiracMatrixSet::standard();
        for l in 0..3 {
            assert!(max_abs_diff(&d.alpha[l], &dagger(&d.alpha[l])) < 1e-15);
            for k in 0..3 {
                let ac = add(&mul(&d.alpha[l], &d.alpha[k]), &mul(&d.alpha[k], &d.alpha[l]));
                let expected = if l == k { scale(&identity(), Complex64::new(2.0, 0.0)) } else { [[ZERO; 4]; 4] };
                assert!(max_abs_diff(&ac, &expected) < 1e-14, "l={l} k={k}");
            }
        }
    }

    #[test]
    fn spin_is_hermitian_with_half_integer_spectrum() {
        let d = DiracMatrixSet::standard();
        for s in &d.spin {
            assert!(max_abs_diff(s, &dagger(s)) < 1e-15);
            // S_k² = I/4 and S_k is hermitian, so its eigenvalues are ±1/2; trace zero fixes the split.
            let sq = mul(s, s);
            assert!(max_abs_diff(&sq, &scale(&identity(), Complex64::new(0.25, 0.0))) < 1e-15);
            let tr: Complex64 = (0..4).map(|k| s[k][k]).sum();
            assert!(tr.norm() < 1e-15);
        }
    }

    #[test]
    fn alpha_dot_matches_dense_and_squares() {
        let d = DiracMatrixSet::standard();
        let psi =
            [Complex64::new(0.3, -1.0), Complex64::new(0.5, 0.2), Complex64::new(-0.7, 0.1), Complex64::new(1.1, 0.4)];
        let v = [0.4, -1.3, 0.9];
        let dense = mat_vec(&d.alpha_dot_matrix(v), &psi);
        let fast = alpha_dot(v, &psi);
        for k in 0..4 {
            assert!((dense[k] - fast[k]).norm() < 1e-15);
        }

        assert_eq!(alpha_dot([0.0; 3], &psi), ZERO_SPINOR);
        let e0 = [ONE, ZERO, ZERO, ZERO];
        let twice = alpha_dot([1.0, 0.0, 0.0], &alpha_dot([1.0, 0.0, 0.0], &e0));
        assert_eq!(twice, e0);
        let twice = alpha_dot([1.0, 1.0, 0.0], &alpha_dot([1.0, 1.0, 0.0], &psi));
        for k in 0..4 {
            assert!((twice[k] - psi[k] * 2.0).norm() < 1e-15);
        }
    }

    #[test]
    fn exponential_special_cases() {
        assert!(approx_identity(&exp_i_alpha_dot([0.3, 0.2, -1.0], 0.0), 0.0));
        assert!(approx_identity(&exp_i_alpha_dot([0.0; 3], 7.0), 0.0));
        let v = [PI / 3f64.sqrt(); 3];
        let m = exp_i_alpha_dot(v, 1.0);
        assert!(max_abs_diff(&m, &scale(&identity(), -ONE)) < 1e-15);
    }

    #[test]
    fn chirality_anticommutes_with_alpha() {
        let psi = [ONE, I, -ONE, Complex64::new(0.5, 0.5)];
        let v = [0.2, -0.4, 1.5];
        let lhs = chirality(&alpha_dot(v, &psi));
        let rhs = alpha_dot(v, &chirality(&psi));
        for k in 0..4 {
            assert!((lhs[k] + rhs[k]).norm() < 1e-15);
        }
    }

    fn arb_vec() -> impl Strategy<Value = [f64; 3]> {
        [-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64]
    }

    fn arb_spinor() -> impl Strategy<Value = Spinor> {
        proptest::array::uniform4((-2.0..2.0f64, -2.0..2.0f64)).prop_map(|a| a.map(|(re, im)| Complex64::new(re, im)))
    }

    proptest! {
        #[test]
        fn exponential_group_law(v in arb_vec(), t in -3.0..3.0f64, s in -3.0..3.0f64) {
            let lhs = mul(&exp_i_alpha_dot(v, t), &exp_i_alpha_dot(v, s));
            let rhs = exp_i_alpha_dot(v, t + s);
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }

        #[test]
        fn exponential_is_unitary(v in arb_vec(), t in -10.0..10.0f64, psi in arb_spinor()) {
            let out = exp_i_alpha_dot_apply(v, t, &psi);
            let n0 = spinor_norm(&psi);
            prop_assert!((spinor_norm(&out) - n0).abs() < 1e-13 * (1.0 + n0));
            let m = exp_i_alpha_dot(v, t);
            prop_assert!(approx_identity(&mul(&m, &dagger(&m)), 1e-13));
        }

        #[test]
        fn alpha_dot_twice_is_norm_squared(v in arb_vec(), psi in arb_spinor()) {
            let twice = alpha_dot(v, &alpha_dot(v, &psi));
            let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            for k in 0..4 {
                prop_assert!((twice[k] - psi[k] * n2).norm() < 1e-12 * (1.0 + n2));
            }
        }
    }
}

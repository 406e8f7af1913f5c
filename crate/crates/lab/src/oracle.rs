//! Brute-force finite-difference oracle for the spectrum of `T`.
//!
//! Dirichlet grid with nodes `−L + jh`, `j = 1, …, N−1`, centred second-order
//! differences. The discrete `T_h` keeps the chiral block form, so its
//! spectrum is `±σ(K_h)`, each value twice. Low Landau levels are isolated in
//! the rotation-invariant sector (the grid and `K_hK_h†` are invariant under
//! quarter turns) and identified by their overlap with a radial profile, which
//! discards fermion doublers and unresolved high-angular-momentum states.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::grid::GridSpec2D;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest `N` accepted by the dense oracle.
pub const MAX_ORACLE_N: usize = 48;

/// Interior Dirichlet nodes of `grid` along one axis.
#[derive(Debug, Clone, Copy)]
struct FdMesh {
    m: usize,
    h: f64,
    l: f64,
}

impl FdMesh {
    fn new(grid: GridSpec2D) -> Result<Self> {
        if grid.n > MAX_ORACLE_N {
            return Err(LabError::Parameter(format!("dense oracle needs N <= {MAX_ORACLE_N}, got {}", grid.n)));
        }
        Ok(Self { m: grid.n - 1, h: grid.h(), l: grid.half_width })
    }

    fn coord(&self, j: usize) -> f64 {
        -self.l + (j + 1) as f64 * self.h
    }

    fn len(&self) -> usize {
        self.m * self.m
    }

    /// `K_h f` (`conj = false`) or `K_h† f`.
    fn chiral(&self, f: &[Complex64], conj: bool) -> Vec<Complex64> {
        let m = self.m;
        let sgn = if conj { -1.0 } else { 1.0 };
        let at = |i: isize, j: isize| -> Complex64 {
            if i < 0 || j < 0 || i >= m as isize || j >= m as isize {
                Complex64::new(0.0, 0.0)
            } else {
                f[j as usize * m + i as usize]
            }
        };
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..m {
            for i in 0..m {
                let (ii, jj) = (i as isize, j as isize);
                let d1 = (at(ii + 1, jj) - at(ii - 1, jj)) / (2.0 * self.h);
                let d2 = (at(ii, jj + 1) - at(ii, jj - 1)) / (2.0 * self.h);
                let (y1, y2) = (self.coord(i), self.coord(j));
                out[j * m + i] = -I * d1 + sgn * d2 + Complex64::new(-y2, sgn * y1) * f[j * m + i];
            }
        }
        out
    }

    fn matrix(&self, conj: bool) -> DMatrix<Complex64> {
        let n = self.len();
        let mut k = DMatrix::<Complex64>::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for col in 0..n {
            e[col] = Complex64::new(1.0, 0.0);
            for (row, v) in self.chiral(&e, conj).into_iter().enumerate() {
                k[(row, col)] = v;
            }
            e[col] = Complex64::new(0.0, 0.0);
        }
        k
    }
}

/// Full spectrum of the finite-difference `T_h`, ascending.
pub fn oracle_dense_spectrum(grid: GridSpec2D) -> Result<Vec<f64>> {
    let mesh = FdMesh::new(grid)?;
    let kd = mesh.matrix(true);
    let gram = kd.adjoint() * &kd;
    let mut out = Vec::with_capacity(4 * mesh.len());
    for ev in gram.symmetric_eigenvalues().iter() {
        let s = ev.max(0.0).sqrt();
        out.extend_from_slice(&[s, s, -s, -s]);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Dense `4(N−1)² × 4(N−1)²` matrix of `T_h`; only sensible for tiny grids.
pub fn oracle_dense_t(grid: GridSpec2D) -> Result<DMatrix<Complex64>> {
    let mesh = FdMesh::new(grid)?;
    let n = mesh.len();
    let k = mesh.matrix(false);
    let kd = mesh.matrix(true);
    let mut t = DMatrix::<Complex64>::zeros(4 * n, 4 * n);
    // T(a, b, c, d) = (K†d, Kc, K†b, Ka).
    t.view_mut((0, 3 * n), (n, n)).copy_from(&kd);
    t.view_mut((n, 2 * n), (n, n)).copy_from(&k);
    t.view_mut((2 * n, n), (n, n)).copy_from(&kd);
    t.view_mut((3 * n, 0), (n, n)).copy_from(&k);
    Ok(t)
}

/// Quarter-turn orbits `(y₁, y₂) → (−y₂, y₁)` of the interior nodes.
fn rotation_orbits(m: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; m * m];
    let mut orbits = Vec::new();
    for start in 0..m * m {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut p = start;
        loop {
            if seen[p] {
                break;
            }
            seen[p] = true;
            orbit.push(p);
            let (i, j) = (p % m, p / m);
            p = i * m + (m - 1 - j);
        }
        orbits.push(orbit);
    }
    orbits
}

/// Rotated copy `f(R⁻¹y)` of a scalar on the interior nodes.
fn rotate(m: usize, f: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for p in 0..m * m {
        let (i, j) = (p % m, p / m);
        out[i * m + (m - 1 - j)] = f[p];
    }
    out
}

/// Eigenvalues closer than this (in `|λ|`) are one level.
const CLUSTER_GAP: f64 = 0.05;

#[derive(Debug)]
struct Cluster {
    last: f64,
    weight: f64,
    heaviest: f64,
    at: f64,
}

/// Lowest `levels` Landau levels `|λ|` of `T_h` seen by the radial profile
/// `e^{−|y|²/3}`, from the quarter-turn-invariant sector of `K_hK_h†`.
pub fn oracle_radial_levels(grid: GridSpec2D, levels: usize) -> Result<Vec<f64>> {
    let mesh = FdMesh::new(grid)?;
    let m = mesh.m;
    let orbits = rotation_orbits(m);
    let cols: Vec<Vec<Complex64>> = orbits
        .iter()
        .map(|o| {
            let mut e = vec![Complex64::new(0.0, 0.0); mesh.len()];
            let w = 1.0 / (o.len() as f64).sqrt();
            o.iter().for_each(|&p| e[p] = Complex64::new(w, 0.0));
            mesh.chiral(&e, true)
        })
        .collect();
    let d = cols.len();
    let mut gram = DMatrix::<Complex64>::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let v: Complex64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x.conj() * y).sum();
            gram[(a, b)] = v;
            gram[(b, a)] = v.conj();
        }
    }
    let seed: Vec<f64> = orbits
        .iter()
        .map(|o| {
            let p = o[0];
            let (y1, y2) = (mesh.coord(p % m), mesh.coord(p / m));
            (-(y1 * y1 + y2 * y2) / 3.0).exp() * (o.len() as f64).sqrt()
        })
        .collect();
    let seed_norm2: f64 = seed.iter().map(|x| x * x).sum();
    let eig = SymmetricEigen::new(gram);
    let mut spectrum: Vec<(f64, f64)> = (0..d)
        .map(|i| {
            let ov: Complex64 = (0..d).map(|r| eig.eigenvectors[(r, i)] * seed[r]).sum();
            (eig.eigenvalues[i].max(0.0).sqrt(), ov.norm_sqr() / seed_norm2)
        })
        .collect();
    spectrum.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Near-degenerate clusters (the lowest level is hugely degenerate) are
    // scored by their total seed weight and located at their heaviest member.
    let mut clusters: Vec<Cluster> = Vec::new();
    for (s, w) in spectrum {
        match clusters.last_mut() {
            Some(c) if s - c.last < CLUSTER_GAP => {
                if w > c.heaviest {
                    c.heaviest = w;
                    c.at = s;
                }
                c.weight += w;
                c.last = s;
            }
            _ => clusters.push(Cluster { last: s, weight: w, heaviest: w, at: s }),
        }
    }
    let mut found: Vec<f64> = clusters.iter().filter(|c| c.weight > 1e-3).map(|c| c.at).collect();
    if found.len() < levels {
        return Err(LabError::NonConvergence {
            iterations: 0,
            detail: format!("only {} radial levels resolved", found.len()),
        });
    }
    found.truncate(levels);
    Ok(found)
}

/// Fits `λ(h) = λ₀ + a h² + b h⁴` through one level computed on the grids
/// `(L, N)` for the given `N`s (three of them) and returns `λ₀`.
pub fn oracle_extrapolated(half_width: f64, ns: [usize; 3], level: usize) -> Result<f64> {
    let mut a = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    for (r, &n) in ns.iter().enumerate() {
        let g = GridSpec2D::small(half_width, n)?;
        let lv = oracle_radial_levels(g, level + 1)?;
        let h2 = g.h() * g.h();
        a[(r, 0)] = 1.0;
        a[(r, 1)] = h2;
        a[(r, 2)] = h2 * h2;
        rhs[r] = lv[level];
    }
    let sol = a.lu().solve(&rhs).ok_or_else(|| LabError::Parameter("degenerate Richardson grids".into()))?;
    Ok(sol[0])
}

/// `‖K_hK_h† R f − R K_hK_h† f‖` for a scalar `f` on the interior nodes;
/// zero up to round-off because the discretization is quarter-turn invariant.
pub fn rotation_commutator(grid: GridSpec2D, f: &[Complex64]) -> Result<f64> {
    let mesh = FdMesh::new(grid)?;
    let h = |g: &[Complex64]| mesh.chiral(&mesh.chiral(g, true), false);
    let a = h(&rotate(mesh.m, f));
    let b = rotate(mesh.m, &h(f));
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_spectrum_matches_dense_t() {
        let g = GridSpec2D::small(3.0, 8).unwrap();
        let t = oracle_dense_t(g).unwrap();
        assert!((&t - t.adjoint()).norm() < 1e-14);
        let mut dense: Vec<f64> = t.symmetric_eigenvalues().iter().cloned().collect();
        dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let fast = oracle_dense_spectrum(g).unwrap();
        assert_eq!(dense.len(), fast.len());
        for (a, b) in dense.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn spectrum_is_symmetric() {
        let s = oracle_dense_spectrum(GridSpec2D::small(6.0, 32).unwrap()).unwrap();
        for (a, b) in s.iter().zip(s.iter().rev()) {
            assert!((a + b).abs() < 1e-9);
        }
    }

    #[test]
    fn quarter_turn_invariance() {
        let g = GridSpec2D::small(6.0, 24).unwrap();
        let m = 23;
        let f: Vec<Complex64> =
            (0..m * m).map(|p| Complex64::new((p as f64 * 0.7).sin(), (p as f64 * 0.3).cos())).collect();
        assert!(rotation_commutator(g, &f).unwrap() < 1e-10);
        assert_eq!(rotation_orbits(m).len(), (m * m - 1) / 4 + 1);
        let r4 = rotate(m, &rotate(m, &rotate(m, &rotate(m, &f))));
        assert_eq!(r4, f);
    }

    #[test]
    fn radial_levels_converge_upward() {
        // h = 1/2, 1/3, 1/4; the box is large enough that only h matters.
        let lv: Vec<f64> = [16, 24, 32]
            .iter()
            .map(|&n| oracle_radial_levels(GridSpec2D::small(4.0, n).unwrap(), 2).unwrap()[1])
            .collect();
        assert!(lv[0] < lv[1] && lv[1] < lv[2] && lv[2] < 2.0, "{lv:?}");
        let zero = oracle_radial_levels(GridSpec2D::small(6.0, 32).unwrap(), 1).unwrap()[0];
        assert!(zero < 1e-6, "{zero}");
    }

    #[test]
    fn richardson_limit_is_the_first_landau_level() {
        let l = oracle_extrapolated(6.0, [24, 32, 48], 1).unwrap();
        assert!((l - 2.0).abs() < 5e-3, "{l}");
    }

    #[test]
    fn rejects_large_grids() {
        assert!(oracle_dense_spectrum(GridSpec2D::new(8.0, 64).unwrap()).is_err());
    }
}

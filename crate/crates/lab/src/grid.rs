//! Cell-centred 2D grids for eigenmodes and rectilinear 3D grids for spinor fields.

use magdirac_core::dirac::Spinor;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Four component arrays, component-major.
pub type Components = [Vec<Complex64>; 4];

pub(crate) fn zero_components(len: usize) -> Components {
    std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); len])
}

/// Square grid `[−L, L)²` with `N` cell-centred nodes per axis,
/// `y_j = −L + (j + ½)h`, `h = 2L/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec2D {
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec2D {
    /// Validated grid: `L > 0`, `N` even and at least 32.
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(LabError::Parameter(format!("half-width must be positive, got {half_width}")));
        }
        if n < 32 || !n.is_multiple_of(2) {
            return Err(LabError::Parameter(format!("points per axis must be even and >= 32, got {n}")));
        }
        Ok(Self { half_width, n })
    }

    /// Small grids for oracles and tests; only `N ≥ 4` is required.
    pub fn small(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || n < 4 {
            return Err(LabError::Parameter(format!("bad small grid L={half_width} N={n}")));
        }
        Ok(Self { half_width, n })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.h()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(y₁, y₂)` of flat index `k = j₂ N + j₁`.
    pub fn point(&self, k: usize) -> [f64; 2] {
        [self.coord(k % self.n), self.coord(k / self.n)]
    }
}

/// Rectilinear grid: node `(i, j, k)` at `origin + (i, j, k)·spacing`, flat
/// index `i + nx (j + ny k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub dims: [usize; 3],
}

impl Grid3 {
    /// Cell-centred grid covering the box `[lo, hi]`.
    pub fn cell_centred(lo: [f64; 3], hi: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        let mut origin = [0.0; 3];
        let mut spacing = [0.0; 3];
        for a in 0..3 {
            if dims[a] == 0 || !(hi[a] > lo[a]) {
                return Err(LabError::Parameter(format!("empty box along axis {a}")));
            }
            spacing[a] = (hi[a] - lo[a]) / dims[a] as f64;
            origin[a] = lo[a] + 0.5 * spacing[a];
        }
        Ok(Self { origin, spacing, dims })
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        self.origin[axis] + j as f64 * self.spacing[axis]
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [nx, ny, _] = self.dims;
        [self.coord(0, idx % nx), self.coord(1, (idx / nx) % ny), self.coord(2, idx / (nx * ny))]
    }

    /// Same grid shifted by `dz` along the third axis.
    pub fn shifted_z(&self, dz: f64) -> Self {
        let mut g = *self;
        g.origin[2] += dz;
        g
    }
}

/// A 4-spinor sampled on a [`Grid3`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField3D {
    pub grid: Grid3,
    pub data: Components,
    pub time: f64,
}

impl SpinorField3D {
    pub fn zeros(grid: Grid3, time: f64) -> Self {
        Self { grid, data: zero_components(grid.len()), time }
    }

    /// Samples `f` at every node, one `z`-plane per task.
    pub fn sample<F>(grid: Grid3, time: f64, f: F) -> Self
    where
        F: Fn([f64; 3]) -> Spinor + Sync,
    {
        let plane = grid.dims[0] * grid.dims[1];
        let planes: Vec<Vec<Spinor>> = (0..grid.dims[2])
            .into_par_iter()
            .map(|k| (0..plane).map(|p| f(grid.point(k * plane + p))).collect())
            .collect();
        let mut out = Self::zeros(grid, time);
        for (k, vals) in planes.into_iter().enumerate() {
            for (p, s) in vals.into_iter().enumerate() {
                out.set(k * plane + p, &s);
            }
        }
        out
    }

    pub fn get(&self, idx: usize) -> Spinor {
        [self.data[0][idx], self.data[1][idx], self.data[2][idx], self.data[3][idx]]
    }

    pub fn set(&mut self, idx: usize, s: &Spinor) {
        for c in 0..4 {
            self.data[c][idx] = s[c];
        }
    }

    /// Pointwise spinor 2-norm `|f(x)|`.
    pub fn modulus(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.data.iter().map(|c| c[i].norm_sqr()).sum::<f64>().sqrt()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    /// `max |f|` on the outermost layer of nodes divided by `max |f|`; zero for
    /// the zero field.
    pub fn edge_ratio(&self) -> f64 {
        let m = self.modulus();
        let peak = m.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let [nx, ny, nz] = self.grid.dims;
        let mut edge = 0.0f64;
        for (idx, v) in m.iter().enumerate() {
            let (i, j, k) = (idx % nx, (idx / nx) % ny, idx / (nx * ny));
            let on_edge = (nx > 1 && (i == 0 || i == nx - 1))
                || (ny > 1 && (j == 0 || j == ny - 1))
                || (nz > 1 && (k == 0 || k == nz - 1));
            if on_edge {
                edge = edge.max(*v);
            }
        }
        edge / peak
    }

    /// `⟨self, other⟩ = Σ conj(self)·other ΔV`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch("inner product of fields on different grids".into()));
        }
        let mut re = magdirac_core::quad::Kahan::default();
        let mut im = magdirac_core::quad::Kahan::default();
        for c in 0..4 {
            for (a, b) in self.data[c].iter().zip(&other.data[c]) {
                let p = a.conj() * b;
                re.add(p.re);
                im.add(p.im);
            }
        }
        let dv = self.grid.cell_volume();
        Ok(Complex64::new(re.value() * dv, im.value() * dv))
    }

    pub fn l2_norm(&self) -> f64 {
        let s: Vec<f64> = (0..self.grid.len()).map(|i| self.data.iter().map(|c| c[i].norm_sqr()).sum()).collect();
        (magdirac_core::quad::pairwise_sum(&s) * self.grid.cell_volume()).sqrt()
    }

    pub fn scale(&mut self, s: Complex64) {
        self.data.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v *= s));
    }

    /// `self − other`, grids must match.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch("difference of fields on different grids".into()));
        }
        let mut out = self.clone();
        for c in 0..4 {
            for (a, b) in out.data[c].iter_mut().zip(&other.data[c]) {
                *a -= b;
            }
        }
        Ok(out)
    }
}

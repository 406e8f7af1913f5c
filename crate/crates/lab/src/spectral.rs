//! Fourier differentiation and multipliers on a periodic [`Grid3`].

use num_complex::Complex64;

use crate::fft::{derivative_wavenumbers, wavenumbers, FftNd};
use crate::grid::Grid3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Planned transforms and wavenumbers for one grid.
#[derive(Debug)]
pub struct Spectral3 {
    pub grid: Grid3,
    pub fft: FftNd,
    /// Wavenumbers per axis, Nyquist entry `−π/h`.
    pub k: [Vec<f64>; 3],
    /// Same with the Nyquist entry zeroed (odd derivatives).
    pub kd: [Vec<f64>; 3],
}

impl Spectral3 {
    pub fn new(grid: Grid3) -> Self {
        let fft = FftNd::new(grid.dims);
        let k = std::array::from_fn(|a| wavenumbers(grid.dims[a], grid.spacing[a]));
        let kd = std::array::from_fn(|a| derivative_wavenumbers(grid.dims[a], grid.spacing[a]));
        Self { grid, fft, k, kd }
    }

    /// Wavevector of flat spectral index `idx`.
    #[inline]
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let [nx, ny, _] = self.grid.dims;
        [self.k[0][idx % nx], self.k[1][(idx / nx) % ny], self.k[2][idx / (nx * ny)]]
    }

    #[inline]
    fn xi_odd(&self, idx: usize) -> [f64; 3] {
        let [nx, ny, _] = self.grid.dims;
        [self.kd[0][idx % nx], self.kd[1][(idx / nx) % ny], self.kd[2][idx / (nx * ny)]]
    }

    pub fn forward(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut hat = f.to_vec();
        self.fft.forward(&mut hat);
        hat
    }

    /// `(∂₁f, ∂₂f, ∂₃f)`.
    pub fn gradient(&self, f: &[Complex64]) -> [Vec<Complex64>; 3] {
        let hat = self.forward(f);
        std::array::from_fn(|a| {
            let mut d: Vec<Complex64> = hat.iter().enumerate().map(|(idx, c)| c * I * self.xi_odd(idx)[a]).collect();
            self.fft.inverse(&mut d);
            d
        })
    }

    /// `Δf`.
    pub fn laplacian(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.multiply(f, |xi| -(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]))
    }

    /// `F⁻¹ m(ξ) F f` for a real multiplier.
    pub fn multiply(&self, f: &[Complex64], m: impl Fn([f64; 3]) -> f64) -> Vec<Complex64> {
        let mut hat = self.forward(f);
        for (idx, c) in hat.iter_mut().enumerate() {
            *c *= m(self.xi(idx));
        }
        self.fft.inverse(&mut hat);
        hat
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_derivatives() {
        let g = Grid3::cell_centred([-8.0, -8.0, -7.0], [8.0, 8.0, 9.0], [64, 64, 64]).unwrap();
        let sp = Spectral3::new(g);
        let f: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                Complex64::new((-(x[0] * x[0] + x[1] * x[1] + (x[2] - 1.0).powi(2)) / 2.0).exp(), 0.0)
            })
            .collect();
        let grad = sp.gradient(&f);
        let lap = sp.laplacian(&f);
        for i in (0..g.len()).step_by(97) {
            let x = g.point(i);
            let r2 = x[0] * x[0] + x[1] * x[1] + (x[2] - 1.0).powi(2);
            assert!((grad[2][i] + (x[2] - 1.0) * f[i]).norm() < 1e-9);
            assert!((grad[0][i] + x[0] * f[i]).norm() < 1e-9);
            assert!((lap[i] - (r2 - 3.0) * f[i]).norm() < 1e-8);
        }
    }
}

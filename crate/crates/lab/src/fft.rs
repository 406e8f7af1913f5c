//! Multi-dimensional FFTs over x-fastest arrays, and grid wavenumbers.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned forward/inverse transforms for a `[nx, ny, nz]` array stored with
/// `x` fastest. Axes of length 1 are skipped, so 2D arrays use `nz = 1`.
pub struct FftNd {
    dims: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("dims", &self.dims).finish()
    }
}

impl FftNd {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = dims.map(|n| planner.plan_fft_forward(n));
        let inv = dims.map(|n| planner.plan_fft_inverse(n));
        Self { dims, fwd, inv }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.dims;
        assert_eq!(data.len(), nx * ny * nz, "FFT buffer length mismatch");
        if nx > 1 {
            plans[0].process(data);
        }
        if ny > 1 {
            let mut buf = vec![Complex64::new(0.0, 0.0); nx * ny];
            for plane in data.chunks_mut(nx * ny) {
                for iy in 0..ny {
                    for ix in 0..nx {
                        buf[ix * ny + iy] = plane[iy * nx + ix];
                    }
                }
                plans[1].process(&mut buf);
                for iy in 0..ny {
                    for ix in 0..nx {
                        plane[iy * nx + ix] = buf[ix * ny + iy];
                    }
                }
            }
        }
        if nz > 1 {
            let mut buf = vec![Complex64::new(0.0, 0.0); nx * nz];
            for iy in 0..ny {
                for iz in 0..nz {
                    let row = &data[(iz * ny + iy) * nx..][..nx];
                    for ix in 0..nx {
                        buf[ix * nz + iz] = row[ix];
                    }
                }
                plans[2].process(&mut buf);
                for iz in 0..nz {
                    let row = &mut data[(iz * ny + iy) * nx..][..nx];
                    for ix in 0..nx {
                        row[ix] = buf[ix * nz + iz];
                    }
                }
            }
        }
    }
}

/// Angular wavenumbers of an `n`-point grid with spacing `h`, in FFT order.
/// The Nyquist entry carries `−π/h`.
pub fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * h);
    (0..n).map(|j| if 2 * j < n { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect()
}

/// Wavenumbers for odd-order derivatives: as [`wavenumbers`] with the Nyquist
/// entry zeroed, which keeps the discrete derivative skew-adjoint.
pub fn derivative_wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let mut k = wavenumbers(n, h);
    if n.is_multiple_of(2) {
        k[n / 2] = 0.0;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_3d() {
        let dims = [6, 5, 4];
        let f = FftNd::new(dims);
        let orig: Vec<Complex64> =
            (0..120).map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos())).collect();
        let mut d = orig.clone();
        f.forward(&mut d);
        f.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_direct_dft() {
        let dims = [4, 3, 2];
        let f = FftNd::new(dims);
        let orig: Vec<Complex64> = (0..24).map(|j| Complex64::new(j as f64, (j * j) as f64 * 0.1)).collect();
        let mut d = orig.clone();
        f.forward(&mut d);
        for kz in 0..2 {
            for ky in 0..3 {
                for kx in 0..4 {
                    let mut s = Complex64::new(0.0, 0.0);
                    for z in 0..2 {
                        for y in 0..3 {
                            for x in 0..4 {
                                let ph = -2.0 * PI * (kx * x) as f64 / 4.0
                                    - 2.0 * PI * (ky * y) as f64 / 3.0
                                    - 2.0 * PI * (kz * z) as f64 / 2.0;
                                s += orig[x + 4 * (y + 3 * z)] * Complex64::from_polar(1.0, ph);
                            }
                        }
                    }
                    assert!((s - d[kx + 4 * (ky + 3 * kz)]).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn wavenumber_layout() {
        let k = wavenumbers(4, PI / 2.0);
        assert_eq!(k, vec![0.0, 1.0, -2.0, -1.0]);
        assert_eq!(derivative_wavenumbers(4, PI / 2.0)[2], 0.0);
        assert_eq!(wavenumbers(3, 2.0 * PI / 3.0), vec![0.0, 1.0, -1.0]);
    }
}

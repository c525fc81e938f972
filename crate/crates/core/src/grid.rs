//! Uniform periodic grids on [−L, L)ᴺ.
//!
//! Each axis carries n equispaced points x_j = −L + j·h, h = 2L/n, so x = 0 is
//! a grid point and the +L face is the periodic image of −L.  Spectral
//! derivatives use wavenumbers k = π·m/L with the signed integer m running
//! over −n/2 … n/2−1 in standard FFT ordering.

use crate::error::Error;

/// Geometry of a uniform periodic grid: dimension, half extent L, points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_extent: f64,
    points_per_axis: usize,
}

impl GridSpec {
    /// Validates dim ∈ {1,2,3}, L > 0, and n a power of two with n ≥ 8.
    pub fn new(dim: usize, half_extent: f64, points_per_axis: usize) -> Result<Self, Error> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidDim(dim));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidHalfExtent(half_extent));
        }
        let n = points_per_axis;
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidPointsPerAxis(n));
        }
        // n^dim must fit comfortably in memory and in usize.
        if (n as u128).pow(dim as u32) > (1u128 << 34) {
            return Err(Error::InvalidPointsPerAxis(n));
        }
        Ok(Self { dim, half_extent, points_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Grid spacing h = 2L/n.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points_per_axis as f64
    }

    /// Total number of grid points nᴺ.
    pub fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Quadrature weight per point, hᴺ.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate of index j along any axis: −L + j·h.
    pub fn coordinate(&self, j: usize) -> f64 {
        debug_assert!(j < self.points_per_axis);
        -self.half_extent + j as f64 * self.spacing()
    }

    /// Wavenumber of FFT index j along any axis: π·m/L with m the signed index.
    pub fn wavenumber(&self, j: usize) -> f64 {
        debug_assert!(j < self.points_per_axis);
        let n = self.points_per_axis;
        let m = if j < n / 2 { j as isize } else { j as isize - n as isize };
        std::f64::consts::PI * m as f64 / self.half_extent
    }

    /// Splits a flat row-major index into per-axis indices.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        debug_assert!(flat < self.total_points());
        let n = self.points_per_axis;
        let mut idx = [0usize; 3];
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rest % n;
            rest /= n;
        }
        idx
    }

    /// |x|² at each flat index, in row-major order.
    pub fn radius_sq_table(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        let axis_sq: Vec<f64> = (0..n).map(|j| self.coordinate(j).powi(2)).collect();
        self.outer_sum(&axis_sq)
    }

    /// |k|² at each flat index of the spectrum, in row-major order.
    pub fn wavenumber_sq_table(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        let axis_sq: Vec<f64> = (0..n).map(|j| self.wavenumber(j).powi(2)).collect();
        self.outer_sum(&axis_sq)
    }

    /// Table t[j₁,…] = s[j₁] + s[j₂] + … over all axes.
    fn outer_sum(&self, axis: &[f64]) -> Vec<f64> {
        let n = self.points_per_axis;
        match self.dim {
            1 => axis.to_vec(),
            2 => {
                let mut out = Vec::with_capacity(n * n);
                for a in axis {
                    for b in axis {
                        out.push(a + b);
                    }
                }
                out
            }
            3 => {
                let mut out = Vec::with_capacity(n * n * n);
                for a in axis {
                    for b in axis {
                        for c in axis {
                            out.push(a + b + c);
                        }
                    }
                }
                out
            }
            _ => unreachable!("dim validated at construction"),
        }
    }
}

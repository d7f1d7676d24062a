//! Complex wavefunction samples on a uniform periodic grid.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::format::fmt_f64;

/// Edge magnitude allowed relative to the field maximum.
pub const DECAY_THRESHOLD: f64 = 1e-10;

/// `n` points `x_min + j·dx`, `dx = (x_max − x_min)/n`; `x_max` itself is the
/// periodic image of `x_min` and is not sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl SpaceGrid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::InvalidGrid(format!("N ≥ 16 required, got {n}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "empty interval [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as i64;
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        (0..n)
            .map(|j| if j <= n / 2 { j } else { j - n })
            .map(|j| j as f64 * dk)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: SpaceGrid,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl WaveField {
    pub fn new(grid: SpaceGrid, values: Vec<Complex64>, t: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a {}-point grid",
                values.len(),
                grid.n
            )));
        }
        Ok(Self { grid, values, t })
    }

    pub fn from_fn(grid: SpaceGrid, t: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values, t }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            grid: self.grid,
            values: vec![Complex64::new(0.0, 0.0); self.grid.n],
            t: self.t,
        }
    }

    pub fn same_support(&self, other: &Self) -> bool {
        self.grid == other.grid && self.t == other.t
    }

    /// `(∫|ψ|² dx)^{1/2}` by the trapezoid rule on the periodic grid.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest edge magnitude over the field maximum.
    pub fn edge_ratio(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let first = self.values[0].norm();
        let last = self.values[self.grid.n - 1].norm();
        first.max(last) / max
    }

    pub fn check_decay(&self) -> Result<()> {
        let ratio = self.edge_ratio();
        if ratio > DECAY_THRESHOLD || !ratio.is_finite() {
            return Err(Error::GridDecay { t: self.t, ratio });
        }
        Ok(())
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// Writes `x,re,im`, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,re_psi,im_psi")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(self.grid.x(j)),
                fmt_f64(v.re),
                fmt_f64(v.im)
            )?;
        }
        Ok(())
    }
}

/// FFT plans and wavenumbers for one grid.
pub struct Spectral {
    grid: SpaceGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: SpaceGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n),
            inverse: planner.plan_fft_inverse(grid.n),
            k: grid.wavenumbers(),
        }
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let s = 1.0 / self.grid.n as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }

    /// First and second derivatives by multiplication with `ik` and `−k²`.
    /// The Nyquist mode is dropped from the odd derivative.
    pub fn derivatives(&self, values: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.n;
        let mut hat = values.to_vec();
        self.forward(&mut hat);
        let mut d1 = hat.clone();
        let mut d2 = hat;
        for j in 0..n {
            let k = self.k[j];
            d1[j] *= if n.is_multiple_of(2) && j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k)
            };
            d2[j] *= -k * k;
        }
        self.inverse(&mut d1);
        self.inverse(&mut d2);
        (d1, d2)
    }
}

/// Fourth-order periodic finite differences, used as a cross-check of the
/// spectral derivatives.
pub fn fd4_derivatives(values: &[Complex64], dx: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = values.len();
    let at = |j: isize| values[j.rem_euclid(n as isize) as usize];
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for j in 0..n as isize {
        let (m2, m1, c, p1, p2) = (at(j - 2), at(j - 1), at(j), at(j + 1), at(j + 2));
        d1.push((m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * dx));
        d2.push((-m2 + m1 * 16.0 - c * 30.0 + p1 * 16.0 - p2) / (12.0 * dx * dx));
    }
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: SpaceGrid) -> WaveField {
        WaveField::from_fn(grid, 0.0, |x| {
            Complex64::from_polar((-x * x / 2.0).exp(), 0.7 * x)
        })
    }

    #[test]
    fn grid_validation() {
        assert!(SpaceGrid::new(-1.0, 1.0, 8).is_err());
        assert!(SpaceGrid::new(1.0, 1.0, 32).is_err());
        let g = SpaceGrid::symmetric(10.0, 64).unwrap();
        assert_eq!(g.dx(), 20.0 / 64.0);
        assert_eq!(g.x(32), 0.0);
    }

    #[test]
    fn spectral_derivatives_of_chirped_gaussian() {
        let grid = SpaceGrid::symmetric(12.0, 256).unwrap();
        let f = gaussian(grid);
        let (d1, d2) = Spectral::new(grid).derivatives(&f.values);
        for (j, x) in grid.points().into_iter().enumerate() {
            let g = Complex64::new(-x, 0.7);
            let exact1 = f.values[j] * g;
            let exact2 = f.values[j] * (g * g - 1.0);
            assert!((d1[j] - exact1).norm() < 1e-11, "x={x}");
            assert!((d2[j] - exact2).norm() < 1e-10, "x={x}");
        }
        let (f1, f2) = fd4_derivatives(&f.values, grid.dx());
        let err = (0..grid.n)
            .map(|j| (f1[j] - d1[j]).norm() + (f2[j] - d2[j]).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-3);
    }

    #[test]
    fn norm_and_decay() {
        let grid = SpaceGrid::symmetric(12.0, 256).unwrap();
        let f = gaussian(grid);
        assert!((f.norm() - std::f64::consts::PI.powf(0.25)).abs() < 1e-13);
        assert!(f.check_decay().is_ok());
        let narrow = gaussian(SpaceGrid::symmetric(3.0, 64).unwrap());
        assert!(matches!(narrow.check_decay(), Err(Error::GridDecay { .. })));
    }
}

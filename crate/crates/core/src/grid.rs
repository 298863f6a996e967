//! Uniform grids for continuous pointer wavefunctions.
//!
//! Integrals use composite Simpson quadrature; the momentum-like operator
//! `-i d/dx` uses fourth-order central differences with one-sided
//! fourth-order stencils at the two nodes nearest each edge.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 256;

/// Largest admissible `|f(edge)| / max|f|` for a localized grid function.
pub const EDGE_DECAY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < MIN_POINTS || n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "need an odd number of points >= {MIN_POINTS}, got {n_points}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        // Interpolate from both ends so the last node is exactly x_max.
        let t = i as f64 / (self.n_points - 1) as f64;
        self.x_min * (1.0 - t) + self.x_max * t
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.node(i))
    }

    /// Composite Simpson weights; all strictly positive.
    pub fn simpson_weights(&self) -> Vec<f64> {
        let h3 = self.spacing() / 3.0;
        (0..self.n_points)
            .map(|i| {
                if i == 0 || i == self.n_points - 1 {
                    h3
                } else if i % 2 == 1 {
                    4.0 * h3
                } else {
                    2.0 * h3
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Ratio of the larger edge magnitude to the peak magnitude.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.values[0].norm();
        let last = self.values[self.values.len() - 1].norm();
        first.max(last) / peak
    }

    pub fn check_edge_decay(&self) -> Result<()> {
        let ratio = self.edge_ratio();
        if ratio > EDGE_DECAY {
            return Err(Error::DomainTooSmall {
                ratio,
                limit: EDGE_DECAY,
            });
        }
        Ok(())
    }

    /// Composite Simpson approximation of the integral over the grid.
    pub fn integrate(&self) -> Complex64 {
        let n = self.values.len();
        let mut odd = Complex64::new(0.0, 0.0);
        let mut even = Complex64::new(0.0, 0.0);
        for (i, v) in self.values.iter().enumerate().take(n - 1).skip(1) {
            if i % 2 == 1 {
                odd += v;
            } else {
                even += v;
            }
        }
        let ends = self.values[0] + self.values[n - 1];
        (ends + odd * 4.0 + even * 2.0) * (self.grid.spacing() / 3.0)
    }

    /// Like [`integrate`](Self::integrate), but refuses functions that have
    /// not decayed at the domain edges.
    pub fn integrate_localized(&self) -> Result<Complex64> {
        self.check_edge_decay()?;
        Ok(self.integrate())
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let product = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(GridFunction {
            grid: self.grid,
            values: product,
        }
        .integrate())
    }

    pub fn norm_sq(&self) -> f64 {
        self.overlap(self).map(|o| o.re).unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: Complex64) -> GridFunction {
        self.map(|_, v| v * factor)
    }

    /// `x f(x)`.
    pub fn apply_multiplication(&self) -> GridFunction {
        self.map(|x, v| v * x)
    }

    /// `-i f'(x)` via fourth-order finite differences.
    pub fn apply_derivative(&self) -> GridFunction {
        let f = &self.values;
        let n = f.len();
        let inv = 1.0 / (12.0 * self.grid.spacing());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[0] = (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) * inv;
        out[1] = (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) * inv;
        for i in 2..n - 2 {
            out[i] = (f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) * inv;
        }
        out[n - 2] =
            (-f[n - 5] + f[n - 4] * 6.0 - f[n - 3] * 18.0 + f[n - 2] * 10.0 + f[n - 1] * 3.0) * inv;
        out[n - 1] = (f[n - 5] * 3.0 - f[n - 4] * 16.0 + f[n - 3] * 36.0 - f[n - 2] * 48.0
            + f[n - 1] * 25.0)
            * inv;
        let minus_i = Complex64::new(0.0, -1.0);
        GridFunction {
            grid: self.grid,
            values: out.into_iter().map(|d| d * minus_i).collect(),
        }
    }

    /// Applies `g(-i d/dx)` spectrally. The function is treated as periodic
    /// on the grid, so it must have decayed at both edges.
    pub fn apply_momentum_function(&self, g: impl Fn(f64) -> f64) -> GridFunction {
        let n = self.values.len();
        let mut buffer = self.values.clone();
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(n).process(&mut buffer);
        let dp = 2.0 * std::f64::consts::PI / (n as f64 * self.grid.spacing());
        for (k, v) in buffer.iter_mut().enumerate() {
            let signed = if k <= (n - 1) / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            };
            *v *= g(signed * dp) / n as f64;
        }
        planner.plan_fft_inverse(n).process(&mut buffer);
        GridFunction {
            grid: self.grid,
            values: buffer,
        }
    }

    fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> GridFunction {
        let values = self
            .grid
            .nodes()
            .zip(&self.values)
            .map(|(x, v)| f(x, *v))
            .collect();
        GridFunction {
            grid: self.grid,
            values,
        }
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(grid: Grid, center: f64, sigma: f64) -> GridFunction {
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        GridFunction::from_real_fn(grid, |x| {
            norm * (-(x - center).powi(2) / (4.0 * sigma * sigma)).exp()
        })
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 257).is_ok());
        assert!(Grid::new(0.0, 1.0, 258).is_err());
        assert!(Grid::new(0.0, 1.0, 255).is_err());
        assert!(Grid::new(1.0, 1.0, 257).is_err());
        let g = Grid::new(-2.0, 3.0, 257).unwrap();
        assert_eq!(g.node(256), 3.0);
        assert_eq!(g.node(0), -2.0);
    }

    #[test]
    fn integrate_constant() {
        let grid = Grid::new(0.0, 1.0, 257).unwrap();
        let f = GridFunction::from_real_fn(grid, |_| 1.0);
        assert!((f.integrate() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // a constant has not decayed at the edges
        assert!(matches!(
            f.integrate_localized(),
            Err(Error::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn integrate_normal_density() {
        let grid = Grid::symmetric(10.0, 2049).unwrap();
        let f = GridFunction::from_real_fn(grid, |x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt());
        let total = f.integrate_localized().unwrap();
        assert!((total.re - 1.0).abs() < 1e-10);
        assert_eq!(total.im, 0.0);
    }

    #[test]
    fn integrate_odd_function_vanishes() {
        let grid = Grid::symmetric(10.0, 2049).unwrap();
        let f = GridFunction::from_real_fn(grid, |x| x * (-x * x).exp());
        assert!(f.integrate().norm() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let grid = Grid::symmetric(12.0, 4097).unwrap();
        let g0 = gaussian(grid, 0.0, 1.0);
        assert!((g0.overlap(&g0).unwrap().re - 1.0).abs() < 1e-10);
        let odd = g0.apply_multiplication();
        assert!(g0.overlap(&odd).unwrap().norm() < 1e-10);
        let g1 = gaussian(grid, 0.12, 1.0);
        // closed-form overlap of unit-width Gaussians: exp(-d^2/8)
        let expected = (-0.12f64.powi(2) / 8.0).exp();
        assert!((g0.overlap(&g1).unwrap().re - expected).abs() < 1e-8);
        assert!((expected - 0.998201).abs() < 1e-6);
    }

    #[test]
    fn overlap_rejects_grid_mismatch() {
        let a = gaussian(Grid::symmetric(12.0, 4097).unwrap(), 0.0, 1.0);
        let b = gaussian(Grid::symmetric(12.0, 2049).unwrap(), 0.0, 1.0);
        assert_eq!(a.overlap(&b), Err(Error::GridMismatch));
    }

    #[test]
    fn multiplication_examples() {
        let grid = Grid::new(-1.0, 1.0, 257).unwrap();
        let one = GridFunction::from_real_fn(grid, |_| 1.0);
        let x = one.apply_multiplication();
        for (i, v) in x.values().iter().enumerate() {
            assert_eq!(v.re, grid.node(i));
        }
        let grid = Grid::symmetric(12.0, 4097).unwrap();
        let g = gaussian(grid, 0.7, 1.0);
        let mean = g.overlap(&g.apply_multiplication()).unwrap();
        assert!((mean.re - 0.7).abs() < 1e-8);
    }

    #[test]
    fn derivative_of_plane_wave() {
        let grid = Grid::symmetric(20.0, 4097).unwrap();
        let k = 1.3;
        let window = |x: f64| (-x * x / 50.0).exp();
        let f = GridFunction::from_fn(grid, |x| Complex64::from_polar(window(x), k * x));
        let d = f.apply_derivative();
        // -i d/dx [w e^{ikx}] = k w e^{ikx} - i w' e^{ikx}
        let h = grid.spacing();
        let mut max_err: f64 = 0.0;
        for i in 2..grid.len() - 2 {
            let x = grid.node(i);
            let w = window(x);
            let dw = -2.0 * x / 50.0 * w;
            let exact = Complex64::from_polar(1.0, k * x) * Complex64::new(k * w, -dw);
            max_err = max_err.max((d.values()[i] - exact).norm());
        }
        assert!(
            max_err < 10.0 * h.powi(4) * k.powi(5),
            "max_err = {max_err}"
        );
    }

    #[test]
    fn derivative_parity() {
        let grid = Grid::symmetric(12.0, 4097).unwrap();
        let d = gaussian(grid, 0.0, 1.0).apply_derivative();
        let n = grid.len();
        for i in 0..n {
            let v = d.values()[i];
            assert_eq!(v.re, 0.0);
            assert!((v.im + d.values()[n - 1 - i].im).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_fourth_order_convergence() {
        let f = |x: f64| (-x * x / 2.0).exp() * (3.0 * x).sin();
        let df = |x: f64| (-x * x / 2.0).exp() * (3.0 * (3.0 * x).cos() - x * (3.0 * x).sin());
        let max_err = |n: usize| {
            let grid = Grid::symmetric(10.0, n).unwrap();
            let d = GridFunction::from_real_fn(grid, f).apply_derivative();
            (2..n - 2)
                .map(|i| (d.values()[i] - Complex64::new(0.0, -df(grid.node(i)))).norm())
                .fold(0.0, f64::max)
        };
        let coarse = max_err(513);
        let fine = max_err(1025);
        let ratio = coarse / fine;
        assert!((ratio - 16.0).abs() < 1.0, "ratio = {ratio}");
    }

    #[test]
    fn edge_stencils_are_fourth_order() {
        // exact for quartic polynomials
        let grid = Grid::new(0.0, 1.0, 257).unwrap();
        let f = GridFunction::from_real_fn(grid, |x| x.powi(4) - 2.0 * x.powi(3) + x);
        let d = f.apply_derivative();
        for i in [0, 1, 128, 255, 256] {
            let x = grid.node(i);
            let exact = 4.0 * x.powi(3) - 6.0 * x * x + 1.0;
            assert!((d.values()[i].im + exact).abs() < 1e-9, "node {i}");
        }
    }

    #[test]
    fn momentum_function_matches_derivative() {
        let grid = Grid::symmetric(12.0, 4097).unwrap();
        let f = GridFunction::from_fn(grid, |x| {
            Complex64::from_polar((-x * x / 4.0).exp(), 2.0 * x)
        });
        let spectral = f.apply_momentum_function(|p| p);
        let fd = f.apply_derivative();
        let err = spectral
            .values()
            .iter()
            .zip(fd.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-7, "err = {err}");
    }
}

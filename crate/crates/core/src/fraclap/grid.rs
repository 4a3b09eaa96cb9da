use std::io::{Read, Write};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples of a scalar field on the cube `[−L, L)^dim`, `shape[i]` points per
/// axis, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    dim: usize,
    shape: Vec<usize>,
    spacing: f64,
    half_width: f64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    dim: usize,
    shape: Vec<usize>,
    spacing: f64,
    half_width: f64,
}

impl GridFunction {
    pub fn new(dim: usize, points: usize, half_width: f64, values: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Domain(format!("grid dimension {dim} not in 1..=3")));
        }
        if points < 2 || !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Domain("grid needs at least 2 points and a positive half-width".into()));
        }
        if values.len() != points.pow(dim as u32) {
            return Err(Error::Domain(format!(
                "expected {} values, got {}",
                points.pow(dim as u32),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid value {bad}")));
        }
        Ok(GridFunction { dim, shape: vec![points; dim], spacing: 2.0 * half_width / points as f64, half_width, values })
    }

    /// Sample `f` at every grid point.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(dim: usize, points: usize, half_width: f64, f: F) -> Result<Self> {
        let h = 2.0 * half_width / points as f64;
        let total = points.pow(dim as u32);
        let mut x = vec![0.0; dim];
        let values = (0..total)
            .map(|idx| {
                let mut rest = idx;
                for axis in (0..dim).rev() {
                    x[axis] = -half_width + (rest % points) as f64 * h;
                    rest /= points;
                }
                f(&x)
            })
            .collect();
        Self::new(dim, points, half_width, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> usize {
        self.shape[0]
    }

    /// Coordinate of index `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing
    }

    /// Index of the grid point nearest `x` along one axis.
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((x + self.half_width) / self.spacing).round();
        (i.max(0.0) as usize).min(self.points() - 1)
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        let flat = idx.iter().fold(0, |acc, &i| acc * self.points() + i);
        self.values[flat]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoid (for periodic data: rectangle) rule over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing.powi(self.dim as i32)
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.dim, self.points(), self.half_width, values)
    }

    /// JSON header line followed by little-endian `f64` values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            dim: self.dim,
            shape: self.shape.clone(),
            spacing: self.spacing,
            half_width: self.half_width,
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let split = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::InvalidOperator("grid file has no header line".into()))?;
        let header: Header = serde_json::from_slice(&bytes[..split])?;
        let body = &bytes[split + 1..];
        if body.len() % 8 != 0 {
            return Err(Error::Domain("grid payload is not a whole number of f64 values".into()));
        }
        let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        let grid = Self::new(header.dim, header.shape.first().copied().unwrap_or(0), header.half_width, values)?;
        if grid.shape != header.shape {
            return Err(Error::Domain("grid header shape is not a cube".into()));
        }
        Ok(grid)
    }
}

/// Angular frequency of FFT index `k` on `points` samples with spacing `h`.
pub fn frequency(k: usize, points: usize, h: f64) -> f64 {
    let k = if k < points.div_ceil(2) { k as f64 } else { k as f64 - points as f64 };
    2.0 * std::f64::consts::PI * k / (points as f64 * h)
}

/// Reusable forward/inverse transforms on a cube with `points` per axis.
#[derive(Clone)]
pub struct FftPlan {
    dim: usize,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPlan {
    pub fn new(dim: usize, points: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan { dim, points, forward: planner.plan_fft_forward(points), inverse: planner.plan_fft_inverse(points) }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(&*self.forward, data);
    }

    /// Inverse transform including the `1/N` normalisation.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(&*self.inverse, data);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    fn apply(&self, fft: &dyn Fft<f64>, data: &mut [Complex64]) {
        let points = self.points;
        if self.dim == 1 {
            fft.process(data);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); points];
        for axis in 0..self.dim {
            let stride = points.pow((self.dim - 1 - axis) as u32);
            let block = stride * points;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, c) in line.iter_mut().enumerate() {
                        *c = data[base + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, c) in line.iter().enumerate() {
                        data[base + i * stride] = *c;
                    }
                }
            }
        }
    }
}

/// `|ξ|²` at every point of the dual grid, in the same flat layout.
pub fn squared_frequencies(dim: usize, points: usize, h: f64) -> Vec<f64> {
    let freq: Vec<f64> = (0..points).map(|k| frequency(k, points, h).powi(2)).collect();
    let total = points.pow(dim as u32);
    (0..total)
        .map(|idx| {
            let mut rest = idx;
            let mut s = 0.0;
            for _ in 0..dim {
                s += freq[rest % points];
                rest /= points;
            }
            s
        })
        .collect()
}

/// Fourier multiplier `|ξ|^{2σ}` on the periodic box, zero mode mapped to 0.
pub fn spectral_apply(f: &GridFunction, sigma: f64) -> Result<GridFunction> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be a finite non-negative number, got {sigma}")));
    }
    let plan = FftPlan::new(f.dim, f.points());
    let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan.forward(&mut data);
    let xi2 = squared_frequencies(f.dim, f.points(), f.spacing);
    for (c, &k2) in data.iter_mut().zip(&xi2) {
        *c *= if k2 == 0.0 { 0.0 } else { k2.powf(sigma) };
    }
    plan.inverse(&mut data);
    f.with_values(data.iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_is_an_eigenfunction() {
        let f = GridFunction::from_fn(1, 64, PI, |x| x[0].sin()).unwrap();
        for sigma in [1.0, 0.5, 0.3] {
            let g = spectral_apply(&f, sigma).unwrap();
            for (a, b) in g.values().iter().zip(f.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let f = GridFunction::from_fn(2, 16, 3.0, |_| 2.5).unwrap();
        let g = spectral_apply(&f, 0.75).unwrap();
        assert!(g.sup_norm() < 1e-13);
    }

    #[test]
    fn second_axis_eigenfunction_in_3d() {
        // cos(x) + cos(2z): eigenvalues 1 and 4 for the Laplacian
        let f = GridFunction::from_fn(3, 16, PI, |x| x[0].cos() + (2.0 * x[2]).cos()).unwrap();
        let g = spectral_apply(&f, 1.0).unwrap();
        let expected = GridFunction::from_fn(3, 16, PI, |x| x[0].cos() + 4.0 * (2.0 * x[2]).cos()).unwrap();
        for (a, b) in g.values().iter().zip(expected.values()) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn negative_sigma_rejected() {
        let f = GridFunction::from_fn(1, 8, 1.0, |_| 0.0).unwrap();
        assert!(spectral_apply(&f, -0.5).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let f = GridFunction::from_fn(2, 8, 2.0, |x| x[0] - 3.0 * x[1]).unwrap();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        let g = GridFunction::read_binary(&buf[..]).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn non_finite_values_rejected() {
        assert!(GridFunction::new(1, 2, 1.0, vec![0.0, f64::NAN]).is_err());
    }
}

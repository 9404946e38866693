//! Uniform centered lattices on `[-L, L)^d` and continuum-scaled discrete
//! Fourier transforms on them.
//!
//! Lattice points are `x_j = -L + j·h`, `h = 2L/n`, `j ∈ [0, n)` per axis,
//! stored row-major with the last axis fastest. The dual lattice is
//! `k_m = π m / L`, `m ∈ [-n/2, n/2)`; spectral values are stored in FFT
//! order, i.e. slot `q` holds `m = q` for `q < n/2` and `m = q - n` above.
//!
//! The scaling is chosen so that discrete objects approximate the
//! continuum integrals directly:
//!
//! ```text
//! forward:  F(k) = h^d Σ_x e^{-i k·x} f(x)
//! inverse:  f(x) = (2π)^{-d} (π/L)^d Σ_k e^{i k·x} F(k)
//! ```

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boundary-to-peak ratio above which periodic convolution is flagged.
pub const WRAP_TOL: f64 = 1e-8;
/// Largest lattice we are willing to allocate (points).
pub const MAX_POINTS: usize = 1 << 27;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field has {got} values, grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("spectral value {0} exceeds 1 in modulus; not the transform of a probability density")]
    NotAProbabilityTransform(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    half_width: f64,
}

impl GridSpec {
    /// `dim` axes of `n` points covering `[-half_width, half_width)`.
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self, SpectralError> {
        if dim == 0 {
            return Err(SpectralError::InvalidGrid("dimension must be positive".into()));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!("n = {n} must be a power of two ≥ 8")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(SpectralError::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        let total = (n as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total > MAX_POINTS as u128 {
            return Err(SpectralError::InvalidGrid(format!("{n}^{dim} points exceeds the {MAX_POINTS} limit")));
        }
        Ok(Self { dim, n, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `(π/L)^d`.
    pub fn dual_cell_volume(&self) -> f64 {
        (PI / self.half_width).powi(self.dim as i32)
    }

    /// `(2L)^d`, the volume of the periodic box.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    pub fn axis_coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Coordinates of lattice point `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        self.unravel(index).into_iter().map(|j| self.axis_coordinate(j)).collect()
    }

    /// Index of the lattice point nearest to `x`, if inside the box.
    pub fn nearest_index(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim {
            return None;
        }
        let h = self.spacing();
        let mut multi = Vec::with_capacity(self.dim);
        for &c in x {
            let j = ((c + self.half_width) / h).round();
            if !(0.0..self.n as f64).contains(&j) {
                return None;
            }
            multi.push(j as usize);
        }
        Some(self.ravel(&multi))
    }

    /// Index of `x` if it is a lattice point (up to `1e-9·h`).
    pub fn lattice_index(&self, x: &[f64]) -> Option<usize> {
        let i = self.nearest_index(x)?;
        let tol = 1e-9 * self.spacing();
        self.point(i).iter().zip(x).all(|(p, q)| (p - q).abs() <= tol).then_some(i)
    }

    /// Index of the origin, which is always a lattice point.
    pub fn origin_index(&self) -> usize {
        self.ravel(&vec![self.n / 2; self.dim])
    }

    /// Signed frequency number `m` stored in FFT slot `q`.
    pub fn signed_mode(&self, q: usize) -> i64 {
        if q < self.n / 2 {
            q as i64
        } else {
            q as i64 - self.n as i64
        }
    }

    /// Dual-lattice frequency vector of spectral slot `index`.
    pub fn frequency(&self, index: usize) -> Vec<f64> {
        let dk = PI / self.half_width;
        self.unravel(index).into_iter().map(|q| dk * self.signed_mode(q) as f64).collect()
    }

    /// Slot of `-k` given the slot of `k` (wrapping the Nyquist mode onto itself).
    pub fn negated_index(&self, index: usize) -> usize {
        let multi: Vec<usize> = self.unravel(index).into_iter().map(|q| (self.n - q) % self.n).collect();
        self.ravel(&multi)
    }

    /// Index of the `-x` lattice point, when it exists inside the box.
    pub fn mirror_index(&self, index: usize) -> Option<usize> {
        let multi = self.unravel(index);
        if multi.contains(&0) {
            return None;
        }
        let m: Vec<usize> = multi.into_iter().map(|j| self.n - j).collect();
        Some(self.ravel(&m))
    }

    fn parity(&self, index: usize) -> bool {
        self.unravel(index).into_iter().sum::<usize>() % 2 == 1
    }
}

/// Real samples on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `h^d Σ f`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at `x` if `x` is a lattice point.
    pub fn at(&self, x: &[f64]) -> Option<f64> {
        self.grid.lattice_index(x).map(|i| self.values[i])
    }

    /// Multilinear interpolation; `None` outside `[-L, L-h]^d`.
    pub fn interpolate(&self, x: &[f64]) -> Option<f64> {
        let g = &self.grid;
        if x.len() != g.dim {
            return None;
        }
        let h = g.spacing();
        let mut base = Vec::with_capacity(g.dim);
        let mut frac = Vec::with_capacity(g.dim);
        for &c in x {
            let s = (c + g.half_width) / h;
            if !(s >= 0.0 && s <= (g.n - 1) as f64) {
                return None;
            }
            let j = (s.floor() as usize).min(g.n - 2);
            base.push(j);
            frac.push(s - j as f64);
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << g.dim) {
            let mut w = 1.0;
            let mut multi = base.clone();
            for a in 0..g.dim {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    multi[a] += 1;
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[g.ravel(&multi)];
            }
        }
        Some(acc)
    }

    /// Largest `|f|` on the two outermost layers of the box, relative to `max|f|`.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.n;
        let edge = (0..self.values.len())
            .filter(|&i| self.grid.unravel(i).iter().any(|&j| j == 0 || j == n - 1))
            .fold(0.0f64, |m, i| m.max(self.values[i].abs()));
        edge / peak
    }

    /// Largest `|f(x) - f(-x)|` over mirrored lattice pairs, relative to `max|f|`.
    pub fn symmetry_defect(&self) -> f64 {
        let peak = self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.values.len())
            .filter_map(|i| self.grid.mirror_index(i).map(|j| (self.values[i] - self.values[j]).abs()))
            .fold(0.0, f64::max)
            / peak
    }

    /// Writes `x1,...,xd,<value_name>` rows.
    pub fn write_csv<W: Write>(&self, out: W, value_name: &str) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.grid.dim).map(|a| format!("x{a}")).collect();
        header.push(value_name.to_string());
        w.write_record(&header)?;
        let mut row = Vec::with_capacity(self.grid.dim + 1);
        for (i, v) in self.values.iter().enumerate() {
            row.clear();
            row.extend(self.grid.point(i).iter().map(|c| format!("{c}")));
            row.push(format!("{v:e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Complex samples on the dual lattice, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    /// Samples a function of the frequency vector on the dual lattice.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let values = (0..grid.len()).into_par_iter().map(|i| f(&grid.frequency(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value at the zero frequency.
    pub fn zero_mode(&self) -> Complex64 {
        self.values[0]
    }

    /// Pointwise map.
    pub fn map<F>(&self, f: F) -> SpectralField
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        SpectralField { grid: self.grid, values: self.values.par_iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SpectralField) -> Result<SpectralField, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let values = self.values.par_iter().zip(other.values.par_iter()).map(|(a, b)| a * b).collect();
        Ok(SpectralField { grid: self.grid, values })
    }

    /// `max |F(k) - conj F(-k)|` relative to `max |F|`.
    pub fn hermitian_defect(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(f64::MIN_POSITIVE);
        (0..self.values.len())
            .map(|i| (self.values[i] - self.values[self.grid.negated_index(i)].conj()).norm())
            .fold(0.0, f64::max)
            / peak
    }

    /// `max |F(k)|` over `k ≠ 0`.
    pub fn max_abs_nonzero_mode(&self) -> f64 {
        self.values[1..].iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Samples `f` at every lattice point.
pub fn sample_on_grid<F>(f: F, grid: &GridSpec) -> RealField
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values = (0..grid.len()).into_par_iter().map(|i| f(&grid.point(i))).collect();
    RealField { grid: *grid, values }
}

/// In-place unnormalized d-dimensional FFT.
fn fft_nd(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let plan: Arc<dyn Fft<f64>> = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for axis in 0..grid.dim {
        let inner = n.pow((grid.dim - 1 - axis) as u32);
        let block = n * inner;
        if inner == 1 {
            data.par_chunks_mut(n * 64.min(data.len() / n).max(1)).for_each(|chunk| {
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(chunk, &mut scratch);
            });
            continue;
        }
        data.par_chunks_mut(block).for_each(|blk| {
            let mut line = vec![Complex64::default(); n];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            for j in 0..inner {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = blk[t * inner + j];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    blk[t * inner + j] = *v;
                }
            }
        });
    }
}

/// Continuum-scaled forward transform.
pub fn dft_forward(field: &RealField) -> SpectralField {
    let grid = field.grid;
    let mut data: Vec<Complex64> = field.values.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&grid, &mut data, false);
    let scale = grid.cell_volume();
    data.par_iter_mut().enumerate().for_each(|(i, v)| {
        // e^{-i k_m (-L)} = (-1)^m
        let s = if grid.parity(i) { -scale } else { scale };
        *v *= s;
    });
    SpectralField { grid, values: data }
}

/// Continuum-scaled inverse transform, complex result.
pub fn dft_inverse_complex(spec: &SpectralField) -> Vec<Complex64> {
    let grid = spec.grid;
    let scale = 1.0 / (grid.len() as f64 * grid.cell_volume());
    let mut data: Vec<Complex64> = spec
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| if grid.parity(i) { -v * scale } else { v * scale })
        .collect();
    fft_nd(&grid, &mut data, true);
    data
}

/// Continuum-scaled inverse transform; the imaginary part is dropped.
pub fn dft_inverse(spec: &SpectralField) -> RealField {
    let values = dft_inverse_complex(spec).into_iter().map(|c| c.re).collect();
    RealField { grid: spec.grid, values }
}

/// Trigonometric interpolant `(2L)^{-d} Σ_m F(k_m) e^{i k_m·x}` of a
/// spectral field at an arbitrary point (real part).
pub fn trig_interpolate(spec: &SpectralField, x: &[f64]) -> Result<f64, SpectralError> {
    let grid = spec.grid;
    if x.len() != grid.dim {
        return Err(SpectralError::LengthMismatch { expected: grid.dim, got: x.len() });
    }
    let phases: Vec<Vec<Complex64>> = x
        .iter()
        .map(|&xa| {
            (0..grid.n)
                .map(|q| Complex64::from_polar(1.0, PI / grid.half_width * grid.signed_mode(q) as f64 * xa))
                .collect()
        })
        .collect();
    let last = &phases[grid.dim - 1];
    let sum: f64 = spec
        .values
        .par_chunks(grid.n)
        .enumerate()
        .map(|(row, chunk)| {
            let mut outer = Complex64::new(1.0, 0.0);
            let mut r = row;
            for a in (0..grid.dim - 1).rev() {
                outer *= phases[a][r % grid.n];
                r /= grid.n;
            }
            let inner: Complex64 = chunk.iter().zip(last).map(|(v, p)| v * p).sum();
            (outer * inner).re
        })
        .sum();
    Ok(sum / grid.box_volume())
}

/// Raised when a periodic convolution operand does not decay at the box edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WrapAroundRisk {
    /// Worst boundary-to-peak ratio among the operands.
    pub boundary_ratio: f64,
}

/// Continuum-scaled periodic convolution `∫ f(y) g(x-y) dy`.
pub fn convolve(f: &RealField, g: &RealField) -> Result<(RealField, Option<WrapAroundRisk>), SpectralError> {
    if f.grid != g.grid {
        return Err(SpectralError::GridMismatch);
    }
    let ratio = f.boundary_ratio().max(g.boundary_ratio());
    let risk = if ratio > WRAP_TOL {
        log::warn!("periodic convolution operand has boundary/peak ratio {ratio:.3e}; result is periodized");
        Some(WrapAroundRisk { boundary_ratio: ratio })
    } else {
        None
    };
    let prod = dft_forward(f).mul(&dft_forward(g))?;
    Ok((dft_inverse(&prod), risk))
}

/// Integer power by repeated squaring.
pub fn complex_powi(base: Complex64, mut k: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    while k > 0 {
        if k & 1 == 1 {
            acc *= b;
        }
        b *= b;
        k >>= 1;
    }
    acc
}

/// Pointwise `k`-th power of the transform of a probability density, i.e.
/// the transform of its `k`-fold convolution.
pub fn spectral_power(hat: &SpectralField, k: u32) -> Result<SpectralField, SpectralError> {
    if let Some(v) = hat.values.iter().map(|v| v.norm()).find(|&m| m > 1.0 + 1e-8) {
        return Err(SpectralError::NotAProbabilityTransform(v));
    }
    Ok(hat.map(|v| complex_powi(v, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gauss3(grid: &GridSpec) -> RealField {
        let c = (2.0 * PI).powf(-1.5);
        sample_on_grid(|x| c * (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(), grid)
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(3, 12, 1.0).is_err());
        assert!(GridSpec::new(3, 4, 1.0).is_err());
        assert!(GridSpec::new(3, 16, 0.0).is_err());
        assert!(GridSpec::new(0, 16, 1.0).is_err());
        assert!(GridSpec::new(9, 1024, 1.0).is_err());
        let g = GridSpec::new(2, 8, 2.0).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.point(g.origin_index()), vec![0.0, 0.0]);
    }

    #[test]
    fn index_maps_are_inverse() {
        let g = GridSpec::new(3, 8, 1.0).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.ravel(&g.unravel(i)), i);
            assert_eq!(g.nearest_index(&g.point(i)), Some(i));
            assert_eq!(g.negated_index(g.negated_index(i)), i);
        }
        assert_eq!(g.frequency(0), vec![0.0; 3]);
        assert_eq!(g.signed_mode(4), -4);
    }

    #[test]
    fn constant_and_odd_samples() {
        let g = GridSpec::new(3, 16, 8.0).unwrap();
        let ones = sample_on_grid(|_| 1.0, &g);
        assert!(ones.values().iter().all(|&v| v == 1.0));
        // odd functions cancel except for the unpaired -L face, where e^{-L²} is negligible
        let odd = sample_on_grid(|x| x[0] * (-x.iter().map(|v| v * v).sum::<f64>()).exp(), &g);
        assert!(odd.values().iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass_on_grid() {
        let g = GridSpec::new(3, 64, 8.0).unwrap();
        assert_relative_eq!(gauss3(&g).integral(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn forward_matches_analytic_gaussian_transform() {
        let g = GridSpec::new(3, 128, 10.0).unwrap();
        let spec = dft_forward(&gauss3(&g));
        assert_relative_eq!(spec.zero_mode().re, 1.0, epsilon = 1e-12);
        // k = (π/L)·m; pick m with |k| = 1 is not on the lattice, compare every mode
        let worst = (0..g.len())
            .map(|i| {
                let k2: f64 = g.frequency(i).iter().map(|v| v * v).sum();
                (spec.values()[i] - Complex64::new((-0.5 * k2).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
        assert!(spec.hermitian_defect() < 1e-10);
    }

    #[test]
    fn roundtrip_random_field() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = GridSpec::new(3, 16, 2.0).unwrap();
        let f = RealField::new(g, (0..g.len()).map(|_| rng.random::<f64>() - 0.5).collect()).unwrap();
        let back = dft_inverse(&dft_forward(&f));
        let err = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10 * f.max_abs());
    }

    #[test]
    fn gaussian_self_convolution_at_origin() {
        let g = GridSpec::new(3, 64, 10.0).unwrap();
        let a = gauss3(&g);
        let (c, risk) = convolve(&a, &a).unwrap();
        assert!(risk.is_none());
        let expected = (4.0 * PI).powf(-1.5);
        assert_relative_eq!(c.values()[g.origin_index()], expected, max_relative = 1e-9);
        assert_relative_eq!(c.values()[g.origin_index()], 0.022_448_4, max_relative = 1e-5);
    }

    #[test]
    fn convolution_with_unit_spike_is_identity() {
        let g = GridSpec::new(2, 32, 6.0).unwrap();
        let f = sample_on_grid(|x| (-(x[0] - 0.5).powi(2) - x[1] * x[1]).exp(), &g);
        let mut spike = RealField::zeros(g);
        spike.values_mut()[g.origin_index()] = 1.0 / g.cell_volume();
        let (c, _) = convolve(&f, &spike).unwrap();
        for (a, b) in f.values().iter().zip(c.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn wrap_guard_flags_slow_decay() {
        let g = GridSpec::new(1, 64, 5.0).unwrap();
        let slow = sample_on_grid(|x| 1.0 / (1.0 + x[0] * x[0]), &g);
        let fast = sample_on_grid(|x| (-x[0] * x[0]).exp(), &g);
        assert!(convolve(&slow, &fast).unwrap().1.is_some());
        assert!(convolve(&fast, &fast).unwrap().1.is_none());
    }

    #[test]
    fn spectral_power_basics() {
        let g = GridSpec::new(3, 64, 10.0).unwrap();
        let hat = dft_forward(&gauss3(&g));
        assert_eq!(spectral_power(&hat, 1).unwrap(), hat);
        let p5 = spectral_power(&hat, 5).unwrap();
        assert_relative_eq!(p5.zero_mode().re, 1.0, epsilon = 1e-12);
        let a5 = dft_inverse(&p5);
        assert_relative_eq!(a5.values()[g.origin_index()], (2.0 * PI * 5.0).powf(-1.5), max_relative = 1e-6);
        let too_big = hat.map(|v| v * 2.0);
        assert!(spectral_power(&too_big, 2).is_err());
    }
}

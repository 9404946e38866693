use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::kernels::sphere_area;
use crate::quadrature::tanh_sinh;
use crate::spectral::{sample_on_grid, GridSpec, RealField};

/// `f` is below `1e-16·height` beyond this many widths from the center.
const GAUSSIAN_EXTENT_WIDTHS: f64 = 8.6;

/// Bounded, integrable functions that potentials and Monte Carlo
/// functionals are evaluated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `height · exp(-|y - center|² / (2 width²))`
    GaussianBump { center: Vec<f64>, width: f64, height: f64 },
    /// `height · exp(1 - 1/(1 - s²))` for `s = |y - center|/radius < 1`, zero outside.
    CompactBump { center: Vec<f64>, radius: f64, height: f64 },
    /// Lattice samples, multilinearly interpolated and zero outside the box.
    #[serde(skip)]
    Grid(RealField),
}

/// `∫_0^1 s^{d-1} exp(1 - 1/(1-s²)) ds`
fn compact_profile_moment(d: usize) -> f64 {
    tanh_sinh(
        |s| {
            let q = 1.0 - s * s;
            if q <= 0.0 {
                0.0
            } else {
                s.powi(d as i32 - 1) * (1.0 - 1.0 / q).exp()
            }
        },
        0.0,
        1.0,
        1e-14,
    )
    .value
}

impl TestFunction {
    /// Gaussian bump of unit mass.
    pub fn unit_gaussian(center: Vec<f64>, width: f64) -> Self {
        let d = center.len() as f64;
        let height = (2.0 * PI * width * width).powf(-d / 2.0);
        TestFunction::GaussianBump { center, width, height }
    }

    /// Compact bump with total mass `mass`.
    pub fn compact_with_mass(center: Vec<f64>, radius: f64, mass: f64) -> Self {
        let d = center.len();
        let unit = sphere_area(d) * radius.powi(d as i32) * compact_profile_moment(d);
        TestFunction::CompactBump { center, radius, height: mass / unit }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::GaussianBump { center, .. } | TestFunction::CompactBump { center, .. } => center.len(),
            TestFunction::Grid(f) => f.grid().dim(),
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        match self {
            TestFunction::GaussianBump { center, width, height } => {
                let r2: f64 = y.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                height * (-r2 / (2.0 * width * width)).exp()
            }
            TestFunction::CompactBump { center, radius, height } => {
                let r2: f64 = y.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                let q = 1.0 - r2 / (radius * radius);
                if q <= 0.0 {
                    0.0
                } else {
                    height * (1.0 - 1.0 / q).exp()
                }
            }
            TestFunction::Grid(f) => f.interpolate(y).unwrap_or(0.0),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            TestFunction::GaussianBump { height, .. } | TestFunction::CompactBump { height, .. } => height.abs(),
            TestFunction::Grid(f) => f.max_abs(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        match self {
            TestFunction::GaussianBump { center, width, height } => {
                height.abs() * (2.0 * PI * width * width).powf(center.len() as f64 / 2.0)
            }
            TestFunction::CompactBump { center, radius, height } => {
                let d = center.len();
                height.abs() * sphere_area(d) * radius.powi(d as i32) * compact_profile_moment(d)
            }
            TestFunction::Grid(f) => f.grid().cell_volume() * f.values().iter().map(|v| v.abs()).sum::<f64>(),
        }
    }

    /// `‖f‖_∞ + ‖f‖₁`.
    pub fn cl_norm(&self) -> f64 {
        self.sup_norm() + self.l1_norm()
    }

    /// A ball outside of which `f` vanishes (or is below `1e-16·‖f‖_∞`).
    pub fn extent(&self) -> (Vec<f64>, f64) {
        match self {
            TestFunction::GaussianBump { center, width, .. } => (center.clone(), GAUSSIAN_EXTENT_WIDTHS * width),
            TestFunction::CompactBump { center, radius, .. } => (center.clone(), *radius),
            TestFunction::Grid(f) => {
                let g = f.grid();
                (vec![0.0; g.dim()], g.half_width() * (g.dim() as f64).sqrt())
            }
        }
    }

    /// Lattice samples; grid functions on the same lattice are returned as is.
    pub fn sample(&self, grid: &GridSpec) -> RealField {
        match self {
            TestFunction::Grid(f) if f.grid() == grid => f.clone(),
            other => sample_on_grid(|y| other.eval(y), grid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn norms() {
        let f = TestFunction::unit_gaussian(vec![0.0; 3], 0.5);
        assert_relative_eq!(f.l1_norm(), 1.0, max_relative = 1e-14);
        let g = TestFunction::compact_with_mass(vec![1.0, 0.0, 0.0], 0.7, 2.5);
        assert_relative_eq!(g.l1_norm(), 2.5, max_relative = 1e-12);
        assert_eq!(g.eval(&[1.7, 0.0, 0.0]), 0.0);
        assert_relative_eq!(g.eval(&[1.0, 0.0, 0.0]), g.sup_norm());
    }

    #[test]
    fn compact_mass_by_lattice_sum() {
        let f = TestFunction::compact_with_mass(vec![0.0; 3], 1.5, 1.0);
        let grid = GridSpec::new(3, 64, 2.0).unwrap();
        assert_relative_eq!(f.sample(&grid).integral(), 1.0, max_relative = 1e-6);
    }
}

//! Green function and potentials of Brownian motion with generator Δ.
//!
//! The heat kernel is `(4πt)^{-d/2} exp(-|x|²/(4t))`, and its time integral
//! is the Newtonian kernel `C(d)|x|^{2-d}` with
//! `C(d) = Γ(d/2-1)/(4π^{d/2})`. [`heat_kernel_time_integral`] computes
//! the time integral by quadrature and is the independent check on `C(d)`.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::gamma;

use super::{GreenError, TestFunction};
use crate::kernels::sphere_area;
use crate::quadrature::{gauss_kronrod, gauss_legendre};

/// `C(d) = Γ(d/2 - 1) / (4 π^{d/2})`.
pub fn newtonian_constant(d: usize) -> Result<f64, GreenError> {
    if d < 3 {
        return Err(GreenError::DimensionTooSmall { dim: d });
    }
    let h = d as f64 / 2.0;
    Ok(gamma(h - 1.0) / (4.0 * PI.powf(h)))
}

/// Checks `C(d)` against the heat-kernel quadrature at radii 1 and 2 and
/// returns it when both agree within `tol` (relative).
pub fn certify_newtonian_constant(d: usize, tol: f64) -> Result<f64, GreenError> {
    let c = newtonian_constant(d)?;
    for r in [1.0, 2.0] {
        let q = heat_kernel_time_integral(r, d, 1e4, tol * 0.1)?;
        let predicted = c * r.powf(2.0 - d as f64);
        let rel = (q.value - predicted).abs() / predicted;
        if rel > tol {
            return Err(GreenError::NotConverged { bound: rel, tol, order: d });
        }
    }
    Ok(c)
}

/// Green function of Brownian motion, `C(d)|x-y|^{2-d}`.
pub fn bm_green(x: &[f64], y: &[f64]) -> Result<f64, GreenError> {
    if x.len() != y.len() {
        return Err(GreenError::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let d = x.len();
    let c = newtonian_constant(d)?;
    let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(GreenError::SingularAtCoincidence);
    }
    Ok(c * r.powf(2.0 - d as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatIntegral {
    pub value: f64,
    pub error: f64,
    /// Horizon up to which the integral was computed by quadrature.
    pub horizon: f64,
}

/// `∫_0^∞ (4πt)^{-d/2} exp(-r²/(4t)) dt` by adaptive quadrature on
/// `[0, T]` plus a bracketed analytic tail; `T` starts at `t_max` and is
/// extended until the relative error is below `tol`.
pub fn heat_kernel_time_integral(r: f64, d: usize, t_max: f64, tol: f64) -> Result<HeatIntegral, GreenError> {
    if d < 3 {
        return Err(GreenError::DimensionTooSmall { dim: d });
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(GreenError::InvalidArgument(format!("radius {r} must be positive")));
    }
    let h = d as f64 / 2.0;
    let norm = (4.0 * PI).powf(-h);
    let integrand = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            norm * t.powf(-h) * (-r * r / (4.0 * t)).exp()
        }
    };
    let mut horizon = t_max.max(r * r);
    loop {
        // geometric breakpoints r²·2^j resolve the peak near t ~ r²/(2d)
        let mut value = 0.0;
        let mut error = 0.0;
        let mut lo = 0.0;
        let mut hi = (r * r / 64.0).min(horizon);
        while lo < horizon {
            let piece = gauss_kronrod(integrand, lo, hi, 1e-16, 200);
            value += piece.value;
            error += piece.error;
            lo = hi;
            hi = (hi * 2.0).min(horizon);
        }
        // ∫_T^∞ norm t^{-h} e^{-r²/4t} dt ∈ [upper - norm (r²/4) T^{-h}/h, upper]
        let upper = norm * horizon.powf(1.0 - h) / (h - 1.0);
        let lower = upper - norm * (r * r / 4.0) * horizon.powf(-h) / h;
        value += 0.5 * (upper + lower);
        error += 0.5 * (upper - lower);
        if error <= tol * value || horizon > 1e15 {
            return Ok(HeatIntegral { value, error, horizon });
        }
        horizon *= 4.0;
    }
}

/// Angular and radial resolution of [`bm_potential`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BmQuadrature {
    /// Gauss–Legendre nodes per polar angle (per sub-range).
    pub polar_nodes: usize,
    /// Trapezoid nodes for the azimuth.
    pub azimuth_nodes: usize,
    /// Absolute tolerance of each radial integral.
    pub radial_tol: f64,
}

impl Default for BmQuadrature {
    fn default() -> Self {
        Self { polar_nodes: 24, azimuth_nodes: 48, radial_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BmPotential {
    pub value: f64,
    /// `‖f‖_∞ + ‖f‖₁`.
    pub cl_norm: f64,
    /// Constant `C` with `|V(f, x)| ≤ C‖f‖_CL`.
    pub cl_constant: f64,
}

/// Quadrature rule on the unit sphere `S^{m-1}` in standard coordinates.
fn sphere_rule(m: usize, polar: usize, azimuth: usize) -> Vec<(Vec<f64>, f64)> {
    if m == 1 {
        return vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)];
    }
    if m == 2 {
        let w = 2.0 * PI / azimuth as f64;
        return (0..azimuth)
            .map(|j| {
                let p = w * j as f64;
                (vec![p.cos(), p.sin()], w)
            })
            .collect();
    }
    // ω = (cos θ, sin θ · ω'), dω = sin^{m-2}θ dθ dω'
    let (x, w) = gauss_legendre(polar);
    let inner = sphere_rule(m - 1, polar, azimuth);
    let mut out = Vec::with_capacity(polar * inner.len());
    for (xi, wi) in x.iter().zip(&w) {
        let theta = 0.5 * PI * (xi + 1.0);
        let (s, c) = theta.sin_cos();
        let wt = 0.5 * PI * wi * s.powi(m as i32 - 2);
        for (dir, wd) in &inner {
            let mut v = Vec::with_capacity(m);
            v.push(c);
            v.extend(dir.iter().map(|u| s * u));
            out.push((v, wt * wd));
        }
    }
    out
}

/// Orthonormal basis whose first vector is `axis` (normalized).
fn basis_with_axis(axis: &[f64]) -> Vec<Vec<f64>> {
    let d = axis.len();
    let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![axis.iter().map(|v| v / norm).collect()];
    for e in 0..d {
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(p, q)| p * q).sum();
            v.iter_mut().zip(b).for_each(|(p, q)| *p -= dot * q);
        }
        let n = v.iter().map(|p| p * p).sum::<f64>().sqrt();
        if n > 1e-8 {
            basis.push(v.into_iter().map(|p| p / n).collect());
        }
        if basis.len() == d {
            break;
        }
    }
    basis
}

/// `V(f, x) = C(d) ∫ f(y)|x-y|^{2-d} dy` for Brownian motion.
///
/// In polar coordinates about `x` the `ρ^{d-1}` Jacobian absorbs the
/// singularity, leaving `C(d) ∫_{S^{d-1}} ∫_0^∞ ρ f(x+ρω) dρ dω`. The
/// radial integral is split at `ρ = 1`; the polar axis points at the
/// support of `f`, and the polar range is split at the cone that contains
/// it so small distant bumps are resolved.
pub fn bm_potential(f: &TestFunction, x: &[f64], quad: &BmQuadrature) -> Result<BmPotential, GreenError> {
    let d = x.len();
    if f.dim() != d {
        return Err(GreenError::DimensionMismatch { expected: d, got: f.dim() });
    }
    let c_d = newtonian_constant(d)?;
    let (center, radius) = f.extent();
    let offset: Vec<f64> = center.iter().zip(x).map(|(c, p)| c - p).collect();
    let dist = offset.iter().map(|v| v * v).sum::<f64>().sqrt();
    let axis = if dist > 1e-12 { offset.clone() } else { {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    } };
    let basis = basis_with_axis(&axis);
    let rho_max = dist + radius;

    // polar sub-ranges: inside and outside the cone around the support
    let cone = if dist > radius { (radius / dist).asin() } else { PI };
    let mut polar_ranges = vec![(0.0, cone)];
    if cone < PI {
        polar_ranges.push((cone, PI));
    }
    let inner = sphere_rule(d - 1, quad.polar_nodes, quad.azimuth_nodes);
    let (gx, gw) = gauss_legendre(quad.polar_nodes);

    let ray = |dir: &[f64]| -> f64 {
        let world: Vec<f64> = (0..d).map(|i| basis.iter().zip(dir).map(|(b, u)| b[i] * u).sum()).collect();
        let g = |rho: f64| {
            let y: Vec<f64> = x.iter().zip(&world).map(|(p, w)| p + rho * w).collect();
            rho * f.eval(&y)
        };
        let near = gauss_kronrod(g, 0.0, 1.0f64.min(rho_max), quad.radial_tol, 400).value;
        let far = if rho_max > 1.0 { gauss_kronrod(g, 1.0, rho_max, quad.radial_tol, 400).value } else { 0.0 };
        near + far
    };

    let mut total = 0.0;
    for (a, b) in polar_ranges {
        let half = 0.5 * (b - a);
        for (xi, wi) in gx.iter().zip(&gw) {
            let theta = a + half * (xi + 1.0);
            let (s, c) = theta.sin_cos();
            let wt = half * wi * s.powi(d as i32 - 2);
            for (dir, wd) in &inner {
                let mut v = Vec::with_capacity(d);
                v.push(c);
                v.extend(dir.iter().map(|u| s * u));
                total += wt * wd * ray(&v);
            }
        }
    }
    let c_near = c_d * sphere_area(d) / 2.0;
    Ok(BmPotential { value: c_d * total, cl_norm: f.cl_norm(), cl_constant: c_near.max(c_d) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn newtonian_constant_values() {
        assert_relative_eq!(newtonian_constant(3).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(newtonian_constant(4).unwrap(), 1.0 / (4.0 * PI * PI), max_relative = 1e-14);
        assert!(newtonian_constant(2).is_err());
    }

    #[test]
    fn heat_integral_reproduces_newtonian_constant() {
        let q = heat_kernel_time_integral(1.0, 3, 100.0, 1e-9).unwrap();
        assert_relative_eq!(q.value, 0.079_577_471_545_947_67, max_relative = 1e-8);
        assert!(q.error <= 1e-9 * q.value);
        let q = heat_kernel_time_integral(1.0, 4, 100.0, 1e-9).unwrap();
        assert_relative_eq!(q.value, 0.025_330_295_910_584_444, max_relative = 1e-8);
        let q2 = heat_kernel_time_integral(2.0, 3, 100.0, 1e-9).unwrap();
        assert_relative_eq!(q2.value, 0.039_788_735_772_973_83, max_relative = 1e-8);
        for d in 3..=6 {
            certify_newtonian_constant(d, 1e-7).unwrap();
        }
    }

    #[test]
    fn heat_integral_scaling_in_r() {
        let base = heat_kernel_time_integral(1.0, 3, 100.0, 1e-10).unwrap().value;
        for r in [5.0, 20.0, 80.0] {
            let v = heat_kernel_time_integral(r, 3, 100.0, 1e-10).unwrap().value;
            assert_relative_eq!(v * r, base, max_relative = 1e-9);
        }
    }

    #[test]
    fn green_values_and_homogeneity() {
        let o = [0.0; 3];
        assert_relative_eq!(bm_green(&o, &[1.0, 0.0, 0.0]).unwrap(), 0.079_577_5, max_relative = 1e-6);
        assert_relative_eq!(bm_green(&o, &[0.0, 2.0, 0.0]).unwrap(), 0.039_788_7, max_relative = 1e-6);
        assert!(matches!(bm_green(&o, &o), Err(GreenError::SingularAtCoincidence)));
        for d in 3..7 {
            let x = vec![0.3; d];
            let y1: Vec<f64> = x.iter().map(|v| v + 0.4).collect();
            let y2: Vec<f64> = x.iter().map(|v| v + 0.8).collect();
            let ratio = bm_green(&x, &y2).unwrap() / bm_green(&x, &y1).unwrap();
            assert_relative_eq!(ratio, 2f64.powi(2 - d as i32), max_relative = 1e-12);
        }
    }

    #[test]
    fn potential_of_centered_gaussian_is_one() {
        let f = TestFunction::GaussianBump { center: vec![0.0; 3], width: 1.0, height: 1.0 };
        let v = bm_potential(&f, &[0.0; 3], &BmQuadrature::default()).unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-9);
        assert!(v.value.abs() <= v.cl_constant * v.cl_norm);
    }

    #[test]
    fn potential_of_zero_is_zero() {
        let f = TestFunction::GaussianBump { center: vec![0.0; 3], width: 1.0, height: 0.0 };
        assert_eq!(bm_potential(&f, &[0.5, 0.0, 0.0], &BmQuadrature::default()).unwrap().value, 0.0);
    }

    #[test]
    fn off_center_gaussian_matches_erf_formula() {
        // V = C(3) (2π)^{3/2} erf(r/√2)/r for a unit-width Gaussian at distance r
        let f = TestFunction::GaussianBump { center: vec![0.0; 3], width: 1.0, height: 1.0 };
        let r: f64 = 1.7;
        let v = bm_potential(&f, &[r, 0.0, 0.0], &BmQuadrature::default()).unwrap().value;
        let expected = (2.0 * PI).powf(1.5) / (4.0 * PI) * statrs::function::erf::erf(r / 2f64.sqrt()) / r;
        assert_relative_eq!(v, expected, max_relative = 1e-8);
    }

    #[test]
    fn far_compact_bump_acts_like_point_mass() {
        let f = TestFunction::compact_with_mass(vec![10.0, 0.0, 0.0], 0.5, 2.0);
        let v = bm_potential(&f, &[0.0; 3], &BmQuadrature::default()).unwrap().value;
        // a radial mass distribution outside x acts exactly as a point mass
        assert_relative_eq!(v, 2.0 / (4.0 * PI * 10.0), max_relative = 1e-6);
    }
}

//! Radial jump kernels `a(x)` on ℝ^d: densities, Fourier images, moments
//! and samplers.
//!
//! Four families are supported, one per tail class:
//!
//! | family      | density                         | tail class        |
//! |-------------|---------------------------------|-------------------|
//! | `gauss`     | `(b/2π)^{d/2} exp(-b|x|²/2)`    | light (Gaussian)  |
//! | `exp`       | `c·exp(-δ|x|)`                  | light (exponential) |
//! | `moderate`  | `c·(1+|x|/ℓ)^{-(d+γ)}`, γ > 2   | moderate          |
//! | `heavy`     | `c·(1+|x|/ℓ)^{-(d+γ)}`, 0<γ<2   | heavy             |
//!
//! Normalizing constants are always chosen so that `∫a = 1`; for the
//! non-Gaussian families they come from radial quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::quadrature::{exp_sinh, gauss_kronrod, gauss_legendre};

/// Absolute tolerance of the radial quadratures.
pub const RADIAL_TOL: f64 = 1e-9;
/// Allowed deviation of the total mass from one.
pub const MASS_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("malformed kernel spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
    #[error("invalid value for `{field}`: {value} ({reason})")]
    InvalidParameter { field: String, value: String, reason: String },
    #[error("tail class {class:?} requires {requirement}, got gamma={gamma}")]
    TailClassViolation { class: TailClass, requirement: &'static str, gamma: f64 },
    #[error("kernel mass {mass} deviates from 1 by more than {MASS_TOL}")]
    MassDefect { mass: f64 },
    #[error("no analytic Fourier transform for the {0} family")]
    UnsupportedAnalytic(&'static str),
    #[error("second moment is infinite for heavy-tailed kernels")]
    InfiniteMoment,
}

impl KernelError {
    /// Parse-level problems (syntax, out-of-domain numbers) as opposed to
    /// failures of an otherwise well-formed kernel.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, KernelError::Parse { .. } | KernelError::InvalidParameter { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailClass {
    LightGaussian,
    LightExponential,
    Moderate,
    Heavy,
}

impl TailClass {
    pub fn has_finite_variance(self) -> bool {
        !matches!(self, TailClass::Heavy)
    }
}

/// Family and shape parameters of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelFamily {
    Gauss { b: f64 },
    Exp { delta: f64 },
    Moderate { gamma: f64, scale: f64 },
    Heavy { gamma: f64, scale: f64 },
}

impl KernelFamily {
    pub fn tail_class(&self) -> TailClass {
        match self {
            KernelFamily::Gauss { .. } => TailClass::LightGaussian,
            KernelFamily::Exp { .. } => TailClass::LightExponential,
            KernelFamily::Moderate { .. } => TailClass::Moderate,
            KernelFamily::Heavy { .. } => TailClass::Heavy,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            KernelFamily::Gauss { .. } => "gauss",
            KernelFamily::Exp { .. } => "exp",
            KernelFamily::Moderate { .. } => "moderate",
            KernelFamily::Heavy { .. } => "heavy",
        }
    }
}

/// Parsed `family:key=value,...` kernel description.
///
/// `dim` may be omitted from the string and supplied separately (the CLI
/// has a `--dim` flag).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub dim: Option<usize>,
}

fn parse_positive(spec: &str, field: &str, raw: &str) -> Result<f64, KernelError> {
    let value: f64 = raw.trim().parse().map_err(|_| KernelError::Parse {
        spec: spec.to_string(),
        reason: format!("`{field}` is not a number: `{raw}`"),
    })?;
    if !(value.is_finite() && value > 0.0) {
        return Err(KernelError::InvalidParameter {
            field: field.to_string(),
            value: raw.trim().to_string(),
            reason: "must be a finite positive number".into(),
        });
    }
    Ok(value)
}

impl FromStr for KernelSpec {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: String| KernelError::Parse { spec: s.to_string(), reason };
        let (family, rest) = s.split_once(':').ok_or_else(|| bad("expected `family:key=value`".into()))?;
        let family = family.trim();
        let main_key = match family {
            "gauss" => "b",
            "exp" => "delta",
            "moderate" | "heavy" => "gamma",
            other => return Err(bad(format!("unknown family `{other}`"))),
        };
        let mut main = None;
        let mut scale = None;
        let mut dim = None;
        for item in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{item}`")))?;
            match k.trim() {
                "dim" => {
                    let d: i64 = v.trim().parse().map_err(|_| bad(format!("`dim` is not an integer: `{v}`")))?;
                    if d < 1 {
                        return Err(KernelError::InvalidParameter {
                            field: "dim".into(),
                            value: v.trim().into(),
                            reason: "must be a positive integer".into(),
                        });
                    }
                    dim = Some(d as usize);
                }
                "scale" if main_key == "gamma" => scale = Some(parse_positive(s, "scale", v)?),
                k if k == main_key => main = Some(parse_positive(s, main_key, v)?),
                other => return Err(bad(format!("unknown field `{other}` for family `{family}`"))),
            }
        }
        let main = main.ok_or_else(|| bad(format!("missing `{main_key}`")))?;
        let scale = scale.unwrap_or(1.0);
        let family = match family {
            "gauss" => KernelFamily::Gauss { b: main },
            "exp" => KernelFamily::Exp { delta: main },
            "moderate" => KernelFamily::Moderate { gamma: main, scale },
            _ => KernelFamily::Heavy { gamma: main, scale },
        };
        Ok(KernelSpec { family, dim })
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            KernelFamily::Gauss { b } => write!(f, "gauss:b={b}")?,
            KernelFamily::Exp { delta } => write!(f, "exp:delta={delta}")?,
            KernelFamily::Moderate { gamma, scale } | KernelFamily::Heavy { gamma, scale } => {
                write!(f, "{}:gamma={gamma}", self.family.name())?;
                if scale != 1.0 {
                    write!(f, ",scale={scale}")?;
                }
            }
        }
        if let Some(d) = self.dim {
            write!(f, ",dim={d}")?;
        }
        Ok(())
    }
}

/// Surface area of the unit sphere S^{d-1}.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Angular average of `exp(i k·x)` over the sphere of radius `r`, as a
/// function of `z = |k| r`: `Γ(d/2)(2/z)^{d/2-1} J_{d/2-1}(z)`.
pub fn radial_fourier_factor(d: usize, z: f64) -> f64 {
    let z = z.abs();
    match d {
        1 => z.cos(),
        3 => {
            if z < 1e-4 {
                1.0 - z * z / 6.0 + z.powi(4) / 120.0
            } else {
                z.sin() / z
            }
        }
        _ => {
            if z < 1.0 {
                // power series Σ (-z²/4)^m Γ(d/2) / (m! Γ(d/2+m))
                let h = d as f64 / 2.0;
                let q = -z * z / 4.0;
                let mut term = 1.0;
                let mut sum = 1.0;
                for m in 1..30 {
                    term *= q / (m as f64 * (h + m as f64 - 1.0));
                    sum += term;
                    if term.abs() < 1e-17 {
                        break;
                    }
                }
                sum
            } else {
                // Poisson integral over the polar angle
                let n = (z as usize) + 40;
                let (x, w) = gauss_legendre(n);
                let p = d as f64 - 2.0;
                let mut num = 0.0;
                let mut den = 0.0;
                for (xi, wi) in x.iter().zip(&w) {
                    let theta = 0.5 * PI * (xi + 1.0);
                    let s = theta.sin().powf(p);
                    num += wi * (z * theta.cos()).cos() * s;
                    den += wi * s;
                }
                num / den
            }
        }
    }
}

/// Mass, second moment and peak value of a normalized kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelMoments {
    pub mass: f64,
    pub second_moment: SecondMoment,
    pub sup_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SecondMoment {
    Finite(f64),
    #[serde(serialize_with = "serialize_infinite")]
    Infinite,
}

fn serialize_infinite<S: serde::Serializer>(s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str("infinite")
}

impl KernelMoments {
    /// σ² = ∫|x|²a(x)dx, or [`KernelError::InfiniteMoment`].
    pub fn sigma2(&self) -> Result<f64, KernelError> {
        match self.second_moment {
            SecondMoment::Finite(v) => Ok(v),
            SecondMoment::Infinite => Err(KernelError::InfiniteMoment),
        }
    }
}

/// A validated, normalized radial jump kernel in a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpKernel {
    dim: usize,
    family: KernelFamily,
    norm: f64,
}

impl JumpKernel {
    /// Builds and validates a kernel: tail-class constraints, then
    /// normalization and a unit-mass quadrature check.
    pub fn new(family: KernelFamily, dim: usize) -> Result<Self, KernelError> {
        if dim == 0 {
            return Err(KernelError::InvalidParameter {
                field: "dim".into(),
                value: "0".into(),
                reason: "must be a positive integer".into(),
            });
        }
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(KernelError::InvalidParameter {
                    field: field.into(),
                    value: v.to_string(),
                    reason: "must be a finite positive number".into(),
                })
            }
        };
        match family {
            KernelFamily::Gauss { b } => positive("b", b)?,
            KernelFamily::Exp { delta } => positive("delta", delta)?,
            KernelFamily::Moderate { gamma, scale } => {
                positive("gamma", gamma)?;
                positive("scale", scale)?;
                if gamma <= 2.0 {
                    return Err(KernelError::TailClassViolation {
                        class: TailClass::Moderate,
                        requirement: "gamma > 2",
                        gamma,
                    });
                }
            }
            KernelFamily::Heavy { gamma, scale } => {
                positive("gamma", gamma)?;
                positive("scale", scale)?;
                if gamma >= 2.0 {
                    return Err(KernelError::TailClassViolation {
                        class: TailClass::Heavy,
                        requirement: "0 < gamma < 2",
                        gamma,
                    });
                }
            }
        }
        let mut kernel = JumpKernel { dim, family, norm: 1.0 };
        kernel.norm = match family {
            KernelFamily::Gauss { b } => (b / (2.0 * PI)).powf(dim as f64 / 2.0),
            _ => 1.0 / kernel.radial_integral(0),
        };
        let mass = kernel.radial_integral(0);
        if !((mass - 1.0).abs() <= MASS_TOL) {
            return Err(KernelError::MassDefect { mass });
        }
        Ok(kernel)
    }

    /// Builds a kernel from a parsed spec; `dim` fills in a missing `dim=`.
    pub fn from_spec(spec: &KernelSpec, dim: Option<usize>) -> Result<Self, KernelError> {
        let d = spec.dim.or(dim).ok_or_else(|| KernelError::Parse {
            spec: spec.to_string(),
            reason: "dimension not given (`dim=` or --dim)".into(),
        })?;
        Self::new(spec.family, d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn tail_class(&self) -> TailClass {
        self.family.tail_class()
    }

    pub fn spec(&self) -> KernelSpec {
        KernelSpec { family: self.family, dim: Some(self.dim) }
    }

    /// Normalizing constant `c` in `a(x) = c·profile(|x|)`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// `a` as a function of the radius.
    pub fn radial_density(&self, r: f64) -> f64 {
        let p = match self.family {
            KernelFamily::Gauss { b } => (-0.5 * b * r * r).exp(),
            KernelFamily::Exp { delta } => (-delta * r).exp(),
            KernelFamily::Moderate { gamma, scale } | KernelFamily::Heavy { gamma, scale } => {
                (1.0 + r / scale).powf(-(self.dim as f64 + gamma))
            }
        };
        self.norm * p
    }

    /// `a(x)`.
    pub fn density(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.radial_density(r)
    }

    /// `∫ r^{d-1+p} a(r) dr · |S^{d-1}|` with the current normalization.
    fn radial_integral(&self, extra_power: i32) -> f64 {
        let d = self.dim as i32;
        let f = |r: f64| r.powi(d - 1 + extra_power) * self.radial_density(r);
        let scale = self.length_scale();
        // split at a few length scales so the bulk is resolved separately
        let split = 4.0 * scale;
        let head = gauss_kronrod(f, 0.0, split, RADIAL_TOL * 1e-3 / self.norm.max(1e-300), 400);
        let tail = exp_sinh(f, split, RADIAL_TOL * 1e-3);
        sphere_area(self.dim) * (head.value + tail.value)
    }

    /// Typical radius of a single jump; used to place quadrature splits.
    pub fn length_scale(&self) -> f64 {
        match self.family {
            KernelFamily::Gauss { b } => 1.0 / b.sqrt(),
            KernelFamily::Exp { delta } => 1.0 / delta,
            KernelFamily::Moderate { scale, .. } | KernelFamily::Heavy { scale, .. } => scale,
        }
    }

    /// Closed-form Fourier image, only available for the Gaussian family.
    pub fn fourier_analytic(&self, k: &[f64]) -> Result<f64, KernelError> {
        match self.family {
            KernelFamily::Gauss { b } => {
                let k2: f64 = k.iter().map(|v| v * v).sum();
                Ok((-k2 / (2.0 * b)).exp())
            }
            f => Err(KernelError::UnsupportedAnalytic(f.name())),
        }
    }

    /// `â(k) = ∫cos(k·y)a(y)dy`: closed form for the Gaussian family,
    /// oscillatory radial quadrature otherwise.
    pub fn fourier(&self, k: &[f64]) -> f64 {
        match self.fourier_analytic(k) {
            Ok(v) => v,
            Err(_) => self.fourier_numeric(k.iter().map(|v| v * v).sum::<f64>().sqrt()),
        }
    }

    /// Radial Hankel-type quadrature of the Fourier image at `|k| = kappa`.
    pub fn fourier_numeric(&self, kappa: f64) -> f64 {
        let d = self.dim;
        let area = sphere_area(d);
        if kappa == 0.0 {
            return self.radial_integral(0);
        }
        let f = |r: f64| area * r.powi(d as i32 - 1) * self.radial_density(r) * radial_fourier_factor(d, kappa * r);
        // integrate half-period by half-period and accelerate the partial sums
        let step = PI / kappa;
        let head_end = (4.0 * self.length_scale()).max(step);
        let n_head = (head_end / step).ceil() as usize;
        let mut total = 0.0;
        for j in 0..n_head {
            total += gauss_kronrod(f, j as f64 * step, (j + 1) as f64 * step, 1e-14, 50).value;
        }
        let mut r0 = n_head as f64 * step;
        let mut partial = Vec::with_capacity(64);
        let mut last = f64::INFINITY;
        for _ in 0..4000 {
            let piece = gauss_kronrod(f, r0, r0 + step, 1e-15, 50).value;
            r0 += step;
            total += piece;
            partial.push(total);
            if piece.abs() < 1e-15 {
                return total;
            }
            if partial.len() >= 12 && partial.len() % 4 == 0 {
                let est = wynn_epsilon(&partial);
                if (est - last).abs() < 1e-12 {
                    return est;
                }
                last = est;
            }
        }
        last
    }

    /// Mass, σ² and peak density by radial quadrature.
    pub fn moments(&self) -> KernelMoments {
        let mass = self.radial_integral(0);
        let second_moment = if self.tail_class().has_finite_variance() {
            SecondMoment::Finite(self.radial_integral(2))
        } else {
            SecondMoment::Infinite
        };
        KernelMoments { mass, second_moment, sup_density: self.radial_density(0.0) }
    }

    /// Draws one jump displacement.
    ///
    /// Gaussian kernels sample coordinates directly. Radial families draw the
    /// radius from its exact law (Gamma for `exp`, Beta-prime for the
    /// power-law families) and an isotropic direction.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(rng, &mut out);
        out
    }

    /// Allocation-free variant of [`JumpKernel::sample`].
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.dim;
        match self.family {
            KernelFamily::Gauss { b } => {
                let s = 1.0 / b.sqrt();
                for v in out.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *v = s * z;
                }
            }
            family => {
                let r = match family {
                    KernelFamily::Exp { delta } => {
                        Gamma::new(d as f64, 1.0 / delta).expect("positive shape").sample(rng)
                    }
                    KernelFamily::Moderate { gamma, scale } | KernelFamily::Heavy { gamma, scale } => {
                        let u: f64 = Beta::new(d as f64, gamma).expect("positive shape").sample(rng);
                        scale * u / (1.0 - u)
                    }
                    KernelFamily::Gauss { .. } => unreachable!(),
                };
                uniform_direction(rng, out);
                for v in out.iter_mut() {
                    *v *= r;
                }
            }
        }
    }
}

fn uniform_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for v in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = z;
            n2 += z * z;
        }
        if n2 > 1e-300 {
            let inv = 1.0 / n2.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Wynn's epsilon algorithm; returns the highest-order even column entry.
fn wynn_epsilon(seq: &[f64]) -> f64 {
    let n = seq.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = seq.to_vec();
    let mut best = *seq.last().unwrap();
    for col in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            if let Some(v) = cur.last() {
                if v.is_finite() {
                    best = *v;
                }
            }
        }
        if cur.len() < 2 {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::function::beta::beta;

    fn k(spec: &str) -> JumpKernel {
        JumpKernel::from_spec(&spec.parse().unwrap(), None).unwrap()
    }

    #[test]
    fn gaussian_peak_value() {
        let a = k("gauss:b=1,dim=3");
        assert_relative_eq!(a.density(&[0.0; 3]), (2.0 * PI).powf(-1.5), max_relative = 1e-14);
        assert_relative_eq!(a.density(&[0.0; 3]), 0.063_493_6, max_relative = 1e-6);
    }

    #[test]
    fn power_law_normalization_matches_beta_function() {
        // ∫_0^∞ r^{d-1}(1+r)^{-(d+γ)} dr = B(d, γ)
        for (spec, d, g) in [("moderate:gamma=3,dim=3", 3.0, 3.0), ("heavy:gamma=1,dim=3", 3.0, 1.0), ("heavy:gamma=0.5,dim=2", 2.0, 0.5)] {
            let a = k(spec);
            let expected = 1.0 / (sphere_area(d as usize) * beta(d, g));
            assert_relative_eq!(a.normalization(), expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn exponential_normalization_matches_gamma_function() {
        // ∫ r^{d-1} e^{-δr} dr = Γ(d)/δ^d
        let a = k("exp:delta=2,dim=3");
        let expected = 8.0 / (sphere_area(3) * 2.0);
        assert_relative_eq!(a.normalization(), expected, max_relative = 1e-9);
    }

    #[test]
    fn moderate_tail_exponent() {
        let a = k("moderate:gamma=3,dim=3");
        let c1 = a.radial_density(1e4) * 1e4f64.powi(6);
        let c2 = a.radial_density(1e5) * 1e5f64.powi(6);
        assert!(c1 > 0.0);
        assert_relative_eq!(c1, c2, max_relative = 1e-3);
    }

    #[test]
    fn fourier_of_gaussian() {
        let a = k("gauss:b=1,dim=3");
        assert_eq!(a.fourier(&[0.0; 3]), 1.0);
        assert_relative_eq!(a.fourier(&[1.0, 0.0, 0.0]), (-0.5f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(a.fourier(&[1.0, 0.0, 0.0]), 0.606_531, max_relative = 1e-6);
        assert!(a.fourier(&[10.0, 0.0, 0.0]) < 1e-21);
        // radial quadrature agrees with the closed form
        assert_relative_eq!(a.fourier_numeric(1.0), (-0.5f64).exp(), max_relative = 1e-9);
        assert_relative_eq!(a.fourier_numeric(0.0), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn fourier_of_exponential_matches_known_transform() {
        // FT of e^{-δ|x|} normalized in d=3 is (1 + |k|²/δ²)^{-2}
        let a = k("exp:delta=1.5,dim=3");
        for kappa in [0.3, 1.0, 2.5, 7.0] {
            let expected = (1.0 + kappa * kappa / 2.25f64).powi(-2);
            assert_relative_eq!(a.fourier_numeric(kappa), expected, max_relative = 1e-7);
        }
        // d = 1: δ²/(δ²+k²)
        let a = k("exp:delta=1,dim=1");
        assert_relative_eq!(a.fourier_numeric(2.0), 0.2, max_relative = 1e-7);
    }

    #[test]
    fn fourier_factor_even_dimension_matches_bessel_series() {
        // d = 2: J_0(z); J_0(5) = -0.177596771314338
        assert_relative_eq!(radial_fourier_factor(2, 5.0), -0.177_596_771_314_338, epsilon = 1e-12);
        // d = 4: 2 J_1(z)/z; J_1(3) = 0.339058958525936
        assert_relative_eq!(radial_fourier_factor(4, 3.0), 2.0 * 0.339_058_958_525_936 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(radial_fourier_factor(4, 0.5), radial_fourier_factor(4, 0.5 + 1e-12), epsilon = 1e-10);
    }

    #[test]
    fn fourier_heavy_tail_is_below_one() {
        let a = k("heavy:gamma=1,dim=3");
        let v0 = a.fourier_numeric(0.0);
        assert_relative_eq!(v0, 1.0, epsilon = 1e-8);
        let mut prev = 1.0;
        for kappa in [0.05, 0.2, 1.0, 4.0] {
            let v = a.fourier_numeric(kappa);
            assert!(v < prev, "κ={kappa}: {v} >= {prev}");
            prev = v;
        }
        assert!(prev < 0.1);
    }

    #[test]
    fn moments() {
        let m = k("gauss:b=1,dim=3").moments();
        assert!((m.mass - 1.0).abs() < MASS_TOL);
        assert_relative_eq!(m.sigma2().unwrap(), 3.0, max_relative = 1e-8);
        let m = k("gauss:b=2,dim=2").moments();
        assert_relative_eq!(m.sigma2().unwrap(), 1.0, max_relative = 1e-8);
        // moderate: E r² = B(d+2, γ-2)/B(d, γ)
        let m = k("moderate:gamma=3,dim=3").moments();
        assert_relative_eq!(m.sigma2().unwrap(), beta(5.0, 1.0) / beta(3.0, 3.0), max_relative = 1e-6);
        let m = k("heavy:gamma=1,dim=3").moments();
        assert_eq!(m.sigma2(), Err(KernelError::InfiniteMoment));
        assert!((m.mass - 1.0).abs() < MASS_TOL);
    }

    #[test]
    fn parse_and_display() {
        let s: KernelSpec = "moderate:gamma=3,dim=3".parse().unwrap();
        assert_eq!(s.to_string(), "moderate:gamma=3,dim=3");
        let s: KernelSpec = "gauss:b=0.5".parse().unwrap();
        assert_eq!(s.dim, None);
        assert_eq!(s.to_string(), "gauss:b=0.5");
        let err = "gauss:b=-1".parse::<KernelSpec>().unwrap_err();
        assert!(err.is_parse_error());
        assert!(err.to_string().contains("`b`"));
        assert!("gauss:delta=1".parse::<KernelSpec>().is_err());
        assert!("cauchy:gamma=1".parse::<KernelSpec>().is_err());
        assert!("gauss".parse::<KernelSpec>().is_err());
    }

    #[test]
    fn tail_class_constraints() {
        let err = JumpKernel::from_spec(&"moderate:gamma=1.5".parse().unwrap(), Some(3)).unwrap_err();
        assert!(matches!(err, KernelError::TailClassViolation { .. }));
        assert!(!err.is_parse_error());
        assert!(JumpKernel::from_spec(&"heavy:gamma=2.5".parse().unwrap(), Some(3)).is_err());
        assert!(JumpKernel::from_spec(&"heavy:gamma=1".parse().unwrap(), None).is_err());
    }

    #[test]
    fn samples_have_unit_variance_per_coordinate() {
        let a = k("gauss:b=1,dim=3");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut sum = [0.0; 3];
        let mut sum2 = [0.0; 3];
        for _ in 0..n {
            let x = a.sample(&mut rng);
            for i in 0..3 {
                sum[i] += x[i];
                sum2[i] += x[i] * x[i];
            }
        }
        for i in 0..3 {
            let mean = sum[i] / n as f64;
            let var = sum2[i] / n as f64 - mean * mean;
            // stderr of the mean is 1/√n, of the variance √(2/n)
            assert!(mean.abs() < 3.0 / (n as f64).sqrt());
            assert!((var - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt());
        }
    }
}

//! Numerical audits of Green-function decay envelopes.
//!
//! Audits report; they never assert an envelope. Every report carries the
//! probed radii, the computed values, the fitted constants (labeled as fits)
//! and a conclusion derived from the data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::green::{
    g_regular_fourier, gauss_g0_closed, newtonian_constant, FourierOptions, GreenError, GridKernel, ZeroModePolicy,
    DEFAULT_LAMBDA_FLOOR,
};
use crate::kernels::{JumpKernel, KernelError, KernelFamily, TailClass};
use crate::spectral::{dft_inverse, spectral_power, GridSpec, SpectralError};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("zeta diverges at s = {0} (needs s > 1)")]
    DivergesAtOne(f64),
    #[error("fit needs at least 3 radii, got {0}")]
    InsufficientData(usize),
    #[error("radii must be positive and strictly increasing")]
    UnorderedRadii,
    #[error("radius {radius} lies outside the grid half-width {half_width}")]
    RadiusOutsideGrid { radius: f64, half_width: f64 },
    #[error("kernel does not decay inside the grid (boundary ratio {0:.3e}); enlarge the box")]
    WrapAround(f64),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub s: f64,
    pub value: f64,
    pub error_bound: f64,
}

/// `Σ_{n≤N} n^{-s}`.
pub fn zeta_partial(s: f64, n: u64) -> f64 {
    (1..=n).rev().map(|k| (k as f64).powf(-s)).sum()
}

/// Riemann zeta for real `s > 1`: partial sum plus the Euler–Maclaurin tail
/// `N^{1-s}/(s-1) - N^{-s}/2 + sN^{-s-1}/12 - s(s+1)(s+2)N^{-s-3}/720`,
/// with the next correction term as error bound.
pub fn zeta(s: f64, tol: f64) -> Result<ZetaValue, AuditError> {
    if !(s > 1.0 + 1e-6) || !s.is_finite() {
        return Err(AuditError::DivergesAtOne(s));
    }
    let mut n: u64 = 16;
    loop {
        let nf = n as f64;
        let next = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * nf.powf(-s - 5.0) / 30240.0;
        if next < tol || n >= 1 << 24 {
            let tail = nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
                - s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0;
            return Ok(ZetaValue { s, value: zeta_partial(s, n) + tail, error_bound: next });
        }
        n *= 2;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    GaussQuarter,
    GaussHalf,
    Exponential,
    Newtonian,
    AnBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    Consistent,
    EnvelopeRatioGrows,
    PolynomialDecayDetected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slope {
    pub value: f64,
    /// 95% confidence interval.
    pub ci: [f64; 2],
}

/// Least-squares fit of a log-transformed model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    /// Sum of squared residuals of `log g`.
    pub residual: f64,
}

/// Per-`n` envelope fit of the `a_n` bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnProfile {
    pub n: u32,
    /// `h^d Σ a_n`.
    pub mass: f64,
    pub fitted_c: f64,
    pub fitted_big_c: f64,
    pub mean_log_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub prop: String,
    pub radii: Vec<f64>,
    pub g0: Vec<f64>,
    pub envelope: Envelope,
    /// Fitted constants; none of them is a proven value.
    pub constants: BTreeMap<String, f64>,
    /// `g0(r) / envelope(r)`.
    pub ratios: Vec<f64>,
    pub ratio_grows: bool,
    pub slope: Slope,
    pub conclusion: Conclusion,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<Fit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub an_profiles: Vec<AnProfile>,
}

/// Ordinary least squares `y = a + b·x`: returns `(a, b, ssr, se_b)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ssr: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    let se = if x.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (a, b, ssr, se)
}

/// Slope of `log g` against `log r` with a Student-t 95% interval.
pub fn log_log_slope(radii: &[f64], values: &[f64]) -> Result<Slope, AuditError> {
    let pts: Vec<(f64, f64)> =
        radii.iter().zip(values).filter(|(r, v)| **r > 0.0 && **v > 0.0).map(|(r, v)| (r.ln(), v.ln())).collect();
    if pts.len() < 3 {
        return Err(AuditError::InsufficientData(pts.len()));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let (_, b, _, se) = linear_fit(&x, &y);
    let t = StudentsT::new(0.0, 1.0, (x.len() - 2) as f64).expect("positive dof").inverse_cdf(0.975);
    Ok(Slope { value: b, ci: [b - t * se, b + t * se] })
}

fn check_radii(radii: &[f64]) -> Result<(), AuditError> {
    if radii.len() < 3 {
        return Err(AuditError::InsufficientData(radii.len()));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().any(|r| !r.is_finite()) {
        return Err(AuditError::UnorderedRadii);
    }
    Ok(())
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn exp_and_power_fits(radii: &[f64], values: &[f64]) -> (Fit, Fit) {
    let ln_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ln_g: Vec<f64> = values.iter().map(|g| g.max(f64::MIN_POSITIVE).ln()).collect();
    let (a, b, ssr, _) = linear_fit(radii, &ln_g);
    let exp_fit = Fit {
        model: "exponential: log g = log A - B r".into(),
        params: BTreeMap::from([("A".into(), a.exp()), ("B".into(), -b)]),
        residual: ssr,
    };
    let (a, b, ssr, _) = linear_fit(&ln_r, &ln_g);
    let pow_fit = Fit {
        model: "polynomial: log g = log K + s log r".into(),
        params: BTreeMap::from([("K".into(), a.exp()), ("s".into(), b)]),
        residual: ssr,
    };
    (exp_fit, pow_fit)
}

/// Exact `G₀` of the Gaussian kernel against the envelopes
/// `C₁e^{-b r²/4}` (reported ratios) and `e^{-b r²/2}`.
pub fn audit_gauss_bound(b: f64, d: usize, radii: &[f64], tol: f64) -> Result<BoundReport, AuditError> {
    check_radii(radii)?;
    let mut g0 = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut x = vec![0.0; d];
        x[0] = r;
        g0.push(gauss_g0_closed(b, d, &x, tol)?.value);
    }
    let ratios: Vec<f64> = radii.iter().zip(&g0).map(|(r, g)| g * (0.25 * b * r * r).exp()).collect();
    let ratios_half: Vec<f64> = radii.iter().zip(&g0).map(|(r, g)| g * (0.5 * b * r * r).exp()).collect();
    let ratio_grows = strictly_increasing(&ratios);
    let slope = log_log_slope(radii, &g0)?;
    let (exp_fit, pow_fit) = exp_and_power_fits(radii, &g0);
    let conclusion = if ratio_grows {
        Conclusion::EnvelopeRatioGrows
    } else if pow_fit.residual < exp_fit.residual {
        Conclusion::PolynomialDecayDetected
    } else {
        Conclusion::Consistent
    };
    let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let constants = BTreeMap::from([
        ("C1_fit_quarter".into(), max(&ratios)),
        ("C1_fit_half".into(), max(&ratios_half)),
        ("ratio_half_last".into(), *ratios_half.last().expect("non-empty")),
    ]);
    Ok(BoundReport {
        prop: "gauss".into(),
        radii: radii.to_vec(),
        g0,
        envelope: Envelope::GaussQuarter,
        constants,
        ratios,
        ratio_grows,
        slope,
        conclusion,
        fits: vec![exp_fit, pow_fit],
        an_profiles: Vec::new(),
    })
}

/// `G₀` along the first axis via the λ-floor extrapolation.
fn lambda_floor_ray(kernel: &JumpKernel, grid: &GridSpec, lambdas: &[f64], radii: &[f64]) -> Result<Vec<f64>, AuditError> {
    let gk = GridKernel::new(kernel, grid)?;
    if gk.periodized() {
        return Err(AuditError::WrapAround(gk.boundary_ratio));
    }
    for &r in radii {
        if r >= grid.half_width() {
            return Err(AuditError::RadiusOutsideGrid { radius: r, half_width: grid.half_width() });
        }
    }
    let opts = FourierOptions { zero_mode: ZeroModePolicy::LambdaFloor, lambda_floor: lambdas.to_vec(), allow_heavy: false };
    let est = g_regular_fourier(kernel, grid, 0.0, &opts)?;
    Ok(radii
        .iter()
        .map(|&r| {
            let mut x = vec![0.0; grid.dim()];
            x[0] = r;
            est.regular_part.interpolate(&x).expect("inside the grid")
        })
        .collect())
}

/// `G₀` of an exponential-family kernel against `A e^{-B r}` and `K r^s`.
pub fn audit_exp_bound(
    kernel: &JumpKernel,
    grid: &GridSpec,
    lambdas: &[f64],
    radii: &[f64],
) -> Result<BoundReport, AuditError> {
    check_radii(radii)?;
    if kernel.dim() < 3 {
        return Err(GreenError::DimensionTooSmall { dim: kernel.dim() }.into());
    }
    let g0 = lambda_floor_ray(kernel, grid, lambdas, radii)?;
    let (exp_fit, pow_fit) = exp_and_power_fits(radii, &g0);
    let (a, b) = (exp_fit.params["A"], exp_fit.params["B"]);
    let ratios: Vec<f64> = radii.iter().zip(&g0).map(|(r, g)| g / (a * (-b * r).exp())).collect();
    let ratio_grows = strictly_increasing(&ratios);
    let slope = log_log_slope(radii, &g0)?;
    let conclusion = if pow_fit.residual < exp_fit.residual {
        Conclusion::PolynomialDecayDetected
    } else if ratio_grows {
        Conclusion::EnvelopeRatioGrows
    } else {
        Conclusion::Consistent
    };
    let constants = BTreeMap::from([
        ("A_fit".into(), a),
        ("B_fit".into(), b),
        ("s_fit".into(), pow_fit.params["s"]),
        ("residual_exponential".into(), exp_fit.residual),
        ("residual_polynomial".into(), pow_fit.residual),
    ]);
    Ok(BoundReport {
        prop: "exp".into(),
        radii: radii.to_vec(),
        g0,
        envelope: Envelope::Exponential,
        constants,
        ratios,
        ratio_grows,
        slope,
        conclusion,
        fits: vec![exp_fit, pow_fit],
        an_profiles: Vec::new(),
    })
}

fn an_envelope_exponent(r: f64, n: f64) -> f64 {
    r.min(r * r / n)
}

/// Log-spaced candidate decay rates for the profile search.
fn c_candidates() -> Vec<f64> {
    (0..=400).map(|i| 10f64.powf(-3.0 + 4.0 * i as f64 / 400.0)).collect()
}

/// `a_n(x) ≤ C n^{-d/2} exp(-c·min(|x|, |x|²/n))`: for each `n`, the decay
/// rate `c` minimizing the mean log-gap and the smallest `C` for it, on
/// lattice points along the first axis.
pub fn audit_an_bound(kernel: &JumpKernel, n_list: &[u32], grid: &GridSpec) -> Result<BoundReport, AuditError> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(AuditError::InvalidArgument("n values must be positive".into()));
    }
    let gk = GridKernel::new(kernel, grid)?;
    let d = grid.dim();
    let axis: Vec<(usize, f64)> = (0..grid.n())
        .filter_map(|j| {
            let r = grid.axis_coordinate(j);
            if r <= 0.0 {
                return None;
            }
            let mut x = vec![0.0; d];
            x[0] = r;
            grid.nearest_index(&x).map(|i| (i, r))
        })
        .collect();
    let mut profiles = Vec::with_capacity(n_list.len());
    let mut first: Option<(Vec<f64>, Vec<f64>)> = None;
    for &n in n_list {
        let a_n = dft_inverse(&spectral_power(gk.hat(), n)?);
        let peak = a_n.max_abs();
        // drop round-off noise from the far tail
        let pts: Vec<(f64, f64)> =
            axis.iter().map(|&(i, r)| (r, a_n.values()[i])).filter(|&(_, v)| v > 1e-13 * peak).collect();
        if pts.len() < 3 {
            return Err(AuditError::InsufficientData(pts.len()));
        }
        let nf = n as f64;
        let pref = nf.powf(-(d as f64) / 2.0);
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for c in c_candidates() {
            let log_env: Vec<f64> = pts.iter().map(|&(r, _)| pref.ln() - c * an_envelope_exponent(r, nf)).collect();
            let log_c = pts.iter().zip(&log_env).map(|(&(_, v), e)| v.ln() - e).fold(f64::NEG_INFINITY, f64::max);
            let gap = pts.iter().zip(&log_env).map(|(&(_, v), e)| log_c + e - v.ln()).sum::<f64>() / pts.len() as f64;
            if gap < best.0 {
                best = (gap, c, log_c.exp());
            }
        }
        profiles.push(AnProfile { n, mass: a_n.integral(), fitted_c: best.1, fitted_big_c: best.2, mean_log_gap: best.0 });
        if first.is_none() {
            first = Some(pts.into_iter().unzip());
        }
    }
    let (radii, g0) = first.expect("at least one n");
    let p0 = &profiles[0];
    let nf = p0.n as f64;
    let ratios: Vec<f64> = radii
        .iter()
        .zip(&g0)
        .map(|(&r, &v)| {
            v / (p0.fitted_big_c * nf.powf(-(d as f64) / 2.0) * (-p0.fitted_c * an_envelope_exponent(r, nf)).exp())
        })
        .collect();
    let slope = log_log_slope(&radii, &g0)?;
    let ratio_grows = strictly_increasing(&ratios);
    let cs: Vec<f64> = profiles.iter().map(|p| p.fitted_c).collect();
    let spread = cs.iter().cloned().fold(0.0, f64::max) / cs.iter().cloned().fold(f64::INFINITY, f64::min);
    let constants = BTreeMap::from([
        ("c_fit_min".into(), cs.iter().cloned().fold(f64::INFINITY, f64::min)),
        ("c_fit_max".into(), cs.iter().cloned().fold(0.0, f64::max)),
        ("C_fit_max".into(), profiles.iter().map(|p| p.fitted_big_c).fold(0.0, f64::max)),
        ("c_fit_spread".into(), spread),
    ]);
    Ok(BoundReport {
        prop: "an".into(),
        radii,
        g0,
        envelope: Envelope::AnBound,
        constants,
        ratios,
        ratio_grows,
        slope,
        conclusion: if ratio_grows { Conclusion::EnvelopeRatioGrows } else { Conclusion::Consistent },
        fits: Vec::new(),
        an_profiles: profiles,
    })
}

/// `(2d/σ²)·C(d)·r^{2-d}`: the diffusive far field of `G₀` for a kernel of
/// second moment `σ²`.
pub fn newtonian_prediction(d: usize, sigma2: f64, r: f64) -> Result<f64, AuditError> {
    Ok(2.0 * d as f64 / sigma2 * newtonian_constant(d)? * r.powi(2 - d as i32))
}

/// `G₀` against its Newtonian far field. Gaussian kernels use the exact
/// series; others need a grid for the λ-floor route.
pub fn audit_newtonian(kernel: &JumpKernel, radii: &[f64], grid: Option<&GridSpec>) -> Result<BoundReport, AuditError> {
    check_radii(radii)?;
    if kernel.tail_class() == TailClass::Heavy {
        return Err(GreenError::HeavyTailUnsupported.into());
    }
    let d = kernel.dim();
    if d < 3 {
        return Err(GreenError::DimensionTooSmall { dim: d }.into());
    }
    let sigma2 = kernel.moments().sigma2()?;
    let g0 = match (kernel.family(), grid) {
        (KernelFamily::Gauss { b }, _) => radii
            .iter()
            .map(|&r| {
                let mut x = vec![0.0; d];
                x[0] = r;
                gauss_g0_closed(b, d, &x, 1e-13).map(|v| v.value)
            })
            .collect::<Result<Vec<_>, _>>()?,
        (_, Some(grid)) => lambda_floor_ray(kernel, grid, &DEFAULT_LAMBDA_FLOOR, radii)?,
        (_, None) => return Err(AuditError::InvalidArgument("non-Gaussian kernels need a grid".into())),
    };
    let ratios: Vec<f64> = radii
        .iter()
        .zip(&g0)
        .map(|(&r, g)| newtonian_prediction(d, sigma2, r).map(|p| g / p))
        .collect::<Result<_, _>>()?;
    let slope = log_log_slope(radii, &g0)?;
    let last_dev = (ratios.last().expect("non-empty") - 1.0).abs();
    let max_dev = ratios.iter().map(|q| (q - 1.0).abs()).fold(0.0, f64::max);
    let constants = BTreeMap::from([
        ("sigma2".into(), sigma2),
        ("newtonian_amplitude".into(), newtonian_prediction(d, sigma2, 1.0)?),
        ("max_relative_deviation".into(), max_dev),
        ("last_relative_deviation".into(), last_dev),
    ]);
    Ok(BoundReport {
        prop: "newtonian".into(),
        radii: radii.to_vec(),
        g0,
        envelope: Envelope::Newtonian,
        constants,
        ratio_grows: strictly_increasing(&ratios) && last_dev >= 0.05,
        ratios,
        slope,
        conclusion: if last_dev < 0.05 { Conclusion::Consistent } else { Conclusion::EnvelopeRatioGrows },
        fits: Vec::new(),
        an_profiles: Vec::new(),
    })
}

/// `lo:hi:count` → `count` equally spaced radii from `lo` to `hi`.
pub fn parse_radii(spec: &str) -> Result<Vec<f64>, AuditError> {
    let bad = || AuditError::InvalidArgument(format!("radii `{spec}` must be `lo:hi:count` or a comma list"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count < 2 {
            return Err(bad());
        }
        Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect())
    } else {
        spec.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
    }
}

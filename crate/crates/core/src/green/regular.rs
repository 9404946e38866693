use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GreenError, TestFunction};
use crate::kernels::{JumpKernel, KernelSpec, TailClass};
use crate::spectral::{
    convolve, dft_forward, dft_inverse, sample_on_grid, trig_interpolate, GridSpec, RealField, SpectralField, WRAP_TOL,
};

/// λ values used by the λ-floor extrapolation when none are given.
pub const DEFAULT_LAMBDA_FLOOR: [f64; 3] = [0.1, 0.05, 0.025];

/// How the divergent zero mode of `Ĝ₀` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroModePolicy {
    /// λ > 0: the zero mode is finite and kept.
    Included,
    /// The zero mode is set to 0. Only differences `G₀(x) − G₀(y)` and
    /// convolutions against mean-zero functions are meaningful.
    Excluded,
    /// `G₀` is extrapolated from solves at a few λ > 0.
    LambdaFloor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GreenMethod {
    Series { order: usize, tol: f64 },
    Fourier { zero_mode: ZeroModePolicy },
    LambdaFloor { lambdas: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct FourierOptions {
    /// Used only at λ = 0.
    pub zero_mode: ZeroModePolicy,
    pub lambda_floor: Vec<f64>,
    /// Accept heavy-tailed kernels (results are periodized and unverified).
    pub allow_heavy: bool,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self { zero_mode: ZeroModePolicy::Excluded, lambda_floor: DEFAULT_LAMBDA_FLOOR.to_vec(), allow_heavy: false }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    pub max_order: usize,
    pub tol: f64,
    pub allow_heavy: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { max_order: 200, tol: 1e-10, allow_heavy: false }
    }
}

/// A kernel sampled on a lattice, renormalized to unit lattice mass, with
/// its (real) lattice transform.
#[derive(Debug, Clone)]
pub struct GridKernel {
    field: RealField,
    hat: SpectralField,
    /// `1 − h^d Σ a` before renormalization.
    pub mass_defect: f64,
    /// Boundary-to-peak ratio of the sampled density.
    pub boundary_ratio: f64,
}

impl GridKernel {
    pub fn new(kernel: &JumpKernel, grid: &GridSpec) -> Result<Self, GreenError> {
        if kernel.dim() != grid.dim() {
            return Err(GreenError::DimensionMismatch { expected: grid.dim(), got: kernel.dim() });
        }
        let mut field = sample_on_grid(|x| kernel.density(x), grid);
        let mass = field.integral();
        field.values_mut().iter_mut().for_each(|v| *v /= mass);
        // `a` is even, so its transform is real; the imaginary residue comes
        // only from the unpaired `-L` face of the lattice
        let mut hat = dft_forward(&field);
        hat.values_mut().par_iter_mut().for_each(|v| *v = Complex64::new(v.re, 0.0));
        hat.values_mut()[0] = Complex64::new(1.0, 0.0);
        let boundary_ratio = field.boundary_ratio();
        Ok(Self { field, hat, mass_defect: 1.0 - mass, boundary_ratio })
    }

    pub fn field(&self) -> &RealField {
        &self.field
    }

    pub fn hat(&self) -> &SpectralField {
        &self.hat
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    /// True when the kernel does not decay to `WRAP_TOL` at the box edge, so
    /// lattice results are those of the periodized kernel.
    pub fn periodized(&self) -> bool {
        self.boundary_ratio > WRAP_TOL
    }
}

/// Regular part of the Green measure on a lattice.
#[derive(Debug, Clone)]
pub struct GreenEstimate {
    pub kernel: KernelSpec,
    pub grid: GridSpec,
    pub regular_part: RealField,
    /// Weight `1/(1+λ)` of the δ part.
    pub atom_weight: f64,
    pub lambda: f64,
    pub method: GreenMethod,
    pub zero_mode_policy: ZeroModePolicy,
    pub truncation_error_bound: f64,
    /// Set when absolute values are not certified (zero mode excluded at λ = 0).
    pub zero_mode_uncertain: bool,
    pub periodized: bool,
    pub mass_defect: f64,
}

/// JSON sidecar written next to the CSV export.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GreenSidecar {
    pub lambda: f64,
    pub method: GreenMethod,
    pub atom_weight: f64,
    pub truncation_error_bound: f64,
    pub zero_mode_policy: ZeroModePolicy,
    pub zero_mode_uncertain: bool,
    pub kernel: String,
    pub grid: GridSpec,
    pub periodized: bool,
    pub mass_defect: f64,
}

impl GreenEstimate {
    /// `G_λ` at a lattice point.
    pub fn value_at(&self, x: &[f64]) -> Option<f64> {
        self.regular_part.at(x)
    }

    /// `G_λ` anywhere in the box: lattice values as stored, trigonometric
    /// interpolation of the lattice field elsewhere.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, GreenError> {
        if x.len() != self.grid.dim() {
            return Err(GreenError::DimensionMismatch { expected: self.grid.dim(), got: x.len() });
        }
        if x.iter().any(|v| v.abs() > self.grid.half_width()) {
            return Err(GreenError::OffGrid(x.to_vec()));
        }
        if let Some(v) = self.value_at(x) {
            return Ok(v);
        }
        Ok(trig_interpolate(&dft_forward(&self.regular_part), x)?)
    }

    pub fn sidecar(&self) -> GreenSidecar {
        GreenSidecar {
            lambda: self.lambda,
            method: self.method.clone(),
            atom_weight: self.atom_weight,
            truncation_error_bound: self.truncation_error_bound,
            zero_mode_policy: self.zero_mode_policy,
            zero_mode_uncertain: self.zero_mode_uncertain,
            kernel: self.kernel.to_string(),
            grid: self.grid,
            periodized: self.periodized,
            mass_defect: self.mass_defect,
        }
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let file = BufWriter::new(File::create(path)?);
        self.regular_part.write_csv(file, "g").map_err(std::io::Error::other)
    }

    pub fn write_sidecar(&self, path: &Path) -> std::io::Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut file, &self.sidecar())?;
        file.write_all(b"\n")?;
        file.flush()
    }

    /// Violated type invariants (positivity, symmetry, atom weight), if any.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        // mean-adjusted fields are shifted by an unknown constant and may dip below zero
        if !self.zero_mode_uncertain {
            let min = self.regular_part.min();
            if min < -1e-10 {
                out.push(format!("regular part has negative value {min:.3e}"));
            }
        }
        let sym = self.regular_part.symmetry_defect();
        if sym > 1e-10 {
            out.push(format!("symmetry defect {sym:.3e}"));
        }
        if self.atom_weight != 1.0 / (1.0 + self.lambda) {
            out.push("atom weight differs from 1/(1+λ)".into());
        }
        out
    }
}

fn check_common(kernel: &JumpKernel, grid: &GridSpec, lambda: f64, allow_heavy: bool) -> Result<(), GreenError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(GreenError::InvalidLambda(lambda));
    }
    if kernel.dim() != grid.dim() {
        return Err(GreenError::DimensionMismatch { expected: grid.dim(), got: kernel.dim() });
    }
    if lambda == 0.0 && grid.dim() < 3 {
        return Err(GreenError::DimensionTooSmall { dim: grid.dim() });
    }
    if kernel.tail_class() == TailClass::Heavy && !allow_heavy {
        return Err(GreenError::HeavyTailUnsupported);
    }
    Ok(())
}

fn green_symbol(hat: &SpectralField, lambda: f64) -> SpectralField {
    let mut g = hat.map(|a| a / (1.0 + lambda - a));
    if lambda == 0.0 {
        g.values_mut()[0] = Complex64::new(0.0, 0.0);
    }
    g
}

/// `G_λ` by spectral inversion of `â/(1+λ−â)`.
pub fn g_regular_fourier(
    kernel: &JumpKernel,
    grid: &GridSpec,
    lambda: f64,
    opts: &FourierOptions,
) -> Result<GreenEstimate, GreenError> {
    check_common(kernel, grid, lambda, opts.allow_heavy)?;
    let gk = GridKernel::new(kernel, grid)?;
    if lambda == 0.0 && opts.zero_mode == ZeroModePolicy::LambdaFloor {
        return lambda_floor(kernel, &gk, &opts.lambda_floor);
    }
    let zero_mode = if lambda > 0.0 { ZeroModePolicy::Included } else { ZeroModePolicy::Excluded };
    let regular_part = dft_inverse(&green_symbol(gk.hat(), lambda));
    Ok(GreenEstimate {
        kernel: kernel.spec(),
        grid: *grid,
        regular_part,
        atom_weight: 1.0 / (1.0 + lambda),
        lambda,
        method: GreenMethod::Fourier { zero_mode },
        zero_mode_policy: zero_mode,
        truncation_error_bound: 0.0,
        zero_mode_uncertain: lambda == 0.0,
        periodized: gk.periodized(),
        mass_defect: gk.mass_defect,
    })
}

/// λ → 0 extrapolation in `s = √λ` (the small-λ expansion of `G_λ(x)` in
/// d = 3 runs in powers of `√λ`). Lagrange interpolation through all floor
/// values is evaluated at `s = 0`; the error bound is its distance from the
/// extrapolation that drops the largest λ.
fn lambda_floor(kernel: &JumpKernel, gk: &GridKernel, lambdas: &[f64]) -> Result<GreenEstimate, GreenError> {
    if lambdas.len() < 2 || lambdas.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
        return Err(GreenError::InvalidArgument("λ-floor needs at least two positive λ values".into()));
    }
    let mut lams = lambdas.to_vec();
    lams.sort_by(|a, b| b.total_cmp(a));
    lams.dedup();
    let solves: Vec<RealField> = lams.iter().map(|&l| dft_inverse(&green_symbol(gk.hat(), l))).collect();
    let s: Vec<f64> = lams.iter().map(|l| l.sqrt()).collect();
    let weights = |nodes: &[f64]| -> Vec<f64> {
        (0..nodes.len())
            .map(|i| (0..nodes.len()).filter(|&j| j != i).map(|j| nodes[j] / (nodes[j] - nodes[i])).product())
            .collect()
    };
    let w_all = weights(&s);
    let w_drop = weights(&s[1..]);
    let grid = *gk.grid();
    let mut values = vec![0.0; grid.len()];
    let mut bound = 0.0f64;
    for (i, v) in values.iter_mut().enumerate() {
        let full: f64 = solves.iter().zip(&w_all).map(|(f, w)| w * f.values()[i]).sum();
        let reduced: f64 = solves[1..].iter().zip(&w_drop).map(|(f, w)| w * f.values()[i]).sum();
        *v = full;
        bound = bound.max((full - reduced).abs());
    }
    Ok(GreenEstimate {
        kernel: kernel.spec(),
        grid,
        regular_part: RealField::new(grid, values)?,
        atom_weight: 1.0,
        lambda: 0.0,
        method: GreenMethod::LambdaFloor { lambdas: lams },
        zero_mode_policy: ZeroModePolicy::LambdaFloor,
        truncation_error_bound: bound,
        zero_mode_uncertain: false,
        periodized: gk.periodized(),
        mass_defect: gk.mass_defect,
    })
}

/// Spatial sup-norm bound of the series tail beyond the current order:
/// `(2L)^{-d} Σ_m r_m^{K+1}/(1-r_m)`, where `|term_K(m)| = r_m^K`.
fn series_tail_bound(term: &[Complex64], ratio: &[f64], box_volume: f64, skip_zero: bool) -> f64 {
    let start = usize::from(skip_zero);
    let s: f64 = term[start..]
        .par_iter()
        .zip(ratio[start..].par_iter())
        .map(|(t, &r)| if r >= 1.0 { f64::INFINITY } else { t.norm() * r / (1.0 - r) })
        .sum();
    s / box_volume
}

/// `G_λ = Σ_{j=1}^{K} a_j/(1+λ)^j`, accumulated in the spectral domain and
/// stopped as soon as the tail bound drops below `opts.tol`.
pub fn g_regular_series(
    kernel: &JumpKernel,
    grid: &GridSpec,
    lambda: f64,
    opts: &SeriesOptions,
) -> Result<GreenEstimate, GreenError> {
    check_common(kernel, grid, lambda, opts.allow_heavy)?;
    let gk = GridKernel::new(kernel, grid)?;
    let skip_zero = lambda == 0.0;
    let damp = 1.0 / (1.0 + lambda);
    let base: Vec<Complex64> = gk.hat().values().iter().map(|a| a * damp).collect();
    let ratio: Vec<f64> = base.iter().map(|v| v.norm()).collect();
    let mut term = base.clone();
    let mut acc = base.clone();
    if skip_zero {
        acc[0] = Complex64::new(0.0, 0.0);
    }
    let box_volume = grid.box_volume();
    let mut order = 1;
    let mut bound = series_tail_bound(&term, &ratio, box_volume, skip_zero);
    while bound >= opts.tol && order < opts.max_order {
        term.par_iter_mut().zip(base.par_iter()).for_each(|(t, b)| *t *= b);
        acc.par_iter_mut().zip(term.par_iter()).for_each(|(a, t)| *a += t);
        if skip_zero {
            acc[0] = Complex64::new(0.0, 0.0);
        }
        order += 1;
        bound = series_tail_bound(&term, &ratio, box_volume, skip_zero);
    }
    if bound >= opts.tol {
        return Err(GreenError::NotConverged { bound, tol: opts.tol, order });
    }
    let regular_part = dft_inverse(&SpectralField::new(*grid, acc)?);
    let zero_mode = if skip_zero { ZeroModePolicy::Excluded } else { ZeroModePolicy::Included };
    Ok(GreenEstimate {
        kernel: kernel.spec(),
        grid: *grid,
        regular_part,
        atom_weight: damp,
        lambda,
        method: GreenMethod::Series { order, tol: opts.tol },
        zero_mode_policy: zero_mode,
        truncation_error_bound: bound,
        zero_mode_uncertain: skip_zero,
        periodized: gk.periodized(),
        mass_defect: gk.mass_defect,
    })
}

/// Partial sums `Σ_{j≤K} a_j(x)/(1+λ)^j` at the given lattice points for
/// `K = 1..=max_order`. Each order costs one inverse transform.
pub fn series_partial_sums(
    kernel: &JumpKernel,
    grid: &GridSpec,
    lambda: f64,
    max_order: usize,
    points: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, GreenError> {
    let gk = GridKernel::new(kernel, grid)?;
    let indices: Vec<usize> = points
        .iter()
        .map(|p| grid.lattice_index(p).ok_or_else(|| GreenError::OffGrid(p.clone())))
        .collect::<Result<_, _>>()?;
    let damp = 1.0 / (1.0 + lambda);
    let base = gk.hat().map(|a| a * damp);
    let mut term = base.clone();
    let mut out = vec![vec![0.0; max_order]; points.len()];
    let mut running = vec![0.0; points.len()];
    for k in 0..max_order {
        if k > 0 {
            term = term.mul(&base)?;
        }
        let a_k = dft_inverse(&term);
        for (p, &i) in indices.iter().enumerate() {
            running[p] += a_k.values()[i];
            out[p][k] = running[p];
        }
    }
    Ok(out)
}

/// `R_λ f = (f + G_λ∗f)/(1+λ)`, computed directly as `f̂/(1+λ−â)`.
pub fn resolvent_apply(
    kernel: &JumpKernel,
    f: &TestFunction,
    lambda: f64,
    grid: &GridSpec,
) -> Result<RealField, GreenError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(GreenError::InvalidLambda(lambda));
    }
    if f.dim() != grid.dim() {
        return Err(GreenError::DimensionMismatch { expected: grid.dim(), got: f.dim() });
    }
    let gk = GridKernel::new(kernel, grid)?;
    let f_hat = dft_forward(&f.sample(grid));
    let r_hat = f_hat.mul(&gk.hat().map(|a| 1.0 / (1.0 + lambda - a)))?;
    Ok(dft_inverse(&r_hat))
}

/// `‖(1+λ)R − a∗R − f‖_∞ / ‖f‖_∞`, with `a∗R` taken through a spatial
/// convolution against the lattice kernel.
pub fn resolvent_identity_residual(
    kernel: &JumpKernel,
    f: &TestFunction,
    lambda: f64,
    grid: &GridSpec,
    resolved: &RealField,
) -> Result<f64, GreenError> {
    let gk = GridKernel::new(kernel, grid)?;
    let (a_r, _) = convolve(gk.field(), resolved)?;
    let fs = f.sample(grid);
    let worst = resolved
        .values()
        .iter()
        .zip(a_r.values())
        .zip(fs.values())
        .map(|((r, ar), fv)| ((1.0 + lambda) * r - ar - fv).abs())
        .fold(0.0, f64::max);
    Ok(worst / fs.max_abs().max(f64::MIN_POSITIVE))
}

/// `p(t, ·)` split into its atom at zero displacement and a density part.
#[derive(Debug, Clone)]
pub struct TransitionDensity {
    pub t: f64,
    /// `e^{-t}`: probability of no jump up to time `t`.
    pub atom_weight: f64,
    pub density_part: RealField,
}

impl TransitionDensity {
    /// `atom + h^d Σ density`.
    pub fn total_mass(&self) -> f64 {
        self.atom_weight + self.density_part.integral()
    }
}

/// Full symbol `p̂_t(k) = exp(t(â(k) − 1))` on the dual lattice.
pub fn transition_symbol(kernel: &JumpKernel, t: f64, grid: &GridSpec) -> Result<SpectralField, GreenError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(GreenError::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    let gk = GridKernel::new(kernel, grid)?;
    Ok(gk.hat().map(|a| (t * (a - 1.0)).exp()))
}

/// Transition density of the compound Poisson process at time `t`.
pub fn transition_density(kernel: &JumpKernel, t: f64, grid: &GridSpec) -> Result<TransitionDensity, GreenError> {
    let symbol = transition_symbol(kernel, t, grid)?;
    let atom = (-t).exp();
    let density_part = dft_inverse(&symbol.map(|p| p - atom));
    Ok(TransitionDensity { t, atom_weight: atom, density_part })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialValue {
    pub value: f64,
    /// Absolute value not certified: zero mode excluded at λ = 0.
    pub zero_mode_uncertain: bool,
}

/// `V_λ(f, x) = (f(x) + (G_λ∗f)(x)) / (1+λ)` from a precomputed estimate.
pub fn potential(est: &GreenEstimate, f: &TestFunction, x: &[f64]) -> Result<PotentialValue, GreenError> {
    if f.dim() != est.grid.dim() || x.len() != est.grid.dim() {
        return Err(GreenError::DimensionMismatch { expected: est.grid.dim(), got: f.dim() });
    }
    let idx = est.grid.lattice_index(x).ok_or_else(|| GreenError::OffGrid(x.to_vec()))?;
    let fs = f.sample(&est.grid);
    let (conv, _) = convolve(&est.regular_part, &fs)?;
    let value = est.atom_weight * (fs.values()[idx] + conv.values()[idx]);
    Ok(PotentialValue { value, zero_mode_uncertain: est.zero_mode_uncertain })
}

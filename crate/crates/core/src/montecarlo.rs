//! Path-functional estimators of potentials and resolvents.
//!
//! The jump process is compound Poisson with unit rate (the kernel has unit
//! mass), so jump times are partial sums of Exp(1) variables and the state is
//! constant in between; its functional `∫₀^T e^{-λt} f(X(t)) dt` is integrated
//! exactly segment by segment. Brownian motion (generator Δ, increments
//! `N(0, 2Δt)` per coordinate) is integrated by the trapezoid rule on a fixed
//! step.
//!
//! Every path draws from its own ChaCha8 stream: the key is the master seed
//! and the stream id is the path index. Per-path values are collected in
//! path order and reduced sequentially, so estimates are bit-identical for
//! any thread count.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::green::TestFunction;
use crate::kernels::{JumpKernel, KernelError};

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),
    #[error("the undiscounted potential is infinite in d = {dim} < 3 (recurrent regime)")]
    RecurrentRegime { dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    /// Number of independent paths `M`.
    pub paths: u64,
    /// Time horizon `T`.
    pub horizon: f64,
    /// Discount rate λ ≥ 0.
    #[serde(default)]
    pub lambda: f64,
    /// Brownian time step; ignored for jump processes.
    #[serde(default)]
    pub dt: Option<f64>,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(paths: u64, horizon: f64, lambda: f64, seed: u64) -> Self {
        Self { paths, horizon, lambda, dt: None, seed, threads: None }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn validate(&self, brownian: bool) -> Result<(), McError> {
        if self.paths == 0 {
            return Err(McError::InvalidConfig("paths must be at least 1".into()));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(McError::InvalidConfig(format!("horizon {} must be positive", self.horizon)));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(McError::InvalidConfig(format!("lambda {} must be nonnegative", self.lambda)));
        }
        if brownian {
            match self.dt {
                Some(dt) if dt.is_finite() && dt > 0.0 && dt <= self.horizon => {}
                Some(dt) => return Err(McError::InvalidConfig(format!("dt {dt} must lie in (0, horizon]"))),
                None => return Err(McError::InvalidConfig("Brownian runs need a time step dt".into())),
            }
        }
        if self.threads == Some(0) {
            return Err(McError::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√M`.
    pub stderr: f64,
    #[serde(rename = "M")]
    pub paths: u64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub lambda: f64,
    /// Bias from stopping at `T`: rigorous for λ > 0, a local-limit heuristic at λ = 0.
    pub tail_bias_bound: f64,
    /// Brownian only: mean `Σ|Δf|·Δt/2` along the paths (heuristic).
    pub discretization_bias_bound: f64,
    pub seed: u64,
}

/// Generator of path `index` under `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One compound Poisson path functional and its number of jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CppPath {
    pub value: f64,
    pub jumps: u64,
}

/// Cached support ball of `f` so that far-away states skip evaluation.
struct Support {
    center: Vec<f64>,
    radius2: f64,
}

impl Support {
    fn of(f: &TestFunction) -> Self {
        let (center, radius) = f.extent();
        Self { center, radius2: radius * radius }
    }

    fn eval(&self, f: &TestFunction, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        if r2 > self.radius2 {
            0.0
        } else {
            f.eval(y)
        }
    }
}

fn discount_integral(lambda: f64, t0: f64, t1: f64) -> f64 {
    if lambda == 0.0 {
        t1 - t0
    } else {
        ((-lambda * t0).exp() - (-lambda * t1).exp()) / lambda
    }
}

fn cpp_path<R: Rng + ?Sized>(
    kernel: &JumpKernel,
    f: &TestFunction,
    support: &Support,
    x0: &[f64],
    horizon: f64,
    lambda: f64,
    rng: &mut R,
) -> CppPath {
    let mut x = x0.to_vec();
    let mut jump = vec![0.0; x0.len()];
    let mut t = 0.0;
    let mut value = 0.0;
    let mut jumps = 0;
    loop {
        let wait: f64 = rng.sample(Exp1);
        let next = (t + wait).min(horizon);
        let fx = support.eval(f, &x);
        if fx != 0.0 {
            value += fx * discount_integral(lambda, t, next);
        }
        if t + wait >= horizon {
            return CppPath { value, jumps };
        }
        t = next;
        kernel.sample_into(rng, &mut jump);
        x.iter_mut().zip(&jump).for_each(|(a, b)| *a += b);
        jumps += 1;
    }
}

/// `∫₀^T e^{-λt} f(X(t)) dt` along one compound Poisson path from `x0`.
pub fn simulate_cpp_functional<R: Rng + ?Sized>(
    kernel: &JumpKernel,
    f: &TestFunction,
    x0: &[f64],
    horizon: f64,
    lambda: f64,
    rng: &mut R,
) -> f64 {
    simulate_cpp_path(kernel, f, x0, horizon, lambda, rng).value
}

/// Like [`simulate_cpp_functional`], also reporting the jump count.
pub fn simulate_cpp_path<R: Rng + ?Sized>(
    kernel: &JumpKernel,
    f: &TestFunction,
    x0: &[f64],
    horizon: f64,
    lambda: f64,
    rng: &mut R,
) -> CppPath {
    cpp_path(kernel, f, &Support::of(f), x0, horizon, lambda, rng)
}

/// Trapezoid functional along one Brownian path and its `Σ|Δf|·Δt/2`.
fn bm_path<R: Rng + ?Sized>(
    f: &TestFunction,
    support: &Support,
    x0: &[f64],
    horizon: f64,
    dt: f64,
    lambda: f64,
    rng: &mut R,
) -> (f64, f64) {
    let mut x = x0.to_vec();
    let steps = (horizon / dt).ceil() as u64;
    let mut t = 0.0;
    let mut f_prev = support.eval(f, &x);
    let mut value = 0.0;
    let mut variation = 0.0;
    for k in 0..steps {
        let t_next = if k + 1 == steps { horizon } else { (k + 1) as f64 * dt };
        let h = t_next - t;
        let sd = (2.0 * h).sqrt();
        for xi in x.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *xi += sd * z;
        }
        let f_next = support.eval(f, &x);
        if f_prev != 0.0 || f_next != 0.0 {
            let (w0, w1) = if lambda == 0.0 { (1.0, 1.0) } else { ((-lambda * t).exp(), (-lambda * t_next).exp()) };
            value += 0.5 * h * (w0 * f_prev + w1 * f_next);
            variation += 0.5 * h * (f_next - f_prev).abs();
        }
        f_prev = f_next;
        t = t_next;
    }
    (value, variation)
}

/// `∫₀^T e^{-λt} f(B(t)) dt` along one discretized Brownian path from `x0`.
pub fn simulate_bm_functional<R: Rng + ?Sized>(
    f: &TestFunction,
    x0: &[f64],
    horizon: f64,
    dt: f64,
    lambda: f64,
    rng: &mut R,
) -> f64 {
    bm_path(f, &Support::of(f), x0, horizon, dt, lambda, rng).0
}

fn run_paths<T, F>(cfg: &McConfig, per_path: F) -> Result<Vec<T>, McError>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let work = || (0..cfg.paths).into_par_iter().map(&per_path).collect::<Vec<T>>();
    match cfg.threads {
        None => Ok(work()),
        Some(n) => {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| McError::ThreadPool(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

/// Mean and standard error with a fixed left-to-right reduction.
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// `∫_T^∞ sup_y p(t, y) dt · ‖f‖₁` for a Gaussian proxy of per-coordinate
/// variance `rate·t`.
fn local_limit_tail(l1: f64, d: usize, rate: f64, horizon: f64) -> f64 {
    let h = d as f64 / 2.0;
    l1 * (2.0 * PI * rate).powf(-h) * horizon.powf(1.0 - h) / (h - 1.0)
}

fn check_inputs(d: usize, f: &TestFunction, x0: &[f64], lambda: f64) -> Result<(), McError> {
    if f.dim() != d {
        return Err(McError::DimensionMismatch { expected: d, got: f.dim() });
    }
    if x0.len() != d {
        return Err(McError::DimensionMismatch { expected: d, got: x0.len() });
    }
    if lambda == 0.0 && d < 3 {
        return Err(McError::RecurrentRegime { dim: d });
    }
    Ok(())
}

/// Per-path functionals of the compound Poisson process, in path order.
pub fn cpp_path_values(kernel: &JumpKernel, f: &TestFunction, x0: &[f64], cfg: &McConfig) -> Result<Vec<CppPath>, McError> {
    cfg.validate(false)?;
    check_inputs(kernel.dim(), f, x0, cfg.lambda)?;
    let support = Support::of(f);
    run_paths(cfg, |i| {
        let mut rng = path_rng(cfg.seed, i);
        cpp_path(kernel, f, &support, x0, cfg.horizon, cfg.lambda, &mut rng)
    })
}

/// `E^{x0} ∫₀^∞ e^{-λt} f(X(t)) dt`, i.e. `R_λ f(x0)` (λ > 0) or the
/// potential `V(f, x0)` (λ = 0).
pub fn estimate_potential_cpp(
    kernel: &JumpKernel,
    f: &TestFunction,
    x0: &[f64],
    cfg: &McConfig,
) -> Result<PotentialEstimate, McError> {
    let values: Vec<f64> = cpp_path_values(kernel, f, x0, cfg)?.into_iter().map(|p| p.value).collect();
    let (mean, stderr) = mean_stderr(&values);
    let tail_bias_bound = if cfg.lambda > 0.0 {
        f.sup_norm() * (-cfg.lambda * cfg.horizon).exp() / cfg.lambda
    } else {
        let sigma2 = kernel.moments().sigma2()?;
        local_limit_tail(f.l1_norm(), kernel.dim(), sigma2 / kernel.dim() as f64, cfg.horizon)
    };
    Ok(PotentialEstimate {
        mean,
        stderr,
        paths: cfg.paths,
        horizon: cfg.horizon,
        lambda: cfg.lambda,
        tail_bias_bound,
        discretization_bias_bound: 0.0,
        seed: cfg.seed,
    })
}

/// Per-path Brownian functionals, in path order.
pub fn bm_path_values(f: &TestFunction, x0: &[f64], cfg: &McConfig) -> Result<Vec<f64>, McError> {
    Ok(bm_paths(f, x0, cfg)?.into_iter().map(|p| p.0).collect())
}

fn bm_paths(f: &TestFunction, x0: &[f64], cfg: &McConfig) -> Result<Vec<(f64, f64)>, McError> {
    cfg.validate(true)?;
    check_inputs(x0.len(), f, x0, cfg.lambda)?;
    let dt = cfg.dt.expect("validated");
    let support = Support::of(f);
    run_paths(cfg, |i| {
        let mut rng = path_rng(cfg.seed, i);
        bm_path(f, &support, x0, cfg.horizon, dt, cfg.lambda, &mut rng)
    })
}

/// `E^{x0} ∫₀^∞ e^{-λt} f(B(t)) dt` for Brownian motion with generator Δ.
pub fn estimate_potential_bm(f: &TestFunction, x0: &[f64], cfg: &McConfig) -> Result<PotentialEstimate, McError> {
    let paths = bm_paths(f, x0, cfg)?;
    let values: Vec<f64> = paths.iter().map(|p| p.0).collect();
    let (mean, stderr) = mean_stderr(&values);
    let discretization_bias_bound = paths.iter().map(|p| p.1).sum::<f64>() / paths.len() as f64;
    let tail_bias_bound = if cfg.lambda > 0.0 {
        f.sup_norm() * (-cfg.lambda * cfg.horizon).exp() / cfg.lambda
    } else {
        local_limit_tail(f.l1_norm(), x0.len(), 2.0, cfg.horizon)
    };
    Ok(PotentialEstimate {
        mean,
        stderr,
        paths: cfg.paths,
        horizon: cfg.horizon,
        lambda: cfg.lambda,
        tail_bias_bound,
        discretization_bias_bound,
        seed: cfg.seed,
    })
}

/// Debug export `path_index,functional_value`.
pub fn write_path_csv<W: Write>(out: W, values: &[f64]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path_index", "functional_value"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(())
}

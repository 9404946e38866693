use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{grid_for, kernel_from, CliError};
use crate::green::TestFunction;
use crate::kernels::JumpKernel;
use crate::montecarlo::McConfig;
use crate::spectral::GridSpec;

pub const DEFAULT_GRID_N: usize = 64;
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
pub const DEFAULT_PATHS: u64 = 10_000;
pub const DEFAULT_HORIZON: f64 = 40.0;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BM_DT: f64 = 1e-2;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Not echoed: results do not depend on it.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_tol: Option<f64>,
}

/// JSON run configuration. Every field is optional; flags override the
/// file, and the resolved form is echoed into every output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_heavy: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<TestFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prop: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("config: {e}")))
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Builds the kernel and rewrites `kernel`/`dim` in canonical form.
    pub fn resolve_kernel(&mut self) -> Result<JumpKernel, CliError> {
        let spec = self.kernel.clone().ok_or_else(|| CliError::validation("`kernel` is required"))?;
        let kernel = kernel_from(&spec, self.dim)?;
        if let Some(d) = self.dim {
            if d != kernel.dim() {
                return Err(CliError::validation(format!("kernel dim {} disagrees with dim {d}", kernel.dim())));
            }
        }
        self.kernel = Some(kernel.spec().to_string());
        self.dim = Some(kernel.dim());
        Ok(kernel)
    }

    pub fn resolve_grid(&mut self, d: usize) -> Result<GridSpec, CliError> {
        let g = self.grid.get_or_insert_with(GridConfig::default);
        let n = *g.n.get_or_insert(DEFAULT_GRID_N);
        let l = *g.half_width.get_or_insert(DEFAULT_HALF_WIDTH);
        grid_for(d, n, l)
    }

    pub fn resolve_lambda(&self) -> Result<f64, CliError> {
        let l = self.lambda.ok_or_else(|| CliError::validation("`lambda` is required"))?;
        if !(l.is_finite() && l >= 0.0) {
            return Err(CliError::validation(format!("lambda {l} must be finite and nonnegative")));
        }
        Ok(l)
    }

    /// Test function (default: unit-height Gaussian bump of width 1 at the
    /// origin); an empty center means the origin.
    pub fn resolve_f(&mut self, d: usize) -> Result<TestFunction, CliError> {
        let f = self
            .f
            .get_or_insert_with(|| TestFunction::GaussianBump { center: vec![0.0; d], width: 1.0, height: 1.0 });
        match f {
            TestFunction::GaussianBump { center, width, .. } => {
                if center.is_empty() {
                    *center = vec![0.0; d];
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(CliError::validation("test function width must be positive"));
                }
            }
            TestFunction::CompactBump { center, radius, .. } => {
                if center.is_empty() {
                    *center = vec![0.0; d];
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(CliError::validation("test function radius must be positive"));
                }
            }
            TestFunction::Grid(_) => {}
        }
        if f.dim() != d {
            return Err(CliError::validation(format!("test function has dimension {}, expected {d}", f.dim())));
        }
        Ok(f.clone())
    }

    pub fn resolve_x(&mut self, d: usize) -> Result<Vec<f64>, CliError> {
        let x = self.x.get_or_insert_with(|| vec![0.0; d]);
        if x.len() != d {
            return Err(CliError::validation(format!("point has {} coordinates, expected {d}", x.len())));
        }
        Ok(x.clone())
    }

    pub fn resolve_mc(&mut self, brownian: bool) -> Result<McConfig, CliError> {
        let lambda = *self.lambda.get_or_insert(0.0);
        let m = self.mc.get_or_insert_with(McSection::default);
        let paths = *m.paths.get_or_insert(DEFAULT_PATHS);
        let horizon = *m.horizon.get_or_insert(DEFAULT_HORIZON);
        let seed = *m.seed.get_or_insert(DEFAULT_SEED);
        let mut cfg = McConfig::new(paths, horizon, lambda, seed);
        if brownian {
            cfg.dt = Some(*m.dt.get_or_insert(DEFAULT_BM_DT));
        } else {
            m.dt = None;
        }
        cfg.threads = m.threads;
        cfg.validate(brownian)?;
        Ok(cfg)
    }
}

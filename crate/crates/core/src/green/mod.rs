//! Green measures of the jump generator `L f = a∗f − f` and of Brownian motion.
//!
//! The λ-resolvent kernel of `L` splits into an atom and a regular part,
//!
//! ```text
//! (λ − L)^{-1} = (δ + G_λ) / (1 + λ),   G_λ = Σ_{k≥1} a_k / (1+λ)^k,
//! Ĝ_λ(k) = â(k) / (1 + λ − â(k)).
//! ```
//!
//! The atom is always carried as an explicit weight `1/(1+λ)` and never put
//! on the lattice. At λ = 0 the zero Fourier mode of `Ĝ₀` diverges; see
//! [`ZeroModePolicy`] for the two ways this crate handles it.

mod brownian;
mod closed;
mod regular;
mod testfn;

use thiserror::Error;

use crate::kernels::KernelError;
use crate::spectral::SpectralError;

pub use brownian::{
    bm_green, bm_potential, certify_newtonian_constant, heat_kernel_time_integral, newtonian_constant, BmPotential,
    BmQuadrature, HeatIntegral,
};
pub use closed::{gauss_g0_closed, gauss_green_closed, SeriesValue};
pub use regular::{
    g_regular_fourier, g_regular_series, potential, resolvent_apply, resolvent_identity_residual,
    series_partial_sums, transition_density, transition_symbol, FourierOptions, GreenEstimate, GreenMethod,
    GreenSidecar, GridKernel, PotentialValue, SeriesOptions, TransitionDensity, ZeroModePolicy,
    DEFAULT_LAMBDA_FLOOR,
};
pub use testfn::TestFunction;

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("the Green measure at λ = 0 needs d ≥ 3, got d = {dim}")]
    DimensionTooSmall { dim: usize },
    #[error("heavy-tailed kernels are unsupported here (enable the experimental flag to proceed)")]
    HeavyTailUnsupported,
    #[error("series not converged: error bound {bound:.3e} > tol {tol:.3e} at order {order}")]
    NotConverged { bound: f64, tol: f64, order: usize },
    #[error("λ = {0} must be finite and nonnegative")]
    InvalidLambda(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Green function is singular at x = y")]
    SingularAtCoincidence,
    #[error("point {0:?} is not a lattice point of the estimate's grid")]
    OffGrid(Vec<f64>),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

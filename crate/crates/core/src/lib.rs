//! Green measures of jump-generator Markov processes and Brownian motion.
//!
//! The regular part of the Green measure of `L f = a∗f − f` is computed by
//! three independent routes that can be checked against each other:
//!
//! * spectral inversion of `â/(1+λ−â)` on a periodic lattice ([`green::g_regular_fourier`]),
//! * the convolution series `Σ a_k/(1+λ)^k` ([`green::g_regular_series`]),
//! * Monte Carlo path functionals of the compound Poisson process ([`montecarlo`]).
//!
//! The [`audit`] module reports how the computed Green functions decay.

pub mod audit;
pub mod cli;
pub mod green;
pub mod kernels;
pub mod montecarlo;
pub mod quadrature;
pub mod spectral;

pub use green::{GreenEstimate, TestFunction};
pub use kernels::{JumpKernel, KernelSpec, TailClass};
pub use spectral::{GridSpec, RealField, SpectralField};

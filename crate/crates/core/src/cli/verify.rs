use serde::Serialize;

use super::CliError;
use crate::audit::zeta;
use crate::green::{
    g_regular_fourier, g_regular_series, gauss_g0_closed, gauss_green_closed, heat_kernel_time_integral,
    newtonian_constant, resolvent_apply, resolvent_identity_residual, transition_density, transition_symbol,
    FourierOptions, SeriesOptions, TestFunction,
};
use crate::kernels::{JumpKernel, KernelFamily};
use crate::montecarlo::{estimate_potential_cpp, McConfig};
use crate::spectral::GridSpec;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, threshold: f64) -> Check {
    Check { name, value, threshold, pass: value.is_finite() && value <= threshold }
}

/// Lattice used by the suite: fine enough for the checks, small enough to run in seconds.
fn suite_grid(d: usize) -> Result<GridSpec, CliError> {
    let (n, l) = match d {
        1 => (1024, 20.0),
        2 => (128, 12.0),
        3 => (64, 10.0),
        _ => (16, 8.0),
    };
    Ok(GridSpec::new(d, n, l)?)
}

fn unit_axis_point(d: usize, r: f64) -> Vec<f64> {
    let mut x = vec![0.0; d];
    x[0] = r;
    x
}

pub fn core_suite(d: usize) -> Result<Vec<Check>, CliError> {
    if d == 0 {
        return Err(CliError::validation("dim must be positive"));
    }
    let kernel = JumpKernel::new(KernelFamily::Gauss { b: 1.0 }, d)?;
    let grid = suite_grid(d)?;
    let lambda = 0.5;
    let mut out = Vec::new();

    let fourier = g_regular_fourier(&kernel, &grid, lambda, &FourierOptions::default())?;
    let series_opts = SeriesOptions { max_order: 400, tol: 1e-10, allow_heavy: false };
    let series = g_regular_series(&kernel, &grid, lambda, &series_opts)?;
    let h = grid.spacing();
    let mut rel = 0.0f64;
    for r in [0.0, 4.0 * h] {
        let x = unit_axis_point(d, r);
        let exact = gauss_green_closed(1.0, d, lambda, &x, 1e-14)?.value;
        rel = rel.max((fourier.value_at(&x).expect("lattice point") - exact).abs() / exact);
    }
    out.push(check("fourier_vs_closed_form_rel", rel, 1e-4));
    let diff = fourier
        .regular_part
        .values()
        .iter()
        .zip(series.regular_part.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push(check("series_vs_fourier_abs", diff, 1e-8f64.max(2.0 * series.truncation_error_bound)));

    let f = TestFunction::GaussianBump { center: vec![0.0; d], width: 1.0, height: 1.0 };
    let r = resolvent_apply(&kernel, &f, lambda, &grid)?;
    out.push(check("resolvent_identity_residual", resolvent_identity_residual(&kernel, &f, lambda, &grid, &r)?, 1e-6));

    let mut cons = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        cons = cons.max((transition_density(&kernel, t, &grid)?.total_mass() - 1.0).abs());
    }
    out.push(check("conservativity", cons, 1e-8));

    let pt = transition_symbol(&kernel, 0.7, &grid)?;
    let pts = transition_symbol(&kernel, 1.4, &grid)?;
    let ck = pt
        .mul(&pt)?
        .values()
        .iter()
        .zip(pts.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    out.push(check("chapman_kolmogorov", ck, 1e-12));

    out.push(check("green_invariant_violations", fourier.invariant_violations().len() as f64, 0.0));

    if d >= 3 {
        let g0 = gauss_g0_closed(1.0, d, &vec![0.0; d], 1e-13)?.value;
        let z = zeta(d as f64 / 2.0, 1e-14)?.value;
        let expected = (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0) * z;
        out.push(check("g0_origin_vs_zeta_rel", (g0 - expected).abs() / expected, 1e-9));
        let c = newtonian_constant(d)?;
        let heat = heat_kernel_time_integral(1.0, d, 1.0, 1e-12)?.value;
        out.push(check("newtonian_constant_rel", (heat - c).abs() / c, 1e-6));
    }
    Ok(out)
}

/// Discounted Monte Carlo against the spectral resolvent.
pub fn mc_suite(d: usize, threads: Option<usize>) -> Result<Vec<Check>, CliError> {
    let kernel = JumpKernel::new(KernelFamily::Gauss { b: 1.0 }, d)?;
    let grid = suite_grid(d)?;
    let lambda = 0.5;
    let f = TestFunction::GaussianBump { center: vec![0.0; d], width: 1.0, height: 1.0 };
    let x0 = vec![0.0; d];
    let exact = resolvent_apply(&kernel, &f, lambda, &grid)?.at(&x0).expect("origin is a lattice point");
    let mut cfg = McConfig::new(20_000, 40.0, lambda, 7);
    cfg.threads = threads;
    let est = estimate_potential_cpp(&kernel, &f, &x0, &cfg)?;
    let budget = 4.0 * est.stderr + est.tail_bias_bound;
    Ok(vec![check("mc_vs_resolvent_in_budget_units", (est.mean - exact).abs() / budget, 1.0)])
}

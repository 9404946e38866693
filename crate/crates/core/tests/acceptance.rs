//! Acceptance criteria, one PASS/FAIL line each. Every reference value is
//! computed by an independent oracle before it is compared.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use gmeasure::audit::{audit_gauss_bound, zeta, Conclusion};
use gmeasure::green::{
    bm_green, bm_potential, g_regular_fourier, g_regular_series, gauss_g0_closed, gauss_green_closed,
    heat_kernel_time_integral, resolvent_apply, resolvent_identity_residual, transition_density, transition_symbol,
    BmQuadrature, FourierOptions, SeriesOptions, TestFunction,
};
use gmeasure::kernels::{JumpKernel, KernelFamily};
use gmeasure::montecarlo::{estimate_potential_bm, estimate_potential_cpp, McConfig};
use gmeasure::spectral::GridSpec;

type Outcome = Result<String, String>;

fn gauss3() -> JumpKernel {
    JumpKernel::new(KernelFamily::Gauss { b: 1.0 }, 3).expect("valid kernel")
}

fn unit_bump() -> TestFunction {
    TestFunction::GaussianBump { center: vec![0.0; 3], width: 1.0, height: 1.0 }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let z = zeta(1.5, 1e-14).map_err(err)?;
    let oracle = (2.0 * PI).powf(-1.5) * z.value;
    let v = gauss_g0_closed(1.0, 3, &[0.0; 3], 1e-12).map_err(err)?;
    let ok = (v.value - 0.165867).abs() <= 1e-5 && (v.value - oracle).abs() <= 1e-10;
    ensure(ok, format!("G0(0) = {:.9}, zeta oracle {:.9}", v.value, oracle))
}

fn criterion_2() -> Outcome {
    let grid = GridSpec::new(3, 128, 10.0).map_err(err)?;
    let lambda = 0.1;
    let k = gauss3();
    let fourier = g_regular_fourier(&k, &grid, lambda, &FourierOptions::default()).map_err(err)?;
    let series_opts = SeriesOptions { max_order: 200, tol: 1e-6, allow_heavy: false };
    let series = g_regular_series(&k, &grid, lambda, &series_opts).map_err(err)?;
    let mut worst = 0.0f64;
    for x in [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 1.0, 0.0]] {
        let exact = gauss_green_closed(1.0, 3, lambda, &x, 1e-14).map_err(err)?.value;
        for v in [fourier.evaluate(&x).map_err(err)?, series.evaluate(&x).map_err(err)?] {
            worst = worst.max((v - exact).abs() / exact);
        }
    }
    ensure(worst <= 1e-3, format!("max relative deviation {worst:.3e} (series {:?})", series.method))
}

fn criterion_3() -> Outcome {
    let grid = GridSpec::new(3, 128, 10.0).map_err(err)?;
    let k = gauss3();
    let f = unit_bump();
    let r = resolvent_apply(&k, &f, 0.5, &grid).map_err(err)?;
    let residual = resolvent_identity_residual(&k, &f, 0.5, &grid, &r).map_err(err)?;
    ensure(residual <= 1e-6, format!("residual / |f|_inf = {residual:.3e}"))
}

fn criterion_4() -> Outcome {
    let grid = GridSpec::new(3, 128, 10.0).map_err(err)?;
    let k = gauss3();
    let mut cons = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let p = transition_density(&k, t, &grid).map_err(err)?;
        cons = cons.max((p.total_mass() - 1.0).abs());
    }
    let pt = transition_symbol(&k, 0.7, &grid).map_err(err)?;
    let pts = transition_symbol(&k, 1.4, &grid).map_err(err)?;
    let ck = pt
        .mul(&pt)
        .map_err(err)?
        .values()
        .iter()
        .zip(pts.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    ensure(cons < 1e-8 && ck < 1e-12, format!("conservativity {cons:.3e}, Chapman-Kolmogorov {ck:.3e}"))
}

fn criterion_5() -> Outcome {
    let grid = GridSpec::new(3, 128, 10.0).map_err(err)?;
    let k = gauss3();
    let f = unit_bump();
    let exact = resolvent_apply(&k, &f, 0.5, &grid).map_err(err)?.at(&[0.0; 3]).ok_or("origin off lattice")?;
    let est = estimate_potential_cpp(&k, &f, &[0.0; 3], &McConfig::new(100_000, 40.0, 0.5, 42)).map_err(err)?;
    let budget = 3.0 * est.stderr + f.sup_norm() * (-20.0f64).exp() / 0.5;
    let diff = (est.mean - exact).abs();
    let rel_se = est.stderr / est.mean;
    ensure(
        diff <= budget && rel_se < 0.02,
        format!("MC {:.6} ± {:.2e} vs resolvent {exact:.6}: |diff| {diff:.2e} ≤ {budget:.2e}, stderr/mean {rel_se:.2e}", est.mean, est.stderr),
    )
}

fn criterion_6() -> Outcome {
    let f = unit_bump();
    let oracle = bm_potential(&f, &[0.0; 3], &BmQuadrature::default()).map_err(err)?.value;
    if (oracle - 1.0).abs() > 1e-8 {
        return Err(format!("quadrature oracle {oracle} differs from 1"));
    }
    let cfg = McConfig::new(20_000, 2000.0, 0.0, 42).with_dt(1e-2);
    let est = estimate_potential_bm(&f, &[0.0; 3], &cfg).map_err(err)?;
    let budget = 3.0 * est.stderr + 0.05;
    let diff = (est.mean - oracle).abs();
    ensure(
        diff <= budget,
        format!("MC {:.4} ± {:.2e} vs {oracle:.6}: |diff| {diff:.3e} ≤ {budget:.3e}", est.mean, est.stderr),
    )
}

fn criterion_7() -> Outcome {
    let mut scaled = Vec::new();
    for r in [6.0, 8.0, 10.0] {
        scaled.push(gauss_g0_closed(1.0, 3, &[r, 0.0, 0.0], 1e-12).map_err(err)?.value * 2.0 * PI * r);
    }
    let radii: Vec<f64> = (2..=10).map(f64::from).collect();
    let rep = audit_gauss_bound(1.0, 3, &radii, 1e-12).map_err(err)?;
    let ok = scaled.iter().all(|v| (0.95..=1.05).contains(v))
        && (rep.slope.value + 1.0).abs() <= 0.05
        && rep.conclusion == Conclusion::EnvelopeRatioGrows;
    ensure(ok, format!("2πr·G0 = {scaled:.5?}, slope {:.4}, {:?}", rep.slope.value, rep.conclusion))
}

fn criterion_8() -> Outcome {
    let h = heat_kernel_time_integral(1.0, 3, 1.0, 1e-12).map_err(err)?.value;
    let target = 1.0 / (4.0 * PI);
    let rel = (h - target).abs() / target;
    let ratio = bm_green(&[2.0, 0.0, 0.0], &[0.0; 3]).map_err(err)? / bm_green(&[1.0, 0.0, 0.0], &[0.0; 3]).map_err(err)?;
    ensure(
        rel <= 1e-6 && (ratio - 0.5).abs() <= 1e-12,
        format!("heat integral rel err {rel:.2e}, scaling ratio {ratio}"),
    )
}

fn criterion_9() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_gmeasure"))
        .args(["green", "compute", "--kernel", "gauss:b=1", "--dim", "2", "--lambda", "0", "--n", "32"])
        .output()
        .map_err(err)?;
    let code = out.status.code();
    ensure(code == Some(4), format!("exit code {code:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
}

fn criterion_10() -> Outcome {
    let args = [
        "mc", "--kernel", "gauss:b=1", "--dim", "3", "--lambda", "0.5", "--paths", "100000", "--horizon", "40", "--seed",
        "42",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_gmeasure")).args(args).args(["--threads", threads]).output().map_err(err)
    };
    let a = run("1")?;
    let b = run("1")?;
    if !a.status.success() || a.stdout.is_empty() {
        return Err(format!("mc failed: {}", String::from_utf8_lossy(&a.stderr)));
    }
    let identical = a.stdout == b.stdout;
    let k = gauss3();
    let f = unit_bump();
    let base = McConfig::new(100_000, 40.0, 0.5, 42);
    let one = estimate_potential_cpp(&k, &f, &[0.0; 3], &base.clone().with_threads(1)).map_err(err)?;
    let eight = estimate_potential_cpp(&k, &f, &[0.0; 3], &base.with_threads(8)).map_err(err)?;
    let gap = (one.mean - eight.mean).abs();
    ensure(identical && gap <= 1e-12, format!("byte-identical JSON: {identical}, |mean1 - mean8| = {gap:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Gaussian G0 at origin", criterion_1),
        ("three-route agreement", criterion_2),
        ("resolvent identity", criterion_3),
        ("semigroup checks", criterion_4),
        ("discounted MC vs resolvent", criterion_5),
        ("Brownian potential MC", criterion_6),
        ("Newtonian far field and audit", criterion_7),
        ("C(d) oracle and scaling", criterion_8),
        ("dimension gate exit code", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

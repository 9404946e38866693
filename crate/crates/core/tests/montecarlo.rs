use std::f64::consts::PI;

use gmeasure::green::TestFunction;
use gmeasure::kernels::{JumpKernel, KernelFamily};
use gmeasure::montecarlo::{estimate_potential_cpp, path_rng, McConfig};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn gauss3() -> JumpKernel {
    JumpKernel::new(KernelFamily::Gauss { b: 1.0 }, 3).unwrap()
}

#[test]
fn jump_displacements_follow_the_kernel() {
    // |jump|² of the b = 1 Gaussian kernel in d = 3 is chi-squared with 3 dof
    let k = gauss3();
    let mut rng = path_rng(11, 0);
    let mut r2: Vec<f64> = (0..100_000).map(|_| k.sample(&mut rng).iter().map(|v| v * v).sum()).collect();
    r2.sort_by(f64::total_cmp);
    let chi = ChiSquared::new(3.0).unwrap();
    let n = r2.len() as f64;
    let ks = r2
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = chi.cdf(v);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS {ks}");
}

#[test]
fn stderr_scales_like_inverse_root_m() {
    let k = gauss3();
    let f = TestFunction::GaussianBump { center: vec![0.0; 3], width: 1.0, height: 1.0 };
    let mut ratios = Vec::new();
    for seed in [1u64, 2, 3] {
        let small = estimate_potential_cpp(&k, &f, &[0.0; 3], &McConfig::new(5_000, 20.0, 0.5, seed)).unwrap();
        let large = estimate_potential_cpp(&k, &f, &[0.0; 3], &McConfig::new(20_000, 20.0, 0.5, seed + 100)).unwrap();
        ratios.push(large.stderr / small.stderr);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((mean - 0.5).abs() < 0.1, "{ratios:?}");
}

/// `(G₀∗f)(x)` for the b = 1 Gaussian kernel and a unit-mass Gaussian `f`
/// of width `w`: each `a_k∗f` is Gaussian with variance `k + w²`.
fn g0_conv_oracle(r: f64, w: f64) -> f64 {
    let term = |k: f64| (2.0 * PI * (k + w * w)).powf(-1.5) * (-r * r / (2.0 * (k + w * w))).exp();
    let n = 200_000;
    let head: f64 = (1..=n).map(|k| term(k as f64)).sum();
    // integral tail of the monotone envelope
    head + (2.0 * PI).powf(-1.5) * 2.0 / (n as f64 + 0.5).sqrt()
}

#[test]
fn undiscounted_potential_matches_green_oracle() {
    let k = gauss3();
    let w = 0.5;
    let f = TestFunction::unit_gaussian(vec![0.0; 3], w);
    let x0 = [3.0, 0.0, 0.0];
    let oracle = g0_conv_oracle(3.0, w) + f.eval(&x0);
    let est = estimate_potential_cpp(&k, &f, &x0, &McConfig::new(40_000, 400.0, 0.0, 42)).unwrap();
    let diff = (est.mean - oracle).abs();
    assert!(diff <= 3.0 * est.stderr + est.tail_bias_bound, "{} ± {} vs {oracle} (tail {})", est.mean, est.stderr, est.tail_bias_bound);
    assert!(est.mean <= oracle + 3.0 * est.stderr);
}

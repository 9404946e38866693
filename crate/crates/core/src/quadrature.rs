//! One-dimensional quadrature rules used throughout the crate.
//!
//! Every kernel family is radial, so mass, moments, Fourier transforms and
//! potentials all reduce to one-dimensional integrals over `[0, ∞)` or a
//! finite interval. Three rules cover the cases that occur:
//!
//! * [`exp_sinh`] for half-infinite ranges with algebraic or exponential decay,
//! * [`tanh_sinh`] for finite ranges with smooth integrands or endpoint singularities,
//! * [`gauss_kronrod`] (adaptive G7/K15 bisection) for integrands with kinks.

use std::f64::consts::FRAC_PI_2;

/// Result of a quadrature: the estimate and an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

impl Integral {
    fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}

const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 4;

/// Double-exponential quadrature of `f` over `[a, ∞)`.
///
/// Substitution `x = a + exp(π/2·sinh t)`; the step is halved until two
/// successive levels agree to `tol` (absolute) or `tol·|I|` (relative),
/// whichever is looser.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Integral {
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let ex = u.exp();
        let x = a + ex;
        if !x.is_finite() || ex == 0.0 {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * ex;
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    double_exponential(eval, tol)
}

/// Double-exponential (tanh-sinh) quadrature of `f` over `[a, b]`.
///
/// Tolerates integrable endpoint singularities: `f` is never evaluated at
/// the endpoints themselves.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Integral {
    if a == b {
        return Integral::new(0.0, 0.0);
    }
    if b < a {
        let r = tanh_sinh(f, b, a, tol);
        return Integral::new(-r.value, r.error);
    }
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        // distance from the nearer endpoint, computed without cancellation
        let gap = half / (u.abs().exp() * cu);
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        if gap == 0.0 || !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        let x = if t >= 0.0 { b - gap } else { a + gap };
        if x <= a || x >= b {
            return 0.0;
        }
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    double_exponential(eval, tol)
}

/// Shared trapezoid-in-`t` driver. `g` is the transformed integrand
/// (including the Jacobian) on the whole real line.
fn double_exponential<G: Fn(f64) -> f64>(g: G, tol: f64) -> Integral {
    // Truncation of the t-range: beyond |t| = 4.5 the double-exponential
    // weights underflow for every integrand we care about.
    const T_MAX: f64 = 4.5;
    let mut h = 0.5;
    let mut sum = g(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        let t = k as f64 * h;
        sum += g(t) + g(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        // new points are the odd multiples of the halved step
        let mut fresh = 0.0;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            let t = k as f64 * h;
            fresh += g(t) + g(-t);
            k += 2;
        }
        sum += fresh;
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if level >= MIN_LEVEL && (error <= tol || error <= tol * estimate.abs()) {
            break;
        }
    }
    Integral::new(estimate, error)
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_XK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WK[j] * pair;
        if j % 2 == 1 {
            gauss += GK_WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the
/// summed error drops below `tol` or `max_intervals` is reached.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Integral {
    if a == b {
        return Integral::new(0.0, 0.0);
    }
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut err = e;
    while err > tol && pieces.len() < max_intervals.max(1) {
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, pe) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        err += e1 + e2 - pe;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    let value = pieces.iter().map(|p| p.2).sum();
    let error = pieces.iter().map(|p| p.3).sum();
    Integral::new(value, error)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_sinh_gaussian_half_line() {
        let r = exp_sinh(|x| (-x * x).exp(), 0.0, 1e-13);
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn exp_sinh_slow_algebraic_tail() {
        // ∫_0^∞ (1+x)^{-3/2} dx = 2
        let r = exp_sinh(|x| (1.0 + x).powf(-1.5), 0.0, 1e-12);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-12);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
        let r = tanh_sinh(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn gauss_kronrod_handles_kinks() {
        let r = gauss_kronrod(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 200);
        assert_relative_eq!(r.value, 0.5 * (0.09 + 0.49), max_relative = 1e-11);
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert_relative_eq!(s, 2.0 / 11.0, max_relative = 1e-13);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }
}

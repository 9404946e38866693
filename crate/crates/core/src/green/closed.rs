//! Grid-free Green function of the Gaussian jump kernel.
//!
//! For `a(x) = (b/2π)^{d/2} exp(-b|x|²/2)` the k-fold convolution is again
//! Gaussian, `a_k(x) = (b/(2πk))^{d/2} exp(-b|x|²/(2k))`, so
//!
//! ```text
//! G_λ(x) = Σ_{k≥1} (1+λ)^{-k} (b/(2πk))^{d/2} exp(-b|x|²/(2k)).
//! ```
//!
//! At λ = 0 the terms decay only like `k^{-d/2}`; the tail beyond `N` is
//! replaced by its Euler–Maclaurin expansion around an incomplete-gamma
//! integral.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::gamma_li;

use super::GreenError;

/// Value of the closed-form series with an upper bound on its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
    /// Number of terms summed explicitly.
    pub terms: usize,
}

/// `G₀(x)` for the Gaussian kernel; requires `d ≥ 3`.
pub fn gauss_g0_closed(b: f64, d: usize, x: &[f64], tol: f64) -> Result<SeriesValue, GreenError> {
    gauss_green_closed(b, d, 0.0, x, tol)
}

/// Discounted `G_λ(x)` for the Gaussian kernel.
pub fn gauss_green_closed(b: f64, d: usize, lambda: f64, x: &[f64], tol: f64) -> Result<SeriesValue, GreenError> {
    if !(b.is_finite() && b > 0.0) {
        return Err(GreenError::InvalidArgument(format!("b = {b} must be positive")));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(GreenError::InvalidLambda(lambda));
    }
    if lambda == 0.0 && d < 3 {
        return Err(GreenError::DimensionTooSmall { dim: d });
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let c = 0.5 * b * r2;
    let s = d as f64 / 2.0;
    let pref = (b / (2.0 * PI)).powf(s);
    let q = 1.0 / (1.0 + lambda);
    let term = |k: f64| pref * k.powf(-s) * (-c / k).exp();

    if lambda > 0.0 {
        // geometric tail: Σ_{k>N} ≤ pref N^{-s} q^{N+1}/(1-q)
        let tail = |n: f64| pref * n.powf(-s) * q.powf(n + 1.0) / (1.0 - q);
        let mut sum = 0.0;
        let mut qk = 1.0;
        let mut n = 0usize;
        loop {
            n += 1;
            qk *= q;
            sum += qk * term(n as f64);
            if (n as f64) > c / s && tail(n as f64) < tol {
                return Ok(SeriesValue { value: sum, error_bound: tail(n as f64), terms: n });
            }
            if n >= 50_000_000 {
                return Err(GreenError::NotConverged { bound: tail(n as f64), tol, order: n });
            }
        }
    }

    // λ = 0: explicit terms k < N, Euler–Maclaurin from N on.
    let mut n = (2.0 * c).ceil().max(64.0) as usize;
    loop {
        let nf = n as f64;
        let phi = term(nf);
        let dphi = phi * (-s / nf + c / (nf * nf));
        let integral = if c == 0.0 {
            pref * nf.powf(1.0 - s) / (s - 1.0)
        } else {
            pref * c.powf(1.0 - s) * gamma_li(s - 1.0, c / nf)
        };
        let tail = integral + 0.5 * phi - dphi / 12.0;
        let bound = phi * (s + 3.0 + c / nf).powi(3) / nf.powi(3) / 360.0;
        if bound < tol || n > 1 << 24 {
            let head: f64 = (1..n).map(|k| term(k as f64)).sum();
            if bound >= tol {
                return Err(GreenError::NotConverged { bound, tol, order: n });
            }
            return Ok(SeriesValue { value: head + tail, error_bound: bound, terms: n - 1 });
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Brute-force partial sum with the plain integral-comparison bracket,
    /// independent of the Euler–Maclaurin tail.
    fn brute(b: f64, d: usize, r: f64, n: usize) -> (f64, f64) {
        let s = d as f64 / 2.0;
        let pref = (b / (2.0 * PI)).powf(s);
        let c = 0.5 * b * r * r;
        let head: f64 = (1..=n).map(|k| pref * (k as f64).powf(-s) * (-c / k as f64).exp()).sum();
        // for k ≥ n ≫ c the terms are decreasing: Σ_{k>n} ∈ [∫_{n+1}^∞, ∫_n^∞] of the envelope
        let hi = pref * (n as f64).powf(1.0 - s) / (s - 1.0);
        (head, hi)
    }

    #[test]
    fn origin_value_is_zeta_three_halves() {
        let v = gauss_g0_closed(1.0, 3, &[0.0; 3], 1e-12).unwrap();
        // (2π)^{-3/2} ζ(3/2), ζ(3/2) = 2.612375348685488
        assert_relative_eq!(v.value, (2.0 * PI).powf(-1.5) * 2.612_375_348_685_488, max_relative = 1e-11);
        let (head, hi) = brute(1.0, 3, 0.0, 4_000_000);
        assert!(v.value >= head && v.value <= head + hi);
    }

    #[test]
    fn arbitrary_b_at_origin() {
        // ζ(5/2) = 1.341487257250917 for d = 5
        let v = gauss_g0_closed(2.5, 5, &[0.0; 5], 1e-13).unwrap();
        assert_relative_eq!(v.value, (2.5 / (2.0 * PI)).powf(2.5) * 1.341_487_257_250_917, max_relative = 1e-11);
    }

    #[test]
    fn far_field_is_newtonian() {
        for r in [6.0, 8.0, 10.0] {
            let v = gauss_g0_closed(1.0, 3, &[r, 0.0, 0.0], 1e-12).unwrap().value;
            assert!((v * 2.0 * PI * r - 1.0).abs() < 0.05);
            let (head, hi) = brute(1.0, 3, r, 2_000_000);
            assert!(v >= head - 1e-12 && v <= head + hi + 1e-12);
        }
    }

    #[test]
    fn discounted_series_matches_direct_sum() {
        let lambda = 0.1;
        let x = [2.0, 1.0, 0.0];
        let v = gauss_green_closed(1.0, 3, lambda, &x, 1e-14).unwrap();
        let direct: f64 = (1..5000)
            .map(|k| {
                let k = k as f64;
                (1.0 + lambda).powf(-k) * (2.0 * PI * k).powf(-1.5) * (-2.5 / k).exp()
            })
            .sum();
        assert_relative_eq!(v.value, direct, max_relative = 1e-12);
    }

    #[test]
    fn small_dimension_is_refused_at_zero_lambda() {
        assert!(matches!(gauss_g0_closed(1.0, 2, &[0.0; 2], 1e-8), Err(GreenError::DimensionTooSmall { dim: 2 })));
        assert!(gauss_green_closed(1.0, 2, 0.5, &[0.0; 2], 1e-8).is_ok());
    }
}

use gmeasure::audit::{log_log_slope, zeta, zeta_partial};
use gmeasure::green::{g_regular_fourier, FourierOptions, TestFunction};
use gmeasure::kernels::{JumpKernel, KernelFamily, KernelSpec};
use gmeasure::spectral::{dft_forward, dft_inverse, trig_interpolate, GridSpec, RealField};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = KernelFamily> {
    prop_oneof![
        (0.1f64..10.0).prop_map(|b| KernelFamily::Gauss { b }),
        (0.1f64..10.0).prop_map(|delta| KernelFamily::Exp { delta }),
        (2.1f64..6.0, 0.2f64..3.0).prop_map(|(gamma, scale)| KernelFamily::Moderate { gamma, scale }),
        (0.1f64..1.9, 0.2f64..3.0).prop_map(|(gamma, scale)| KernelFamily::Heavy { gamma, scale }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spec_display_round_trips(fam in family(), dim in 1usize..6) {
        let spec = KernelSpec { family: fam, dim: Some(dim) };
        let back: KernelSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn density_is_even_and_nonnegative(fam in family(), x in prop::collection::vec(-5.0f64..5.0, 3)) {
        let k = JumpKernel::new(fam, 3).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!(k.density(&x) >= 0.0);
        prop_assert_eq!(k.density(&x), k.density(&neg));
    }

    #[test]
    fn zeta_is_decreasing_and_bracketed(s in 1.05f64..6.0, ds in 0.01f64..1.0, n in 1u64..2000) {
        let z = zeta(s, 1e-12).unwrap().value;
        prop_assert!(z > 1.0);
        prop_assert!(z > zeta(s + ds, 1e-12).unwrap().value);
        let gap = z - zeta_partial(s, n);
        prop_assert!(gap >= -1e-12 && gap <= (n as f64).powf(1.0 - s) / (s - 1.0) + 1e-12);
    }

    #[test]
    fn slope_recovers_power_laws(p in 0.2f64..4.0, amp in 0.1f64..10.0) {
        let radii: Vec<f64> = (1..=8).map(|i| 1.5 * i as f64).collect();
        let vals: Vec<f64> = radii.iter().map(|r| amp * r.powf(-p)).collect();
        let s = log_log_slope(&radii, &vals).unwrap();
        prop_assert!((s.value + p).abs() < 1e-6);
    }

    #[test]
    fn transforms_round_trip(seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = GridSpec::new(2, 16, 3.0).unwrap();
        let f = RealField::new(g, (0..g.len()).map(|_| rng.random::<f64>()).collect()).unwrap();
        let spec = dft_forward(&f);
        let back = dft_inverse(&spec);
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // the interpolant reproduces lattice values
        let i = rng.random_range(0..g.len());
        prop_assert!((trig_interpolate(&spec, &g.point(i)).unwrap() - f.values()[i]).abs() < 1e-10);
    }

    #[test]
    fn test_functions_are_bounded_by_their_sup_norm(x in prop::collection::vec(-4.0f64..4.0, 3), w in 0.2f64..3.0) {
        let f = TestFunction::unit_gaussian(vec![0.5, 0.0, -0.5], w);
        prop_assert!(f.eval(&x) <= f.sup_norm() + 1e-15);
        let c = TestFunction::compact_with_mass(vec![0.0; 3], w, 1.0);
        prop_assert!(c.eval(&x) <= c.sup_norm() + 1e-15);
    }
}

#[test]
fn green_is_decreasing_in_lambda_and_radius() {
    let k = JumpKernel::new(KernelFamily::Exp { delta: 1.0 }, 3).unwrap();
    let g = GridSpec::new(3, 32, 12.0).unwrap();
    let lo = g_regular_fourier(&k, &g, 0.2, &FourierOptions::default()).unwrap();
    let hi = g_regular_fourier(&k, &g, 0.8, &FourierOptions::default()).unwrap();
    for (a, b) in lo.regular_part.values().iter().zip(hi.regular_part.values()) {
        assert!(a >= b);
    }
    let along: Vec<f64> = (0..8).map(|j| lo.value_at(&[j as f64 * g.spacing(), 0.0, 0.0]).unwrap()).collect();
    assert!(along.windows(2).all(|w| w[1] < w[0]), "{along:?}");
}

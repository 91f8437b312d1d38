use std::f64::consts::PI;

use heatkernel::linalg::{self, MatrixN};
use heatkernel::torus::{fit_asymptotics, geometric_grid, ConstantCoefficients, TorusModel};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SIDE: f64 = 2.0 * PI;

fn random_constant(seed: u64, d: usize, n: usize) -> ConstantCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ConstantCoefficients {
        u: linalg::random_positive(&mut rng, n, 1.0, 2.0),
        v: (0..d).map(|_| linalg::random_skew_hermitian(&mut rng, n, 0.4)).collect(),
        w: linalg::random_hermitian(&mut rng, n, 0.5),
    }
}

fn conjugate(c: &ConstantCoefficients, q: &MatrixN) -> ConstantCoefficients {
    let f = |m: &MatrixN| q * m * q.adjoint();
    ConstantCoefficients { u: hermitize(&f(&c.u)), v: c.v.iter().map(f).collect(), w: hermitize(&f(&c.w)) }
}

fn hermitize(m: &MatrixN) -> MatrixN {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn traces_are_unitarily_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let coeffs = random_constant(seed, 2, n);
        let q = linalg::random_unitary(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a), n);
        let ts = [0.05, 0.2, 0.6];
        let a = TorusModel::constant(2, SIDE, 30, coeffs.clone()).heat_traces(&ts).unwrap();
        let b = TorusModel::constant(2, SIDE, 30, conjugate(&coeffs, &q)).heat_traces(&ts).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.trace - y.trace).abs() < 1e-12 * x.trace);
        }
    }

    #[test]
    fn truncation_bound_covers_refinement(seed in any::<u64>(), cutoff in 6usize..=14) {
        let coeffs = random_constant(seed, 2, 2);
        let ts = [0.05, 0.15, 0.4];
        let coarse = TorusModel::constant(2, SIDE, cutoff, coeffs.clone()).heat_traces(&ts).unwrap();
        let fine = TorusModel::constant(2, SIDE, 2 * cutoff, coeffs).heat_traces(&ts).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            prop_assert!((c.trace - f.trace).abs() <= c.truncation_bound + 1e-12 * f.trace,
                "t={} diff={:e} bound={:e}", c.t, (c.trace - f.trace).abs(), c.truncation_bound);
        }
    }

    #[test]
    fn fit_uncertainty_covers_window_shifts(seed in any::<u64>(), s in 0.7f64..1.4) {
        let coeffs = random_constant(seed, 2, 2);
        let model = TorusModel::constant(2, SIDE, 40, coeffs.clone());
        let base = model.default_window().unwrap();
        let shifted: Vec<f64> = base.iter().map(|t| t * s).collect();
        let fa = fit_asymptotics(&model.heat_traces(&base).unwrap(), 2, 4).unwrap();
        let fb = fit_asymptotics(&model.heat_traces(&shifted).unwrap(), 2, 4).unwrap();
        // Closed form: vol · tr u^{-1} / (4π).
        let exact = SIDE * SIDE * linalg::trace(&linalg::inverse(&coeffs.u).unwrap()).re / (4.0 * PI);
        for f in [&fa, &fb] {
            let e = f.coefficients[0];
            prop_assert!((e.value - exact).abs() <= 3.0 * e.uncertainty && e.uncertainty < 1e-5 * exact, "{e:?} vs {exact}");
        }
        let (a, b) = (fa.coefficients[1], fb.coefficients[1]);
        prop_assert!((a.value - b.value).abs() <= 3.0 * (a.uncertainty + b.uncertainty));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn doubling_the_window_moves_a1_within_uncertainty(seed in any::<u64>()) {
        let model = TorusModel::constant(2, SIDE, 48, random_constant(seed, 2, 2));
        let base = model.default_window().unwrap();
        let doubled: Vec<f64> = base.iter().map(|t| 2.0 * t).collect();
        let a = fit_asymptotics(&model.heat_traces(&base).unwrap(), 2, 4).unwrap().coefficients[1];
        let b = fit_asymptotics(&model.heat_traces(&doubled).unwrap(), 2, 4).unwrap().coefficients[1];
        prop_assert!((a.value - b.value).abs() < a.uncertainty.max(b.uncertainty), "{a:?} {b:?}");
    }
}

#[test]
fn window_respects_bounds() {
    let model = TorusModel::constant(2, SIDE, 40, random_constant(1, 2, 2));
    let ts = model.default_window().unwrap();
    assert_eq!(ts.len(), heatkernel::torus::WINDOW_POINTS);
    let t_max = *ts.last().unwrap();
    assert!(model.winding_bound(t_max).unwrap() < heatkernel::torus::WINDOW_ACCURACY);
    for s in model.heat_traces(&ts).unwrap() {
        assert!(s.truncation_bound <= heatkernel::torus::WINDOW_ACCURACY * s.trace);
    }
}

#[test]
fn fit_rejects_ill_conditioned_design() {
    let model = TorusModel::constant(2, SIDE, 40, random_constant(2, 2, 1));
    let ts = geometric_grid(0.100, 0.1001, 8);
    assert!(fit_asymptotics(&model.heat_traces(&ts).unwrap(), 2, 4).is_err());
}

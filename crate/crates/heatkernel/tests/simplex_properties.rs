use heatkernel::simplex::{self, IntegralSpec};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn spec_and_args() -> impl Strategy<Value = (IntegralSpec, Vec<f64>)> {
    (2u32..=6, 0u32..=3, 1usize..=4).prop_flat_map(|(d, p, k)| {
        (Just(IntegralSpec::new(d, p, k).unwrap()), prop::collection::vec(0.1f64..10.0, k + 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symmetric_under_any_permutation((spec, r) in spec_and_args(), seed in 0usize..120) {
        let v = simplex::integral(spec, &r).unwrap();
        let mut s = r.clone();
        let n = s.len();
        for i in 0..n {
            s.swap(i, (i + seed / (i + 1)) % n);
        }
        prop_assert!(rel(simplex::integral(spec, &s).unwrap(), v) < 1e-12);
    }

    #[test]
    fn positive_and_decreasing((spec, r) in spec_and_args(), slot in 0usize..5, bump in 0.01f64..1.0) {
        let v = simplex::integral(spec, &r).unwrap();
        prop_assert!(v > 0.0);
        let mut s = r.clone();
        let i = slot % s.len();
        s[i] += bump;
        prop_assert!(simplex::integral(spec, &s).unwrap() < v);
    }

    #[test]
    fn continuous_across_coincidence(alpha in 0.5f64..6.0, k in 1usize..=4, x in 0.2f64..8.0, eps in -1e-6f64..1e-6) {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let mut r = vec![x; k + 1];
        r[k] = x * (1.0 + eps);
        let v = simplex::integral_alpha(alpha, &r).unwrap();
        let limit = x.powf(-alpha) / fact;
        // Lipschitz bound: |∂I/∂r_k| ≤ α I / r.
        prop_assert!((v - limit).abs() <= 2.0 * alpha * limit * eps.abs() + 1e-13 * limit);
    }

    #[test]
    fn one_step_recursion_closes((spec, r) in spec_and_args()) {
        prop_assume!(spec.alpha() != 1.0);
        let k = spec.k;
        prop_assume!((r[k] - r[k - 1]).abs() > 0.05 * r[k].max(r[k - 1]));
        let v = simplex::integral(spec, &r).unwrap();
        prop_assert!(rel(simplex::integral_recursive_exact(spec.alpha(), &r).unwrap(), v) < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_quadrature((spec, r) in spec_and_args()) {
        let q = simplex::integral_quadrature(spec.alpha(), &r, 16).unwrap();
        prop_assert!(rel(simplex::integral(spec, &r).unwrap(), q) < 1e-9);
    }
}

#[test]
fn quadrature_error_decreases_with_order() {
    let r = [0.15, 9.0, 2.0, 0.4];
    let exact = simplex::integral_alpha(3.5, &r).unwrap();
    let errs: Vec<f64> =
        [2, 4, 8].iter().map(|&o| rel(simplex::integral_quadrature(3.5, &r, o).unwrap(), exact)).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn documented_values() {
    let s = |d, p, k| IntegralSpec::new(d, p, k).unwrap();
    // d = 4, k = 1: 1/(ab)
    assert!(rel(simplex::integral(s(4, 0, 1), &[2.0, 3.0]).unwrap(), 1.0 / 6.0) < 1e-14);
    // d = 2, k = 1: log quotient
    let v = simplex::integral(s(2, 0, 1), &[2.0, 5.0]).unwrap();
    assert!(rel(v, (2f64.ln() - 5f64.ln()) / (2.0 - 5.0)) < 1e-14);
    // d = 3, k = 1: 2 / (√a √b (√a + √b))
    let (a, b) = (2.0f64, 7.0f64);
    let v = simplex::integral(s(3, 0, 1), &[a, b]).unwrap();
    assert!(rel(v, 2.0 / (a.sqrt() * b.sqrt() * (a.sqrt() + b.sqrt()))) < 1e-14);
    // α = 3, k = 2: 1/(2 r₀ r₁ r₂)
    assert!(rel(simplex::integral(s(4, 1, 2), &[1.0, 2.0, 4.0]).unwrap(), 1.0 / 16.0) < 1e-14);
    // I_{2,3}(1,2,5,9) against the oracle
    let v = simplex::integral(s(4, 0, 3), &[1.0, 2.0, 5.0, 9.0]).unwrap();
    let q = simplex::integral_quadrature(2.0, &[1.0, 2.0, 5.0, 9.0], 24).unwrap();
    assert!(rel(v, q) < 1e-9);
}

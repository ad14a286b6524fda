mod common;

use cvhet_core::estimator::{self, EstimatorConfig};
use cvhet_core::fock::{DensityMatrix, FockOperator};
use cvhet_core::oracle;
use proptest::prelude::*;

fn valid_eta(e: usize, frac: f64) -> f64 {
    let hi = if e >= 2 { 2.0 / e as f64 } else { 1.0 };
    (frac * hi).max(1e-4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bias_within_eta_k(seed in any::<u64>(), e in 0usize..6, rank in 1usize..4, frac in 0.01f64..0.99) {
        let rho = common::state(seed, e, rank);
        let a = common::operator(seed ^ 0xfeed, e);
        let cfg = EstimatorConfig::new(valid_eta(e, frac), e).unwrap();
        let exact = oracle::expected_f_op(&rho, &a, &cfg).unwrap();
        let tr = a.trace_product(rho.as_operator()).unwrap();
        prop_assert!((tr - exact).norm() <= cfg.eta() * estimator::k_const(&a) + 1e-9);
    }

    #[test]
    fn pure_target_bounds(seed in any::<u64>(), e in 0usize..6, frac in 0.01f64..0.99) {
        let rho = common::state(seed, e, 2);
        let psi = common::pure(seed ^ 3, e);
        let cfg = EstimatorConfig::new(valid_eta(e, frac), e).unwrap();
        let exact = oracle::expected_f_op(&rho, &psi.outer(), &cfg).unwrap();
        let fid = cvhet_core::fock::fidelity_pure(&psi, &rho, Default::default()).unwrap();
        let gap = (exact.re - fid).abs();
        prop_assert!(exact.im.abs() < 1e-12);
        prop_assert!(gap <= cfg.eta() * estimator::k_const_pure(&psi) + 1e-9);
        prop_assert!(gap <= cfg.eta() * ((e + 1) * (e + 2)) as f64 / 2.0 + 1e-9);
    }

    #[test]
    fn linear_in_the_state(seed in any::<u64>(), e in 0usize..5, t in 0.0f64..=1.0, k in 0usize..5, l in 0usize..5) {
        prop_assume!(k <= e && l <= e);
        let r1 = common::state(seed, e, 1);
        let r2 = common::state(seed ^ 1, e, 3);
        let mix = DensityMatrix::mixture(&[(t, &r1), (1.0 - t, &r2)]).unwrap();
        let cfg = EstimatorConfig::new(valid_eta(e, 0.5), e).unwrap();
        let lhs = oracle::expected_f_elem(&mix, k, l, &cfg).unwrap();
        let rhs = oracle::expected_f_elem(&r1, k, l, &cfg).unwrap() * t
            + oracle::expected_f_elem(&r2, k, l, &cfg).unwrap() * (1.0 - t);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn swapping_indices_conjugates(seed in any::<u64>(), e in 0usize..6, k in 0usize..6, l in 0usize..6) {
        prop_assume!(k <= e && l <= e);
        let rho = common::state(seed, e, 2);
        let cfg = EstimatorConfig::new(valid_eta(e, 0.7), e).unwrap();
        let a = oracle::expected_f_elem(&rho, k, l, &cfg).unwrap();
        let b = oracle::expected_f_elem(&rho, l, k, &cfg).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-14);
    }
}

#[test]
fn tight_case_is_an_equality() {
    let cfg = EstimatorConfig::new(0.1, 1).unwrap();
    let one = DensityMatrix::fock(1, 1).unwrap();
    let p0 = FockOperator::elementary(0, 0, 1).unwrap();
    let exact = oracle::expected_f_op(&one, &p0, &cfg).unwrap();
    assert!((exact.re - 0.1 * estimator::k_const(&p0)).abs() < 1e-12);
}

#[test]
fn quadrature_matches_closed_form() {
    let mut seed = 100;
    for e in 0..=3 {
        for &eta in &[0.05, 0.1, 0.3] {
            seed += 1;
            let rho = common::state(seed, e, 2);
            let a = common::operator(seed, e);
            let cfg = EstimatorConfig::new(eta, e).unwrap();
            let exact = oracle::expected_f_op(&rho, &a, &cfg).unwrap();
            let quad = oracle::quadrature_expect(&rho, &a, &cfg, oracle::DEFAULT_RADIUS, oracle::DEFAULT_GRID).unwrap();
            assert!((exact - quad).norm() < 1e-6, "E={e} η={eta}: {exact} vs {quad}");
        }
    }
}

#[test]
fn converges_linearly_as_eta_shrinks() {
    let rho = common::state(7, 3, 3);
    let a = common::operator(8, 3);
    let tr = a.trace_product(rho.as_operator()).unwrap();
    let errs: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eta| {
            let cfg = EstimatorConfig::new(eta, 3).unwrap();
            (oracle::expected_f_op(&rho, &a, &cfg).unwrap() - tr).norm()
        })
        .collect();
    for w in errs.windows(2).skip(1) {
        let ratio = w[0] / w[1];
        assert!((ratio - 10.0).abs() < 0.5, "error ratio {ratio}");
    }
}

#[test]
fn cross_check_passes_for_random_inputs() {
    let rho = common::state(11, 2, 2);
    let a = common::operator(12, 2);
    let cfg = EstimatorConfig::new(0.2, 2).unwrap();
    let v = oracle::cross_checked_expectation(&rho, &a, &cfg).unwrap();
    assert!(v.norm().is_finite());
}

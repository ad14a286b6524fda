mod common;

use cvhet_core::estimator::{self, EstimatorConfig};
use cvhet_core::oracle;
use cvhet_core::sampling;
use cvhet_core::tomography::{self, TomographyParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn oracle_bias_within_eps(seed in any::<u64>(), e in 0usize..5, frac in 0.05f64..0.95) {
        let rho = common::state(seed, e, 1 + (seed % 3) as usize);
        // the binding element is (0, 0), where η = ε
        let eps = frac * if e >= 2 { 2.0 / e as f64 } else { 1.0 };
        for k in 0..=e {
            for l in 0..=e {
                let cfg = EstimatorConfig::new(tomography::element_eta(k, l, eps), e).unwrap();
                let mean = oracle::expected_f_elem(&rho, k, l, &cfg).unwrap();
                prop_assert!((mean - rho.get(k, l)).norm() <= eps + 1e-12);
            }
        }
    }

    #[test]
    fn failure_bound_decreases_with_samples(n in 1u64..1_000_000_000, e in 0usize..4, eps in 0.01f64..0.5, epsp in 0.01f64..0.5) {
        let a = tomography::failure_log_prob(n, e, eps, epsp).unwrap();
        let b = tomography::failure_log_prob(n + 1 + n / 10, e, eps, epsp).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn failure_bound_matches_direct_sum(n in 1u64..100_000, e in 0usize..4, eps in 0.05f64..0.5, epsp in 0.05f64..0.5) {
        let mut direct = 0.0;
        for k in 0..=e {
            for l in k..=e {
                let (lo, hi) = (k.min(l), k.max(l));
                let binom = (0..lo).fold(1.0, |acc, i| acc * (hi - i) as f64 / (i + 1) as f64);
                let c = (((k + 1) * (l + 1)) as f64).powf(1.0 + (k + l) as f64 / 2.0) * 2f64.powi((hi - lo) as i32) * binom;
                direct += (-(n as f64) * eps.powi((2 + k + l) as i32) * epsp * epsp / (4.0 * c)).exp();
            }
        }
        let got = tomography::failure_log_prob(n, e, eps, epsp).unwrap();
        // below f64::MIN_POSITIVE the direct sum goes subnormal and loses digits
        prop_assume!(direct >= f64::MIN_POSITIVE);
        let direct = (4.0 * direct).ln();
        prop_assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{} vs {}", got, direct);
    }

    #[test]
    fn single_term_bound_is_exact_in_log_space(n in 1u64..u64::MAX / 2, eps in 0.001f64..1.0, epsp in 0.001f64..1.0) {
        // E = 0: ln[4 exp(−n ε² ε′² / 4)], no underflow in any regime
        let want = 4f64.ln() - n as f64 * eps * eps * epsp * epsp / 4.0;
        let got = tomography::failure_log_prob(n, 0, eps, epsp).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{} vs {}", got, want);
    }
}

#[test]
fn c_kl_matches_closed_form() {
    for k in 0..6 {
        for l in 0..6 {
            let (lo, hi) = (k.min(l), k.max(l));
            let binom = (0..lo).fold(1.0, |acc, i| acc * (hi - i) as f64 / (i + 1) as f64);
            let m2 = 2f64.powi((hi - lo) as i32) * binom;
            assert!((estimator::m_bound(k, l).powi(2) - m2).abs() < 1e-9 * m2);
        }
    }
}

#[test]
fn unhermitized_pairs_are_conjugate() {
    // η depends on (k+1)(l+1) only and f_{A†} = conj f_A, so the pair agrees
    // to rounding, well inside the sampling error
    let rho = common::state(17, 3, 2);
    let samples = sampling::sample_q(&rho, 50_000, 8).unwrap();
    let params = TomographyParams {
        cutoff: 3,
        eps: 0.1,
        eps_prime: 0.1,
        hermitize: false,
    };
    let r = tomography::tomography_run(&samples, &params).unwrap();
    for k in 0..=3 {
        for l in 0..=3 {
            let a = r.estimates.get(k, l);
            let b = r.estimates.get(l, k).conj();
            assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
        }
    }
}

#[test]
fn estimates_near_oracle_values() {
    let rho = common::state(18, 2, 2);
    let n = 100_000;
    let samples = sampling::sample_q(&rho, n, 19).unwrap();
    let eps = 0.2;
    for k in 0..=2 {
        for l in 0..=2 {
            let cfg = EstimatorConfig::new(tomography::element_eta(k, l, eps), 2).unwrap();
            let f = estimator::EstimatorFn::elementary(l, k, &cfg).unwrap();
            let vals: Vec<_> = samples.iter().map(|s| f.eval(s.value)).collect();
            let mean = tomography::estimate_element(&samples, k, l, eps, 2).unwrap();
            let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64;
            let want = oracle::expected_f_elem(&rho, k, l, &cfg).unwrap();
            assert!((mean - want).norm() <= 5.0 * (var / n as f64).sqrt(), "({k},{l})");
        }
    }
}

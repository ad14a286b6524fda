mod common;

use cvhet_core::fock::{DensityMatrix, FockVector};
use cvhet_core::sampling::{self, AdversaryModel, ProtocolShape, QSampler};
use cvhet_core::Complex64;

/// `P(|α|² ≤ x)` for `ρ = Σ pₙ |n⟩⟨n|`: a mixture of Gamma(n+1, 1) CDFs.
fn radial_cdf(pops: &[f64], x: f64) -> f64 {
    let mut term = (-x).exp();
    let mut poisson = 0.0;
    let mut total = 0.0;
    for (n, p) in pops.iter().enumerate() {
        if n > 0 {
            term *= x / n as f64;
        }
        poisson += term;
        total += p * (1.0 - poisson);
    }
    total
}

#[test]
fn radial_law_passes_kolmogorov_smirnov() {
    let n = 100_000;
    // critical value at significance 0.001
    let crit = (-(0.0005f64).ln() / 2.0).sqrt() / (n as f64).sqrt();
    for (seed, pops) in [
        (1u64, vec![1.0]),
        (2, vec![0.0, 0.0, 1.0]),
        (3, vec![0.4, 0.1, 0.3, 0.0, 0.2]),
    ] {
        let rho = DensityMatrix::diagonal(&pops).unwrap();
        let mut r2: Vec<f64> = sampling::sample_q(&rho, n, seed)
            .unwrap()
            .iter()
            .map(|s| s.norm_sqr())
            .collect();
        r2.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (i, &x) in r2.iter().enumerate() {
            let f = radial_cdf(&pops, x);
            d = d
                .max((f - i as f64 / n as f64).abs())
                .max(((i + 1) as f64 / n as f64 - f).abs());
        }
        assert!(d < crit, "KS statistic {d} ≥ {crit} for populations {pops:?}");
    }
}

#[test]
fn acceptance_rate_at_least_one_over_dimension() {
    for e in 1..=4 {
        let psi = common::pure(40 + e as u64, e);
        let sampler = QSampler::pure(&psi);
        let mut rng = common::rng(e as u64);
        let count = 20_000;
        let mut proposals = 0u64;
        for _ in 0..count {
            proposals += sampler.sample_with_attempts(&mut rng).unwrap().1 as u64;
        }
        let p = 1.0 / (e + 1) as f64;
        let rate = count as f64 / proposals as f64;
        let sigma = (p * (1.0 - p) / proposals as f64).sqrt();
        assert!(rate >= p - 3.0 * sigma, "E={e}: rate {rate} below {p}");
    }
}

#[test]
fn q_integrates_to_one() {
    let (radius, grid) = (8.0, 400);
    let h = 2.0 * radius / grid as f64;
    for e in 0..=4 {
        let rho = common::state(60 + e as u64, e, 2);
        let mut total = 0.0;
        for i in 0..grid {
            for j in 0..grid {
                let a = Complex64::new(-radius + (i as f64 + 0.5) * h, -radius + (j as f64 + 0.5) * h);
                total += sampling::q_eval(&rho, a);
            }
        }
        assert!((total * h * h - 1.0).abs() < 1e-6, "E={e}: {}", total * h * h);
    }
}

#[test]
fn pure_and_projector_q_agree() {
    let psi = common::pure(9, 3);
    let rho = psi.projector();
    for &a in &[
        Complex64::new(0.3, -1.0),
        Complex64::new(-2.0, 0.5),
        Complex64::new(0.0, 0.0),
    ] {
        assert!((sampling::q_eval(&rho, a) - sampling::q_eval_pure(&psi, a)).abs() < 1e-14);
    }
}

#[test]
fn mean_field_matches_annihilation_expectation() {
    // E[α] under Q_ρ is Tr(aρ) = Σ √(n+1) ρ_{n+1,n}
    let rho = common::state(21, 3, 2);
    let samples = sampling::sample_q(&rho, 100_000, 4).unwrap();
    let n = samples.len() as f64;
    let mean: Complex64 = samples.iter().map(|s| s.value).sum::<Complex64>() / n;
    let var: f64 = samples.iter().map(|s| (s.value - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    let want: Complex64 = (0..3).map(|k| rho.get(k + 1, k) * ((k + 1) as f64).sqrt()).sum();
    assert!((mean - want).norm() < 5.0 * (var / n).sqrt(), "{mean} vs {want}");
}

#[test]
fn support_count_law_does_not_depend_on_seed_family() {
    let rho = common::state(30, 3, 2);
    let adv = AdversaryModel::NoisyIID(rho.clone());
    let shape = ProtocolShape::verification(40, 400, 2, 1).unwrap();
    let counts = |base: u64| -> Vec<f64> {
        (0..100)
            .map(|i| {
                let run = sampling::run_protocol_sampling(&adv, shape, base + i).unwrap();
                sampling::support_count(&run.support_samples, 2) as f64
            })
            .collect()
    };
    let (a, b) = (counts(0), counts(1_000_000));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    let (ma, mb) = (mean(&a), mean(&b));
    let se = ((var(&a, ma) + var(&b, mb)) / 100.0).sqrt();
    assert!((ma - mb).abs() < 5.0 * se);
    // and both agree with the exact exceedance probability
    let p = sampling::exceedance_probability(&rho, 2);
    assert!((ma - 400.0 * p).abs() < 5.0 * (400.0 * p * (1.0 - p) / 100.0).sqrt());
}

#[test]
fn mixture_component_is_shared_by_all_subsystems() {
    let adv = AdversaryModel::MixtureIID {
        weights: vec![0.5, 0.5],
        states: vec![DensityMatrix::fock(0, 4).unwrap(), DensityMatrix::fock(4, 4).unwrap()],
    };
    let shape = ProtocolShape::verification(200, 200, 5, 2).unwrap();
    let mut seen = [false; 2];
    for seed in 0..20 {
        let run = sampling::run_protocol_sampling(&adv, shape, seed).unwrap();
        let r = sampling::support_count(&run.support_samples, 3) as f64 / 200.0;
        // vacuum exceeds |α|² > 3 with probability e^{−3} ≈ 0.05, |4⟩ with ≈ 0.82
        let vacuum = r < 0.4;
        seen[vacuum as usize] = true;
        let kept_is_vacuum = run
            .kept
            .iter()
            .all(|s| matches!(s, sampling::SubsystemState::Mixed(d) if d.get(0, 0).re == 1.0));
        assert_eq!(vacuum, kept_is_vacuum);
    }
    assert!(seen[0] && seen[1]);
}

#[test]
fn subset_swap_places_the_requested_number_of_bad_copies() {
    let good = DensityMatrix::fock(0, 1).unwrap();
    let bad = DensityMatrix::fock(1, 1).unwrap();
    let adv = AdversaryModel::SubsetSwap {
        good,
        bad,
        bad_fraction: 1.0,
    };
    let shape = ProtocolShape::verification(30, 10, 2, 2).unwrap();
    let run = sampling::run_protocol_sampling(&adv, shape, 5).unwrap();
    assert!(run
        .kept
        .iter()
        .all(|s| matches!(s, sampling::SubsystemState::Mixed(d) if d.get(1, 1).re == 1.0)));
    let honest = sampling::run_protocol_sampling(&AdversaryModel::HonestIID(FockVector::vacuum()), shape, 5).unwrap();
    assert_eq!(honest.rng_seed, 5);
}

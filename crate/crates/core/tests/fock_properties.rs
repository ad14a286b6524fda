mod common;

use cvhet_core::fock::{self, CutoffPolicy, DensityMatrix, FockOperator};
use cvhet_core::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), cutoff in 0usize..5) {
        let a = common::state(seed, cutoff, 1 + (seed % 3) as usize);
        let b = common::state(seed ^ 0x5555, cutoff, 2);
        let c = common::state(seed ^ 0xaaaa, cutoff, cutoff + 1);
        let ab = fock::trace_distance(&a, &b).unwrap();
        let ba = fock::trace_distance(&b, &a).unwrap();
        let ac = fock::trace_distance(&a, &c).unwrap();
        let bc = fock::trace_distance(&b, &c).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!(fock::trace_distance(&a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), cutoff in 0usize..5) {
        let psi = common::pure(seed, cutoff);
        let rho = common::state(seed.wrapping_add(1), cutoff, 2);
        let f = fock::fidelity_pure(&psi, &rho, CutoffPolicy::Strict).unwrap();
        let d = fock::trace_distance(&psi.projector(), &rho).unwrap();
        prop_assert!(1.0 - f.sqrt() <= d + 1e-12);
        prop_assert!(1.0 - f <= d + 1e-12);
        prop_assert!(d <= (1.0 - f).sqrt() + 1e-12);
    }

    #[test]
    fn loss_keeps_states_valid(seed in any::<u64>(), cutoff in 0usize..6, tau in 0.0f64..=1.0) {
        let rho = common::state(seed, cutoff, 2);
        let out = fock::apply_loss(&rho, tau).unwrap();
        prop_assert!((out.as_operator().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.eigenvalues().iter().all(|&v| v >= -1e-10));
    }

    #[test]
    fn spectral_round_trip(seed in any::<u64>(), cutoff in 0usize..6, rank in 1usize..4) {
        let rho = common::state(seed, cutoff, rank);
        let parts = fock::spectral_decompose(&rho);
        let mut sum = FockOperator::zeros(cutoff);
        for (w, v) in &parts {
            sum = sum.plus(&v.outer().scaled(Complex64::new(*w, 0.0))).unwrap();
        }
        for k in 0..=cutoff {
            for l in 0..=cutoff {
                prop_assert!((sum.get(k, l) - rho.get(k, l)).norm() < 1e-10);
            }
        }
        prop_assert!(parts.len() <= rank.min(cutoff + 1));
    }

    #[test]
    fn zero_pad_preserves_fidelity(seed in any::<u64>(), cutoff in 0usize..4, extra in 1usize..3) {
        let psi = common::pure(seed, cutoff);
        let rho = common::state(seed ^ 7, cutoff, 2);
        let f = fock::fidelity_pure(&psi, &rho, CutoffPolicy::Strict).unwrap();
        let big = rho.padded(cutoff + extra).unwrap();
        prop_assert!(fock::fidelity_pure(&psi, &big, CutoffPolicy::Strict).is_err());
        let g = fock::fidelity_pure(&psi, &big, CutoffPolicy::ZeroPad).unwrap();
        prop_assert!((f - g).abs() < 1e-14);
    }
}

#[test]
fn coherent_overlap_is_normalised_over_enough_levels() {
    let alpha = Complex64::new(1.1, -0.7);
    let total: f64 = (0..80).map(|n| fock::coherent_overlap(alpha, n).norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-13);
}

#[test]
fn full_loss_gives_vacuum() {
    let rho = common::state(3, 4, 3);
    let out = fock::apply_loss(&rho, 0.0).unwrap();
    let vac = DensityMatrix::fock(0, 4).unwrap();
    assert!(fock::trace_distance(&out, &vac).unwrap() < 1e-12);
}

//! Random variates and random test states built on any [`RngCore`].

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::fock::{DensityMatrix, FockOperator, FockVector};
use crate::math;

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on `(0, 1]`, safe to take the logarithm of.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    1.0 - unit(rng)
}

/// Standard normal pair by Box–Muller.
pub fn normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let r = math::sqrt(-2.0 * math::ln(open_unit(rng)));
    let (s, c) = math::sin_cos(core::f64::consts::TAU * unit(rng));
    (r * c, r * s)
}

/// Complex Gaussian with unit variance per component.
pub fn complex_normal<R: RngCore + ?Sized>(rng: &mut R) -> Complex64 {
    let (a, b) = normal_pair(rng);
    Complex64::new(a, b)
}

/// Haar-random pure state on `span{|0⟩..|cutoff⟩}`.
pub fn random_pure_state<R: RngCore + ?Sized>(rng: &mut R, cutoff: usize) -> FockVector {
    let amps: Vec<Complex64> = (0..=cutoff).map(|_| complex_normal(rng)).collect();
    FockVector::normalized(amps).expect("Gaussian vector is non-zero")
}

/// Random density matrix `G G† / Tr(G G†)` with `G` a `(cutoff+1) × rank`
/// complex Gaussian matrix.
pub fn random_density_matrix<R: RngCore + ?Sized>(rng: &mut R, cutoff: usize, rank: usize) -> DensityMatrix {
    let dim = cutoff + 1;
    let rank = rank.max(1);
    let g: Vec<Complex64> = (0..dim * rank).map(|_| complex_normal(rng)).collect();
    let gg = FockOperator::from_fn(cutoff, |k, l| {
        (0..rank).map(|j| g[k * rank + j] * g[l * rank + j].conj()).sum()
    });
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scaled(Complex64::new(1.0 / tr, 0.0)))
        .expect("Gram matrix is a valid state after normalisation")
}

/// Operator with independent complex Gaussian entries.
pub fn random_operator<R: RngCore + ?Sized>(rng: &mut R, cutoff: usize) -> FockOperator {
    FockOperator::from_fn(cutoff, |_, _| complex_normal(rng))
}

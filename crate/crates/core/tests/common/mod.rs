#![allow(dead_code)]

use cvhet_core::fock::{DensityMatrix, FockOperator, FockVector};
use cvhet_core::random;
use cvhet_core::sampling::stream_rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0)
}

pub fn state(seed: u64, cutoff: usize, rank: usize) -> DensityMatrix {
    random::random_density_matrix(&mut rng(seed), cutoff, rank)
}

pub fn pure(seed: u64, cutoff: usize) -> FockVector {
    random::random_pure_state(&mut rng(seed), cutoff)
}

pub fn operator(seed: u64, cutoff: usize) -> FockOperator {
    random::random_operator(&mut rng(seed), cutoff)
}

/// Relative agreement with respect to the larger magnitude.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale == 0.0 || (a - b).abs() <= rel * scale
}

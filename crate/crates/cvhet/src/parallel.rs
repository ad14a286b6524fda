//! Multi-threaded sampling and estimation. Work is split along the
//! [`SAMPLE_BLOCK`] boundaries of the core crate and block results are
//! combined in block order, so every function here returns exactly what its
//! sequential counterpart returns, on any number of threads.

use cvhet_core::sampling::{self, QSampler, SAMPLE_BLOCK};
use cvhet_core::tomography::{self, ElementBank, TomographyParams, TomographyReport};
use cvhet_core::{Complex64, HeterodyneSample};
use rayon::prelude::*;

use crate::error::Result;

/// Same output as [`sampling::sample_q`].
pub fn sample_parallel(sampler: &QSampler, count: usize, seed: u64) -> Result<Vec<HeterodyneSample>> {
    let mut out = vec![HeterodyneSample::default(); count];
    out.par_chunks_mut(SAMPLE_BLOCK)
        .enumerate()
        .try_for_each(|(b, chunk)| sampler.fill_block(seed, b as u64, chunk))?;
    Ok(out)
}

/// Per-block element sums of stored samples.
pub fn block_sums_of(bank: &ElementBank, samples: &[HeterodyneSample]) -> Vec<Vec<Complex64>> {
    samples.par_chunks(SAMPLE_BLOCK).map(|b| bank.block_sums(b)).collect()
}

/// Per-block element sums of `n` fresh samples, never stored.
pub fn sampled_block_sums(bank: &ElementBank, sampler: &QSampler, n: u64, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    Ok((0..sampling::block_count(n))
        .into_par_iter()
        .map(|b| bank.sampled_block_sums(sampler, seed, b, sampling::block_len(n, b)))
        .collect::<std::result::Result<Vec<_>, _>>()?)
}

/// Same output as [`tomography::tomography_run`].
pub fn tomography_parallel(samples: &[HeterodyneSample], params: &TomographyParams) -> Result<TomographyReport> {
    let bank = ElementBank::new(params)?;
    let blocks = block_sums_of(&bank, samples);
    report_from_blocks(params, samples.len() as u64, &bank, &blocks)
}

/// Same output as [`tomography::tomography_sampled`].
pub fn tomography_streaming(
    sampler: &QSampler,
    n: u64,
    seed: u64,
    params: &TomographyParams,
) -> Result<TomographyReport> {
    let bank = ElementBank::new(params)?;
    let blocks = sampled_block_sums(&bank, sampler, n, seed)?;
    report_from_blocks(params, n, &bank, &blocks)
}

pub fn report_from_blocks(
    params: &TomographyParams,
    n: u64,
    bank: &ElementBank,
    blocks: &[Vec<Complex64>],
) -> Result<TomographyReport> {
    let totals = tomography::combine_block_sums(bank.len(), blocks.iter().cloned());
    Ok(tomography::finish_report(params, n, &totals)?)
}

/// Estimates after the first `n_i` samples for every checkpoint `n_i`: the
/// block boundaries at powers of two and the full count. Each row equals a
/// fresh run on the prefix.
pub fn convergence(
    params: &TomographyParams,
    n: u64,
    bank: &ElementBank,
    blocks: &[Vec<Complex64>],
) -> Result<Vec<TomographyReport>> {
    let mut cuts = Vec::new();
    let mut b = 1usize;
    while b < blocks.len() {
        cuts.push(b);
        b *= 2;
    }
    cuts.push(blocks.len());
    cuts.iter()
        .map(|&c| {
            let count = if c == blocks.len() {
                n
            } else {
                (c * SAMPLE_BLOCK) as u64
            };
            report_from_blocks(params, count, bank, &blocks[..c])
        })
        .collect()
}

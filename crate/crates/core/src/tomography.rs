//! Per-element heterodyne tomography with analytical confidence bounds.
//!
//! `ρ̂_kl` is the sample mean of `f_{|l⟩⟨k|}(α, ε/√((k+1)(l+1)))`. With `n`
//! samples, every element is within `ε + ε′` of `ρ_kl` except with
//! probability at most `4 Σ_{0≤k≤l≤E} exp(−n ε^{2+k+l} ε′² / (4 C_kl))`.
//!
//! All elements are estimated from the same samples. Sums are formed per
//! block of [`SAMPLE_BLOCK`] samples and the block sums added in order, so
//! slice-based, streamed and parallel evaluation agree bit for bit.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimator::{self, EstimatorConfig, EstimatorFn};
use crate::fock::FockOperator;
use crate::math;
use crate::sampling::{self, HeterodyneSample, QSampler, SAMPLE_BLOCK};
use crate::special;

/// Precision used for element `(k, l)`: `ε / K_{|l⟩⟨k|}`.
pub fn element_eta(k: usize, l: usize, eps: f64) -> f64 {
    eps / math::sqrt(((k + 1) * (l + 1)) as f64)
}

fn element_config(k: usize, l: usize, eps: f64, cutoff: usize) -> Result<EstimatorConfig> {
    if !(eps > 0.0) {
        return Err(Error::param(alloc::format!("ε must be positive, got {eps}")));
    }
    EstimatorConfig::new(element_eta(k, l, eps), cutoff).map_err(|e| match e {
        Error::Parameter(msg) => Error::Parameter(alloc::format!("element ({k}, {l}): {msg}")),
        other => other,
    })
}

/// `ρ̂_kl = (1/n) Σᵢ f_{|l⟩⟨k|}(αᵢ, ε/√((k+1)(l+1)))`.
///
/// `cutoff` is the energy cutoff `E` whose `η < 2/E` condition applies.
pub fn estimate_element(
    samples: &[HeterodyneSample],
    k: usize,
    l: usize,
    eps: f64,
    cutoff: usize,
) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::param("cannot estimate from an empty sample set"));
    }
    let cfg = element_config(k, l, eps, cutoff)?;
    let f = EstimatorFn::elementary(l, k, &cfg)?;
    let mut total = Complex64::new(0.0, 0.0);
    for block in samples.chunks(SAMPLE_BLOCK) {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in block {
            acc += f.eval(s.value);
        }
        total += acc;
    }
    Ok(total / samples.len() as f64)
}

/// Inputs of a tomography run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TomographyParams {
    pub cutoff: usize,
    pub eps: f64,
    pub eps_prime: f64,
    /// Replace `ρ̂` by `(ρ̂ + ρ̂†)/2`.
    pub hermitize: bool,
}

impl TomographyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_prime > 0.0) {
            return Err(Error::param(alloc::format!(
                "ε′ must be positive, got {}",
                self.eps_prime
            )));
        }
        for k in 0..=self.cutoff {
            for l in 0..=self.cutoff {
                element_config(k, l, self.eps, self.cutoff)?;
            }
        }
        Ok(())
    }
}

/// Result of a tomography run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TomographyReport {
    /// `ρ̂_kl`, possibly non-Hermitian, non-positive or not unit-trace.
    pub estimates: FockOperator,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    /// `ε + ε′`.
    pub confidence_radius: f64,
    /// Natural log of the union-bound failure probability.
    pub failure_log_prob: f64,
    pub sample_count: u64,
    pub hermitized: bool,
}

impl TomographyReport {
    pub fn failure_prob_clamped(&self) -> f64 {
        special::clamp_probability(self.failure_log_prob)
    }
}

/// Every elementary estimator `f_{|l⟩⟨k|}` of a run, evaluated together.
///
/// Powers of `z` are shared across elements and the Gaussian factor is
/// computed once per distinct `η`.
#[derive(Debug, Clone)]
pub struct ElementBank {
    cutoff: usize,
    gauss: Vec<f64>,
    // per element (row-major k, l): η group and the range of its monomials
    elements: Vec<(usize, core::ops::Range<usize>)>,
    // (a, b, c_ab / η) for all elements, concatenated
    monomials: Vec<(usize, usize, Complex64)>,
}

/// Per-thread scratch space for [`ElementBank`].
struct Scratch {
    powers: Vec<Complex64>,
    weights: Vec<f64>,
    sums: Vec<Complex64>,
}

impl ElementBank {
    pub fn new(params: &TomographyParams) -> Result<Self> {
        params.validate()?;
        let mut etas: Vec<f64> = Vec::new();
        let mut elements = Vec::new();
        let mut monomials = Vec::new();
        for k in 0..=params.cutoff {
            for l in 0..=params.cutoff {
                let cfg = element_config(k, l, params.eps, params.cutoff)?;
                let eta = cfg.eta();
                let group = match etas.iter().position(|&e| e == eta) {
                    Some(g) => g,
                    None => {
                        etas.push(eta);
                        etas.len() - 1
                    }
                };
                let f = EstimatorFn::elementary(l, k, &cfg)?;
                let start = monomials.len();
                monomials.extend(f.monomials().map(|(a, b, c)| (a, b, c / eta)));
                elements.push((group, start..monomials.len()));
            }
        }
        Ok(ElementBank {
            cutoff: params.cutoff,
            gauss: etas.iter().map(|e| 1.0 - 1.0 / e).collect(),
            elements,
            monomials,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            powers: alloc::vec![Complex64::new(1.0, 0.0); self.cutoff + 1],
            weights: alloc::vec![0.0; self.gauss.len()],
            sums: alloc::vec![Complex64::new(0.0, 0.0); self.len()],
        }
    }

    /// Adds `f_{|l⟩⟨k|}(z)` to `sums[k·(E+1) + l]` for every element.
    #[inline]
    fn accumulate(&self, z: Complex64, scratch: &mut Scratch) {
        let Scratch { powers, weights, sums } = scratch;
        for i in 1..powers.len() {
            powers[i] = powers[i - 1] * z;
        }
        let r2 = z.norm_sqr();
        for (w, g) in weights.iter_mut().zip(&self.gauss) {
            *w = math::exp(g * r2);
        }
        for ((group, range), sum) in self.elements.iter().zip(sums.iter_mut()) {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, b, c) in &self.monomials[range.clone()] {
                acc += c * (powers[a] * powers[b].conj());
            }
            *sum += acc * weights[*group];
        }
    }

    /// Per-element sums over one block of stored samples.
    pub fn block_sums(&self, block: &[HeterodyneSample]) -> Vec<Complex64> {
        let mut scratch = self.scratch();
        for s in block {
            self.accumulate(s.value, &mut scratch);
        }
        scratch.sums
    }

    /// Per-element sums over block `block` of the i.i.d. stream of `sampler`,
    /// without storing samples.
    pub fn sampled_block_sums(&self, sampler: &QSampler, seed: u64, block: u64, len: usize) -> Result<Vec<Complex64>> {
        let mut scratch = self.scratch();
        sampler.for_each_in_block(seed, block, len, |z| self.accumulate(z, &mut scratch))?;
        Ok(scratch.sums)
    }
}

/// Adds block sums in order.
pub fn combine_block_sums<I: IntoIterator<Item = Vec<Complex64>>>(len: usize, blocks: I) -> Vec<Complex64> {
    let mut total = alloc::vec![Complex64::new(0.0, 0.0); len];
    for b in blocks {
        for (t, v) in total.iter_mut().zip(b) {
            *t += v;
        }
    }
    total
}

/// Builds the report from per-element totals over `n` samples.
pub fn finish_report(params: &TomographyParams, n: u64, totals: &[Complex64]) -> Result<TomographyReport> {
    if n == 0 {
        return Err(Error::param("cannot estimate from an empty sample set"));
    }
    let dim = params.cutoff + 1;
    if totals.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: totals.len(),
        });
    }
    let raw = FockOperator::from_fn(params.cutoff, |k, l| totals[k * dim + l] / n as f64);
    let estimates = if params.hermitize {
        FockOperator::from_fn(params.cutoff, |k, l| (raw.get(k, l) + raw.get(l, k).conj()) * 0.5)
    } else {
        raw
    };
    Ok(TomographyReport {
        estimates,
        epsilon: params.eps,
        epsilon_prime: params.eps_prime,
        confidence_radius: params.eps + params.eps_prime,
        failure_log_prob: failure_log_prob(n, params.cutoff, params.eps, params.eps_prime)?,
        sample_count: n,
        hermitized: params.hermitize,
    })
}

/// Estimates every `ρ̂_kl`, `k, l ≤ E`, from stored samples.
pub fn tomography_run(samples: &[HeterodyneSample], params: &TomographyParams) -> Result<TomographyReport> {
    if samples.is_empty() {
        return Err(Error::param("cannot estimate from an empty sample set"));
    }
    let bank = ElementBank::new(params)?;
    let totals = combine_block_sums(bank.len(), samples.chunks(SAMPLE_BLOCK).map(|b| bank.block_sums(b)));
    finish_report(params, samples.len() as u64, &totals)
}

/// Tomography on `n` fresh samples of `sampler` (the stream of
/// [`sampling::sample_q`] for the same seed), without storing them.
pub fn tomography_sampled(
    sampler: &QSampler,
    n: u64,
    seed: u64,
    params: &TomographyParams,
) -> Result<TomographyReport> {
    let bank = ElementBank::new(params)?;
    let mut totals = alloc::vec![Complex64::new(0.0, 0.0); bank.len()];
    for b in 0..sampling::block_count(n) {
        let sums = bank.sampled_block_sums(sampler, seed, b, sampling::block_len(n, b))?;
        for (t, v) in totals.iter_mut().zip(sums) {
            *t += v;
        }
    }
    finish_report(params, n, &totals)
}

/// `ln[4 Σ_{0≤k≤l≤E} exp(−n ε^{2+k+l} ε′² / (4 C_kl))]`.
pub fn failure_log_prob(n: u64, cutoff: usize, eps: f64, eps_prime: f64) -> Result<f64> {
    if !(eps > 0.0 && eps_prime > 0.0) {
        return Err(Error::param("ε and ε′ must be positive"));
    }
    let (ln_n, ln_eps, ln_epsp) = (math::ln(n as f64), math::ln(eps), math::ln(eps_prime));
    let mut logs = Vec::new();
    for k in 0..=cutoff {
        for l in k..=cutoff {
            let ln_rate = ln_n + (2 + k + l) as f64 * ln_eps + 2.0 * ln_epsp - math::ln(4.0) - estimator::ln_c_kl(k, l);
            logs.push(-math::exp(ln_rate));
        }
    }
    Ok(math::ln(4.0) + special::log_sum_exp(logs))
}

/// Smallest `n` whose failure bound is at most `δ`.
///
/// Starts from the inversion of the dominant `(E, E)` term,
/// `n ≥ 4 C_EE ln(4T/δ) / (ε^{2+2E} ε′²)` with `T = (E+1)(E+2)/2`, then
/// bisects on the full bound.
pub fn required_samples_tomography(cutoff: usize, eps: f64, eps_prime: f64, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(alloc::format!("δ = {delta} must lie in (0, 1)")));
    }
    if !(eps > 0.0 && eps_prime > 0.0) {
        return Err(Error::param("ε and ε′ must be positive"));
    }
    let terms = ((cutoff + 1) * (cutoff + 2) / 2) as f64;
    let ln_n0 = math::ln(4.0) + estimator::ln_c_kl(cutoff, cutoff) + math::ln(math::ln(4.0 * terms / delta))
        - (2 + 2 * cutoff) as f64 * math::ln(eps)
        - 2.0 * math::ln(eps_prime);
    let too_big = || Error::Overflow {
        what: "required sample count",
        log10: ln_n0 / core::f64::consts::LN_10,
    };
    if ln_n0 >= 63.0 * core::f64::consts::LN_2 {
        return Err(too_big());
    }
    let ln_delta = math::ln(delta);
    let ok = |n: u64| -> Result<bool> { Ok(failure_log_prob(n, cutoff, eps, eps_prime)? <= ln_delta) };
    let mut hi = (math::ceil(math::exp(ln_n0)) as u64).max(1);
    while !ok(hi)? {
        hi = hi.checked_mul(2).ok_or_else(too_big)?;
    }
    let mut lo = 0; // ok(lo) is false or lo = 0
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

//! Husimi Q function and heterodyne sampling.
//!
//! Samples are drawn exactly (no grid): a density matrix is split into its
//! eigenvectors, an eigenvector is picked by weight, and its Q function is
//! sampled by rejection from the Fock mixture `d Σₙ |vₙ|² Q_{|n⟩}`, where `d`
//! is the number of non-zero amplitudes. Each `Q_{|n⟩}` draw is a
//! Gamma(n+1, 1) radius² with uniform phase.
//!
//! Randomness is drawn from ChaCha8 streams keyed by `(seed, stream)`: i.i.d.
//! sampling uses one stream per block of [`SAMPLE_BLOCK`] samples, protocol
//! sampling one stream per subsystem. Output therefore depends only on the
//! inputs and the seed, however the blocks are scheduled.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockVector};
use crate::math;
use crate::random;
use crate::special;

/// Samples generated per RNG stream by [`sample_q`].
pub const SAMPLE_BLOCK: usize = 4096;

/// Rejection attempts allowed for a single sample.
pub const MAX_REJECTIONS: u32 = 1_000_000;

/// One heterodyne outcome `α`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[repr(transparent)]
pub struct HeterodyneSample {
    pub value: Complex64,
}

impl HeterodyneSample {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::param(alloc::format!("heterodyne sample {value} is not finite")));
        }
        Ok(HeterodyneSample { value })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// ChaCha8 generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `Q_ρ(α) = ⟨α|ρ|α⟩ / π`.
pub fn q_eval(rho: &DensityMatrix, alpha: Complex64) -> f64 {
    let c: Vec<Complex64> = (0..rho.dim()).map(|n| fock::coherent_overlap(alpha, n)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, ck) in c.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (l, cl) in c.iter().enumerate() {
            row += rho.get(k, l) * cl;
        }
        acc += ck.conj() * row;
    }
    (acc.re / core::f64::consts::PI).max(0.0)
}

/// `Q_Ψ(α) = |⟨α|Ψ⟩|² / π`.
pub fn q_eval_pure(psi: &FockVector, alpha: Complex64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, a) in psi.amplitudes().iter().enumerate() {
        acc += fock::coherent_overlap(alpha, n).conj() * a;
    }
    acc.norm_sqr() / core::f64::consts::PI
}

/// Rejection sampler for the Q function of one pure state.
#[derive(Debug, Clone)]
struct PureSampler {
    // Fock index, vₙ/√n! and |vₙ|²/n! for the non-zero amplitudes
    levels: Vec<(usize, Complex64, f64)>,
    level_cdf: Vec<f64>,
    support: f64,
}

impl PureSampler {
    fn new(psi: &FockVector) -> Self {
        let mut levels = Vec::new();
        let mut level_cdf = Vec::new();
        let mut acc = 0.0;
        for (n, a) in psi.amplitudes().iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            acc += p;
            let inv_fact = math::exp(-special::ln_factorial(n as u64));
            levels.push((n, a * math::sqrt(inv_fact), p * inv_fact));
            level_cdf.push(acc);
        }
        for c in level_cdf.iter_mut() {
            *c /= acc;
        }
        let support = levels.len() as f64;
        PureSampler {
            levels,
            level_cdf,
            support,
        }
    }

    /// One proposal from `Q_{|n⟩}`: Gamma(n+1, 1) radius² and uniform
    /// phase, both from a single polar draw plus `n` extra uniforms.
    #[inline]
    fn fock_proposal<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Complex64 {
        let (x, y, s) = loop {
            let x = 2.0 * random::unit(rng) - 1.0;
            let y = 2.0 * random::unit(rng) - 1.0;
            let s = x * x + y * y;
            if s > 0.0 && s < 1.0 {
                break (x, y, s);
            }
        };
        // −ln s ~ Exp(1), independent of the direction (x, y)/√s
        let mut r2 = 0.0;
        let mut prod = s;
        for _ in 0..n {
            prod *= random::open_unit(rng);
            if prod < 1e-250 {
                r2 -= math::ln(prod);
                prod = 1.0;
            }
        }
        r2 -= math::ln(prod);
        let scale = math::sqrt(r2 / s);
        Complex64::new(x * scale, y * scale)
    }

    /// A sample and the number of proposals it took.
    #[inline]
    fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<(Complex64, u32)> {
        if self.levels.len() == 1 {
            return Ok((Self::fock_proposal(self.levels[0].0, rng), 1));
        }
        let last = self.levels.len() - 1;
        for attempt in 1..=MAX_REJECTIONS {
            let u = random::unit(rng);
            let mut idx = 0;
            while idx < last && u >= self.level_cdf[idx] {
                idx += 1;
            }
            let alpha = Self::fock_proposal(self.levels[idx].0, rng);
            // accept with Q_v / (d Σ|vₙ|² Q_{|n⟩}); the common e^{−|α|²}/π cancels
            let ac = alpha.conj();
            let r2 = alpha.norm_sqr();
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            let mut pow = Complex64::new(1.0, 0.0);
            let mut pow_r = 1.0;
            let mut at = 0;
            for &(n, w, p) in &self.levels {
                while at < n {
                    pow *= ac;
                    pow_r *= r2;
                    at += 1;
                }
                num += w * pow;
                den += p * pow_r;
            }
            if random::unit(rng) * self.support * den < num.norm_sqr() {
                return Ok((alpha, attempt));
            }
        }
        Err(Error::Inconsistency(alloc::format!(
            "rejection sampler exceeded {MAX_REJECTIONS} attempts"
        )))
    }
}

/// Exact sampler for `Q_ρ`.
#[derive(Debug, Clone)]
pub struct QSampler {
    components: Vec<PureSampler>,
    cumulative: Vec<f64>,
}

impl QSampler {
    pub fn new(rho: &DensityMatrix) -> Self {
        let parts = fock::spectral_decompose(rho);
        let mut cumulative = Vec::with_capacity(parts.len());
        let mut acc = 0.0;
        let components = parts
            .iter()
            .map(|(w, v)| {
                acc += w;
                cumulative.push(acc);
                PureSampler::new(v)
            })
            .collect();
        QSampler { components, cumulative }
    }

    pub fn pure(psi: &FockVector) -> Self {
        QSampler {
            components: alloc::vec![PureSampler::new(psi)],
            cumulative: alloc::vec![1.0],
        }
    }

    /// Draws one sample. Always consumes one uniform for the eigenvector
    /// choice, so pure and mixed inputs advance the stream alike.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<HeterodyneSample> {
        Ok(self.sample_with_attempts(rng)?.0)
    }

    /// [`QSampler::sample`] together with the number of rejection-sampler
    /// proposals used.
    #[inline]
    pub fn sample_with_attempts<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<(HeterodyneSample, u32)> {
        let u = random::unit(rng);
        let idx = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.components.len() - 1);
        let (value, attempts) = self.components[idx].sample(rng)?;
        Ok((HeterodyneSample { value }, attempts))
    }

    /// Fills `out` with the first `out.len()` samples of block `block`.
    pub fn fill_block(&self, seed: u64, block: u64, out: &mut [HeterodyneSample]) -> Result<()> {
        let mut rng = stream_rng(seed, block);
        for s in out.iter_mut() {
            *s = self.sample(&mut rng)?;
        }
        Ok(())
    }

    /// Calls `f` on each of the first `len` samples of block `block`
    /// without storing them.
    pub fn for_each_in_block(&self, seed: u64, block: u64, len: usize, mut f: impl FnMut(Complex64)) -> Result<()> {
        let mut rng = stream_rng(seed, block);
        for _ in 0..len {
            f(self.sample(&mut rng)?.value);
        }
        Ok(())
    }
}

/// Number of blocks and length of block `b` for `count` samples.
pub fn block_len(count: u64, block: u64) -> usize {
    let start = block * SAMPLE_BLOCK as u64;
    (count - start).min(SAMPLE_BLOCK as u64) as usize
}

pub fn block_count(count: u64) -> u64 {
    count.div_ceil(SAMPLE_BLOCK as u64)
}

/// `count` i.i.d. samples from `Q_ρ`, deterministic in `(ρ, count, seed)`.
pub fn sample_q(rho: &DensityMatrix, count: usize, seed: u64) -> Result<Vec<HeterodyneSample>> {
    let sampler = QSampler::new(rho);
    let mut out = alloc::vec![HeterodyneSample::default(); count];
    for (b, chunk) in out.chunks_mut(SAMPLE_BLOCK).enumerate() {
        sampler.fill_block(seed, b as u64, chunk)?;
    }
    Ok(out)
}

/// Number of samples with `|α|² > E`.
pub fn support_count(samples: &[HeterodyneSample], cutoff: usize) -> u64 {
    let e = cutoff as f64;
    samples.iter().filter(|s| s.norm_sqr() > e).count() as u64
}

/// Exact `P(|α|² > E)` under `Q_ρ`: `Σₙ ρₙₙ e^{−E} Σ_{j≤n} E^j/j!`.
pub fn exceedance_probability(rho: &DensityMatrix, cutoff: usize) -> f64 {
    let e = cutoff as f64;
    let mut term = math::exp(-e);
    let mut tail = 0.0;
    let mut total = 0.0;
    for n in 0..rho.dim() {
        if n > 0 {
            term *= e / n as f64;
        }
        tail += term;
        total += rho.get(n, n).re * tail.min(1.0);
    }
    total.clamp(0.0, 1.0)
}

/// How the prover prepares the `n + k` subsystems.
#[derive(Debug, Clone)]
pub enum AdversaryModel {
    /// Every subsystem is the target pure state.
    HonestIID(FockVector),
    /// Every subsystem is the same density matrix.
    NoisyIID(DensityMatrix),
    /// A component is drawn once by weight; every subsystem is that state.
    MixtureIID {
        weights: Vec<f64>,
        states: Vec<DensityMatrix>,
    },
    /// A seeded random subset of `round(bad_fraction·(n+k))` subsystems is
    /// `bad`, the rest `good`.
    SubsetSwap {
        good: DensityMatrix,
        bad: DensityMatrix,
        bad_fraction: f64,
    },
}

impl AdversaryModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            AdversaryModel::HonestIID(_) | AdversaryModel::NoisyIID(_) => Ok(()),
            AdversaryModel::MixtureIID { weights, states } => {
                if weights.is_empty() || weights.len() != states.len() {
                    return Err(Error::param(alloc::format!(
                        "mixture needs one weight per state ({} weights, {} states)",
                        weights.len(),
                        states.len()
                    )));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    return Err(Error::param("mixture weights must be non-negative"));
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidState {
                        invariant: "mixture weights sum to 1",
                        residual: (sum - 1.0).abs(),
                    });
                }
                Ok(())
            }
            AdversaryModel::SubsetSwap { bad_fraction, .. } => {
                if !(0.0..=1.0).contains(bad_fraction) {
                    return Err(Error::param(alloc::format!(
                        "bad fraction {bad_fraction} outside [0, 1]"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Subsystem counts of one protocol run.
///
/// `n + k` subsystems are prepared; `k` go to support estimation, and of the
/// remaining `n`, `4q` are discarded, `m` kept and `n − 4q − m` measured for
/// the fidelity estimate. Certification is the case `k = q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolShape {
    pub n: u64,
    pub k: u64,
    pub q: u64,
    pub m: u64,
}

impl ProtocolShape {
    /// Shape for verification; checks `k ≥ 1`, `q ≥ m`, `n − 4q − m ≥ 1`.
    pub fn verification(n: u64, k: u64, q: u64, m: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("verification needs k ≥ 1 support samples"));
        }
        if m == 0 {
            return Err(Error::param("at least one copy must be kept (m ≥ 1)"));
        }
        if q < m {
            return Err(Error::param(alloc::format!("q = {q} must be at least m = {m}")));
        }
        let shape = ProtocolShape { n, k, q, m };
        shape.estimate_count()?;
        Ok(shape)
    }

    /// Shape for certification: `n_measured` samples, `m` copies, no
    /// support or discard stage.
    pub fn certification(n_measured: u64, m: u64) -> Result<Self> {
        if n_measured == 0 || m == 0 {
            return Err(Error::param("certification needs n ≥ 1 and m ≥ 1"));
        }
        let n = n_measured.checked_add(m).ok_or(Error::Overflow {
            what: "n + m",
            log10: math::log10(n_measured as f64),
        })?;
        Ok(ProtocolShape { n, k: 0, q: 0, m })
    }

    /// `n − 4q − m`, the number of estimate samples.
    pub fn estimate_count(&self) -> Result<u64> {
        let used = self
            .q
            .checked_mul(4)
            .and_then(|d| d.checked_add(self.m))
            .ok_or(Error::Overflow {
                what: "4q + m",
                log10: math::log10(self.q as f64 * 4.0),
            })?;
        if self.n < used + 1 {
            return Err(Error::param(alloc::format!(
                "n − 4q − m = {} − {} must be at least 1",
                self.n,
                used
            )));
        }
        Ok(self.n - used)
    }

    pub fn total(&self) -> Result<u64> {
        self.n.checked_add(self.k).ok_or(Error::Overflow {
            what: "n + k",
            log10: math::log10(self.n as f64 + self.k as f64),
        })
    }
}

/// A subsystem left unmeasured.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsystemState {
    Pure(FockVector),
    Mixed(DensityMatrix),
}

/// Outcome of one simulated protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolSamples {
    pub shape: ProtocolShape,
    /// Support-estimation outcomes (the `βᵢ`).
    pub support_samples: Vec<HeterodyneSample>,
    /// Fidelity-estimation outcomes (the `αᵢ`).
    pub estimate_samples: Vec<HeterodyneSample>,
    /// Exact states of the kept subsystems; simulation ground truth.
    pub kept: Vec<SubsystemState>,
    pub rng_seed: u64,
}

/// Largest protocol simulated in memory.
pub const MAX_PROTOCOL_SUBSYSTEMS: u64 = 1 << 30;

const PERMUTATION_STREAM: u64 = u64::MAX;
const ADVERSARY_STREAM: u64 = u64::MAX - 1;

/// Simulates the prover and the verifier's random selections.
///
/// Subsystem `i` (before permutation) draws its outcome from stream `i`.
/// A seeded uniform permutation then assigns the first `k` positions to
/// support estimation, the next `4q` to the discard pile, the next `m` to the
/// kept copies and the rest to fidelity estimation.
pub fn run_protocol_sampling(adv: &AdversaryModel, shape: ProtocolShape, seed: u64) -> Result<ProtocolSamples> {
    adv.validate()?;
    let estimate_count = shape.estimate_count()?;
    let total = shape.total()?;
    if total > MAX_PROTOCOL_SUBSYSTEMS {
        return Err(Error::param(alloc::format!(
            "{total} subsystems exceed the simulation limit {MAX_PROTOCOL_SUBSYSTEMS}"
        )));
    }
    let total = total as usize;

    // state index per subsystem: 0 = good/only, 1 = bad
    let mut adv_rng = stream_rng(seed, ADVERSARY_STREAM);
    let (states, which): (Vec<(DensityMatrix, SubsystemState)>, Vec<u8>) = match adv {
        AdversaryModel::HonestIID(psi) => (
            alloc::vec![(psi.projector(), SubsystemState::Pure(psi.clone()))],
            alloc::vec![0; total],
        ),
        AdversaryModel::NoisyIID(rho) => (
            alloc::vec![(rho.clone(), SubsystemState::Mixed(rho.clone()))],
            alloc::vec![0; total],
        ),
        AdversaryModel::MixtureIID { weights, states } => {
            let u = random::unit(&mut adv_rng);
            let mut acc = 0.0;
            let mut pick = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            let rho = states[pick].clone();
            (
                alloc::vec![(rho.clone(), SubsystemState::Mixed(rho))],
                alloc::vec![0; total],
            )
        }
        AdversaryModel::SubsetSwap {
            good,
            bad,
            bad_fraction,
        } => {
            let bad_count = (math::round(bad_fraction * total as f64) as usize).min(total);
            let mut which = alloc::vec![0u8; total];
            for i in partial_shuffle(total, bad_count, &mut adv_rng) {
                which[i] = 1;
            }
            (
                alloc::vec![
                    (good.clone(), SubsystemState::Mixed(good.clone())),
                    (bad.clone(), SubsystemState::Mixed(bad.clone())),
                ],
                which,
            )
        }
    };
    let samplers: Vec<QSampler> = states.iter().map(|(rho, _)| QSampler::new(rho)).collect();

    let mut perm_rng = stream_rng(seed, PERMUTATION_STREAM);
    let order = partial_shuffle(total, total, &mut perm_rng);

    let k = shape.k as usize;
    let discard = 4 * shape.q as usize;
    let m = shape.m as usize;
    let measure = |pos: usize| -> Result<HeterodyneSample> {
        let mut rng = stream_rng(seed, pos as u64);
        samplers[which[pos] as usize].sample(&mut rng)
    };

    let support_samples = order[..k].iter().map(|&p| measure(p)).collect::<Result<Vec<_>>>()?;
    let kept = order[k + discard..k + discard + m]
        .iter()
        .map(|&p| states[which[p] as usize].1.clone())
        .collect();
    let estimate_samples = order[k + discard + m..]
        .iter()
        .map(|&p| measure(p))
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(estimate_samples.len() as u64, estimate_count);

    Ok(ProtocolSamples {
        shape,
        support_samples,
        estimate_samples,
        kept,
        rng_seed: seed,
    })
}

/// First `count` entries of a uniformly random permutation of `0..len`
/// (Fisher–Yates).
fn partial_shuffle<R: RngCore + ?Sized>(len: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).collect();
    for i in 0..count.min(len.saturating_sub(1)) {
        let j = i + uniform_below((len - i) as u64, rng) as usize;
        idx.swap(i, j);
    }
    idx.truncate(count);
    idx
}

/// Unbiased integer in `[0, bound)` by rejection.
fn uniform_below<R: RngCore + ?Sized>(bound: u64, rng: &mut R) -> u64 {
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn q_eval_examples() {
        let vac = DensityMatrix::fock(0, 0).unwrap();
        assert!((q_eval(&vac, c(0.0, 0.0)) - 1.0 / core::f64::consts::PI).abs() < 1e-15);
        let one = DensityMatrix::fock(1, 1).unwrap();
        let a = c(0.6, 0.8);
        let want = (-1.0f64).exp() / core::f64::consts::PI;
        assert!((q_eval(&one, a) - want).abs() < 1e-15);
        let psi = FockVector::fock(1, 1).unwrap();
        assert!((q_eval_pure(&psi, a) - want).abs() < 1e-15);
    }

    #[test]
    fn support_count_examples() {
        let s: Vec<HeterodyneSample> = [c(0.5, 0.0), c(0.0, 2.0), c(3.0, 0.0)]
            .iter()
            .map(|&v| HeterodyneSample::new(v).unwrap())
            .collect();
        assert_eq!(support_count(&s, 4), 1);
        assert_eq!(support_count(&[], 4), 0);
    }

    #[test]
    fn sample_rejects_non_finite() {
        assert!(HeterodyneSample::new(c(f64::NAN, 0.0)).is_err());
        assert!(HeterodyneSample::new(c(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let a = sample_q(&rho, 10_000, 42).unwrap();
        let b = sample_q(&rho, 10_000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_q(&rho, 10_000, 43).unwrap();
        assert_ne!(a, c);
        // prefixes agree across counts
        let d = sample_q(&rho, 5_000, 42).unwrap();
        assert_eq!(&a[..5_000], &d[..]);
    }

    #[test]
    fn exceedance_of_vacuum() {
        let vac = DensityMatrix::fock(0, 3).unwrap();
        assert!((exceedance_probability(&vac, 3) - (-3.0f64).exp()).abs() < 1e-15);
        let one = DensityMatrix::fock(1, 3).unwrap();
        assert!((exceedance_probability(&one, 2) - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn protocol_counts() {
        let adv = AdversaryModel::HonestIID(FockVector::vacuum());
        let shape = ProtocolShape::verification(20, 5, 2, 1).unwrap();
        let run = run_protocol_sampling(&adv, shape, 3).unwrap();
        assert_eq!(run.support_samples.len(), 5);
        assert_eq!(run.estimate_samples.len(), 11);
        assert_eq!(run.kept, vec![SubsystemState::Pure(FockVector::vacuum())]);
    }

    #[test]
    fn protocol_shape_validation() {
        assert!(ProtocolShape::verification(20, 0, 2, 1).is_err());
        assert!(ProtocolShape::verification(20, 5, 0, 1).is_err());
        assert!(ProtocolShape::verification(9, 5, 2, 1).is_err());
        assert!(ProtocolShape::verification(10, 5, 2, 1).is_ok());
        let cert = ProtocolShape::certification(100, 2).unwrap();
        assert_eq!(cert.estimate_count().unwrap(), 100);
    }

    #[test]
    fn zero_bad_fraction_matches_honest() {
        let psi = FockVector::normalized(vec![c(1.0, 0.0), c(0.3, -0.2)]).unwrap();
        let shape = ProtocolShape::verification(60, 10, 3, 2).unwrap();
        let honest = run_protocol_sampling(&AdversaryModel::HonestIID(psi.clone()), shape, 11).unwrap();
        let swap = AdversaryModel::SubsetSwap {
            good: psi.projector(),
            bad: DensityMatrix::fock(1, 1).unwrap(),
            bad_fraction: 0.0,
        };
        let swapped = run_protocol_sampling(&swap, shape, 11).unwrap();
        assert_eq!(honest.support_samples, swapped.support_samples);
        assert_eq!(honest.estimate_samples, swapped.estimate_samples);
    }

    #[test]
    fn mixture_validation() {
        let adv = AdversaryModel::MixtureIID {
            weights: vec![0.5, 0.4],
            states: vec![DensityMatrix::fock(0, 0).unwrap(), DensityMatrix::fock(0, 0).unwrap()],
        };
        assert!(matches!(adv.validate(), Err(Error::InvalidState { .. })));
    }

    #[test]
    fn uniform_below_covers_range() {
        let mut rng = stream_rng(1, 0);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[uniform_below(7, &mut rng) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}

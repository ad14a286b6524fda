//! Certification (i.i.d. copies) and verification (no i.i.d. assumption) of
//! a target pure state from heterodyne samples.
//!
//! Both estimate the fidelity of `m` copies with `|Ψ⟩^{⊗m}` as
//! `[(1/n) Σ f_Ψ(αᵢ, ε/(m K_Ψ))]^m`, test the energy support by counting
//! samples with `|α|² > E`, and report a failure-probability budget. All
//! probabilities are kept as natural logarithms and clamped to `[0, 1]` only
//! for display; at desk-scale parameters the verification budget is far
//! above 1 and the log is the informative quantity.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimator::{self, EstimatorConfig, EstimatorFn};
use crate::fock::{DensityMatrix, FockVector};
use crate::math;
use crate::sampling::{self, HeterodyneSample, ProtocolSamples, ProtocolShape, SAMPLE_BLOCK};
use crate::special;

/// One named term of a failure-probability budget.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BudgetTerm {
    pub name: &'static str,
    /// Natural log of the term.
    pub log_value: f64,
    /// The term's bound is void at these parameters.
    pub vacuous: bool,
}

impl BudgetTerm {
    fn new(name: &'static str, log_value: f64) -> Self {
        BudgetTerm {
            name,
            log_value,
            vacuous: false,
        }
    }

    pub fn clamped(&self) -> f64 {
        special::clamp_probability(self.log_value)
    }
}

/// Sum of named failure-probability terms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProbabilityBudget {
    pub terms: Vec<BudgetTerm>,
    /// `ln Σ exp(termᵢ)`.
    pub total_log: f64,
    /// `min(1, exp(total_log))`.
    pub total_clamped: f64,
}

impl ProbabilityBudget {
    fn new(terms: Vec<BudgetTerm>) -> Self {
        let total_log = special::log_sum_exp(terms.iter().map(|t| t.log_value));
        ProbabilityBudget {
            terms,
            total_log,
            total_clamped: special::clamp_probability(total_log),
        }
    }

    pub fn term(&self, name: &str) -> Option<&BudgetTerm> {
        self.terms.iter().find(|t| t.name == name)
    }
}

/// `η = ε / (m K_Ψ)` checked against the validity domain for cutoff `E`.
fn fidelity_config(psi: &FockVector, m: u64, eps: f64, cutoff: usize) -> Result<EstimatorConfig> {
    if m == 0 {
        return Err(Error::param("m must be at least 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::param(alloc::format!("ε must be positive, got {eps}")));
    }
    let eta = eps / (m as f64 * estimator::k_const_pure(psi));
    EstimatorConfig::new(eta, cutoff).map_err(|e| match e {
        Error::Parameter(msg) => Error::Parameter(alloc::format!("fidelity estimator η = ε/(m K_Ψ): {msg}")),
        other => other,
    })
}

/// Sample mean of `f_Ψ(α, ε/(m K_Ψ))`, before clamping.
pub fn fidelity_mean(samples: &[HeterodyneSample], psi: &FockVector, m: u64, eps: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::param("cannot estimate from an empty sample set"));
    }
    let cfg = fidelity_config(psi, m, eps, psi.cutoff())?;
    let f = EstimatorFn::pure(psi, &cfg)?;
    let mut total = 0.0;
    for block in samples.chunks(SAMPLE_BLOCK) {
        let mut acc = 0.0;
        for s in block {
            acc += f.eval_real(s.value)?;
        }
        total += acc;
    }
    Ok(total / samples.len() as f64)
}

/// `[clamp₀¹((1/n) Σ f_Ψ(αᵢ, ε/(m K_Ψ)))]^m`.
///
/// The upper clamp is part of the method; the lower clamp at 0 keeps even
/// powers of a negative mean from looking like high fidelity.
pub fn fidelity_estimate(samples: &[HeterodyneSample], psi: &FockVector, m: u64, eps: f64) -> Result<f64> {
    let base = fidelity_mean(samples, psi, m, eps)?;
    Ok(clamped_power(base, m))
}

fn clamped_power(base: f64, m: u64) -> f64 {
    let b = base.clamp(0.0, 1.0);
    math::powf(b, m as f64)
}

/// `ln[(s+1)^{3/2}/n · exp((s+1)²/(n+1))]`, the i.i.d. support-test term.
pub fn p_support_iid_log(s: u64, n: u64) -> Result<f64> {
    if n == 0 || s > n {
        return Err(Error::param(alloc::format!(
            "support test needs 0 ≤ s ≤ n and n ≥ 1 (s = {s}, n = {n})"
        )));
    }
    let s1 = s as f64 + 1.0;
    Ok(1.5 * math::ln(s1) - math::ln(n as f64) + s1 * s1 / (n as f64 + 1.0))
}

/// `ln[2 exp(−n ε^{2+2E} ε′² / (2 m^{4+2E} C_Ψ²))]` given `ln C_Ψ`.
pub fn p_hoeffding_iid_log(n: u64, m: u64, cutoff: usize, eps: f64, eps_prime: f64, ln_c_psi: f64) -> f64 {
    let e = cutoff as f64;
    let ln_rate = math::ln(n as f64) + (2.0 + 2.0 * e) * math::ln(eps) + 2.0 * math::ln(eps_prime)
        - math::ln(2.0)
        - (4.0 + 2.0 * e) * math::ln(m as f64)
        - 2.0 * ln_c_psi;
    math::ln(2.0) - math::exp(ln_rate)
}

/// `ln[8 k^{3/2} exp(−(k/9)(q/n − 2s/k)²)]`.
pub fn p_support_log(k: u64, n: u64, q: u64, s: u64) -> f64 {
    let kf = k as f64;
    let d = q as f64 / n as f64 - 2.0 * s as f64 / kf;
    math::ln(8.0) + 1.5 * math::ln(kf) - kf / 9.0 * d * d
}

/// `ln[q^{(E+1)²/2} exp(−2q(q+1)/n)]`.
pub fn p_definetti_log(q: u64, cutoff: usize, n: u64) -> f64 {
    let e1 = cutoff as f64 + 1.0;
    let qf = q as f64;
    0.5 * e1 * e1 * math::ln(qf) - 2.0 * qf * (qf + 1.0) / n as f64
}

/// `ln[m(4q+m−1)/(n−4q)]`.
pub fn p_choice_log(m: u64, q: u64, n: u64) -> f64 {
    let (m, q, n) = (m as f64, q as f64, n as f64);
    math::ln(m) + math::ln(4.0 * q + m - 1.0) - math::ln(n - 4.0 * q)
}

/// `ln[2 C(n−4q, 4q) exp(−((n−8q)/(2m^{4+2E}))·d²)]` with
/// `d = ε^{1+E} ε′/C_Ψ − 8q m^{2+E}/(n−4q−m)` floored at 0.
///
/// Returns the log and whether `d ≤ 0` made the bound vacuous.
pub fn p_hoeffding_log(n: u64, q: u64, m: u64, cutoff: usize, eps: f64, eps_prime: f64, ln_c_psi: f64) -> (f64, bool) {
    let e = cutoff as f64;
    let (nf, qf, mf) = (n as f64, q as f64, m as f64);
    let lead = math::exp((1.0 + e) * math::ln(eps) + math::ln(eps_prime) - ln_c_psi);
    let drift = 8.0 * qf * math::exp((2.0 + e) * math::ln(mf)) / (nf - 4.0 * qf - mf);
    let d = lead - drift;
    let ln_binom = special::ln_binomial(n - 4 * q, 4 * q);
    if d <= 0.0 {
        return (math::ln(2.0) + ln_binom, true);
    }
    let rate = (nf - 8.0 * qf) / (2.0 * math::exp((4.0 + 2.0 * e) * math::ln(mf))) * d * d;
    (math::ln(2.0) + ln_binom - rate, false)
}

/// `√β`: total-variation distance bound for any computation run on the
/// verified copies, when verification fails with probability at most `β`.
pub fn downstream_bound(beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param(alloc::format!("β = {beta} must lie in [0, 1]")));
    }
    Ok(math::sqrt(beta))
}

/// Brings `psi` to cutoff `E`, rejecting states that need more levels.
fn target_at_cutoff(psi: &FockVector, cutoff: usize) -> Result<FockVector> {
    if psi.cutoff() > cutoff {
        return Err(Error::DimensionMismatch {
            expected: cutoff,
            found: psi.cutoff(),
        });
    }
    psi.padded(cutoff)
}

/// Parameters of i.i.d. certification.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificationParams {
    /// Samples measured.
    pub n: u64,
    /// Copies certified.
    pub m: u64,
    /// Support threshold: pass iff at most `s` samples have `|α|² > E`.
    pub s: u64,
    pub cutoff: usize,
    pub eps: f64,
    pub eps_prime: f64,
}

impl CertificationParams {
    pub fn validate(&self, psi: &FockVector) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::param("certification needs n ≥ 1 and m ≥ 1"));
        }
        if self.s > self.n {
            return Err(Error::param(alloc::format!("s = {} exceeds n = {}", self.s, self.n)));
        }
        if !(self.eps_prime > 0.0) {
            return Err(Error::param("ε′ must be positive"));
        }
        let target = target_at_cutoff(psi, self.cutoff)?;
        fidelity_config(&target, self.m, self.eps, self.cutoff)?;
        Ok(())
    }

    pub fn shape(&self) -> Result<ProtocolShape> {
        ProtocolShape::certification(self.n, self.m)
    }
}

/// Budget of i.i.d. certification, from the parameters alone.
pub fn certification_budget(psi: &FockVector, params: &CertificationParams) -> Result<ProbabilityBudget> {
    params.validate(psi)?;
    let target = target_at_cutoff(psi, params.cutoff)?;
    let ln_c = estimator::ln_c_psi(&target, params.eps, params.m)?;
    Ok(ProbabilityBudget::new(alloc::vec![
        BudgetTerm::new("support", p_support_iid_log(params.s, params.n)?),
        BudgetTerm::new(
            "hoeffding",
            p_hoeffding_iid_log(params.n, params.m, params.cutoff, params.eps, params.eps_prime, ln_c),
        ),
    ]))
}

/// Outcome of certification or verification.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FidelityReport {
    /// Samples with `|α|² > E`.
    pub support_count: u64,
    pub support_threshold: u64,
    /// `support_count ≤ support_threshold`.
    pub passed: bool,
    /// Unclamped mean of `f_Ψ`.
    pub mean: f64,
    /// Fidelity estimate for the `m` kept copies.
    pub estimate: f64,
    /// Accuracy radius of the estimate.
    pub radius: f64,
    pub eta: f64,
    pub k_psi: f64,
    pub ln_c_psi: f64,
    pub budget: ProbabilityBudget,
}

/// Certification from `n` i.i.d. samples.
pub fn certify(samples: &[HeterodyneSample], psi: &FockVector, params: &CertificationParams) -> Result<FidelityReport> {
    if samples.len() as u64 != params.n {
        return Err(Error::param(alloc::format!(
            "{} samples supplied for n = {}",
            samples.len(),
            params.n
        )));
    }
    let budget = certification_budget(psi, params)?;
    let target = target_at_cutoff(psi, params.cutoff)?;
    let cfg = fidelity_config(&target, params.m, params.eps, params.cutoff)?;
    let mean = fidelity_mean(samples, &target, params.m, params.eps)?;
    let r = sampling::support_count(samples, params.cutoff);
    Ok(FidelityReport {
        support_count: r,
        support_threshold: params.s,
        passed: r <= params.s,
        mean,
        estimate: clamped_power(mean, params.m),
        radius: params.eps + params.eps_prime,
        eta: cfg.eta(),
        k_psi: estimator::k_const_pure(&target),
        ln_c_psi: estimator::ln_c_psi(&target, params.eps, params.m)?,
        budget,
    })
}

/// Parameters of verification without the i.i.d. assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationParams {
    pub n: u64,
    pub k: u64,
    pub q: u64,
    pub m: u64,
    pub s: u64,
    pub cutoff: usize,
    pub eps: f64,
    pub eps_prime: f64,
}

impl VerificationParams {
    /// Checks `q ≥ m`, `s ≤ k`, `n − 4q − m ≥ 1`, `n > 8q` and positivity.
    pub fn validate_shape(&self) -> Result<()> {
        ProtocolShape::verification(self.n, self.k, self.q, self.m)?;
        if self.s > self.k {
            return Err(Error::param(alloc::format!("s = {} exceeds k = {}", self.s, self.k)));
        }
        if self.n <= 8 * self.q {
            return Err(Error::param(alloc::format!(
                "n = {} must exceed 8q = {}",
                self.n,
                8 * self.q
            )));
        }
        if !(self.eps > 0.0 && self.eps_prime > 0.0) {
            return Err(Error::param("ε and ε′ must be positive"));
        }
        Ok(())
    }

    pub fn validate(&self, psi: &FockVector) -> Result<()> {
        self.validate_shape()?;
        let target = target_at_cutoff(psi, self.cutoff)?;
        fidelity_config(&target, self.m, self.eps, self.cutoff)?;
        Ok(())
    }

    pub fn shape(&self) -> Result<ProtocolShape> {
        ProtocolShape::verification(self.n, self.k, self.q, self.m)
    }
}

/// Budget of verification, from the parameters alone.
pub fn verification_budget(psi: &FockVector, params: &VerificationParams) -> Result<ProbabilityBudget> {
    params.validate(psi)?;
    let target = target_at_cutoff(psi, params.cutoff)?;
    let ln_c = estimator::ln_c_psi(&target, params.eps, params.m)?;
    let (ln_h, vacuous) = p_hoeffding_log(
        params.n,
        params.q,
        params.m,
        params.cutoff,
        params.eps,
        params.eps_prime,
        ln_c,
    );
    Ok(ProbabilityBudget::new(alloc::vec![
        BudgetTerm::new("support", p_support_log(params.k, params.n, params.q, params.s)),
        BudgetTerm::new("deFinetti", p_definetti_log(params.q, params.cutoff, params.n)),
        BudgetTerm::new("choice", p_choice_log(params.m, params.q, params.n)),
        BudgetTerm {
            name: "hoeffding",
            log_value: ln_h,
            vacuous,
        },
    ]))
}

/// Verification of one protocol run.
///
/// The radius is `ε + ε′ + P_deFinetti` and may exceed 1 at small
/// parameters.
pub fn verify(run: &ProtocolSamples, psi: &FockVector, params: &VerificationParams) -> Result<FidelityReport> {
    let budget = verification_budget(psi, params)?;
    let expected = params.shape()?.estimate_count()?;
    if run.support_samples.len() as u64 != params.k || run.estimate_samples.len() as u64 != expected {
        return Err(Error::param(alloc::format!(
            "sample counts (support {}, estimate {}) do not match k = {}, n − 4q − m = {}",
            run.support_samples.len(),
            run.estimate_samples.len(),
            params.k,
            expected
        )));
    }
    let target = target_at_cutoff(psi, params.cutoff)?;
    let cfg = fidelity_config(&target, params.m, params.eps, params.cutoff)?;
    let mean = fidelity_mean(&run.estimate_samples, &target, params.m, params.eps)?;
    let r = sampling::support_count(&run.support_samples, params.cutoff);
    let definetti = math::exp(p_definetti_log(params.q, params.cutoff, params.n));
    Ok(FidelityReport {
        support_count: r,
        support_threshold: params.s,
        passed: r <= params.s,
        mean,
        estimate: clamped_power(mean, params.m),
        radius: params.eps + params.eps_prime + definetti,
        eta: cfg.eta(),
        k_psi: estimator::k_const_pure(&target),
        ln_c_psi: estimator::ln_c_psi(&target, params.eps, params.m)?,
        budget,
    })
}

/// Verification parameters at the asymptotic orders with unit constants:
/// `n = k = m^{19+8E}`, `q = m^{10+4E}`, `s = 1`, `ε = ε′ = 1/m`.
pub fn scaling_suggest(m: u64, cutoff: usize) -> Result<VerificationParams> {
    if m == 0 {
        return Err(Error::param("m must be at least 1"));
    }
    let pow = |exp: usize, what: &'static str| -> Result<u64> {
        u32::try_from(exp)
            .ok()
            .and_then(|e| m.checked_pow(e))
            .ok_or(Error::Overflow {
                what,
                log10: exp as f64 * math::log10(m as f64),
            })
    };
    let n = pow(19 + 8 * cutoff, "n = m^(19+8E)")?;
    let q = pow(10 + 4 * cutoff, "q = m^(10+4E)")?;
    let inv = 1.0 / m as f64;
    let params = VerificationParams {
        n,
        k: n,
        q,
        m,
        s: 1,
        cutoff,
        eps: inv,
        eps_prime: inv,
    };
    params.validate_shape()?;
    Ok(params)
}

/// Support threshold `s` that an honest i.i.d. source of `ρ` meets except
/// with roughly normal-tail probability at `z` standard deviations:
/// `⌈k p + z √(k p (1−p))⌉` with `p = P(|α|² > E)` computed exactly.
///
/// A completeness heuristic, not a guarantee of the protocol.
pub fn suggest_support_threshold(rho: &DensityMatrix, k: u64, cutoff: usize, z: f64) -> u64 {
    let p = sampling::exceedance_probability(rho, cutoff);
    let kf = k as f64;
    let s = math::ceil(kf * p + z * math::sqrt(kf * p * (1.0 - p)));
    (s.max(0.0) as u64).min(k)
}

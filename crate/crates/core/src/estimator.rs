//! Heterodyne estimator functions and the constants of their error bounds.
//!
//! For an operator `A` on `span{|0⟩..|E⟩}` and precision `η`,
//!
//! ```text
//! f_A(z, η) = (1/η) e^{(1−1/η)|z|²} Σ_{k,l≤E} A_kl η^{−(k+l)/2} L_{k,l}(z/√η)
//! ```
//!
//! where `L_{k,l}` are the normalised two-dimensional Laguerre polynomials.
//! Averaging `f_A` over heterodyne outcomes of `ρ` estimates `Tr(Aρ)` with a
//! bias of at most `η K_A`.
//!
//! Two evaluation routes exist for elementary operators `|k⟩⟨l|`: the
//! explicit alternating sum defining `L_{k,l}`, and the generalised-Laguerre
//! identity evaluated by three-term recurrence. They share no code and serve
//! as cross-checks for each other.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockVector};
use crate::math;
use crate::special;

/// Largest index accepted by the explicit alternating sum. Cancellation in
/// the sum grows with `min(k, l)`; beyond this the result is not trusted.
pub const MAX_LAGUERRE_INDEX: usize = 60;

/// Precision `η` and energy cutoff `E` for evaluating `f_A`.
///
/// Valid configurations satisfy `0 < η < 1` and, for `E ≥ 1`, `η < 2/E`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EstimatorConfig {
    eta: f64,
    cutoff: usize,
}

impl EstimatorConfig {
    pub fn new(eta: f64, cutoff: usize) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::param(alloc::format!(
                "precision η = {eta} outside (0, 1) where the estimator is defined"
            )));
        }
        if cutoff >= 2 && eta >= 2.0 / cutoff as f64 {
            return Err(Error::param(alloc::format!(
                "precision η = {eta} violates η < 2/E = {} for cutoff E = {cutoff}",
                2.0 / cutoff as f64
            )));
        }
        if cutoff > MAX_LAGUERRE_INDEX {
            return Err(Error::param(alloc::format!(
                "cutoff {cutoff} exceeds the stable evaluation limit {MAX_LAGUERRE_INDEX}"
            )));
        }
        Ok(EstimatorConfig { eta, cutoff })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
}

fn check_index(k: usize, l: usize) -> Result<()> {
    if k > MAX_LAGUERRE_INDEX || l > MAX_LAGUERRE_INDEX {
        return Err(Error::param(alloc::format!(
            "Laguerre index ({k}, {l}) exceeds the stability limit {MAX_LAGUERRE_INDEX}"
        )));
    }
    Ok(())
}

/// `√(k! l!) (−1)^p / (p! (k−p)! (l−p)!)`.
fn laguerre_coefficient(k: usize, l: usize, p: usize) -> f64 {
    let (lo, hi) = if k <= l { (k, l) } else { (l, k) };
    let ln = 0.5 * (special::ln_factorial(lo as u64) + special::ln_factorial(hi as u64))
        - special::ln_factorial(p as u64)
        - (special::ln_factorial((lo - p) as u64) + special::ln_factorial((hi - p) as u64));
    let mag = math::exp(ln);
    if p.is_multiple_of(2) {
        mag
    } else {
        -mag
    }
}

/// `L_{k,l}(z) = Σ_{p≤min(k,l)} √(k!l!)(−1)^p / (p!(k−p)!(l−p)!) · z^{l−p} z*^{k−p}`.
pub fn laguerre2d(k: usize, l: usize, z: Complex64) -> Result<Complex64> {
    check_index(k, l)?;
    let zc = z.conj();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..=k.min(l) {
        acc += z.powu((l - p) as u32) * zc.powu((k - p) as u32) * laguerre_coefficient(k, l, p);
    }
    Ok(acc)
}

/// One monomial `c · z^a z*^b` of the regrouped estimator polynomial.
#[derive(Debug, Clone, Copy)]
struct Monomial {
    a: usize,
    b: usize,
    coeff: Complex64,
}

/// `f_A(·, η)` compiled into `(1/η) e^{(1−1/η)|z|²} Σ c_ab z^a z*^b`.
///
/// Compiling once and evaluating many times is what the sample-average
/// estimators do; [`f_op`] is the one-shot form.
#[derive(Debug, Clone)]
pub struct EstimatorFn {
    eta: f64,
    gauss: f64,
    max_power: usize,
    terms: Vec<Monomial>,
}

impl EstimatorFn {
    /// Compiles `f_A` for `A` with cutoff at most `cfg.cutoff()`.
    pub fn new(op: &FockOperator, cfg: &EstimatorConfig) -> Result<Self> {
        if op.cutoff() > cfg.cutoff() {
            return Err(Error::DimensionMismatch {
                expected: cfg.cutoff(),
                found: op.cutoff(),
            });
        }
        Ok(Self::compile(op, cfg.eta()))
    }

    /// `f_{|k⟩⟨l|}` for `k, l ≤ cfg.cutoff()`.
    pub fn elementary(k: usize, l: usize, cfg: &EstimatorConfig) -> Result<Self> {
        if k > cfg.cutoff() || l > cfg.cutoff() {
            return Err(Error::param(alloc::format!(
                "element ({k}, {l}) outside cutoff {}",
                cfg.cutoff()
            )));
        }
        let op = FockOperator::elementary(k, l, k.max(l))?;
        Ok(Self::compile(&op, cfg.eta()))
    }

    /// `f_Ψ = f_{|Ψ⟩⟨Ψ|}`.
    pub fn pure(psi: &FockVector, cfg: &EstimatorConfig) -> Result<Self> {
        Self::new(&psi.outer(), cfg)
    }

    /// Compiles without any domain check on `η` beyond positivity.
    pub fn compile_unchecked(op: &FockOperator, eta: f64) -> Self {
        Self::compile(op, eta)
    }

    fn compile(op: &FockOperator, eta: f64) -> Self {
        let dim = op.dim();
        let mut table = alloc::vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut used = alloc::vec![false; dim * dim];
        let ln_eta = math::ln(eta);
        for k in 0..dim {
            for l in 0..dim {
                let akl = op.get(k, l);
                if akl == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..=k.min(l) {
                    let (a, b) = (l - p, k - p);
                    // η^{−(k+l)/2} from the sum and η^{−(a+b)/2} from z/√η
                    let scale = math::exp(-((k + l - p) as f64) * ln_eta);
                    table[a * dim + b] += akl * (laguerre_coefficient(k, l, p) * scale);
                    used[a * dim + b] = true;
                }
            }
        }
        let mut terms = Vec::new();
        let mut max_power = 0;
        for a in 0..dim {
            for b in 0..dim {
                if used[a * dim + b] {
                    max_power = max_power.max(a).max(b);
                    terms.push(Monomial {
                        a,
                        b,
                        coeff: table[a * dim + b],
                    });
                }
            }
        }
        EstimatorFn {
            eta,
            gauss: 1.0 - 1.0 / eta,
            max_power,
            terms,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `(a, b, c_ab)` for the monomials `c_ab z^a z*^b`.
    pub(crate) fn monomials(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.terms.iter().map(|t| (t.a, t.b, t.coeff))
    }

    /// Returns the value and the sum of term magnitudes (a scale for
    /// rounding-error judgements).
    fn eval_with_scale(&self, z: Complex64) -> (Complex64, f64) {
        let mut powers = [Complex64::new(0.0, 0.0); MAX_LAGUERRE_INDEX + 1];
        powers[0] = Complex64::new(1.0, 0.0);
        for i in 1..=self.max_power {
            powers[i] = powers[i - 1] * z;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for t in &self.terms {
            let v = t.coeff * (powers[t.a] * powers[t.b].conj());
            scale += v.norm_sqr();
            acc += v;
        }
        let pre = math::exp(self.gauss * z.norm_sqr()) / self.eta;
        (acc * pre, math::sqrt(scale) * pre)
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut powers = [Complex64::new(0.0, 0.0); MAX_LAGUERRE_INDEX + 1];
        powers[0] = Complex64::new(1.0, 0.0);
        for i in 1..=self.max_power {
            powers[i] = powers[i - 1] * z;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coeff * (powers[t.a] * powers[t.b].conj());
        }
        acc * (math::exp(self.gauss * z.norm_sqr()) / self.eta)
    }

    /// Real part of a value that must be real (Hermitian `A`); an imaginary
    /// residue above `1e-8` relative to the term scale is an inconsistency.
    pub fn eval_real(&self, z: Complex64) -> Result<f64> {
        let (v, scale) = self.eval_with_scale(z);
        if v.im.abs() > REAL_RESIDUE_TOLERANCE * scale.max(1.0) {
            return Err(Error::Inconsistency(alloc::format!(
                "estimator of a Hermitian operator has imaginary part {:e} at z = {z}",
                v.im
            )));
        }
        Ok(v.re)
    }
}

/// Imaginary residue tolerated by [`EstimatorFn::eval_real`].
pub const REAL_RESIDUE_TOLERANCE: f64 = 1e-8;

/// `f_A(z, η)` for a validated configuration.
pub fn f_op(op: &FockOperator, z: Complex64, cfg: &EstimatorConfig) -> Result<Complex64> {
    Ok(EstimatorFn::new(op, cfg)?.eval(z))
}

/// `f_A(z, η)` for any `η > 0`, skipping the `(0,1) ∩ (0,2/E)` domain check.
pub fn f_op_unchecked(op: &FockOperator, z: Complex64, eta: f64) -> Result<Complex64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::param("precision must be positive and finite"));
    }
    check_index(op.cutoff(), op.cutoff())?;
    Ok(EstimatorFn::compile(op, eta).eval(z))
}

/// `f_Ψ(z, η)`, which is real.
pub fn f_pure(psi: &FockVector, z: Complex64, cfg: &EstimatorConfig) -> Result<f64> {
    EstimatorFn::pure(psi, cfg)?.eval_real(z)
}

/// `f_{|k⟩⟨l|}(z, η) = η^{−1−(k+l)/2} e^{(1−1/η)|z|²} L_{k,l}(z/√η)` by the
/// explicit sum.
pub fn f_elem(k: usize, l: usize, z: Complex64, cfg: &EstimatorConfig) -> Result<Complex64> {
    check_index(k, l)?;
    let eta = cfg.eta();
    let u = z / math::sqrt(eta);
    let pre = math::exp((1.0 - 1.0 / eta) * z.norm_sqr()) * math::exp(-(1.0 + (k + l) as f64 / 2.0) * math::ln(eta));
    Ok(laguerre2d(k, l, u)? * pre)
}

/// Generalised Laguerre polynomial `L_n^{(α)}(x)` by the three-term
/// recurrence `(j+1) L_{j+1} = (2j+1+α−x) L_j − (j+α) L_{j−1}`.
pub fn generalized_laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `f_{|k⟩⟨l|}(z, η)` through the generalised-Laguerre identity
///
/// ```text
/// k ≤ l:  (−1)^k e^{(1−1/η)|z|²} z^{l−k} η^{−1−l} √(k!/l!) L_k^{(l−k)}(|z|²/η)
/// k > l:  (−1)^l e^{(1−1/η)|z|²} z*^{k−l} η^{−1−k} √(l!/k!) L_l^{(k−l)}(|z|²/η)
/// ```
pub fn f_elem_via_generalized_laguerre(k: usize, l: usize, z: Complex64, cfg: &EstimatorConfig) -> Result<Complex64> {
    check_index(k, l)?;
    let eta = cfg.eta();
    let x = z.norm_sqr() / eta;
    let gauss = math::exp((1.0 - 1.0 / eta) * z.norm_sqr());
    let (lo, hi, phase) = if k <= l {
        (k, l, z.powu((l - k) as u32))
    } else {
        (l, k, z.conj().powu((k - l) as u32))
    };
    let sign = if lo % 2 == 0 { 1.0 } else { -1.0 };
    let ratio = math::exp(
        0.5 * (special::ln_factorial(lo as u64) - special::ln_factorial(hi as u64)) - (1.0 + hi as f64) * math::ln(eta),
    );
    let lag = generalized_laguerre(lo, (hi - lo) as f64, x);
    Ok(phase * (sign * gauss * ratio * lag))
}

/// `K_A = Σ_{k,l} |A_kl| √((k+1)(l+1))`.
pub fn k_const(op: &FockOperator) -> f64 {
    let mut acc = 0.0;
    for k in 0..op.dim() {
        for l in 0..op.dim() {
            acc += op.get(k, l).norm() * math::sqrt(((k + 1) * (l + 1)) as f64);
        }
    }
    acc
}

/// `K_Ψ` for `A = |Ψ⟩⟨Ψ|`, i.e. `(Σₙ |ψₙ| √(n+1))²`.
pub fn k_const_pure(psi: &FockVector) -> f64 {
    let s: f64 = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| a.norm() * math::sqrt((n + 1) as f64))
        .sum();
    s * s
}

/// `ln M_kl` with `M_kl = √(2^{|l−k|} C(max(k,l), min(k,l)))`.
pub fn ln_m_bound(k: usize, l: usize) -> f64 {
    let (lo, hi) = if k <= l { (k, l) } else { (l, k) };
    0.5 * ((hi - lo) as f64 * core::f64::consts::LN_2 + special::ln_binomial(hi as u64, lo as u64))
}

/// `M_kl`, the bound `|f_{|k⟩⟨l|}(z, η)| ≤ M_kl / η^{1+(k+l)/2}`.
pub fn m_bound(k: usize, l: usize) -> f64 {
    math::exp(ln_m_bound(k, l))
}

/// `ln C_kl` with `C_kl = [(k+1)(l+1)]^{1+(k+l)/2} 2^{|l−k|} C(max, min)`.
pub fn ln_c_kl(k: usize, l: usize) -> f64 {
    (1.0 + (k + l) as f64 / 2.0) * math::ln(((k + 1) * (l + 1)) as f64) + 2.0 * ln_m_bound(k, l)
}

/// `C_kl`, the per-element constant of the tomography failure bound.
pub fn c_kl(k: usize, l: usize) -> f64 {
    math::exp(ln_c_kl(k, l))
}

/// `ln C_Ψ` where
/// `C_Ψ = Σ_{k,l≤E} |ψ_k ψ_l| (ε/m)^{E−(k+l)/2} K_Ψ^{1+(k+l)/2} M_kl`
/// and `E` is the cutoff of `psi`.
pub fn ln_c_psi(psi: &FockVector, eps: f64, m: u64) -> Result<f64> {
    if !(eps > 0.0) || m == 0 {
        return Err(Error::param("C_Ψ needs ε > 0 and m ≥ 1"));
    }
    let k_psi = k_const_pure(psi);
    let ratio = eps / m as f64;
    if ratio >= k_psi {
        return Err(Error::param(alloc::format!(
            "ε/m = {ratio} must be below K_Ψ = {k_psi} so that η = ε/(m K_Ψ) < 1"
        )));
    }
    let cutoff = psi.cutoff() as f64;
    let (ln_ratio, ln_k) = (math::ln(ratio), math::ln(k_psi));
    let amps = psi.amplitudes();
    let mut logs = Vec::new();
    for (k, ak) in amps.iter().enumerate() {
        for (l, al) in amps.iter().enumerate() {
            let w = ak.norm() * al.norm();
            if w == 0.0 {
                continue;
            }
            let half = (k + l) as f64 / 2.0;
            logs.push(math::ln(w) + (cutoff - half) * ln_ratio + (1.0 + half) * ln_k + ln_m_bound(k, l));
        }
    }
    Ok(special::log_sum_exp(logs))
}

/// `C_Ψ`; see [`ln_c_psi`].
pub fn c_psi(psi: &FockVector, eps: f64, m: u64) -> Result<f64> {
    Ok(math::exp(ln_c_psi(psi, eps, m)?))
}

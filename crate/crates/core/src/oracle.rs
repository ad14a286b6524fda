//! Exact heterodyne expectations of the estimators, and a quadrature
//! fallback used to cross-check them.
//!
//! For a state supported on `span{|0⟩..|E⟩}`,
//!
//! ```text
//! E_{α←Q_ρ}[f_{|l⟩⟨k|}(α, η)] = ρ_kl + Σ_{s≥1} ρ_{k+s,l+s} η^s √(C(k+s,k) C(l+s,l))
//! ```
//!
//! with the sum ending at the cutoff, so no truncation error arises.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimator::{EstimatorConfig, EstimatorFn};
use crate::fock::{DensityMatrix, FockOperator};
use crate::math;
use crate::sampling::q_eval;
use crate::special;

/// Default half-width of the quadrature square.
pub const DEFAULT_RADIUS: f64 = 8.0;
/// Default grid points per axis.
pub const DEFAULT_GRID: usize = 400;
/// Quadrature and closed form further apart than this signal a bug.
pub const ORACLE_DISAGREEMENT: f64 = 1e-4;

/// `E[f_{|l⟩⟨k|}(α, η)]` under `Q_ρ`; approximates `ρ_kl`.
pub fn expected_f_elem(rho: &DensityMatrix, k: usize, l: usize, cfg: &EstimatorConfig) -> Result<Complex64> {
    if k > cfg.cutoff() || l > cfg.cutoff() {
        return Err(Error::param(alloc::format!(
            "element ({k}, {l}) outside cutoff {}",
            cfg.cutoff()
        )));
    }
    let cutoff = rho.cutoff();
    if k > cutoff || l > cutoff {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_eta = math::ln(cfg.eta());
    let mut acc = rho.get(k, l);
    let mut s = 1;
    while k + s <= cutoff && l + s <= cutoff {
        let ln_w = s as f64 * ln_eta
            + 0.5 * (special::ln_binomial((k + s) as u64, k as u64) + special::ln_binomial((l + s) as u64, l as u64));
        acc += rho.get(k + s, l + s) * math::exp(ln_w);
        s += 1;
    }
    Ok(acc)
}

/// `E[f_A(α, η)] = Σ_{k,l} A_lk E[f_{|l⟩⟨k|}]`; within `η K_A` of `Tr(Aρ)`.
pub fn expected_f_op(rho: &DensityMatrix, op: &FockOperator, cfg: &EstimatorConfig) -> Result<Complex64> {
    if op.cutoff() > cfg.cutoff() {
        return Err(Error::DimensionMismatch {
            expected: cfg.cutoff(),
            found: op.cutoff(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..op.dim() {
        for l in 0..op.dim() {
            let a = op.get(l, k);
            if a != Complex64::new(0.0, 0.0) {
                acc += a * expected_f_elem(rho, k, l, cfg)?;
            }
        }
    }
    Ok(acc)
}

/// `∫ Q_ρ(α) f_A(α, η) d²α` by the midpoint rule on a `grid × grid` square
/// of half-width `radius`.
pub fn quadrature_expect(
    rho: &DensityMatrix,
    op: &FockOperator,
    cfg: &EstimatorConfig,
    radius: f64,
    grid: usize,
) -> Result<Complex64> {
    if !(radius > 0.0) || grid == 0 {
        return Err(Error::param("quadrature needs a positive radius and grid"));
    }
    let f = EstimatorFn::new(op, cfg)?;
    let h = 2.0 * radius / grid as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid {
        let x = -radius + (i as f64 + 0.5) * h;
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..grid {
            let y = -radius + (j as f64 + 0.5) * h;
            let alpha = Complex64::new(x, y);
            row += f.eval(alpha) * q_eval(rho, alpha);
        }
        acc += row;
    }
    Ok(acc * (h * h))
}

/// Closed form, checked against default-resolution quadrature.
pub fn cross_checked_expectation(rho: &DensityMatrix, op: &FockOperator, cfg: &EstimatorConfig) -> Result<Complex64> {
    let exact = expected_f_op(rho, op, cfg)?;
    let quad = quadrature_expect(rho, op, cfg, DEFAULT_RADIUS, DEFAULT_GRID)?;
    let gap = (exact - quad).norm();
    if gap > ORACLE_DISAGREEMENT {
        return Err(Error::Inconsistency(alloc::format!(
            "closed form {exact} and quadrature {quad} differ by {gap:e}"
        )));
    }
    Ok(exact)
}

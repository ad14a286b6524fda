//! States and operators on a truncated Fock space `span{|0⟩, …, |E⟩}`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::special;

/// Allowed deviation of `Σ|ψₙ|²` from one.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Allowed entrywise deviation of `ρ` from `ρ†`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of `Tr ρ` from one.
pub const TRACE_TOLERANCE: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD_TOLERANCE: f64 = -1e-10;
/// Eigenvalues below this are dropped by [`spectral_decompose`].
pub const SPECTRAL_DROP: f64 = 1e-12;

/// How to treat two objects whose cutoffs differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffPolicy {
    /// Mismatched cutoffs are an error.
    #[default]
    Strict,
    /// Zero-pad the smaller object up to the larger cutoff.
    ZeroPad,
}

/// A normalised pure state `Σₙ ψₙ|n⟩`, `n ≤ E`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    /// Wraps amplitudes `ψ₀..ψ_E`, which must already be normalised.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::param("a Fock vector needs at least one amplitude"));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState {
                invariant: "finite amplitudes",
                residual: f64::INFINITY,
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let residual = (norm - 1.0).abs();
        if residual > NORM_TOLERANCE {
            return Err(Error::InvalidState {
                invariant: "normalisation Σ|ψₙ|² = 1",
                residual,
            });
        }
        Ok(FockVector { amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = math::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::param("cannot normalise a zero or non-finite vector"));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        FockVector::new(amplitudes)
    }

    /// The Fock state `|n⟩` embedded with the given cutoff.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::param("Fock index exceeds the cutoff"));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(FockVector { amplitudes })
    }

    pub fn vacuum() -> Self {
        FockVector {
            amplitudes: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Zero-pads up to `cutoff`. Truncation is refused.
    pub fn padded(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff() {
            return Err(Error::DimensionMismatch {
                expected: cutoff,
                found: self.cutoff(),
            });
        }
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(cutoff + 1, Complex64::new(0.0, 0.0));
        Ok(FockVector { amplitudes })
    }

    /// `|ψ⟩⟨ψ|` as a general operator.
    pub fn outer(&self) -> FockOperator {
        let psi = &self.amplitudes;
        FockOperator::from_fn(self.cutoff(), |k, l| psi[k] * psi[l].conj())
    }

    /// `|ψ⟩⟨ψ|` as a density matrix.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(self.outer())
    }
}

/// A general operator `Σ A_kl |k⟩⟨l|` with `k, l ≤ E`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FockOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl FockOperator {
    pub fn from_fn(cutoff: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let dim = cutoff + 1;
        let mut entries = Vec::with_capacity(dim * dim);
        for k in 0..dim {
            for l in 0..dim {
                entries.push(f(k, l));
            }
        }
        FockOperator { dim, entries }
    }

    /// Builds an operator from square, finite rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::param("operator needs at least one row"));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::param(alloc::format!(
                "operator must be square: {} rows but a row of length {}",
                dim,
                bad.len()
            )));
        }
        let entries: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState {
                invariant: "finite entries",
                residual: f64::INFINITY,
            });
        }
        Ok(FockOperator { dim, entries })
    }

    pub fn zeros(cutoff: usize) -> Self {
        FockOperator::from_fn(cutoff, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(cutoff: usize) -> Self {
        FockOperator::from_fn(cutoff, |k, l| Complex64::new(if k == l { 1.0 } else { 0.0 }, 0.0))
    }

    /// `|k⟩⟨l|`.
    pub fn elementary(k: usize, l: usize, cutoff: usize) -> Result<Self> {
        if k > cutoff || l > cutoff {
            return Err(Error::param("elementary operator index exceeds the cutoff"));
        }
        Ok(FockOperator::from_fn(cutoff, |a, b| {
            Complex64::new(if a == k && b == l { 1.0 } else { 0.0 }, 0.0)
        }))
    }

    pub fn cutoff(&self) -> usize {
        self.dim - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.entries[k * self.dim + l]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        FockOperator::from_fn(self.cutoff(), |k, l| self.get(l, k).conj())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        FockOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// Entrywise sum; cutoffs must match.
    pub fn plus(&self, other: &FockOperator) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.cutoff(),
                found: other.cutoff(),
            });
        }
        Ok(FockOperator {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    /// Zero-pads up to `cutoff`. Truncation is refused.
    pub fn padded(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff() {
            return Err(Error::DimensionMismatch {
                expected: cutoff,
                found: self.cutoff(),
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(FockOperator::from_fn(cutoff, |k, l| {
            if k < self.dim && l < self.dim {
                self.get(k, l)
            } else {
                zero
            }
        }))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// `Tr(A B) = Σ A_kl B_lk`; cutoffs must match.
    pub fn trace_product(&self, other: &FockOperator) -> Result<Complex64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.cutoff(),
                found: other.cutoff(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.dim {
            for l in 0..self.dim {
                acc += self.get(k, l) * other.get(l, k);
            }
        }
        Ok(acc)
    }

    /// `max |A_kl − conj(A_lk)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.dim {
            for l in k..self.dim {
                let d = (self.get(k, l) - self.get(l, k).conj()).norm_sqr();
                worst = worst.max(d);
            }
        }
        math::sqrt(worst)
    }
}

impl Index<(usize, usize)> for FockOperator {
    type Output = Complex64;

    fn index(&self, (k, l): (usize, usize)) -> &Complex64 {
        &self.entries[k * self.dim + l]
    }
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
pub(crate) fn hermitian_eigen(op: &FockOperator) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let dim = op.dim();
    // Symmetrise so that rounding-level asymmetry cannot leak in.
    let m = nalgebra::DMatrix::from_fn(dim, dim, |k, l| (op.get(k, l) + op.get(l, k).conj()) * 0.5);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DensityMatrix(FockOperator);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(op: FockOperator) -> Result<Self> {
        let herm = op.hermiticity_residual();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidState {
                invariant: "Hermiticity ρ = ρ†",
                residual: herm,
            });
        }
        let tr = op.trace();
        let trace_residual = (tr - Complex64::new(1.0, 0.0)).norm();
        if trace_residual > TRACE_TOLERANCE {
            return Err(Error::InvalidState {
                invariant: "unit trace Tr ρ = 1",
                residual: trace_residual,
            });
        }
        let (values, _) = hermitian_eigen(&op);
        let min = values[0];
        if min < PSD_TOLERANCE {
            return Err(Error::InvalidState {
                invariant: "positivity (minimum eigenvalue ≥ −1e-10)",
                residual: -min,
            });
        }
        Ok(DensityMatrix(op))
    }

    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        Ok(FockVector::fock(n, cutoff)?.projector())
    }

    /// `Σ pₙ|n⟩⟨n|` from non-negative weights summing to one.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("need at least one weight"));
        }
        let cutoff = weights.len() - 1;
        DensityMatrix::new(FockOperator::from_fn(cutoff, |k, l| {
            Complex64::new(if k == l { weights[k] } else { 0.0 }, 0.0)
        }))
    }

    /// `Σ wᵢ ρᵢ` for probability weights and equal-cutoff states.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::param("empty mixture"))?;
        let mut acc = FockOperator::zeros(first.1.cutoff());
        for (w, rho) in parts {
            if !(*w >= 0.0) {
                return Err(Error::param("mixture weights must be non-negative"));
            }
            acc = acc.plus(&rho.0.scaled(Complex64::new(*w, 0.0)))?;
        }
        DensityMatrix::new(acc)
    }

    pub fn cutoff(&self) -> usize {
        self.0.cutoff()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.0.get(k, l)
    }

    pub fn as_operator(&self) -> &FockOperator {
        &self.0
    }

    pub fn into_operator(self) -> FockOperator {
        self.0
    }

    /// Zero-pads up to `cutoff`.
    pub fn padded(&self, cutoff: usize) -> Result<Self> {
        Ok(DensityMatrix(self.0.padded(cutoff)?))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.0).0
    }

    /// Photon-number distribution `ρₙₙ`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.get(n, n).re).collect()
    }
}

impl Index<(usize, usize)> for DensityMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

fn reconcile<'a>(
    psi: &'a FockVector,
    rho: &'a DensityMatrix,
    policy: CutoffPolicy,
) -> Result<(
    alloc::borrow::Cow<'a, FockVector>,
    alloc::borrow::Cow<'a, DensityMatrix>,
)> {
    use alloc::borrow::Cow;
    if psi.cutoff() == rho.cutoff() {
        return Ok((Cow::Borrowed(psi), Cow::Borrowed(rho)));
    }
    match policy {
        CutoffPolicy::Strict => Err(Error::DimensionMismatch {
            expected: psi.cutoff(),
            found: rho.cutoff(),
        }),
        CutoffPolicy::ZeroPad => {
            let cutoff = psi.cutoff().max(rho.cutoff());
            Ok((Cow::Owned(psi.padded(cutoff)?), Cow::Owned(rho.padded(cutoff)?)))
        }
    }
}

/// Fidelity `⟨Ψ|ρ|Ψ⟩` between a pure state and a density matrix.
pub fn fidelity_pure(psi: &FockVector, rho: &DensityMatrix, policy: CutoffPolicy) -> Result<f64> {
    let (psi, rho) = reconcile(psi, rho, policy)?;
    let amps = psi.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, ak) in amps.iter().enumerate() {
        for (l, al) in amps.iter().enumerate() {
            acc += ak.conj() * rho.get(k, l) * al;
        }
    }
    if acc.im.abs() > 1e-10 {
        return Err(Error::Inconsistency(alloc::format!(
            "⟨Ψ|ρ|Ψ⟩ has imaginary part {:e}",
            acc.im
        )));
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Trace distance `½‖ρ₁ − ρ₂‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.cutoff() != b.cutoff() {
        return Err(Error::DimensionMismatch {
            expected: a.cutoff(),
            found: b.cutoff(),
        });
    }
    let diff = a.0.plus(&b.0.scaled(Complex64::new(-1.0, 0.0)))?;
    let herm = diff.hermiticity_residual();
    if herm > 2.0 * HERMITIAN_TOLERANCE {
        return Err(Error::Inconsistency(alloc::format!(
            "difference of density matrices is not Hermitian (residual {herm:e})"
        )));
    }
    let (values, _) = hermitian_eigen(&diff);
    let d = 0.5 * values.iter().map(|v| v.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

/// Largest Fock index accepted by [`coherent_overlap`].
pub const COHERENT_OVERLAP_MAX_INDEX: usize = 300;

/// `⟨n|α⟩ = e^{−|α|²/2} αⁿ / √n!`.
pub fn coherent_overlap(alpha: Complex64, n: usize) -> Complex64 {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        return Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    let r = math::sqrt(r2);
    let unit = alpha / r;
    let log_mag = -0.5 * r2 + n as f64 * math::ln(r) - 0.5 * special::ln_factorial(n as u64);
    unit.powu(n as u32) * math::exp(log_mag)
}

/// Pure-loss channel with transmissivity `tau`, applied through its Kraus
/// operators `A_j = Σₙ √(C(n,j) τ^{n−j} (1−τ)^j) |n−j⟩⟨n|`.
pub fn apply_loss(rho: &DensityMatrix, tau: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::param(alloc::format!(
            "transmissivity must lie in [0, 1], got {tau}"
        )));
    }
    let cutoff = rho.cutoff();
    // weight[n][j] = √(C(n,j) τ^{n−j} (1−τ)^j)
    let weight: Vec<Vec<f64>> = (0..=cutoff)
        .map(|n| {
            (0..=n)
                .map(|j| {
                    let p = special::binomial(n as u64, j as u64)
                        * math::powi(tau, (n - j) as i32)
                        * math::powi(1.0 - tau, j as i32);
                    math::sqrt(p)
                })
                .collect()
        })
        .collect();
    let mut out = FockOperator::from_fn(cutoff, |a, b| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=(cutoff - a.max(b)) {
            acc += rho.get(a + j, b + j) * (weight[a + j][j] * weight[b + j][j]);
        }
        acc
    });
    let tr = out.trace().re;
    out = out.scaled(Complex64::new(1.0 / tr, 0.0));
    DensityMatrix::new(out)
}

/// Decomposes `ρ = Σ λᵢ |vᵢ⟩⟨vᵢ|`, heaviest weight first.
///
/// Eigenvalues below [`SPECTRAL_DROP`] are discarded and the remaining
/// weights renormalised.
pub fn spectral_decompose(rho: &DensityMatrix) -> Vec<(f64, FockVector)> {
    let (values, vectors) = hermitian_eigen(&rho.0);
    let mut parts: Vec<(f64, FockVector)> = values
        .into_iter()
        .zip(vectors)
        .filter(|(w, _)| *w >= SPECTRAL_DROP)
        .map(|(w, v)| {
            let v = FockVector::normalized(v).expect("eigenvectors have unit norm");
            (w, v)
        })
        .collect();
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    for (w, _) in parts.iter_mut() {
        *w /= total;
    }
    parts.sort_by(|a, b| b.0.total_cmp(&a.0));
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> FockVector {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        FockVector::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let psi = plus_state();
        assert!((fidelity_pure(&psi, &psi.projector(), CutoffPolicy::Strict).unwrap() - 1.0).abs() < 1e-12);
        let zero = FockVector::fock(0, 1).unwrap();
        let one = DensityMatrix::fock(1, 1).unwrap();
        assert_eq!(fidelity_pure(&zero, &one, CutoffPolicy::Strict).unwrap(), 0.0);
        let vac = DensityMatrix::fock(0, 1).unwrap();
        assert!((fidelity_pure(&psi, &vac, CutoffPolicy::Strict).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_cutoff_mismatch_requires_flag() {
        let psi = FockVector::vacuum();
        let rho = DensityMatrix::fock(0, 2).unwrap();
        assert!(matches!(
            fidelity_pure(&psi, &rho, CutoffPolicy::Strict),
            Err(Error::DimensionMismatch { .. })
        ));
        let f = fidelity_pure(&psi, &rho, CutoffPolicy::ZeroPad).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::fock(0, 1).unwrap();
        let b = DensityMatrix::fock(1, 1).unwrap();
        assert!(trace_distance(&a, &a).unwrap().abs() < 1e-12);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            trace_distance(&a, &DensityMatrix::fock(0, 2).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coherent_overlap_examples() {
        assert_eq!(coherent_overlap(c(0.0, 0.0), 0), c(1.0, 0.0));
        assert_eq!(coherent_overlap(c(0.0, 0.0), 3), c(0.0, 0.0));
        let v = coherent_overlap(c(1.0, 0.0), 1);
        assert!((v - c((-0.5f64).exp(), 0.0)).norm() < 1e-15);
        // large index stays finite and tiny
        let w = coherent_overlap(c(2.0, 1.0), 300);
        assert!(w.norm().is_finite() && w.norm() < 1e-100);
        // phase: ⟨2|iα⟩ = −⟨2|α⟩ for real α
        let a = coherent_overlap(c(0.0, 0.7), 2);
        let b = coherent_overlap(c(0.7, 0.0), 2);
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn coherent_overlaps_are_normalised() {
        let alpha = c(0.8, -0.3);
        let total: f64 = (0..80).map(|n| coherent_overlap(alpha, n).norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn loss_examples() {
        let one = DensityMatrix::fock(1, 1).unwrap();
        assert_eq!(apply_loss(&one, 1.0).unwrap(), one);
        let lost = apply_loss(&one, 0.0).unwrap();
        assert!((lost.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!(lost.get(1, 1).norm() < 1e-15);
        let half = apply_loss(&one, 0.5).unwrap();
        assert!((half.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((half.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(apply_loss(&one, 1.5).is_err());
        assert!(apply_loss(&one, f64::NAN).is_err());
    }

    #[test]
    fn loss_damps_coherences_by_sqrt_tau() {
        let rho = plus_state().projector();
        let out = apply_loss(&rho, 0.64).unwrap();
        // ρ'₀₁ = √τ ρ₀₁
        assert!((out.get(0, 1).re - 0.8 * 0.5).abs() < 1e-14);
        assert!((out.get(1, 1).re - 0.64 * 0.5).abs() < 1e-14);
    }

    #[test]
    fn spectral_examples() {
        let vac = DensityMatrix::fock(0, 0).unwrap();
        let parts = spectral_decompose(&vac);
        assert_eq!(parts.len(), 1);
        assert!((parts[0].0 - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let parts = spectral_decompose(&mixed);
        assert_eq!(parts.len(), 2);
        for (w, v) in &parts {
            assert!((w - 0.5).abs() < 1e-12);
            assert!(v.amplitudes().iter().filter(|a| a.norm() > 1e-12).count() == 1);
        }
        // rank-deficient: zero weight dropped
        let parts = spectral_decompose(&plus_state().projector());
        assert_eq!(parts.len(), 1);
    }

    #[test]
    fn density_validation_names_invariant() {
        let bad_trace = FockOperator::from_fn(1, |k, l| c(if k == l { 0.45 } else { 0.0 }, 0.0));
        match DensityMatrix::new(bad_trace) {
            Err(Error::InvalidState { invariant, residual }) => {
                assert!(invariant.contains("trace"));
                assert!((residual - 0.1).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let not_psd = FockOperator::from_fn(1, |k, l| c(if k == l { 0.5 } else { 0.7 }, 0.0));
        assert!(matches!(
            DensityMatrix::new(not_psd),
            Err(Error::InvalidState { invariant, .. }) if invariant.contains("positivity")
        ));
        let not_herm = FockOperator::from_fn(1, |k, l| {
            c(if k == l { 0.5 } else { 0.0 }, if k < l { 0.1 } else { 0.0 })
        });
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(Error::InvalidState { invariant, .. }) if invariant.contains("Hermiticity")
        ));
    }

    #[test]
    fn fock_vector_validation() {
        assert!(FockVector::new(vec![]).is_err());
        assert!(FockVector::new(vec![c(0.9, 0.0)]).is_err());
        assert!(FockVector::normalized(vec![c(0.0, 0.0)]).is_err());
        let v = FockVector::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((v.amplitudes()[1].im - 0.8).abs() < 1e-15);
        assert!(v.padded(0).is_err());
        assert_eq!(v.padded(3).unwrap().cutoff(), 3);
    }
}

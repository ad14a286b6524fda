//! Log-space combinatorics.
//!
//! Factorials and binomial coefficients are exact integer products up to
//! 20!, and go through log-gamma / Stirling differences beyond that. The
//! bound constants of the estimators reach magnitudes far outside `f64`, so
//! everything downstream works with natural logarithms.

use crate::math;

const EXACT_FACTORIAL_MAX: u64 = 20;

const FACTORIALS: [u64; 21] = {
    let mut table = [1u64; 21];
    let mut i = 1;
    while i < 21 {
        table[i] = table[i - 1] * i as u64;
        i += 1;
    }
    table
};

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        math::ln(FACTORIALS[n as usize] as f64)
    } else {
        math::ln_gamma(n as f64 + 1.0)
    }
}

/// `n!` as a float; infinite beyond the `f64` range (n > 170).
pub fn factorial(n: u64) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        FACTORIALS[n as usize] as f64
    } else {
        math::exp(ln_factorial(n))
    }
}

/// Stirling remainder `ln n! - (n ln n - n + ½ ln 2πn)` for `n ≥ 1`.
fn stirling_remainder(n: u64) -> f64 {
    let x = n as f64;
    if n < 16 {
        return ln_factorial(n) - (x * math::ln(x) - x + HALF_LN_TWO_PI + 0.5 * math::ln(x));
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// `ln C(n, k)`; `-inf` when `k > n`.
///
/// Uses the exact integer value for `n ≤ 20` and the Stirling-difference form
/// otherwise, which stays accurate to a few ulps of the result even when `n`
/// is astronomically larger than `k`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if n <= EXACT_FACTORIAL_MAX {
        let exact = FACTORIALS[n as usize] / FACTORIALS[k as usize] / FACTORIALS[(n - k) as usize];
        return math::ln(exact as f64);
    }
    let (nf, kf) = (n as f64, k as f64);
    let rest = n - k;
    let rf = rest as f64;
    kf * math::ln(nf / kf) - rf * math::ln_1p(-kf / nf) + 0.5 * math::ln(nf / (kf * rf)) - HALF_LN_TWO_PI
        + stirling_remainder(n)
        - stirling_remainder(k)
        - stirling_remainder(rest)
}

/// `C(n, k)` as a float.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_FACTORIAL_MAX {
        let k = k.min(n - k);
        return (FACTORIALS[n as usize] / FACTORIALS[k as usize] / FACTORIALS[(n - k) as usize]) as f64;
    }
    math::exp(ln_binomial(n, k))
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    if hi == f64::INFINITY {
        return hi;
    }
    hi + math::ln_1p(math::exp(lo - hi))
}

/// `ln Σ e^{xᵢ}`; `-inf` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut values = alloc::vec::Vec::new();
    for t in terms {
        if t > max {
            max = t;
        }
        values.push(t);
    }
    if max.is_infinite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&t| math::exp(t - max)).sum();
    max + math::ln(sum)
}

/// `min(1, e^x)`, the clamped probability for a log-space bound.
pub fn clamp_probability(log_value: f64) -> f64 {
    if log_value >= 0.0 {
        1.0
    } else {
        math::exp(log_value)
    }
}

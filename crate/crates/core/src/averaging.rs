//! Two-point averages and jumps.
//!
//! Every two-point flux in the crate is assembled from these operators. The
//! jump is always oriented right-minus-left, `jump(a_l, a_r) = a_r - a_l`, and
//! all means are symmetric by construction (arguments are ordered before any
//! floating-point work), so swapping the arguments gives bitwise-identical
//! results.
//!
//! The logarithmic and Stolarsky means are `0/0` at `a == b`; both switch to a
//! truncated series close to the diagonal and use `ln_1p`/`expm1` forms away
//! from it, so neither loses digits to cancellation.

use crate::error::DomainError;

/// Series branch of the logarithmic mean is used when
/// `((b - a) / (b + a))^2` is below this value.
pub const LOG_MEAN_SERIES_THRESHOLD: f64 = 1e-8;

/// Series branch of the Stolarsky mean is used when `|b - a| / (a + b)` is
/// below this value.
pub const STOLARSKY_SERIES_THRESHOLD: f64 = 1e-4;

/// Which two-point mean to take.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Logarithmic,
    /// Stolarsky mean with exponent `gamma > 1`.
    Stolarsky(f64),
}

impl MeanKind {
    /// Whether the mean is only defined for strictly positive arguments.
    pub fn requires_positive(self) -> bool {
        !matches!(self, MeanKind::Arithmetic)
    }
}

/// `a_right - a_left`.
#[inline]
pub fn jump(a_left: f64, a_right: f64) -> f64 {
    a_right - a_left
}

#[inline]
pub fn arithmetic_mean(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

#[inline]
pub fn geometric_mean(a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0, "geometric mean of {a}, {b}");
    (a * b).sqrt()
}

#[inline]
fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `(b - a) / (ln b - ln a)` for positive arguments.
#[inline]
pub fn log_mean(a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0, "logarithmic mean of {a}, {b}");
    let (lo, hi) = ordered(a, b);
    let sum = lo + hi;
    let zeta = (hi - lo) / sum;
    let f = zeta * zeta;
    if f < LOG_MEAN_SERIES_THRESHOLD {
        // atanh(z)/z = 1 + z^2/3 + z^4/5 + z^6/7 + ...
        0.5 * sum / (1.0 + f * (1.0 / 3.0 + f * (1.0 / 5.0 + f * (1.0 / 7.0))))
    } else {
        // 2 atanh(zeta) = ln(hi / lo); ln_1p keeps digits for widely separated arguments
        (hi - lo) / ((hi - lo) / lo).ln_1p()
    }
}

/// Inverse of [`log_mean`], without forming the mean first.
#[inline]
pub fn inv_log_mean(a: f64, b: f64) -> f64 {
    1.0 / log_mean(a, b)
}

/// `((g - 1) / g) (b^g - a^g) / (b^(g-1) - a^(g-1))` for positive arguments
/// and `g > 1`.
#[inline]
pub fn stolarsky_mean(gamma: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0, "Stolarsky mean of {a}, {b}");
    debug_assert!(gamma > 1.0);
    let (lo, hi) = ordered(a, b);
    let sum = lo + hi;
    let z = (hi - lo) / sum;
    if z < STOLARSKY_SERIES_THRESHOLD {
        // Expansion around the midpoint m: a = m(1 - z), b = m(1 + z).
        let z2 = z * z;
        let g = gamma;
        let num = 1.0
            + z2 * ((g - 1.0) * (g - 2.0) / 6.0
                + z2 * (g - 1.0) * (g - 2.0) * (g - 3.0) * (g - 4.0) / 120.0);
        let den = 1.0
            + z2 * ((g - 2.0) * (g - 3.0) / 6.0
                + z2 * (g - 2.0) * (g - 3.0) * (g - 4.0) * (g - 5.0) / 120.0);
        0.5 * sum * num / den
    } else {
        let log_ratio = ((hi - lo) / lo).ln_1p();
        (gamma - 1.0) / gamma * lo * (gamma * log_ratio).exp_m1()
            / ((gamma - 1.0) * log_ratio).exp_m1()
    }
}

/// Unchecked dispatch used in flux kernels.
#[inline]
pub fn mean_unchecked(kind: MeanKind, a: f64, b: f64) -> f64 {
    match kind {
        MeanKind::Arithmetic => arithmetic_mean(a, b),
        MeanKind::Geometric => geometric_mean(a, b),
        MeanKind::Logarithmic => log_mean(a, b),
        MeanKind::Stolarsky(gamma) => stolarsky_mean(gamma, a, b),
    }
}

/// Checked mean: rejects non-positive arguments for the means that need them
/// and Stolarsky exponents `<= 1`.
pub fn mean(kind: MeanKind, a: f64, b: f64) -> Result<f64, DomainError> {
    if kind.requires_positive() {
        for value in [a, b] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(DomainError::NonPositiveMeanArgument { kind, value });
            }
        }
    } else if !a.is_finite() || !b.is_finite() {
        let value = if a.is_finite() { b } else { a };
        return Err(DomainError::NonPositiveMeanArgument { kind, value });
    }
    if let MeanKind::Stolarsky(gamma) = kind {
        if !(gamma > 1.0) {
            return Err(DomainError::StolarskyExponent(gamma));
        }
    }
    Ok(mean_unchecked(kind, a, b))
}

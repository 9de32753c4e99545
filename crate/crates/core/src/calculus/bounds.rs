//! Numeric bounds used by the product and projection estimates.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::CalcError;
use crate::ordinal::Ordinal;
use crate::rational::{ceil_int, int, pow_bounds, Rational};

fn invalid(msg: &str) -> CalcError {
    CalcError::InvalidParams(msg.to_string())
}

fn to_u64(n: BigInt) -> Result<u64, CalcError> {
    n.to_u64().ok_or(CalcError::Overflow)
}

/// Least n ≥ 1 with `n ≥ (2a/(b−c))^d − (b/(b−c))^d + 1`.
///
/// For fractional `d` the first power is bounded from above and the second
/// from below, so the returned value never undershoots the exact one.
pub fn sigma(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Result<u64, CalcError> {
    if !c.is_positive() || b <= c {
        return Err(invalid("sigma requires b > c > 0"));
    }
    if a.is_negative() {
        return Err(invalid("sigma requires a >= 0"));
    }
    if *d < Rational::one() {
        return Err(invalid("sigma requires d >= 1"));
    }
    // x ↦ x^d is increasing, so 2a ≤ b makes the difference nonpositive;
    // decided exactly rather than through the enclosures.
    if int(2) * a <= *b {
        return Ok(1);
    }
    let gap = b - c;
    let first = pow_bounds(&(int(2) * a / &gap), d).hi;
    let second = pow_bounds(&(b / &gap), d).lo;
    let x = first - second + Rational::one();
    let n = ceil_int(&x);
    to_u64(n.max(BigInt::one()))
}

/// Least M ≥ m with `(2^q − 1)·ε^q·M ≥ 8^q·d^q·(m − 1)`, where `d` is a
/// diameter and `eps_q` is ε^q.
pub fn frount_m(d: &Rational, eps_q: &Rational, q: &Rational, m: u64) -> Result<u64, CalcError> {
    if !d.is_positive() {
        return Err(invalid("frount requires d > 0"));
    }
    let d_q = pow_bounds(d, q).hi;
    frount_m_qpow(&d_q, eps_q, q, m)
}

/// Same as [`frount_m`] with the diameter already given as `d^q` (which may
/// be zero, in which case M = m).
pub fn frount_m_qpow(d_q: &Rational, eps_q: &Rational, q: &Rational, m: u64) -> Result<u64, CalcError> {
    if m < 2 {
        return Err(invalid("frount requires m >= 2"));
    }
    if !eps_q.is_positive() {
        return Err(invalid("frount requires eps > 0"));
    }
    if d_q.is_negative() {
        return Err(invalid("frount requires d >= 0"));
    }
    if *q < Rational::one() {
        return Err(invalid("frount requires q >= 1"));
    }
    let two_q = pow_bounds(&int(2), q).lo;
    let eight_q = pow_bounds(&int(8), q).hi;
    let lhs_coeff = (two_q - Rational::one()) * eps_q;
    let rhs = eight_q * d_q * Rational::from_integer((m - 1).into());
    if rhs.is_zero() {
        return Ok(m);
    }
    let needed = to_u64(ceil_int(&(rhs / lhs_coeff)))?;
    Ok(needed.max(m))
}

/// `η · σ(|K|, ε, δ, q)`.
pub fn postdoc2_bound(
    eta: &Ordinal,
    k_abs: &Rational,
    eps: &Rational,
    delta: &Rational,
    q: &Rational,
) -> Result<Ordinal, CalcError> {
    if eta.is_zero() {
        return Err(invalid("eta must be nonzero"));
    }
    if !delta.is_positive() || eps <= delta {
        return Err(invalid("requires eps > delta > 0"));
    }
    let s = sigma(k_abs, eps, delta, q)?;
    eta.checked_mul_nat(s).ok_or(CalcError::Overflow)
}

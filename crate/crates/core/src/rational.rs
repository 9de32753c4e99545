//! Exact rationals, q-th power magnitudes and outward-rounded power bounds.
//!
//! Every magnitude the engine compares (norms, diameters, ε) lives in q-th
//! power form so that comparisons stay inside rational arithmetic. The only
//! place irrational numbers appear is when a fractional exponent has to be
//! applied to a rational; [`pow_bounds`] returns a rational enclosure there.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.to_string(),
        reason,
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err("bad numerator"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("bad decimal"));
        }
        let neg = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| err("bad integer part"))?
        };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let frac_part = BigInt::from_str(frac).map_err(|_| err("bad fraction"))?;
        let mag = int_part.abs() * &scale + frac_part;
        let num = if neg { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let n = BigInt::from_str(t).map_err(|_| err("bad integer"))?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Least integer ≥ r.
pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for lists of rationals written as strings.
pub mod serde_str_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A nonnegative magnitude stored as its q-th power.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QPow(Rational);

impl QPow {
    pub fn new(value_q: Rational) -> Option<Self> {
        (!value_q.is_negative()).then_some(QPow(value_q))
    }

    pub fn zero() -> Self {
        QPow(Rational::zero())
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        QPow::new(rat(n, d)).expect("negative QPow literal")
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Debug for QPow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPow({})", format_rational(&self.0))
    }
}

impl fmt::Display for QPow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for QPow {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r = parse_rational(s)?;
        QPow::new(r).ok_or(ParseRationalError {
            input: s.to_string(),
            reason: "negative magnitude",
        })
    }
}

impl Serialize for QPow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for QPow {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The exponent q ≥ 1 of the ambient ℓ_q geometry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Rational);

impl Exponent {
    pub fn new(q: Rational) -> Option<Self> {
        (q >= Rational::one()).then_some(Exponent(q))
    }

    pub fn integer(q: u32) -> Self {
        assert!(q >= 1, "exponent must be at least 1");
        Exponent(Rational::from_integer(q.into()))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn as_integer(&self) -> Option<u32> {
        if self.0.is_integer() {
            self.0.to_integer().to_u32()
        } else {
            None
        }
    }

    /// Enclosure of x^q for x ≥ 0.
    pub fn pow(&self, x: &Rational) -> Bounds {
        pow_bounds(x, &self.0)
    }

    /// Enclosure of x^(1/q) for x ≥ 0.
    pub fn root(&self, x: &Rational) -> Bounds {
        pow_bounds(x, &self.0.recip())
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}", format_rational(&self.0))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let r = parse_rational(&s).map_err(serde::de::Error::custom)?;
        Exponent::new(r).ok_or_else(|| serde::de::Error::custom("exponent q must be >= 1"))
    }
}

/// Closed rational enclosure `lo <= x <= hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bounds {
    pub fn exact(x: Rational) -> Self {
        Bounds {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

// Enclosures are tightened until their width is below 2^-PRECISION_BITS
// relative to max(1, value).
const PRECISION_BITS: u32 = 64;

/// Enclosure of `x^e` for `x >= 0`, `e >= 0` rational. Exact when `e` is an
/// integer or `x` is a perfect power.
pub fn pow_bounds(x: &Rational, e: &Rational) -> Bounds {
    assert!(!x.is_negative(), "pow_bounds of a negative base");
    assert!(!e.is_negative(), "pow_bounds with a negative exponent");
    if x.is_zero() {
        return Bounds::exact(if e.is_zero() {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    let numer = e.numer().to_u32().expect("exponent numerator too large");
    let denom = e.denom().to_u32().expect("exponent denominator too large");
    let powered = num_traits::pow(x.clone(), numer as usize);
    if denom == 1 {
        return Bounds::exact(powered);
    }
    root_bounds(&powered, denom)
}

/// Enclosure of the `n`-th root of `x >= 0`.
pub fn root_bounds(x: &Rational, n: u32) -> Bounds {
    assert!(n >= 1);
    if n == 1 || x.is_zero() || x.is_one() {
        return Bounds::exact(x.clone());
    }
    if let Some(r) = exact_root(x, n) {
        return Bounds::exact(r);
    }
    let mut lo = Rational::zero();
    let mut hi = if *x > Rational::one() {
        x.clone()
    } else {
        Rational::one()
    };
    let tol = hi.clone() / Rational::from_integer(BigInt::one() << PRECISION_BITS);
    let two = Rational::from_integer(2.into());
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / &two;
        if num_traits::pow(mid.clone(), n as usize) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Bounds { lo, hi }
}

fn exact_root(x: &Rational, n: u32) -> Option<Rational> {
    let rn = int_root(x.numer(), n)?;
    let rd = int_root(x.denom(), n)?;
    Some(Rational::new(rn, rd))
}

fn int_root(v: &BigInt, n: u32) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.nth_root(n);
    (num_traits::pow(r.clone(), n as usize) == *v).then_some(r)
}

/// `base^n` for a natural power.
pub fn powi(base: &Rational, n: u32) -> Rational {
    num_traits::pow(base.clone(), n as usize)
}

/// Least positive integer ≥ `r` (at least 1).
pub fn ceil_at_least_one(r: &Rational) -> BigInt {
    let c = ceil_int(r);
    if c < BigInt::one() {
        BigInt::one()
    } else {
        c
    }
}

/// Integer division helper kept for grid enumeration: floor(a / b) for b > 0.
pub fn floor_div(a: &Rational, b: &Rational) -> BigInt {
    (a / b).floor().to_integer()
}

//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a strictly decreasing list of terms `ω^e · c` with
//! `c ≥ 1`; the exponents are themselves ordinals, so the representation is
//! a finite tree. Arithmetic is the usual non-commutative ordinal arithmetic.

mod family;
mod parse;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use family::{sup_family, OrdFamily};
pub use parse::{parse_ordinal, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    #[error("{0} is not a limit ordinal")]
    NotALimit(Ordinal),
    #[error("coefficient overflow in ordinal arithmetic")]
    Overflow,
    #[error("malformed Cantor normal form: {0}")]
    Malformed(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cofinality {
    Zero,
    One,
    /// Every limit below ε₀ has cofinality ω; uncountable cofinalities are
    /// not representable.
    Omega,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(Ordinal::zero(), n)],
            }
        }
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// ω^a.
    pub fn omega_pow(a: Ordinal) -> Self {
        Ordinal { terms: vec![(a, 1)] }
    }

    /// ω^e · c.
    pub fn term(e: Ordinal, c: u64) -> Self {
        if c == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(e, c)],
            }
        }
    }

    /// Builds an ordinal from CNF terms, checking the normal-form invariants.
    pub fn from_cnf(terms: Vec<(Ordinal, u64)>) -> Result<Self, OrdinalError> {
        if terms.iter().any(|(_, c)| *c == 0) {
            return Err(OrdinalError::Malformed("zero coefficient"));
        }
        if terms.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(OrdinalError::Malformed("exponents not strictly decreasing"));
        }
        Ok(Ordinal { terms })
    }

    pub fn cnf(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_nat() == Some(1)
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|(e, _)| e.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    pub fn is_power_of_omega(&self) -> bool {
        matches!(self.terms.as_slice(), [(_, 1)])
    }

    pub fn cofinality_class(&self) -> Cofinality {
        if self.is_zero() {
            Cofinality::Zero
        } else if self.is_successor() {
            Cofinality::One
        } else {
            Cofinality::Omega
        }
    }

    /// Exponent of the leading term; 0 for the ordinal 0.
    pub fn lead_exp(&self) -> Ordinal {
        self.terms
            .first()
            .map(|(e, _)| e.clone())
            .unwrap_or_default()
    }

    /// Least ω^α strictly greater than `self`.
    pub fn least_omega_power_above(&self) -> Ordinal {
        if self.is_zero() {
            return Ordinal::one();
        }
        Ordinal::omega_pow(self.lead_exp().succ())
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    pub fn checked_add(&self, b: &Ordinal) -> Option<Ordinal> {
        let Some((b_lead, b_coeff)) = b.terms.first() else {
            return Some(self.clone());
        };
        let mut terms: Vec<(Ordinal, u64)> = Vec::with_capacity(self.terms.len() + b.terms.len());
        let mut carried = None;
        for (e, c) in &self.terms {
            match e.cmp(b_lead) {
                Ordering::Greater => terms.push((e.clone(), *c)),
                Ordering::Equal => carried = Some(*c),
                Ordering::Less => break,
            }
        }
        let first = match carried {
            Some(c) => c.checked_add(*b_coeff)?,
            None => *b_coeff,
        };
        terms.push((b_lead.clone(), first));
        terms.extend(b.terms[1..].iter().cloned());
        Some(Ordinal { terms })
    }

    /// Ordinal sum. Panics on coefficient overflow (beyond 2^64).
    pub fn add(&self, b: &Ordinal) -> Ordinal {
        self.checked_add(b).expect("ordinal coefficient overflow")
    }

    /// `self · n` for a natural number n.
    pub fn checked_mul_nat(&self, n: u64) -> Option<Ordinal> {
        if n == 0 || self.is_zero() {
            return Some(Ordinal::zero());
        }
        let mut terms = self.terms.clone();
        terms[0].1 = terms[0].1.checked_mul(n)?;
        Some(Ordinal { terms })
    }

    pub fn checked_mul(&self, b: &Ordinal) -> Option<Ordinal> {
        if self.is_zero() || b.is_zero() {
            return Some(Ordinal::zero());
        }
        let lead = self.lead_exp();
        let mut out = Ordinal::zero();
        // Left distributivity over the terms of b.
        for (e, c) in &b.terms {
            let piece = if e.is_zero() {
                self.checked_mul_nat(*c)?
            } else {
                Ordinal::term(lead.checked_add(e)?, *c)
            };
            out = out.checked_add(&piece)?;
        }
        Some(out)
    }

    /// Ordinal product. Panics on coefficient overflow (beyond 2^64).
    pub fn mul(&self, b: &Ordinal) -> Ordinal {
        self.checked_mul(b).expect("ordinal coefficient overflow")
    }

    pub fn mul_nat(&self, n: u64) -> Ordinal {
        self.checked_mul_nat(n).expect("ordinal coefficient overflow")
    }

    /// k-th element of the standard fundamental sequence of a limit ordinal:
    /// `δ + ω^(β+1) ↦ δ + ω^β·k` and `δ + ω^λ ↦ δ + ω^(λ[k])`.
    pub fn fundamental_sequence(&self, k: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotALimit(self.clone()));
        }
        let mut terms = self.terms.clone();
        let (gamma, c) = terms.pop().expect("limit ordinals are nonzero");
        if c > 1 {
            terms.push((gamma.clone(), c - 1));
        }
        let delta = Ordinal { terms };
        let tail = if gamma.is_successor() {
            let pred = gamma.pred().expect("successor has a predecessor");
            Ordinal::term(pred, k)
        } else {
            Ordinal::omega_pow(gamma.fundamental_sequence(k)?)
        };
        Ok(delta.add(&tail))
    }

    /// Predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor is nonzero");
        if last.1 == 1 {
            terms.pop();
        } else {
            last.1 -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Depth of exponent nesting; 0 for naturals.
    pub fn height(&self) -> usize {
        self.terms
            .iter()
            .map(|(e, _)| if e.is_zero() { 0 } else { 1 + e.height() })
            .max()
            .unwrap_or(0)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((ea, ca), (eb, cb)) in self.terms.iter().zip(&other.terms) {
            match ea.cmp(eb).then(ca.cmp(cb)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            f.write_str("w")?;
            match e.as_nat() {
                Some(1) => {}
                Some(n) => write!(f, "^{n}")?,
                None => {
                    let inner = e.to_string();
                    if inner.contains(['+', '*']) {
                        write!(f, "^({inner})")?;
                    } else {
                        write!(f, "^{inner}")?;
                    }
                }
            }
            if *c > 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl std::str::FromStr for Ordinal {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ordinal(s)
    }
}

#[derive(Serialize)]
struct CnfRef<'a> {
    cnf: &'a [(Ordinal, u64)],
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CnfRef { cnf: &self.terms }.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OrdinalRepr {
    Cnf {
        cnf: Vec<(Ordinal, u64)>,
    },
    Text(String),
}

/// Accepts the CNF object form and, for convenience, the text syntax.
impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match OrdinalRepr::deserialize(d)? {
            OrdinalRepr::Cnf { cnf } => Ordinal::from_cnf(cnf).map_err(serde::de::Error::custom),
            OrdinalRepr::Text(s) => parse_ordinal(&s).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests;

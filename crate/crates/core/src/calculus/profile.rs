//! ε-profiles: nonincreasing step maps ε ↦ Sz_ε.
//!
//! A profile is a list of steps `(t_k, v_k)` with `t_0 > t_1 > …` (all in
//! ε^q form) followed by a tail. Step `k` holds for `ε^q > t_k` down to the
//! previous threshold: `v_0` for `ε^q > t_0`, `v_k` on `(t_k, t_{k−1}]`, and
//! the tail for `ε^q ≤ t_last` (everywhere if there are no steps).

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::CalcError;
use crate::ordinal::{OrdFamily, Ordinal};
use crate::rational::{serde_str, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(with = "serde_str")]
    pub threshold_q: Rational,
    pub value: Ordinal,
}

/// Geometric index ladder `j(ε) = max{j ≥ 0 : b·r^j ≥ ε^q}` (0 if no j
/// qualifies).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ladder {
    #[serde(with = "serde_str")]
    pub base_q: Rational,
    #[serde(with = "serde_str")]
    pub ratio_q: Rational,
}

impl Ladder {
    pub fn validate(&self) -> Result<(), CalcError> {
        if !self.base_q.is_positive() {
            return Err(malformed("ladder base must be positive"));
        }
        if !self.ratio_q.is_positive() || self.ratio_q >= Rational::one() {
            return Err(malformed("ladder ratio must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Largest j ≥ 0 with `b·r^j ≥ ε^q`, or 0.
    pub fn index(&self, eps_q: &Rational) -> u64 {
        let mut level = self.base_q.clone();
        let mut j = 0;
        while &level * &self.ratio_q >= *eps_q {
            level *= &self.ratio_q;
            j += 1;
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Const(Ordinal),
    /// `slope·j(ε) + offset`.
    Ladder {
        slope: Ordinal,
        offset: Ordinal,
        #[serde(flatten)]
        ladder: Ladder,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsProfile {
    #[serde(default)]
    pub steps: Vec<Step>,
    pub tail: Tail,
}

pub(super) fn malformed(msg: &str) -> CalcError {
    CalcError::MalformedExpr(msg.to_string())
}

fn check_value(v: &Ordinal) -> Result<(), CalcError> {
    if v.is_zero() || !v.is_successor() {
        return Err(malformed("profile values must be successor ordinals >= 1"));
    }
    Ok(())
}

impl EpsProfile {
    pub fn constant(v: Ordinal) -> Self {
        EpsProfile {
            steps: Vec::new(),
            tail: Tail::Const(v),
        }
    }

    /// Profile of a compact operator: Sz_ε = 1 everywhere.
    pub fn compact() -> Self {
        EpsProfile::constant(Ordinal::one())
    }

    pub fn ladder(slope: Ordinal, offset: Ordinal, base_q: Rational, ratio_q: Rational) -> Self {
        EpsProfile {
            steps: Vec::new(),
            tail: Tail::Ladder {
                slope,
                offset,
                ladder: Ladder { base_q, ratio_q },
            },
        }
    }

    pub fn validate(&self) -> Result<(), CalcError> {
        for w in self.steps.windows(2) {
            if w[0].threshold_q <= w[1].threshold_q {
                return Err(malformed("profile thresholds must be strictly decreasing"));
            }
            if w[0].value > w[1].value {
                return Err(malformed("profile values must not decrease as eps decreases"));
            }
        }
        for s in &self.steps {
            if !s.threshold_q.is_positive() {
                return Err(malformed("profile thresholds must be positive"));
            }
            check_value(&s.value)?;
        }
        let tail_min = match &self.tail {
            Tail::Const(v) => v,
            Tail::Ladder {
                slope,
                offset,
                ladder,
            } => {
                ladder.validate()?;
                if slope.is_zero() {
                    return Err(malformed("ladder slope must be nonzero"));
                }
                offset
            }
        };
        check_value(tail_min)?;
        if let Some(last) = self.steps.last() {
            if last.value > *tail_min {
                return Err(malformed("profile tail must not drop below the last step"));
            }
        }
        Ok(())
    }

    /// Sz_ε for `ε^q = eps_q > 0`.
    pub fn eval(&self, eps_q: &Rational) -> Ordinal {
        if let Some(step) = self.steps.iter().find(|s| *eps_q > s.threshold_q) {
            return step.value.clone();
        }
        match &self.tail {
            Tail::Const(v) => v.clone(),
            Tail::Ladder {
                slope,
                offset,
                ladder,
            } => slope.mul_nat(ladder.index(eps_q)).add(offset),
        }
    }

    /// sup over ε > 0, i.e. the Szlenk index this profile describes.
    pub fn sup(&self) -> Ordinal {
        match &self.tail {
            Tail::Const(v) => v.clone(),
            Tail::Ladder { slope, offset, .. } => OrdFamily::AffineInN {
                slope: slope.clone(),
                offset: offset.clone(),
            }
            .sup(),
        }
    }

    /// Every value the profile takes, up to the ladder: the step values plus
    /// the tail's values at j = 0 and at a generic j ≥ 1 (which share their
    /// leading exponent with all larger j).
    pub(super) fn exponent_witnesses(&self) -> Vec<Ordinal> {
        let mut out: Vec<Ordinal> = self.steps.iter().map(|s| s.value.clone()).collect();
        match &self.tail {
            Tail::Const(v) => out.push(v.clone()),
            Tail::Ladder { slope, offset, .. } => {
                out.push(offset.clone());
                out.push(slope.add(offset));
            }
        }
        out
    }

    /// sup over ε of the exponent of the least ω-power above Sz_ε.
    pub fn lead_exponent_bound(&self) -> Ordinal {
        self.exponent_witnesses()
            .iter()
            .map(|v| v.lead_exp().succ())
            .max()
            .unwrap_or_else(Ordinal::one)
    }
}

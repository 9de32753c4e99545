//! ω-indexed summand families `T_1, T_2, …` with closed-form ε-profiles.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::profile::{malformed, EpsProfile, Ladder, Step, Tail};
use super::CalcError;
use crate::ordinal::{OrdFamily, Ordinal};
use crate::rational::{serde_str, Rational};

/// The norm sequence `‖T_n‖`, n ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSeq {
    Const(#[serde(with = "serde_str")] Rational),
    /// `first · ratio^(n−1)` with `0 ≤ ratio ≤ 1`.
    Geometric {
        #[serde(with = "serde_str")]
        first: Rational,
        #[serde(with = "serde_str")]
        ratio: Rational,
    },
    /// `scale / n`.
    Harmonic {
        #[serde(with = "serde_str")]
        scale: Rational,
    },
    /// Only finitely many norms are known; membership in c₀ is undecidable.
    Prefix(#[serde(with = "crate::rational::serde_str_vec")] Vec<Rational>),
}

impl NormSeq {
    pub fn validate(&self) -> Result<(), CalcError> {
        let ok = match self {
            NormSeq::Const(c) => !c.is_negative(),
            NormSeq::Geometric { first, ratio } => {
                !first.is_negative() && !ratio.is_negative() && *ratio <= Rational::one()
            }
            NormSeq::Harmonic { scale } => !scale.is_negative(),
            NormSeq::Prefix(v) => v.iter().all(|x| !x.is_negative()),
        };
        if ok {
            Ok(())
        } else {
            Err(malformed("norm sequence must be nonnegative and bounded"))
        }
    }

    /// Whether `‖T_n‖ → 0`.
    pub fn in_c0(&self) -> Result<bool, CalcError> {
        match self {
            NormSeq::Const(c) => Ok(c.is_zero()),
            NormSeq::Geometric { first, ratio } => Ok(first.is_zero() || *ratio < Rational::one()),
            NormSeq::Harmonic { .. } => Ok(true),
            NormSeq::Prefix(_) => Err(CalcError::NormsNotDecidable(
                "only a finite prefix of the norm sequence is known".to_string(),
            )),
        }
    }

    /// `‖T_n‖` for n ≥ 1, when known.
    pub fn norm(&self, n: u64) -> Option<Rational> {
        assert!(n >= 1, "family members are indexed from 1");
        match self {
            NormSeq::Const(c) => Some(c.clone()),
            NormSeq::Geometric { first, ratio } => {
                Some(first * num_traits::pow(ratio.clone(), (n - 1) as usize))
            }
            NormSeq::Harmonic { scale } => Some(scale / Rational::from_integer(n.into())),
            NormSeq::Prefix(v) => v.get((n - 1) as usize).cloned(),
        }
    }
}

/// ε-profiles of the members of a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyProfile {
    /// Every member has the same profile.
    Uniform(EpsProfile),
    /// `P_n(ε) = high(n)` once `ε^q ≤ b·r^n`, and `low` before.
    Threshold {
        low: Ordinal,
        high: OrdFamily,
        #[serde(flatten)]
        ladder: Ladder,
    },
    /// `P_n(ε) = slope(n)·j(ε) + offset` with the ladder index j(ε).
    Ladder {
        slope: OrdFamily,
        offset: Ordinal,
        #[serde(flatten)]
        ladder: Ladder,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub name: String,
    pub norms: NormSeq,
    pub profile: FamilyProfile,
}

fn successor_at_least_one(v: &Ordinal) -> bool {
    !v.is_zero() && v.is_successor()
}

impl FamilyProfile {
    pub fn validate(&self) -> Result<(), CalcError> {
        match self {
            FamilyProfile::Uniform(p) => p.validate(),
            FamilyProfile::Threshold { low, high, ladder } => {
                ladder.validate()?;
                high.validate().map_err(|e| malformed(&e.to_string()))?;
                if !successor_at_least_one(low) {
                    return Err(malformed("threshold family: low value must be a successor >= 1"));
                }
                // Affine families keep the same final CNF term for all n ≥ 1.
                if !successor_at_least_one(&high.eval(1)) || !successor_at_least_one(&high.eval(2)) {
                    return Err(malformed("threshold family: high values must be successors"));
                }
                if high.eval(1) < *low {
                    return Err(malformed("threshold family: high values must dominate low"));
                }
                Ok(())
            }
            FamilyProfile::Ladder {
                slope,
                offset,
                ladder,
            } => {
                ladder.validate()?;
                slope.validate().map_err(|e| malformed(&e.to_string()))?;
                if slope.eval(1).is_zero() {
                    return Err(malformed("ladder family: slope must be nonzero"));
                }
                if !successor_at_least_one(offset) {
                    return Err(malformed("ladder family: offset must be a successor >= 1"));
                }
                Ok(())
            }
        }
    }

    /// The profile of member `n ≥ 1`.
    pub fn member(&self, n: u64) -> EpsProfile {
        assert!(n >= 1, "family members are indexed from 1");
        match self {
            FamilyProfile::Uniform(p) => p.clone(),
            FamilyProfile::Threshold { low, high, ladder } => {
                let t = &ladder.base_q * num_traits::pow(ladder.ratio_q.clone(), n as usize);
                EpsProfile {
                    steps: vec![Step {
                        threshold_q: t,
                        value: low.clone(),
                    }],
                    tail: Tail::Const(high.eval(n)),
                }
            }
            FamilyProfile::Ladder {
                slope,
                offset,
                ladder,
            } => EpsProfile {
                steps: Vec::new(),
                tail: Tail::Ladder {
                    slope: slope.eval(n),
                    offset: offset.clone(),
                    ladder: ladder.clone(),
                },
            },
        }
    }

    /// `sup_n P_n(ε)` at `ε^q = eps_q`.
    pub fn sup_at(&self, eps_q: &Rational) -> Ordinal {
        match self {
            FamilyProfile::Uniform(p) => p.eval(eps_q),
            FamilyProfile::Threshold { low, high, ladder } => {
                // Members n ≤ N are switched on, with N the ladder index
                // counted from 1; high is nondecreasing in n.
                let active = threshold_count(ladder, eps_q);
                if active == 0 {
                    low.clone()
                } else {
                    low.clone().max(high.eval(active))
                }
            }
            FamilyProfile::Ladder {
                slope,
                offset,
                ladder,
            } => ladder_family_sup(slope, offset, ladder.index(eps_q)),
        }
    }

    /// sup over ε of the exponent of the least ω-power above `sup_n P_n(ε)`.
    pub fn lead_exponent_bound(&self) -> Ordinal {
        match self {
            FamilyProfile::Uniform(p) => p.lead_exponent_bound(),
            FamilyProfile::Threshold { low, high, .. } => {
                low.lead_exp().max(high.eval(1).lead_exp()).succ()
            }
            FamilyProfile::Ladder { slope, offset, .. } => {
                let at0 = ladder_family_sup(slope, offset, 0);
                let at1 = ladder_family_sup(slope, offset, 1);
                at0.lead_exp().max(at1.lead_exp()).succ()
            }
        }
    }

    /// `sup_n Sz(T_n)`.
    pub fn member_sup(&self) -> Ordinal {
        match self {
            FamilyProfile::Uniform(p) => p.sup(),
            FamilyProfile::Threshold { low, high, .. } => low.clone().max(high.sup()),
            FamilyProfile::Ladder { slope, offset, .. } => {
                // slope(n) has the same leading exponent for every n ≥ 1.
                let lead = slope.eval(1).lead_exp();
                Ordinal::omega_pow(lead.succ()).max(offset.clone())
            }
        }
    }
}

/// Number of members switched on at ε: max{n ≥ 1 : b·r^n ≥ ε^q}, or 0.
fn threshold_count(ladder: &Ladder, eps_q: &Rational) -> u64 {
    if ladder.base_q.clone() * &ladder.ratio_q < *eps_q {
        return 0;
    }
    ladder.index(eps_q)
}

/// `sup_{n ≥ 1} slope(n)·j + offset` for a fixed ladder index j.
fn ladder_family_sup(slope: &OrdFamily, offset: &Ordinal, j: u64) -> Ordinal {
    if j == 0 {
        return offset.clone();
    }
    match slope {
        OrdFamily::Const(x) => x.mul_nat(j).add(offset),
        OrdFamily::AffineInN { slope: s, offset: o } => {
            if o.lead_exp() > s.lead_exp() {
                // s·n + o = o for every n ≥ 1.
                return o.mul_nat(j).add(offset);
            }
            let lead = s.lead_exp();
            if offset.lead_exp() > lead {
                offset.clone()
            } else {
                Ordinal::omega_pow(lead.succ())
            }
        }
    }
}

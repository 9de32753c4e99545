//! Symbolic spaces E_β with Sz₁(E_β) > β.
//!
//! `E_0 = {0}`, `E_{β+1} = E_β ⊕₁ X` for a supplied Hilbertian atom X, and at
//! limits the ℓ₂-sum of `E_{β[k]}` over the first `width` terms of the
//! fundamental sequence. The limit stage is necessarily truncated: the
//! result records that.

use serde::{Deserialize, Serialize};

use super::profile::EpsProfile;
use super::space::{Atom, DirectSum, SpaceExpr, SumExponent, Summands};
use super::CalcError;
use crate::ordinal::Ordinal;
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructOptions {
    /// Number of fundamental-sequence terms kept at each limit stage.
    pub width: u64,
    /// Maximum number of expression nodes before giving up.
    pub max_nodes: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            width: 5,
            max_nodes: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub beta: Ordinal,
    pub expr: SpaceExpr,
    /// Sz₁(E_β) is strictly greater than this ordinal.
    pub sz1_exceeds: Ordinal,
    /// Whether some limit stage kept only finitely many summands.
    pub truncated: bool,
    pub nodes: usize,
}

pub fn zero_space() -> SpaceExpr {
    SpaceExpr::Atom(Atom {
        name: "{0}".to_string(),
        norm: Rational::from_integer(0.into()),
        profile: EpsProfile::compact(),
        compact: true,
    })
}

pub fn szlenk_space_construct(
    beta: &Ordinal,
    atom_profile: &EpsProfile,
    opts: &ConstructOptions,
) -> Result<Construction, CalcError> {
    atom_profile.validate()?;
    let atom = SpaceExpr::Atom(Atom {
        name: "l2".to_string(),
        norm: int(1),
        compact: atom_profile.sup().is_one(),
        profile: atom_profile.clone(),
    });
    let mut b = Builder {
        atom,
        opts,
        nodes: 0,
        truncated: false,
    };
    let expr = b.build(beta)?;
    Ok(Construction {
        beta: beta.clone(),
        expr,
        sz1_exceeds: beta.clone(),
        truncated: b.truncated,
        nodes: b.nodes,
    })
}

struct Builder<'a> {
    atom: SpaceExpr,
    opts: &'a ConstructOptions,
    nodes: usize,
    truncated: bool,
}

impl Builder<'_> {
    fn charge(&mut self, n: usize) -> Result<(), CalcError> {
        self.nodes += n;
        if self.nodes > self.opts.max_nodes {
            return Err(CalcError::DepthCapExceeded {
                max_nodes: self.opts.max_nodes,
            });
        }
        Ok(())
    }

    fn build(&mut self, beta: &Ordinal) -> Result<SpaceExpr, CalcError> {
        if beta.is_zero() {
            self.charge(1)?;
            return Ok(zero_space());
        }
        if let Some(n) = beta.as_nat() {
            // A successor chain of length n costs 2n + 1 nodes; refuse early
            // instead of recursing n times.
            let cost = (n as usize).saturating_mul(2).saturating_add(1);
            if self.nodes.saturating_add(cost) > self.opts.max_nodes {
                return Err(CalcError::DepthCapExceeded {
                    max_nodes: self.opts.max_nodes,
                });
            }
        }
        if let Some(pred) = beta.pred() {
            let inner = self.build(&pred)?;
            self.charge(2)?;
            return Ok(SpaceExpr::Sum(DirectSum {
                p: SumExponent::One,
                summands: Summands::List(vec![inner, self.atom.clone()]),
            }));
        }
        let mut parts = Vec::with_capacity(self.opts.width as usize);
        for k in 0..self.opts.width {
            let b_k = beta
                .fundamental_sequence(k)
                .expect("nonzero non-successor ordinals are limits");
            parts.push(self.build(&b_k)?);
        }
        if parts.is_empty() {
            parts.push(zero_space());
        }
        self.charge(1)?;
        self.truncated = true;
        Ok(SpaceExpr::Sum(DirectSum {
            p: SumExponent::Finite(int(2)),
            summands: Summands::List(parts),
        }))
    }
}

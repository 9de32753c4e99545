use serde::{Deserialize, Serialize};

use super::{Ordinal, OrdinalError};

/// An ω-indexed family of ordinals `n ↦ f(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrdFamily {
    Const(Ordinal),
    /// `n ↦ slope·n + offset`; slope is nonzero.
    AffineInN { slope: Ordinal, offset: Ordinal },
}

impl OrdFamily {
    pub fn affine(slope: Ordinal, offset: Ordinal) -> Result<Self, OrdinalError> {
        if slope.is_zero() {
            return Err(OrdinalError::Malformed("affine family with zero slope"));
        }
        Ok(OrdFamily::AffineInN { slope, offset })
    }

    pub fn validate(&self) -> Result<(), OrdinalError> {
        match self {
            OrdFamily::AffineInN { slope, .. } if slope.is_zero() => {
                Err(OrdinalError::Malformed("affine family with zero slope"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, n: u64) -> Ordinal {
        match self {
            OrdFamily::Const(c) => c.clone(),
            OrdFamily::AffineInN { slope, offset } => slope.mul_nat(n).add(offset),
        }
    }

    /// Exact supremum over n < ω.
    ///
    /// For `s·n + o` this is `s·ω` unless the offset already dominates every
    /// `s·n`, in which case the family is eventually constant at `o`.
    pub fn sup(&self) -> Ordinal {
        match self {
            OrdFamily::Const(c) => c.clone(),
            OrdFamily::AffineInN { slope, offset } => {
                let limit = slope.mul(&Ordinal::omega());
                limit.max(offset.clone())
            }
        }
    }
}

pub fn sup_family(f: &OrdFamily) -> Ordinal {
    f.sup()
}

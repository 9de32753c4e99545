//! The fan-set grammar and its JSON document form.

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::rational::{Exponent, QPow};

/// Maximum nesting depth accepted by [`FanSet::validate`].
pub const MAX_DEPTH: usize = 96;

/// A finitely described w*-compact set in countable ℓ_q coordinates.
///
/// Every point is a finite sum of weighted unit vectors along a branch; each
/// copy of a sub-body lives on its own fresh axes, so the q-th power of the
/// distance between two points is the sum of the edge weights they do not
/// share.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanSet {
    Empty,
    /// The set {0}.
    Sing,
    /// `{0} ∪ ⋃ᵢ (w·e_{bᵢ} + prefixᵢ) ∪ ⋃_{k<ω} (w·e_{c_k} + tail)`.
    Fan {
        w_q: QPow,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        prefix: Vec<FanSet>,
        tail: Box<FanSet>,
    },
    /// Sets sharing the origin, each on its own axis namespace.
    UnionApex(Vec<FanSet>),
    Scale {
        a_q: QPow,
        set: Box<FanSet>,
    },
    /// Product across disjoint axis groups under the ℓ_q norm.
    ProdQ(Vec<FanSet>),
    DisjUnion(Vec<Component>),
}

/// A component of a [`FanSet::DisjUnion`]; a shifted component is moved off
/// the origin along a fresh axis by the given weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_q: Option<QPow>,
    pub set: FanSet,
}

impl Component {
    pub fn at_origin(set: FanSet) -> Self {
        Component { shift_q: None, set }
    }

    pub fn shifted(shift_q: QPow, set: FanSet) -> Self {
        Component {
            shift_q: Some(shift_q),
            set,
        }
    }
}

impl FanSet {
    pub fn fan(w_q: QPow, prefix: Vec<FanSet>, tail: FanSet) -> Self {
        FanSet::Fan {
            w_q,
            prefix,
            tail: Box::new(tail),
        }
    }

    /// `Fan(w, [], Sing)`: the apex with ω isolated copies at distance w.
    pub fn simple_fan(w_q: QPow) -> Self {
        FanSet::fan(w_q, Vec::new(), FanSet::Sing)
    }

    /// n nested fans of equal weight; `depth_fan(0, w) = Sing`.
    pub fn depth_fan(n: usize, w_q: QPow) -> Self {
        (0..n).fold(FanSet::Sing, |body, _| FanSet::fan(w_q.clone(), Vec::new(), body))
    }

    pub fn scale(a_q: QPow, set: FanSet) -> Self {
        FanSet::Scale {
            a_q,
            set: Box::new(set),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            FanSet::Empty => true,
            FanSet::Sing | FanSet::Fan { .. } => false,
            FanSet::UnionApex(ms) => ms.iter().all(FanSet::is_empty),
            FanSet::Scale { set, .. } => set.is_empty(),
            FanSet::ProdQ(fs) => fs.iter().any(FanSet::is_empty),
            FanSet::DisjUnion(cs) => cs.iter().all(|c| c.set.is_empty()),
        }
    }

    pub fn contains_origin(&self) -> bool {
        match self {
            FanSet::Empty => false,
            FanSet::Sing | FanSet::Fan { .. } => true,
            FanSet::UnionApex(ms) => ms.iter().any(FanSet::contains_origin),
            FanSet::Scale { a_q, set } => {
                if a_q.is_zero() {
                    !set.is_empty()
                } else {
                    set.contains_origin()
                }
            }
            FanSet::ProdQ(fs) => fs.iter().all(FanSet::contains_origin),
            FanSet::DisjUnion(cs) => cs
                .iter()
                .any(|c| c.shift_q.is_none() && c.set.contains_origin()),
        }
    }

    /// True when `ProdQ` appears anywhere.
    pub fn has_product(&self) -> bool {
        match self {
            FanSet::Empty | FanSet::Sing => false,
            FanSet::Fan { prefix, tail, .. } => {
                prefix.iter().any(FanSet::has_product) || tail.has_product()
            }
            FanSet::UnionApex(ms) => ms.iter().any(FanSet::has_product),
            FanSet::Scale { set, .. } => set.has_product(),
            FanSet::ProdQ(_) => true,
            FanSet::DisjUnion(cs) => cs.iter().any(|c| c.set.has_product()),
        }
    }

    /// Number of grammar nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            FanSet::Empty | FanSet::Sing => 0,
            FanSet::Fan { prefix, tail, .. } => {
                prefix.iter().map(FanSet::size).sum::<usize>() + tail.size()
            }
            FanSet::UnionApex(ms) | FanSet::ProdQ(ms) => ms.iter().map(FanSet::size).sum(),
            FanSet::Scale { set, .. } => set.size(),
            FanSet::DisjUnion(cs) => cs.iter().map(|c| c.set.size()).sum(),
        }
    }

    /// Checks the structural invariants: positive fan and shift weights,
    /// apex-sharing union members, at most one origin-containing unshifted
    /// component per disjoint union, bounded depth.
    pub fn validate(&self) -> Result<(), EngineError> {
        self.validate_at(0)
    }

    fn validate_at(&self, depth: usize) -> Result<(), EngineError> {
        if depth > MAX_DEPTH {
            return Err(EngineError::Malformed(format!(
                "nesting deeper than {MAX_DEPTH}"
            )));
        }
        let d = depth + 1;
        match self {
            FanSet::Empty | FanSet::Sing => Ok(()),
            FanSet::Fan { w_q, prefix, tail } => {
                if w_q.is_zero() {
                    return Err(EngineError::Malformed("fan weight must be positive".into()));
                }
                if tail.is_empty() {
                    return Err(EngineError::Malformed("fan tail must be nonempty".into()));
                }
                for p in prefix {
                    p.validate_at(d)?;
                }
                tail.validate_at(d)
            }
            FanSet::UnionApex(ms) => {
                for m in ms {
                    if !m.contains_origin() {
                        return Err(EngineError::Malformed(
                            "union_apex members must contain the origin".into(),
                        ));
                    }
                    m.validate_at(d)?;
                }
                Ok(())
            }
            FanSet::Scale { set, .. } => set.validate_at(d),
            FanSet::ProdQ(fs) => fs.iter().try_for_each(|f| f.validate_at(d)),
            FanSet::DisjUnion(cs) => {
                let at_origin = cs
                    .iter()
                    .filter(|c| c.shift_q.is_none() && c.set.contains_origin())
                    .count();
                if at_origin > 1 {
                    return Err(EngineError::Malformed(
                        "more than one unshifted component contains the origin".into(),
                    ));
                }
                for c in cs {
                    if c.shift_q.as_ref().is_some_and(QPow::is_zero) {
                        return Err(EngineError::Malformed("shift must be positive".into()));
                    }
                    c.set.validate_at(d)?;
                }
                Ok(())
            }
        }
    }
}

/// Versioned document: `{"v":1,"q":"2","set":...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSetDoc {
    pub v: u32,
    pub q: Exponent,
    pub set: FanSet,
}

impl FanSetDoc {
    pub const VERSION: u32 = 1;

    pub fn new(q: Exponent, set: FanSet) -> Self {
        FanSetDoc {
            v: Self::VERSION,
            q,
            set,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, EngineError> {
        let doc: FanSetDoc =
            serde_json::from_str(s).map_err(|e| EngineError::Malformed(e.to_string()))?;
        if doc.v != Self::VERSION {
            return Err(EngineError::Malformed(format!(
                "unsupported document version {}",
                doc.v
            )));
        }
        doc.set.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fan set documents always serialize")
    }
}

//! Exact ε-derivations on fan sets, and finite checks of the containment
//! estimates used for products, unions and projections.
//!
//! All magnitudes are q-th powers ([`QPow`]); a derivation threshold `eps_q`
//! is ε^q. The single-set operations work on the product-free fragment;
//! products go through [`ProductSet`].

mod fanset;
mod grid;
mod lemmas;
mod product;
mod skeleton;

use serde::{Deserialize, Serialize};

pub use fanset::{Component, FanSet, FanSetDoc, MAX_DEPTH};
pub use grid::{a_eps_grid, a_eps_grid_size_bound, bq_cover, bq_member, AEpsGrid, BqCover, BqPoint, GridProduct};
pub use lemmas::{
    bound_product_derivation, postdoc2_check, product_factors, project, techlem1_check,
    techlem2_check, tvl_check, union_check_blocks, union_check_halving, verify_product_bound,
    BoundVerdict, ContainmentReport, Postdoc2Report, ProductBound, TvlReport,
};
pub use product::{ProductDescription, ProductSet, DEFAULT_BOX_LIMIT};
pub use skeleton::{Mask, Skeleton};

use crate::calculus::CalcError;
use crate::ordinal::Ordinal;
use crate::rational::{QPow, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("outside the exact fragment: {0}")]
    OutsideExactFragment(String),
    #[error("malformed fan set: {0}")]
    Malformed(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no point at path {0:?}")]
    UnknownPath(Vec<usize>),
    #[error("axis group {0} does not exist")]
    GroupNotFound(usize),
    #[error("product description needs more than {limit} boxes")]
    BoxLimitExceeded { limit: usize },
    #[error("derivation step {step}: {source}")]
    AtStep {
        step: usize,
        source: Box<EngineError>,
    },
    #[error(transparent)]
    Calc(#[from] CalcError),
}

fn single(set: &FanSet) -> Result<(Skeleton, Mask), EngineError> {
    if set.has_product() {
        return Err(EngineError::OutsideExactFragment(
            "products must go through the product iterator".into(),
        ));
    }
    Skeleton::compile(set)
}

fn qpow(r: Rational) -> QPow {
    QPow::new(r).expect("engine magnitudes are nonnegative")
}

/// Largest point norm (q-th power). Top-level products are supported.
pub fn radius_q(set: &FanSet) -> Result<QPow, EngineError> {
    if set.has_product() {
        return Ok(qpow(ProductSet::from_set(set)?.radius_q()));
    }
    let (skel, mask) = Skeleton::compile(set)?;
    Ok(qpow(skel.radius_q(&mask)))
}

/// Diameter (q-th power). Top-level products are supported.
pub fn diam_q(set: &FanSet) -> Result<QPow, EngineError> {
    if set.has_product() {
        return Ok(qpow(ProductSet::from_set(set)?.diam_q()));
    }
    let (skel, mask) = Skeleton::compile(set)?;
    Ok(qpow(skel.diam_q(&mask)))
}

/// One ε-derivation: the points whose local diameter exceeds ε.
pub fn derive(set: &FanSet, eps_q: &QPow) -> Result<FanSet, EngineError> {
    let (skel, mask) = single(set)?;
    Ok(skel.to_fanset(&skel.derive(&mask, eps_q.value())))
}

/// The points whose local diameter exceeds `t_q`; `t_q = 0` keeps exactly
/// the non-isolated points.
pub fn filter_superlevel(set: &FanSet, t_q: &QPow) -> Result<FanSet, EngineError> {
    derive(set, t_q)
}

/// Local diameter (q-th power) at the point reached by following child
/// indices from the origin.
pub fn local_diam_q(set: &FanSet, path: &[usize]) -> Result<QPow, EngineError> {
    let (skel, mask) = single(set)?;
    let x = skel
        .node_at(path)
        .filter(|&x| mask.contains(x))
        .ok_or_else(|| EngineError::UnknownPath(path.to_vec()))?;
    Ok(qpow(skel.lambda(&mask)[x].clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep<S> {
    pub step: usize,
    pub set: S,
    /// Points of the snapshot with positive local diameter.
    pub apexes: usize,
    pub diam_q: QPow,
}

/// Snapshots of an iterated derivation; step 0 is the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTrace<S = FanSet> {
    pub eps_q: QPow,
    pub steps: Vec<TraceStep<S>>,
    /// First step at which the set is empty, if reached.
    pub emptied_at: Option<usize>,
}

impl<S> DerivationTrace<S> {
    /// `Sz_ε` if the iteration reached the empty set.
    pub fn sz_eps(&self) -> Option<Ordinal> {
        self.emptied_at.map(|k| Ordinal::nat(k as u64))
    }
}

/// Iterates [`derive`] up to `m` times, stopping early once empty.
pub fn derive_steps(
    set: &FanSet,
    eps_q: &QPow,
    m: usize,
) -> Result<(FanSet, DerivationTrace), EngineError> {
    let (skel, mut mask) = single(set)?;
    let snapshot = |step: usize, mask: &Mask| TraceStep {
        step,
        set: skel.to_fanset(mask),
        apexes: skel.apex_count(mask),
        diam_q: qpow(skel.diam_q(mask)),
    };
    let mut steps = vec![snapshot(0, &mask)];
    let mut emptied_at = mask.is_clear().then_some(0);
    for k in 1..=m {
        if emptied_at.is_some() {
            break;
        }
        mask = skel.derive(&mask, eps_q.value());
        steps.push(snapshot(k, &mask));
        if mask.is_clear() {
            emptied_at = Some(k);
        }
    }
    let trace = DerivationTrace {
        eps_q: eps_q.clone(),
        steps,
        emptied_at,
    };
    Ok((skel.to_fanset(&mask), trace))
}

/// Number of derivations needed to exhaust `mask`; always finite because
/// a deepest surviving node has zero local diameter.
pub(crate) fn exhaust(skel: &Skeleton, mask: &Mask, t_q: &Rational) -> u64 {
    let mut mask = mask.clone();
    let mut k = 0;
    while !mask.is_clear() {
        mask = skel.derive(&mask, t_q);
        k += 1;
    }
    k
}

/// Least β with `s_ε^β(F) = ∅`. Top-level products are supported.
pub fn sz_eps(set: &FanSet, eps_q: &QPow) -> Result<Ordinal, EngineError> {
    if set.has_product() {
        let k = ProductSet::from_set(set)?.exhaust(eps_q.value())?;
        return Ok(Ordinal::nat(k));
    }
    let (skel, mask) = Skeleton::compile(set)?;
    Ok(Ordinal::nat(exhaust(&skel, &mask, eps_q.value())))
}

//! Finite unions of boxes inside a q-product of fan sets.
//!
//! For a box `B = ∏ Bᵢ` the local diameter at `x` is `2·Σ ρ_{Bᵢ}(xᵢ)`: the
//! coordinates of a neighbourhood vary independently and their q-th power
//! distances add. For a union of closed boxes only the boxes containing `x`
//! meet a small neighbourhood, and a pair drawn from two different boxes is
//! never farther apart than the wider box allows (`a + b ≤ 2·max(a, b)`), so
//! the local diameter of the union is the largest one among those boxes.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::fanset::FanSet;
use super::skeleton::{Mask, Skeleton};
use super::{qpow, DerivationTrace, EngineError, TraceStep};
use crate::rational::{QPow, Rational};

/// Cap on the number of boxes (and of threshold tuples examined per box).
pub const DEFAULT_BOX_LIMIT: usize = 1 << 16;

/// Cap on explicit point enumeration.
const POINT_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct ProductSet {
    factors: Vec<Skeleton>,
    boxes: Vec<Vec<Mask>>,
}

/// Serializable view of a [`ProductSet`]: each box as its factor sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDescription {
    pub boxes: Vec<Vec<FanSet>>,
}

/// Flattens `Scale`/`ProdQ` wrappers at the top of a set into scaled factors.
pub(crate) fn flatten_product(
    set: &FanSet,
    scale: &Rational,
    out: &mut Vec<(Rational, FanSet)>,
) -> Result<(), EngineError> {
    match set {
        FanSet::ProdQ(fs) => {
            for f in fs {
                flatten_product(f, scale, out)?;
            }
        }
        FanSet::Scale { a_q, set } if set.has_product() => {
            flatten_product(set, &(scale * a_q.value()), out)?;
        }
        other if other.has_product() => {
            return Err(EngineError::OutsideExactFragment(
                "products must sit at the top level".into(),
            ))
        }
        other => out.push((scale.clone(), other.clone())),
    }
    Ok(())
}

impl ProductSet {
    /// `∏ aᵢ Kᵢ` with `aᵢ` given as q-th powers.
    pub fn new(factors: &[(QPow, FanSet)]) -> Result<Self, EngineError> {
        let scaled: Vec<(Rational, FanSet)> = factors
            .iter()
            .map(|(a, f)| (a.value().clone(), f.clone()))
            .collect();
        Self::from_scaled(&scaled)
    }

    /// Reads a top-level product (possibly under scalings); a product-free
    /// set becomes a one-factor product.
    pub fn from_set(set: &FanSet) -> Result<Self, EngineError> {
        set.validate()?;
        let mut factors = Vec::new();
        flatten_product(set, &Rational::from_integer(1.into()), &mut factors)?;
        Self::from_scaled(&factors)
    }

    fn from_scaled(factors: &[(Rational, FanSet)]) -> Result<Self, EngineError> {
        let mut skels = Vec::with_capacity(factors.len());
        let mut full = Vec::with_capacity(factors.len());
        for (a, f) in factors {
            if f.has_product() {
                return Err(EngineError::OutsideExactFragment(
                    "nested products are not supported".into(),
                ));
            }
            let (skel, mask) = Skeleton::compile(f)?;
            skels.push(skel.scaled(a));
            full.push(mask);
        }
        Ok(Self::from_parts(skels, vec![full]))
    }

    /// Builds a product from compiled factors, dropping empty, repeated and
    /// contained boxes.
    pub fn from_parts(factors: Vec<Skeleton>, boxes: Vec<Vec<Mask>>) -> Self {
        ProductSet {
            factors,
            boxes: prune(boxes),
        }
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, i: usize) -> &Skeleton {
        &self.factors[i]
    }

    pub fn factors(&self) -> &[Skeleton] {
        &self.factors
    }

    pub fn boxes(&self) -> &[Vec<Mask>] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn describe(&self) -> ProductDescription {
        ProductDescription {
            boxes: self
                .boxes
                .iter()
                .map(|b| {
                    b.iter()
                        .zip(&self.factors)
                        .map(|(m, s)| s.to_fanset(m))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn radius_q(&self) -> Rational {
        self.boxes
            .iter()
            .map(|b| {
                b.iter()
                    .zip(&self.factors)
                    .map(|(m, s)| s.radius_q(m))
                    .sum::<Rational>()
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn diam_q(&self) -> Rational {
        let mut best = Rational::zero();
        for b in &self.boxes {
            for c in &self.boxes {
                let d: Rational = b
                    .iter()
                    .zip(c)
                    .zip(&self.factors)
                    .map(|((x, y), s)| s.max_dist_q(x, y).expect("boxes are nonempty"))
                    .sum();
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    pub fn contains(&self, point: &[usize]) -> bool {
        self.boxes
            .iter()
            .any(|b| b.iter().zip(point).all(|(m, &x)| m.contains(x)))
    }

    /// Local diameter (q-th power) of the union at a point of it.
    pub fn lambda_at(&self, point: &[usize]) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for b in &self.boxes {
            if !b.iter().zip(point).all(|(m, &x)| m.contains(x)) {
                continue;
            }
            let s: Rational = b
                .iter()
                .zip(&self.factors)
                .zip(point)
                .map(|((m, skel), &x)| skel.rho(m)[x].clone())
                .sum();
            let v = s * Rational::from_integer(2.into());
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        best
    }

    /// One ε-derivation of the union, computed box by box.
    pub fn derive_step(&self, eps_q: &Rational) -> Result<ProductSet, EngineError> {
        self.derive_step_with_limit(eps_q, DEFAULT_BOX_LIMIT)
    }

    pub fn derive_step_with_limit(
        &self,
        eps_q: &Rational,
        limit: usize,
    ) -> Result<ProductSet, EngineError> {
        let mut out: Vec<Vec<Mask>> = Vec::new();
        for b in &self.boxes {
            self.derive_box(b, eps_q, limit, &mut out)?;
            if out.len() > limit {
                return Err(EngineError::BoxLimitExceeded { limit });
            }
        }
        Ok(ProductSet {
            factors: self.factors.clone(),
            boxes: prune(out),
        })
    }

    /// `{x ∈ B : 2·Σ ρᵢ(xᵢ) > ε}` is the union over minimal level tuples
    /// `(vᵢ)` with `2·Σ vᵢ > ε` of the boxes `∏ {ρᵢ ≥ vᵢ}`.
    fn derive_box(
        &self,
        b: &[Mask],
        eps_q: &Rational,
        limit: usize,
        out: &mut Vec<Vec<Mask>>,
    ) -> Result<(), EngineError> {
        let n = self.arity();
        let two = Rational::from_integer(2.into());
        let rhos: Vec<Vec<Rational>> = b
            .iter()
            .zip(&self.factors)
            .map(|(m, s)| s.rho(m))
            .collect();
        let levels: Vec<Vec<Rational>> = b
            .iter()
            .zip(&rhos)
            .map(|(m, r)| {
                let set: BTreeSet<Rational> = m.ones().map(|x| r[x].clone()).collect();
                set.into_iter().collect()
            })
            .collect();
        let total: usize = levels
            .iter()
            .try_fold(1usize, |acc, l| acc.checked_mul(l.len()))
            .unwrap_or(usize::MAX);
        if total > limit {
            return Err(EngineError::BoxLimitExceeded { limit });
        }
        let mut idx = vec![0usize; n];
        loop {
            let sum: Rational = (0..n).map(|i| &levels[i][idx[i]]).sum();
            if &sum * &two > *eps_q {
                let minimal = (0..n).all(|i| {
                    idx[i] == 0 || {
                        let lowered = &sum - &levels[i][idx[i]] + &levels[i][idx[i] - 1];
                        lowered * &two <= *eps_q
                    }
                });
                if minimal {
                    out.push(
                        (0..n)
                            .map(|i| self.factors[i].rho_at_least(&b[i], &rhos[i], &levels[i][idx[i]]))
                            .collect(),
                    );
                }
            }
            // Odometer over level indices.
            let mut i = 0;
            loop {
                if i == n {
                    return Ok(());
                }
                idx[i] += 1;
                if idx[i] < levels[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    /// Number of derivations needed to reach the empty set.
    pub fn exhaust(&self, eps_q: &Rational) -> Result<u64, EngineError> {
        let mut cur = self.clone();
        let mut k = 0;
        while !cur.is_empty() {
            cur = cur.derive_step(eps_q)?;
            k += 1;
        }
        Ok(k)
    }

    /// Up to `m` derivations, stopping early once empty.
    pub fn derive_steps(&self, eps_q: &Rational, m: usize) -> Result<ProductSet, EngineError> {
        let mut cur = self.clone();
        for _ in 0..m {
            if cur.is_empty() {
                break;
            }
            cur = cur.derive_step(eps_q)?;
        }
        Ok(cur)
    }

    /// Iterates with snapshots of every stage.
    pub fn trace(
        &self,
        eps_q: &QPow,
        m: usize,
    ) -> Result<(ProductSet, DerivationTrace<ProductDescription>), EngineError> {
        let snapshot = |step: usize, p: &ProductSet| -> Result<_, EngineError> {
            Ok(TraceStep {
                step,
                set: p.describe(),
                apexes: p.count_positive()?,
                diam_q: qpow(p.diam_q()),
            })
        };
        let mut cur = self.clone();
        let mut steps = vec![snapshot(0, &cur)?];
        let mut emptied_at = cur.is_empty().then_some(0);
        for k in 1..=m {
            if emptied_at.is_some() {
                break;
            }
            cur = cur
                .derive_step(eps_q.value())
                .map_err(|e| EngineError::AtStep {
                    step: k,
                    source: Box::new(e),
                })?;
            steps.push(snapshot(k, &cur)?);
            if cur.is_empty() {
                emptied_at = Some(k);
            }
        }
        let trace = DerivationTrace {
            eps_q: eps_q.clone(),
            steps,
            emptied_at,
        };
        Ok((cur, trace))
    }

    fn count_positive(&self) -> Result<usize, EngineError> {
        Ok(self
            .points()?
            .iter()
            .filter(|p| self.lambda_at(p).is_some_and(|l| l > Rational::zero()))
            .count())
    }

    /// Every point of the union as a tuple of skeleton nodes.
    pub fn points(&self) -> Result<BTreeSet<Vec<usize>>, EngineError> {
        let mut out = BTreeSet::new();
        for b in &self.boxes {
            let members: Vec<Vec<usize>> = b.iter().map(|m| m.ones().collect()).collect();
            let count = members
                .iter()
                .try_fold(1usize, |acc, v| acc.checked_mul(v.len()))
                .unwrap_or(usize::MAX);
            if count.saturating_add(out.len()) > POINT_LIMIT {
                return Err(EngineError::BoxLimitExceeded { limit: POINT_LIMIT });
            }
            let mut idx = vec![0usize; members.len()];
            'outer: loop {
                out.insert(idx.iter().zip(&members).map(|(&i, v)| v[i]).collect());
                let mut i = 0;
                loop {
                    if i == members.len() {
                        break 'outer;
                    }
                    idx[i] += 1;
                    if idx[i] < members[i].len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
            }
        }
        Ok(out)
    }

    /// A point of `self` outside `other`, if any. Both must share factors.
    pub fn uncovered_point(&self, other: &ProductSet) -> Option<Vec<usize>> {
        debug_assert_eq!(self.arity(), other.arity());
        for b in &self.boxes {
            let covers: Vec<&[Mask]> = other.boxes.iter().map(Vec::as_slice).collect();
            let mut prefix = Vec::with_capacity(b.len());
            if let Some(w) = uncovered_in_box(b, &covers, &mut prefix) {
                return Some(w);
            }
        }
        None
    }

    pub fn is_subset(&self, other: &ProductSet) -> bool {
        self.uncovered_point(other).is_none()
    }

    /// Same factors, boxes restricted to the chosen coordinates.
    pub fn project(&self, groups: &[usize]) -> ProductSet {
        let factors = groups.iter().map(|&g| self.factors[g].clone()).collect();
        let boxes = self
            .boxes
            .iter()
            .map(|b| groups.iter().map(|&g| b[g].clone()).collect())
            .collect();
        ProductSet {
            factors,
            boxes: prune(boxes),
        }
    }
}

/// Searches the box `b[k..]` (with `prefix` fixing the first k coordinates)
/// for a point outside every cover box. Points are grouped by which covers
/// contain them, since only that pattern matters further down.
fn uncovered_in_box(b: &[Mask], covers: &[&[Mask]], prefix: &mut Vec<usize>) -> Option<Vec<usize>> {
    let k = prefix.len();
    if covers.is_empty() {
        let mut w = prefix.clone();
        w.extend(b[k..].iter().map(|m| m.ones().next().expect("boxes are nonempty")));
        return Some(w);
    }
    if k == b.len() {
        return None;
    }
    if covers
        .iter()
        .any(|c| (k..b.len()).all(|i| b[i].is_subset(&c[i])))
    {
        return None;
    }
    let mut classes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for x in b[k].ones() {
        let hits: Vec<usize> = (0..covers.len()).filter(|&j| covers[j][k].contains(x)).collect();
        classes.entry(hits).or_insert(x);
    }
    for (hits, x) in classes {
        let sub: Vec<&[Mask]> = hits.iter().map(|&j| covers[j]).collect();
        prefix.push(x);
        let found = uncovered_in_box(b, &sub, prefix);
        prefix.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Removes duplicate boxes and boxes contained in another one.
fn prune(boxes: Vec<Vec<Mask>>) -> Vec<Vec<Mask>> {
    let mut boxes: Vec<Vec<Mask>> = boxes
        .into_iter()
        .filter(|b| b.iter().all(|m| !m.is_clear()))
        .collect();
    boxes.sort_by(|a, b| {
        let ka: Vec<usize> = a.iter().map(|m| m.count_ones(..)).collect();
        let kb: Vec<usize> = b.iter().map(|m| m.count_ones(..)).collect();
        kb.iter().sum::<usize>().cmp(&ka.iter().sum()).then_with(|| {
            let la: Vec<Vec<usize>> = a.iter().map(|m| m.ones().collect()).collect();
            let lb: Vec<Vec<usize>> = b.iter().map(|m| m.ones().collect()).collect();
            la.cmp(&lb)
        })
    });
    let mut kept: Vec<Vec<Mask>> = Vec::new();
    for b in boxes {
        let dominated = kept
            .iter()
            .any(|k| b.iter().zip(k).all(|(x, y)| x.is_subset(y)));
        if !dominated {
            kept.push(b);
        }
    }
    kept
}

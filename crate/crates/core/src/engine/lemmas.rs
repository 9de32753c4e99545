//! Finite, exact checks of the containment estimates for unions, products
//! and coordinate projections.
//!
//! Each check computes both sides of a containment with the exact engine and
//! reports a witness point when it fails. Where a threshold involves an
//! irrational power, it is rounded toward the side that can only make the
//! right-hand side larger (or the left-hand side smaller), so a reported
//! failure is always genuine.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::fanset::{Component, FanSet};
use super::product::{flatten_product, ProductSet};
use super::skeleton::{Mask, Skeleton};
use super::{exhaust, EngineError};
use crate::calculus::{frount_m_qpow, sigma};
use crate::ordinal::Ordinal;
use crate::rational::{pow_bounds, Exponent, QPow, Rational};

fn invalid(msg: &str) -> EngineError {
    EngineError::InvalidParams(msg.to_string())
}

/// Lower bound of `x_q / c^q`, i.e. of `(x/c)^q`.
fn shrink_lo(x_q: &Rational, c: i64, q: &Exponent) -> Rational {
    x_q / pow_bounds(&Rational::from_integer(c.into()), q.value()).hi
}

fn iterate(skel: &Skeleton, mask: &Mask, t_q: &Rational, steps: usize) -> Mask {
    let mut m = mask.clone();
    for _ in 0..steps {
        if m.is_clear() {
            break;
        }
        m = skel.derive(&m, t_q);
    }
    m
}

fn union_of(skel: &Skeleton, masks: &[Mask]) -> Mask {
    let mut out = skel.empty_mask();
    for m in masks {
        out.union_with(m);
    }
    out
}

/// Outcome of a containment check `lhs ⊆ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub holds: bool,
    pub lhs_empty: bool,
    pub rhs_empty: bool,
    /// A point of the left side missing from the right side, given per
    /// coordinate as a child-index path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<Vec<usize>>>,
}

impl ContainmentReport {
    fn single(skel: &Skeleton, lhs: &Mask, rhs: &Mask) -> Self {
        let witness = lhs.difference(rhs).next();
        ContainmentReport {
            holds: witness.is_none(),
            lhs_empty: lhs.is_clear(),
            rhs_empty: rhs.is_clear(),
            counterexample: witness.map(|x| vec![skel.path(x)]),
        }
    }

    fn product(lhs: &ProductSet, rhs: &ProductSet) -> Self {
        let witness = lhs.uncovered_point(rhs);
        ContainmentReport {
            holds: witness.is_none(),
            lhs_empty: lhs.is_empty(),
            rhs_empty: rhs.is_empty(),
            counterexample: witness.map(|w| {
                w.iter()
                    .enumerate()
                    .map(|(i, &x)| lhs.factor(i).path(x))
                    .collect()
            }),
        }
    }
}

fn compile_union(ks: &[FanSet]) -> Result<(Skeleton, Vec<Mask>), EngineError> {
    if ks.iter().any(FanSet::has_product) {
        return Err(EngineError::OutsideExactFragment(
            "union members must be product-free".into(),
        ));
    }
    Skeleton::compile_parts(ks)
}

/// `s_ε^k(⋃ Kᵢ) ⊆ ⋃ s_{ε/2}^k(Kᵢ)` for a finite number of steps `k`. The
/// sets share the origin and otherwise sit on disjoint axes.
pub fn union_check_halving(
    ks: &[FanSet],
    eps_q: &QPow,
    q: &Exponent,
    steps: usize,
) -> Result<ContainmentReport, EngineError> {
    let (skel, masks) = compile_union(ks)?;
    let whole = union_of(&skel, &masks);
    let lhs = iterate(&skel, &whole, eps_q.value(), steps);
    let half = shrink_lo(eps_q.value(), 2, q);
    let parts: Vec<Mask> = masks.iter().map(|m| iterate(&skel, m, &half, steps)).collect();
    let rhs = union_of(&skel, &parts);
    Ok(ContainmentReport::single(&skel, &lhs, &rhs))
}

/// `s_ε^{mn}(K₁ ∪ … ∪ Kₙ) ⊆ ⋃ s_ε^m(Kᵢ)`.
pub fn union_check_blocks(
    ks: &[FanSet],
    eps_q: &QPow,
    m: usize,
) -> Result<ContainmentReport, EngineError> {
    let (skel, masks) = compile_union(ks)?;
    let whole = union_of(&skel, &masks);
    let lhs = iterate(&skel, &whole, eps_q.value(), m * ks.len());
    let parts: Vec<Mask> = masks
        .iter()
        .map(|mk| iterate(&skel, mk, eps_q.value(), m))
        .collect();
    let rhs = union_of(&skel, &parts);
    Ok(ContainmentReport::single(&skel, &lhs, &rhs))
}

/// Per-factor sets `s_{εᵢ}(C)` reachable from `C`, each with the largest
/// budget `aᵢ·εᵢ^q` that still yields it. The budget is a supremum that is
/// not attained (except for `εᵢ = 0`, which keeps `C` by convention), so
/// callers compare it strictly.
fn factor_choices(skel: &Skeleton, cur: &Mask, a_q: &Rational) -> Vec<(Rational, Mask)> {
    let lam = skel.lambda(cur);
    let mut levels: Vec<Rational> = cur.ones().map(|x| lam[x].clone()).collect();
    levels.sort();
    levels.dedup();
    let mut out = vec![(Rational::zero(), cur.clone())];
    let mut prev = Rational::zero();
    for v in levels.into_iter().filter(|v| v.is_positive()) {
        // Any εᵢ^q in [prev, v) gives {λ > εᵢ^q} = {λ ≥ v}.
        out.push((a_q * &v, skel.derive(cur, &prev)));
        prev = v;
    }
    out
}

/// All combinations of per-factor choices whose budgets sum past `thr_q`.
fn budget_boxes(
    choices: &[Vec<(Rational, Mask)>],
    thr_q: &Rational,
    limit: usize,
) -> Result<Vec<Vec<Mask>>, EngineError> {
    let n = choices.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    if choices.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    loop {
        let sum: Rational = (0..n).map(|i| &choices[i][idx[i]].0).sum();
        if sum > *thr_q {
            out.push((0..n).map(|i| choices[i][idx[i]].1.clone()).collect());
            if out.len() > limit {
                return Err(EngineError::BoxLimitExceeded { limit });
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

struct Factors {
    product: ProductSet,
    unscaled: Vec<Skeleton>,
    full: Vec<Mask>,
    a_q: Vec<Rational>,
}

fn compile_factors(factors: &[(QPow, FanSet)]) -> Result<Factors, EngineError> {
    let product = ProductSet::new(factors)?;
    let mut unscaled = Vec::new();
    let mut full = Vec::new();
    for (_, f) in factors {
        let (s, m) = Skeleton::compile(f)?;
        unscaled.push(s);
        full.push(m);
    }
    Ok(Factors {
        product,
        unscaled,
        full,
        a_q: factors.iter().map(|(a, _)| a.value().clone()).collect(),
    })
}

/// One-step product estimate: `s_ε(∏ aᵢKᵢ) ⊆ ⋃_{(εᵢ) ∈ A_δ} ∏ aᵢ s_{εᵢ}(Kᵢ)`
/// for `0 < δ < ε`, where `A_δ` is the set of budgets with
/// `Σ aᵢ^q εᵢ^q ≥ δ^q`, `εᵢ ≤ diam Kᵢ`, and `s_0` is the identity.
///
/// The union over the continuum `A_δ` is evaluated exactly: only finitely
/// many distinct sets `s_{εᵢ}(Kᵢ)` occur, and each is available for budgets
/// up to (not including) the next local-diameter level.
pub fn techlem1_check(
    factors: &[(QPow, FanSet)],
    eps_q: &QPow,
    delta_q: &QPow,
) -> Result<ContainmentReport, EngineError> {
    if delta_q.is_zero() || delta_q >= eps_q {
        return Err(invalid("requires 0 < delta < eps"));
    }
    let f = compile_factors(factors)?;
    let lhs = f.product.derive_step(eps_q.value())?;
    let choices: Vec<_> = (0..factors.len())
        .map(|i| factor_choices(&f.unscaled[i], &f.full[i], &f.a_q[i]))
        .collect();
    let boxes = budget_boxes(&choices, delta_q.value(), super::DEFAULT_BOX_LIMIT)?;
    let rhs = ProductSet::from_parts(f.product.factors().to_vec(), boxes);
    Ok(ContainmentReport::product(&lhs, &rhs))
}

/// m-step product estimate at finite height: `s_ε^m(∏ aᵢKᵢ)` lies in the
/// union, over m budgets from `A_{δ/2}`, of the products of the m-fold
/// per-factor derivations.
pub fn techlem2_check(
    factors: &[(QPow, FanSet)],
    eps_q: &QPow,
    delta_q: &QPow,
    q: &Exponent,
    m: usize,
) -> Result<ContainmentReport, EngineError> {
    if delta_q.is_zero() || delta_q >= eps_q {
        return Err(invalid("requires 0 < delta < eps"));
    }
    if m == 0 {
        return Err(invalid("requires m >= 1"));
    }
    let f = compile_factors(factors)?;
    let lhs = f.product.derive_steps(eps_q.value(), m)?;
    let thr = shrink_lo(delta_q.value(), 2, q);
    let mut states = ProductSet::from_parts(f.unscaled.clone(), vec![f.full.clone()]);
    for _ in 0..m {
        let mut next = Vec::new();
        for state in states.boxes() {
            let choices: Vec<_> = (0..factors.len())
                .map(|i| factor_choices(&f.unscaled[i], &state[i], &f.a_q[i]))
                .collect();
            next.extend(budget_boxes(&choices, &thr, super::DEFAULT_BOX_LIMIT)?);
            if next.len() > super::DEFAULT_BOX_LIMIT {
                return Err(EngineError::BoxLimitExceeded {
                    limit: super::DEFAULT_BOX_LIMIT,
                });
            }
        }
        // Pruning drops dominated states; derivations are monotone, so they
        // only lead to dominated states.
        states = ProductSet::from_parts(f.unscaled.clone(), next);
    }
    let rhs = ProductSet::from_parts(f.product.factors().to_vec(), states.boxes().to_vec());
    Ok(ContainmentReport::product(&lhs, &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVerdict {
    Empty,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductBound {
    pub verdict: BoundVerdict,
    /// Number of steps after which the product is claimed empty.
    pub m_big: u64,
    /// Largest factor diameter (q-th power).
    pub d_q: QPow,
    /// Threshold (q-th power, rounded down) used for the factor test.
    pub kill_q: QPow,
}

/// If every factor satisfies `s_{ε/8}^m(Kᵢ) = ∅` then `s_ε^M(∏ aᵢKᵢ) = ∅`,
/// where M is the least integer with `(2^q − 1)ε^q M ≥ 8^q d^q (m − 1)` and
/// `d` the largest factor diameter. Requires `Σ aᵢ^q ≤ 1` and `m ≥ 2`.
pub fn bound_product_derivation(
    factors: &[(QPow, FanSet)],
    eps_q: &QPow,
    q: &Exponent,
    m: u64,
) -> Result<ProductBound, EngineError> {
    if m < 2 {
        return Err(invalid("requires m >= 2"));
    }
    if eps_q.is_zero() {
        return Err(invalid("requires eps > 0"));
    }
    let total: Rational = factors.iter().map(|(a, _)| a.value()).sum();
    if total > Rational::one() {
        return Err(invalid("scalars must satisfy sum a_i^q <= 1"));
    }
    let mut d_q = Rational::zero();
    let mut compiled = Vec::new();
    for (_, f) in factors {
        if f.has_product() {
            return Err(EngineError::OutsideExactFragment("factors must be product-free".into()));
        }
        let (s, mk) = Skeleton::compile(f)?;
        d_q = d_q.max(s.diam_q(&mk));
        compiled.push((s, mk));
    }
    let m_big = frount_m_qpow(&d_q, eps_q.value(), q.value(), m)?;
    let kill = shrink_lo(eps_q.value(), 8, q);
    let all_die = compiled
        .iter()
        .all(|(s, mk)| exhaust(s, mk, &kill) <= m);
    Ok(ProductBound {
        verdict: if all_die {
            BoundVerdict::Empty
        } else {
            BoundVerdict::Unknown
        },
        m_big,
        d_q: QPow::new(d_q).expect("nonnegative"),
        kill_q: QPow::new(kill).expect("nonnegative"),
    })
}

/// Runs the exact product derivation for `m_big` steps and reports whether
/// it is empty.
pub fn verify_product_bound(
    factors: &[(QPow, FanSet)],
    eps_q: &QPow,
    m_big: u64,
) -> Result<bool, EngineError> {
    let p = ProductSet::new(factors)?;
    let mut cur = p;
    for _ in 0..m_big {
        if cur.is_empty() {
            break;
        }
        cur = cur.derive_step(eps_q.value())?;
    }
    Ok(cur.is_empty())
}

/// Scaled factors of a top-level product.
pub fn product_factors(set: &FanSet) -> Result<Vec<(Rational, FanSet)>, EngineError> {
    let mut out = Vec::new();
    flatten_product(set, &Rational::one(), &mut out)?;
    Ok(out)
}

fn check_groups(groups: &[usize], count: usize) -> Result<Vec<usize>, EngineError> {
    if groups.is_empty() {
        return Err(invalid("at least one axis group is required"));
    }
    if let Some(&g) = groups.iter().find(|&&g| g >= count) {
        return Err(EngineError::GroupNotFound(g));
    }
    let mut g = groups.to_vec();
    g.sort_unstable();
    g.dedup();
    Ok(g)
}

/// Keeps the coordinates of the chosen axis groups: the factors of a
/// top-level product, or the components of a disjoint union.
pub fn project(set: &FanSet, groups: &[usize]) -> Result<FanSet, EngineError> {
    match set {
        FanSet::Scale { a_q, set } => Ok(FanSet::scale(a_q.clone(), project(set, groups)?)),
        FanSet::ProdQ(_) => {
            let factors = product_factors(set)?;
            let g = check_groups(groups, factors.len())?;
            Ok(FanSet::ProdQ(
                g.iter()
                    .map(|&i| {
                        let (a, f) = &factors[i];
                        if a.is_one() {
                            f.clone()
                        } else {
                            FanSet::scale(QPow::new(a.clone()).expect("nonnegative"), f.clone())
                        }
                    })
                    .collect(),
            ))
        }
        FanSet::DisjUnion(cs) => {
            let g = check_groups(groups, cs.len())?;
            let kept: Vec<Component> = g.iter().map(|&i| cs[i].clone()).collect();
            let dropped_nonempty = (0..cs.len())
                .filter(|i| !g.contains(i))
                .any(|i| !cs[i].set.is_empty());
            let origin_kept = kept
                .iter()
                .any(|c| c.shift_q.is_none() && c.set.contains_origin());
            let mut out = kept;
            if dropped_nonempty && !origin_kept {
                out.insert(0, Component::at_origin(FanSet::Sing));
            }
            Ok(FanSet::DisjUnion(out))
        }
        _ => Err(EngineError::OutsideExactFragment(
            "projection needs a product or a disjoint union".into(),
        )),
    }
}

/// A set split into axis groups, with every projection on one geometry.
enum Grouped {
    Product(ProductSet),
    Disjoint { skel: Skeleton, parts: Vec<Mask> },
}

enum GroupedSet {
    Product(ProductSet),
    Single(Mask),
}

impl Grouped {
    fn new(set: &FanSet) -> Result<Self, EngineError> {
        set.validate()?;
        if set.has_product() {
            return Ok(Grouped::Product(ProductSet::from_set(set)?));
        }
        let mut scale = Rational::one();
        let mut cur = set;
        while let FanSet::Scale { a_q, set } = cur {
            scale *= a_q.value();
            cur = set;
        }
        let FanSet::DisjUnion(cs) = cur else {
            return Err(EngineError::OutsideExactFragment(
                "axis groups need a product or a disjoint union".into(),
            ));
        };
        let a_q = QPow::new(scale).expect("nonnegative");
        let parts: Vec<FanSet> = cs
            .iter()
            .map(|c| FanSet::scale(a_q.clone(), FanSet::DisjUnion(vec![c.clone()])))
            .collect();
        let (skel, parts) = Skeleton::compile_parts(&parts)?;
        Ok(Grouped::Disjoint { skel, parts })
    }

    fn count(&self) -> usize {
        match self {
            Grouped::Product(p) => p.arity(),
            Grouped::Disjoint { parts, .. } => parts.len(),
        }
    }

    fn whole(&self) -> GroupedSet {
        match self {
            Grouped::Product(p) => GroupedSet::Product(p.clone()),
            Grouped::Disjoint { skel, parts } => GroupedSet::Single(union_of(skel, parts)),
        }
    }

    fn projection(&self, groups: &[usize]) -> GroupedSet {
        match self {
            Grouped::Product(p) => GroupedSet::Product(p.project(groups)),
            Grouped::Disjoint { skel, parts } => {
                let kept: Vec<Mask> = groups.iter().map(|&g| parts[g].clone()).collect();
                let mut m = union_of(skel, &kept);
                let dropped = (0..parts.len())
                    .filter(|i| !groups.contains(i))
                    .any(|i| !parts[i].is_clear());
                if dropped {
                    m.insert(0);
                }
                GroupedSet::Single(m)
            }
        }
    }

    fn radius_q(&self) -> Rational {
        match self {
            Grouped::Product(p) => p.radius_q(),
            Grouped::Disjoint { skel, parts } => skel.radius_q(&union_of(skel, parts)),
        }
    }

    fn derive(&self, s: &GroupedSet, t_q: &Rational, steps: usize) -> Result<GroupedSet, EngineError> {
        Ok(match (self, s) {
            (_, GroupedSet::Product(p)) => GroupedSet::Product(p.derive_steps(t_q, steps)?),
            (Grouped::Disjoint { skel, .. }, GroupedSet::Single(m)) => {
                GroupedSet::Single(iterate(skel, m, t_q, steps))
            }
            (Grouped::Product(_), GroupedSet::Single(_)) => unreachable!("product sets stay products"),
        })
    }

    fn sz(&self, s: &GroupedSet, t_q: &Rational) -> Result<u64, EngineError> {
        match (self, s) {
            (_, GroupedSet::Product(p)) => p.exhaust(t_q),
            (Grouped::Disjoint { skel, .. }, GroupedSet::Single(m)) => Ok(exhaust(skel, m, t_q)),
            (Grouped::Product(_), GroupedSet::Single(_)) => unreachable!("product sets stay products"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TvlReport {
    pub holds: bool,
    /// Points of `s_ε^α(K)`.
    pub survivors: usize,
    /// Survivors passing the norm condition.
    pub checked: usize,
    /// Survivors whose projection is missing, per coordinate as paths.
    pub violations: Vec<Vec<Vec<usize>>>,
}

/// Projection estimate: if `x ∈ s_ε^α(K)` and
/// `‖U_R x‖^q > |K|^q − ((ε−δ)/2)^q` then `U_R x ∈ s_δ^α(U_R K)`.
///
/// Here `eps` and `delta` are magnitudes, not q-th powers.
pub fn tvl_check(
    k: &FanSet,
    groups: &[usize],
    eps: &Rational,
    delta: &Rational,
    q: &Exponent,
    alpha: usize,
) -> Result<TvlReport, EngineError> {
    if !delta.is_positive() || delta >= eps {
        return Err(invalid("requires 0 < delta < eps"));
    }
    let g = Grouped::new(k)?;
    let groups = check_groups(groups, g.count())?;
    let eps_q = q.pow(eps).hi;
    let delta_q = q.pow(delta).lo;
    let gap_q = q.pow(&((eps - delta) / Rational::from_integer(2.into()))).lo;
    let thr = g.radius_q() - gap_q;
    let lhs = g.derive(&g.whole(), &eps_q, alpha)?;
    let rhs = g.derive(&g.projection(&groups), &delta_q, alpha)?;
    let mut report = TvlReport {
        holds: true,
        survivors: 0,
        checked: 0,
        violations: Vec::new(),
    };
    match (&g, &lhs, &rhs) {
        (Grouped::Product(_), GroupedSet::Product(l), GroupedSet::Product(r)) => {
            for x in l.points()? {
                report.survivors += 1;
                let norm: Rational = groups.iter().map(|&i| l.factor(i).norm_q(x[i])).sum();
                if norm <= thr {
                    continue;
                }
                report.checked += 1;
                let y: Vec<usize> = groups.iter().map(|&i| x[i]).collect();
                if !r.contains(&y) {
                    report
                        .violations
                        .push(x.iter().enumerate().map(|(i, &n)| l.factor(i).path(n)).collect());
                }
            }
        }
        (Grouped::Disjoint { skel, parts }, GroupedSet::Single(l), GroupedSet::Single(r)) => {
            for x in l.ones() {
                report.survivors += 1;
                let kept = groups.iter().any(|&i| parts[i].contains(x));
                let norm = if kept { skel.norm_q(x).clone() } else { Rational::zero() };
                if norm <= thr {
                    continue;
                }
                report.checked += 1;
                let y = if kept { x } else { 0 };
                if !r.contains(y) {
                    report.violations.push(vec![skel.path(x)]);
                }
            }
        }
        _ => unreachable!("derivation keeps the representation"),
    }
    report.holds = report.violations.is_empty();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Postdoc2Report {
    pub holds: bool,
    /// Largest `Sz_δ` over projections onto nonempty sets of axis groups.
    pub eta: Ordinal,
    pub sigma: u64,
    pub bound: Ordinal,
    pub sz: Ordinal,
}

/// Largest number of axis groups accepted by [`postdoc2_check`].
const MAX_GROUPS: usize = 8;

/// Finite-height projection bound: with `η` the largest `Sz_δ` of the
/// projections onto finitely many axis groups, `Sz_ε(K) ≤ η·σ(|K|, ε, δ, q)`.
///
/// `eps` and `delta` are magnitudes.
pub fn postdoc2_check(
    k: &FanSet,
    eps: &Rational,
    delta: &Rational,
    q: &Exponent,
) -> Result<Postdoc2Report, EngineError> {
    if !delta.is_positive() || delta >= eps {
        return Err(invalid("requires 0 < delta < eps"));
    }
    let g = Grouped::new(k)?;
    let n = g.count();
    if n == 0 || n > MAX_GROUPS {
        return Err(invalid("between 1 and 8 axis groups are supported"));
    }
    let eps_q = q.pow(eps).hi;
    let delta_q = q.pow(delta).lo;
    let mut eta = 1u64;
    for subset in 1u32..(1 << n) {
        let groups: Vec<usize> = (0..n).filter(|i| subset & (1 << i) != 0).collect();
        eta = eta.max(g.sz(&g.projection(&groups), &delta_q)?);
    }
    let k_abs = q.root(&g.radius_q()).hi;
    let s = sigma(&k_abs, eps, delta, q.value())?;
    let eta = Ordinal::nat(eta);
    let bound = eta
        .checked_mul_nat(s)
        .ok_or(EngineError::Calc(crate::calculus::CalcError::Overflow))?;
    let sz = Ordinal::nat(g.sz(&g.whole(), &eps_q)?);
    Ok(Postdoc2Report {
        holds: sz <= bound,
        eta,
        sigma: s,
        bound,
        sz,
    })
}

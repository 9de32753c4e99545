//! Seeded verification suites. Each sample draws its own instance from a
//! dedicated random stream, runs one exact check and records the outcome.

use clap::ValueEnum;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use szlenk::calculus::{
    admissible_index_value, direct_sum_index, Admissibility, Atom, DirectSum, EpsProfile,
    SpaceExpr, SumExponent, Summands, Verdict,
};
use szlenk::engine::{
    bound_product_derivation, bq_cover, bq_member, postdoc2_check, techlem1_check,
    techlem2_check, tvl_check, union_check_blocks, union_check_halving, verify_product_bound,
    BoundVerdict, BqPoint, Component, ContainmentReport, EngineError, FanSet, Skeleton,
};
use szlenk::ordinal::Ordinal;
use szlenk::rational::{format_rational, QPow, Rational};

use crate::gen::{Gen, MAX_DEPTH, MAX_FACTORS};
use crate::report::Case;

/// Points tested against each cover in the membership suite.
pub const POINTS_PER_COVER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// `s_ε^k(⋃ Kᵢ) ⊆ ⋃ s_{ε/2}^k(Kᵢ)`.
    #[value(alias = "unionlemma1")]
    UnionHalving,
    /// `s_ε^{mn}(⋃ Kᵢ) ⊆ ⋃ s_ε^m(Kᵢ)` for n sets.
    #[value(alias = "unionlemma2")]
    UnionBlocks,
    /// One product derivation inside the budget-indexed union.
    #[value(alias = "techlem1")]
    ProductStep,
    /// m product derivations inside the iterated budget union.
    #[value(alias = "techlem2")]
    ProductIterate,
    /// Emptiness verdicts of the product bound, confirmed by iteration.
    #[value(alias = "techlema")]
    ProductBound,
    /// Projections of surviving points with large norm survive.
    #[value(alias = "tvl")]
    Projection,
    /// `Sz_ε(K) ≤ η·σ` from the heights of the projections.
    #[value(alias = "postdoc2")]
    ProjectionHeight,
    /// Sampled points of B_q sets lie in the integer cover.
    #[value(alias = "lecondsast")]
    CoverMembership,
    /// Index of finite direct sums against the least ω-power rule.
    #[value(alias = "punibound_finite", alias = "punibound-finite")]
    DirectSumFinite,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::UnionHalving,
        Suite::UnionBlocks,
        Suite::ProductStep,
        Suite::ProductIterate,
        Suite::ProductBound,
        Suite::Projection,
        Suite::ProjectionHeight,
        Suite::CoverMembership,
        Suite::DirectSumFinite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::UnionHalving => "union-halving",
            Suite::UnionBlocks => "union-blocks",
            Suite::ProductStep => "product-step",
            Suite::ProductIterate => "product-iterate",
            Suite::ProductBound => "product-bound",
            Suite::Projection => "projection",
            Suite::ProjectionHeight => "projection-height",
            Suite::CoverMembership => "cover-membership",
            Suite::DirectSumFinite => "direct-sum-finite",
        }
    }

    pub fn default_samples(self) -> u64 {
        match self {
            Suite::UnionHalving | Suite::UnionBlocks | Suite::ProductStep => 200,
            Suite::ProjectionHeight => 50,
            Suite::CoverMembership => 20,
            _ => 100,
        }
    }

    fn sample(self, g: &mut Gen) -> Result<(Value, Value, bool, Option<Value>), String> {
        let r = match self {
            Suite::UnionHalving => union_halving(g),
            Suite::UnionBlocks => union_blocks(g),
            Suite::ProductStep => product_step(g),
            Suite::ProductIterate => product_iterate(g),
            Suite::ProductBound => product_bound(g),
            Suite::Projection => projection(g),
            Suite::ProjectionHeight => projection_height(g),
            Suite::CoverMembership => cover_membership(g),
            Suite::DirectSumFinite => return direct_sum_finite(g),
        };
        r.map_err(|e| e.to_string())
    }
}

type Outcome = Result<(Value, Value, bool, Option<Value>), EngineError>;

/// Runs `samples` independent instances in parallel; the result order is
/// the sample order.
pub fn run(suite: Suite, samples: u64, seed: u64) -> Vec<Case> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = Gen::for_sample(seed, i);
            match suite.sample(&mut g) {
                Ok((input, output, pass, counterexample)) => Case {
                    id: i,
                    input,
                    output,
                    pass,
                    counterexample,
                    error: None,
                },
                Err(e) => Case::failed(i, Value::Null, e),
            }
        })
        .collect()
}

fn q_str(q: &QPow) -> String {
    q.to_string()
}

fn containment(
    input: Value,
    r: ContainmentReport,
) -> (Value, Value, bool, Option<Value>) {
    let cx = r.counterexample.as_ref().map(|c| json!(c));
    let output = json!({"lhs_empty": r.lhs_empty, "rhs_empty": r.rhs_empty});
    (input, output, r.holds, cx)
}

fn union_members(g: &mut Gen) -> Vec<FanSet> {
    (0..g.range(1, MAX_FACTORS)).map(|_| g.fanset(MAX_DEPTH)).collect()
}

fn union_halving(g: &mut Gen) -> Outcome {
    let ks = union_members(g);
    let eps_q = g.weight();
    let q = g.exponent();
    let steps = g.range(1, 3);
    let r = union_check_halving(&ks, &eps_q, &q, steps)?;
    let input = json!({"sets": ks, "eps_q": q_str(&eps_q), "q": q, "steps": steps});
    Ok(containment(input, r))
}

fn union_blocks(g: &mut Gen) -> Outcome {
    let ks = union_members(g);
    let eps_q = g.weight();
    let m = g.range(1, 3);
    let r = union_check_blocks(&ks, &eps_q, m)?;
    let input = json!({"sets": ks, "eps_q": q_str(&eps_q), "m": m});
    Ok(containment(input, r))
}

/// Product instances stay small enough for exact box enumeration: three
/// factors are kept to depth two.
fn product_factors(g: &mut Gen, normalized: bool) -> Vec<(QPow, FanSet)> {
    let n = g.range(1, MAX_FACTORS);
    let depth = if n == MAX_FACTORS { 2 } else { MAX_DEPTH };
    g.factors(n, depth, normalized)
}

fn factors_json(f: &[(QPow, FanSet)]) -> Value {
    json!(f
        .iter()
        .map(|(a, s)| json!({"a_q": q_str(a), "set": s}))
        .collect::<Vec<_>>())
}

fn eps_delta(g: &mut Gen) -> (QPow, QPow) {
    let eps = g.positive();
    let delta = &eps * g.proper_unit();
    (QPow::new(eps).expect("positive"), QPow::new(delta).expect("positive"))
}

fn product_step(g: &mut Gen) -> Outcome {
    let factors = product_factors(g, false);
    let (eps_q, delta_q) = eps_delta(g);
    let r = techlem1_check(&factors, &eps_q, &delta_q)?;
    let input = json!({"factors": factors_json(&factors), "eps_q": q_str(&eps_q), "delta_q": q_str(&delta_q)});
    Ok(containment(input, r))
}

fn product_iterate(g: &mut Gen) -> Outcome {
    let factors = product_factors(g, false);
    let (eps_q, delta_q) = eps_delta(g);
    let q = g.exponent();
    let m = g.range(1, 3);
    let r = techlem2_check(&factors, &eps_q, &delta_q, &q, m)?;
    let input = json!({
        "factors": factors_json(&factors),
        "eps_q": q_str(&eps_q),
        "delta_q": q_str(&delta_q),
        "q": q,
        "m": m,
    });
    Ok(containment(input, r))
}

fn product_bound(g: &mut Gen) -> Outcome {
    let factors = product_factors(g, true);
    let eps_q = g.weight();
    let q = g.exponent();
    let m = g.range(2, 3) as u64;
    let b = bound_product_derivation(&factors, &eps_q, &q, m)?;
    let confirmed = match b.verdict {
        BoundVerdict::Empty => Some(verify_product_bound(&factors, &eps_q, b.m_big)?),
        BoundVerdict::Unknown => None,
    };
    let input = json!({"factors": factors_json(&factors), "eps_q": q_str(&eps_q), "q": q, "m": m});
    let output = json!({"bound": b, "confirmed": confirmed});
    Ok((input, output, confirmed != Some(false), None))
}

/// A set split into axis groups: a product of factors or a disjoint union
/// of shifted components.
fn grouped_set(g: &mut Gen) -> FanSet {
    let n = g.range(1, MAX_FACTORS);
    if g.coin() {
        let depth = if n == MAX_FACTORS { 2 } else { MAX_DEPTH };
        FanSet::ProdQ((0..n).map(|_| g.fanset(depth)).collect())
    } else {
        let mut parts = Vec::with_capacity(n);
        for i in 0..n {
            let set = g.fanset(MAX_DEPTH);
            if i == 0 && g.coin() {
                parts.push(Component::at_origin(set));
            } else {
                parts.push(Component::shifted(g.weight(), set));
            }
        }
        FanSet::DisjUnion(parts)
    }
}

fn group_count(k: &FanSet) -> usize {
    match k {
        FanSet::ProdQ(f) => f.len(),
        FanSet::DisjUnion(c) => c.len(),
        _ => 1,
    }
}

fn projection(g: &mut Gen) -> Outcome {
    let k = grouped_set(g);
    let count = group_count(&k);
    let mut groups: Vec<usize> = (0..count).filter(|_| g.coin()).collect();
    if groups.is_empty() {
        groups.push(g.below(count));
    }
    let eps = g.positive();
    let delta = &eps * g.proper_unit();
    let q = g.exponent();
    let alpha = g.range(0, 2);
    let r = tvl_check(&k, &groups, &eps, &delta, &q, alpha)?;
    let input = json!({
        "set": k,
        "groups": groups,
        "eps": format_rational(&eps),
        "delta": format_rational(&delta),
        "q": q,
        "alpha": alpha,
    });
    let cx = (!r.violations.is_empty()).then(|| json!(r.violations));
    let output = json!({"survivors": r.survivors, "checked": r.checked});
    Ok((input, output, r.holds, cx))
}

fn projection_height(g: &mut Gen) -> Outcome {
    let k = grouped_set(g);
    let eps = g.positive();
    let delta = &eps * g.proper_unit();
    let q = g.exponent();
    let r = postdoc2_check(&k, &eps, &delta, &q)?;
    let input = json!({"set": k, "eps": format_rational(&eps), "delta": format_rational(&delta), "q": q});
    let pass = r.holds;
    Ok((input, json!(r), pass, None))
}

fn cover_membership(g: &mut Gen) -> Outcome {
    let n = g.range(1, MAX_FACTORS);
    let factors: Vec<FanSet> = (0..n).map(|_| g.fanset(MAX_DEPTH)).collect();
    let q = g.exponent();
    let l = g.range(1, 4) as u64;
    let cover = bq_cover(&factors, l, &q)?;
    let compiled = factors
        .iter()
        .map(Skeleton::compile)
        .collect::<Result<Vec<_>, _>>()?;
    let mut misses = Vec::new();
    for _ in 0..POINTS_PER_COVER {
        let coeffs = unit_ball_coeffs(g, n, &q);
        let paths = compiled.iter().map(|(s, m)| g.point_path(s, m)).collect();
        let point = BqPoint { coeffs, paths };
        if !bq_member(&point, &cover)? {
            misses.push(point);
        }
    }
    let input = json!({"factors": factors, "q": q, "l": l, "points": POINTS_PER_COVER});
    let output = json!({"products": cover.products.len(), "misses": misses.len()});
    let pass = misses.is_empty();
    let cx = misses.first().map(|p| json!(p));
    Ok((input, output, pass, cx))
}

/// Coefficients with `Σ |cᵢ|^q ≤ 1`, certified with upper bounds on the
/// powers. Rejected draws are retried; after a few failures the vector is
/// shrunk by `1/n`, which always lands inside the ball.
fn unit_ball_coeffs(g: &mut Gen, n: usize, q: &szlenk::rational::Exponent) -> Vec<Rational> {
    let inside = |c: &[Rational]| {
        let s: Rational = c.iter().map(|x| q.pow(&num_traits::Signed::abs(x)).hi).sum();
        s <= Rational::one()
    };
    for _ in 0..8 {
        let c: Vec<Rational> = (0..n).map(|_| g.signed_unit()).collect();
        if inside(&c) {
            return c;
        }
    }
    let k = Rational::from_integer((n as i64).into());
    (0..n).map(|_| g.signed_unit() / &k).collect()
}

fn small_ordinal(g: &mut Gen) -> Ordinal {
    let exps = [
        Ordinal::omega().mul_nat(2),
        Ordinal::omega().succ(),
        Ordinal::omega(),
        Ordinal::nat(2),
        Ordinal::one(),
        Ordinal::zero(),
    ];
    let mut terms = Vec::new();
    for e in exps {
        if g.below(3) == 0 {
            terms.push((e, g.range(1, 3) as u64));
        }
    }
    Ordinal::from_cnf(terms).expect("exponents are decreasing")
}

fn random_atom(g: &mut Gen, i: usize) -> SpaceExpr {
    let profile = if g.coin() {
        let v = match g.below(3) {
            0 => Ordinal::nat(g.range(1, 4) as u64),
            1 => Ordinal::omega_pow(Ordinal::nat(g.range(1, 2) as u64)).succ(),
            _ => Ordinal::one(),
        };
        EpsProfile::constant(v)
    } else {
        let slope = Ordinal::term(Ordinal::nat(g.range(0, 2) as u64), g.range(1, 2) as u64);
        let offset = Ordinal::nat(g.range(1, 3) as u64);
        EpsProfile::ladder(slope, offset, g.positive(), g.proper_unit())
    };
    SpaceExpr::Atom(Atom {
        name: format!("T{i}"),
        norm: Rational::one(),
        compact: profile.sup().is_one(),
        profile,
    })
}

/// Finite lists of atoms and C(γ+1) summands under c₀ and ℓ_p sums.
fn direct_sum_finite(g: &mut Gen) -> Result<(Value, Value, bool, Option<Value>), String> {
    let n = g.range(1, 4);
    let summands: Vec<SpaceExpr> = (0..n)
        .map(|i| {
            if g.coin() {
                SpaceExpr::Cspace { gamma: small_ordinal(g) }
            } else {
                random_atom(g, i)
            }
        })
        .collect();
    let p = match g.below(3) {
        0 => SumExponent::Zero,
        1 => SumExponent::Finite(Rational::new(3.into(), 2.into())),
        _ => SumExponent::Finite(Rational::from_integer(2.into())),
    };
    let expr = SpaceExpr::Sum(DirectSum {
        p: p.clone(),
        summands: Summands::List(summands.clone()),
    });
    let whole = direct_sum_index(&expr).map_err(|e| e.to_string())?;
    let mut indices = Vec::with_capacity(n);
    for s in &summands {
        match direct_sum_index(s).map_err(|e| e.to_string())?.verdict {
            Verdict::Index(o) => indices.push(o),
            Verdict::NotAsplund => return Err("finite summand reported non-Asplund".into()),
        }
    }
    let max = indices.iter().max().cloned().expect("nonempty");
    let Verdict::Index(sz) = &whole.verdict else {
        return Err("finite sum reported non-Asplund".into());
    };
    let mut problems = Vec::new();
    if admissible_index_value(sz) != Admissibility::Attained {
        problems.push(format!("{sz} is not a power of omega"));
    }
    if *sz < max {
        problems.push(format!("{sz} is below the summand maximum {max}"));
    }
    if max.is_power_of_omega() && *sz != max {
        problems.push(format!("{sz} differs from the summand maximum {max}"));
    }
    if !sz.is_one() {
        // Every ε-index of every summand lies strictly below the sum's index.
        for (s, idx) in summands.iter().zip(&indices) {
            let below = match s {
                SpaceExpr::Atom(a) => profile_witnesses(&a.profile).into_iter().all(|v| v < *sz),
                _ => idx <= sz,
            };
            if !below {
                problems.push(format!("an eps-index of {s:?} reaches {sz}"));
            }
        }
    }
    let input = json!({"p": p, "summands": summands});
    let output = json!({"index": sz, "rule": whole.rule, "summand_max": max});
    let pass = problems.is_empty();
    let cx = (!pass).then(|| json!(problems));
    Ok((input, output, pass, cx))
}

/// Profile values at ε just above every threshold and along the first
/// rungs of a ladder.
fn profile_witnesses(p: &EpsProfile) -> Vec<Ordinal> {
    let mut eps: Vec<Rational> = p
        .steps
        .iter()
        .map(|s| &s.threshold_q * Rational::new(17.into(), 16.into()))
        .collect();
    eps.push(Rational::new(1.into(), 1_000_000.into()));
    if let szlenk::calculus::Tail::Ladder { ladder, .. } = &p.tail {
        let mut level = ladder.base_q.clone();
        for _ in 0..12 {
            eps.push(level.clone());
            level *= &ladder.ratio_q;
        }
    }
    eps.iter().map(|e| p.eval(e)).collect()
}

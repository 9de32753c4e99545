//! Symbolic direct-sum expressions and their Szlenk indices.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::family::Family;
use super::profile::{malformed, EpsProfile};
use super::CalcError;
use crate::ordinal::Ordinal;
use crate::rational::{format_rational, parse_rational, serde_str, Rational};

/// The summation exponent p of a direct sum; `Zero` is the c₀-sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SumExponent {
    Zero,
    One,
    /// 1 < p < ∞.
    Finite(Rational),
    Infinity,
}

impl SumExponent {
    /// ℓ₁- and ℓ∞-sums, whose Asplundness is decided by the norms alone.
    pub fn is_extreme(&self) -> bool {
        matches!(self, SumExponent::One | SumExponent::Infinity)
    }
}

impl FromStr for SumExponent {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => return Ok(SumExponent::Infinity),
            "0" => return Ok(SumExponent::Zero),
            _ => {}
        }
        let p = parse_rational(s).map_err(|e| e.to_string())?;
        if p == Rational::one() {
            Ok(SumExponent::One)
        } else if p > Rational::one() {
            Ok(SumExponent::Finite(p))
        } else {
            Err(format!("sum exponent must be 0, inf or at least 1, got {s}"))
        }
    }
}

impl fmt::Display for SumExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumExponent::Zero => f.write_str("0"),
            SumExponent::One => f.write_str("1"),
            SumExponent::Finite(p) => f.write_str(&format_rational(p)),
            SumExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for SumExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SumExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub name: String,
    #[serde(with = "serde_str")]
    pub norm: Rational,
    pub profile: EpsProfile,
    pub compact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summands {
    List(Vec<SpaceExpr>),
    Family(Family),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectSum {
    pub p: SumExponent,
    pub summands: Summands,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceExpr {
    Atom(Atom),
    Sum(DirectSum),
    Cspace { gamma: Ordinal },
    FiniteSum(Vec<SpaceExpr>),
}

/// A versioned SpaceExpr document: `{"v":1,"expr":…}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub v: u32,
    pub expr: SpaceExpr,
}

impl SpaceDoc {
    pub const VERSION: u32 = 1;

    pub fn new(expr: SpaceExpr) -> Self {
        SpaceDoc {
            v: Self::VERSION,
            expr,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, CalcError> {
        let doc: SpaceDoc =
            serde_json::from_str(s).map_err(|e| CalcError::MalformedExpr(e.to_string()))?;
        if doc.v != Self::VERSION {
            return Err(CalcError::MalformedExpr(format!(
                "unsupported document version {}",
                doc.v
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("space documents serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Index(Ordinal),
    NotAsplund,
}

impl Verdict {
    pub fn index(&self) -> Option<&Ordinal> {
        match self {
            Verdict::Index(o) => Some(o),
            Verdict::NotAsplund => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Index(o) => write!(f, "{o}"),
            Verdict::NotAsplund => f.write_str("not Asplund"),
        }
    }
}

/// Which rule determined a node's index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// A bare atom: the supremum of its profile.
    Identity,
    /// ℓ₁/ℓ∞-sum whose norms are not in c₀, or with a non-Asplund summand.
    NonAsplundGate,
    /// All summands compact with norms in c₀: index 1.
    CompactSum,
    /// c₀/ℓ_p-sum (1 < p < ∞): least ω-power bounding every sup_λ Sz_ε.
    EpsProfileSup,
    /// ℓ₁/ℓ∞-sum with norms in c₀: supremum of the summand indices.
    SupOfSummands,
    /// Finite direct sum: maximum of the summand indices.
    FiniteMax,
    /// C(γ+1) by the countable-ordinal classification.
    CSpace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub path: String,
    pub rule: Rule,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub verdict: Verdict,
    pub compact: bool,
    pub rule: Rule,
    /// Supremum of the immediate summands' indices, for sums.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summand_sup: Option<Verdict>,
    pub trail: Vec<TrailEntry>,
}

/// Szlenk index of C(γ+1) for a countable ordinal γ < ε₀.
pub fn c_space_index(gamma: &Ordinal) -> Ordinal {
    if gamma.is_finite() {
        return Ordinal::one();
    }
    // ω^(ω^α) ≤ γ < ω^(ω^(α+1)) exactly when α is the leading exponent of
    // the leading exponent of γ.
    Ordinal::omega_pow(gamma.lead_exp().lead_exp().succ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    Attained,
    NotPowerOfOmega,
}

/// Whether `x` is the Szlenk index of some operator. Below ε₀ every power
/// of ω qualifies; the uncountable-cofinality obstruction cannot arise.
pub fn admissible_index_value(x: &Ordinal) -> Admissibility {
    if x.is_power_of_omega() {
        Admissibility::Attained
    } else {
        Admissibility::NotPowerOfOmega
    }
}

/// Maximum of profile values at one ε.
pub fn profile_sup(profiles: &[EpsProfile], eps_q: &Rational) -> Result<Ordinal, CalcError> {
    if !eps_q.is_positive() {
        return Err(CalcError::InvalidParams("eps must be positive".to_string()));
    }
    Ok(profiles
        .iter()
        .map(|p| p.eval(eps_q))
        .max()
        .unwrap_or_else(Ordinal::one))
}

struct NodeEval {
    verdict: Verdict,
    compact: bool,
    rule: Rule,
    summand_sup: Option<Verdict>,
    /// Exponent α such that every Sz_ε of this node lies below ω^α, tight.
    exponent: Ordinal,
}

/// Evaluates the Szlenk index of an expression, recording the rule used at
/// every node.
pub fn direct_sum_index(e: &SpaceExpr) -> Result<Evaluation, CalcError> {
    let mut trail = Vec::new();
    let n = eval_node(e, "expr", &mut trail)?;
    Ok(Evaluation {
        verdict: n.verdict,
        compact: n.compact,
        rule: n.rule,
        summand_sup: n.summand_sup,
        trail,
    })
}

fn exponent_from_index(sz: &Ordinal) -> Ordinal {
    if sz.is_power_of_omega() {
        sz.lead_exp().max(Ordinal::one())
    } else {
        sz.lead_exp().succ()
    }
}

fn sup_verdicts<'a>(vs: impl Iterator<Item = &'a Verdict>) -> Verdict {
    let mut best = Ordinal::zero();
    for v in vs {
        match v {
            Verdict::NotAsplund => return Verdict::NotAsplund,
            Verdict::Index(o) => best = best.max(o.clone()),
        }
    }
    Verdict::Index(best)
}

fn eval_node(e: &SpaceExpr, path: &str, trail: &mut Vec<TrailEntry>) -> Result<NodeEval, CalcError> {
    let node = match e {
        SpaceExpr::Atom(a) => {
            a.profile.validate()?;
            if a.norm.is_negative() {
                return Err(malformed("atom norm must be nonnegative"));
            }
            let sz = a.profile.sup();
            if a.compact != sz.is_one() {
                return Err(malformed(&format!(
                    "atom {:?}: compact flag disagrees with its profile (sup {sz})",
                    a.name
                )));
            }
            NodeEval {
                exponent: a.profile.lead_exponent_bound(),
                verdict: Verdict::Index(sz),
                compact: a.compact,
                rule: Rule::Identity,
                summand_sup: None,
            }
        }
        SpaceExpr::Cspace { gamma } => {
            let sz = c_space_index(gamma);
            NodeEval {
                exponent: exponent_from_index(&sz),
                compact: sz.is_one(),
                verdict: Verdict::Index(sz),
                rule: Rule::CSpace,
                summand_sup: None,
            }
        }
        SpaceExpr::FiniteSum(items) => {
            if items.is_empty() {
                return Err(malformed("finite sum needs at least one summand"));
            }
            let children = items
                .iter()
                .enumerate()
                .map(|(i, c)| eval_node(c, &format!("{path}.finite_sum[{i}]"), trail))
                .collect::<Result<Vec<_>, _>>()?;
            let verdict = sup_verdicts(children.iter().map(|c| &c.verdict));
            let exponent = match verdict.index() {
                Some(sz) => exponent_from_index(sz),
                None => Ordinal::zero(),
            };
            NodeEval {
                summand_sup: Some(verdict.clone()),
                verdict,
                compact: children.iter().all(|c| c.compact),
                rule: Rule::FiniteMax,
                exponent,
            }
        }
        SpaceExpr::Sum(sum) => eval_sum(sum, path, trail)?,
    };
    trail.push(TrailEntry {
        path: path.to_string(),
        rule: node.rule,
        verdict: node.verdict.clone(),
    });
    Ok(node)
}

/// What a sum needs to know about its summands.
struct SummandFacts {
    sup: Verdict,
    all_compact: bool,
    /// `None` when the norms are not needed to be decided yet.
    norms_c0: Option<Result<bool, CalcError>>,
    exponent: Ordinal,
}

fn summand_facts(sum: &DirectSum, path: &str, trail: &mut Vec<TrailEntry>) -> Result<SummandFacts, CalcError> {
    match &sum.summands {
        Summands::List(items) => {
            if items.is_empty() {
                return Err(malformed("direct sum needs at least one summand"));
            }
            let children = items
                .iter()
                .enumerate()
                .map(|(i, c)| eval_node(c, &format!("{path}.sum[{i}]"), trail))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SummandFacts {
                sup: sup_verdicts(children.iter().map(|c| &c.verdict)),
                all_compact: children.iter().all(|c| c.compact),
                norms_c0: Some(Ok(true)),
                exponent: children
                    .iter()
                    .map(|c| c.exponent.clone())
                    .max()
                    .unwrap_or_default(),
            })
        }
        Summands::Family(f) => {
            f.norms.validate()?;
            f.profile.validate()?;
            let sup = f.profile.member_sup();
            Ok(SummandFacts {
                all_compact: sup.is_one(),
                sup: Verdict::Index(sup),
                norms_c0: Some(f.norms.in_c0()),
                exponent: f.profile.lead_exponent_bound(),
            })
        }
    }
}

fn eval_sum(sum: &DirectSum, path: &str, trail: &mut Vec<TrailEntry>) -> Result<NodeEval, CalcError> {
    let facts = summand_facts(sum, path, trail)?;
    let summand_sup = Some(facts.sup.clone());
    let not_asplund = |rule| NodeEval {
        verdict: Verdict::NotAsplund,
        compact: false,
        rule,
        summand_sup: summand_sup.clone(),
        exponent: Ordinal::zero(),
    };
    // A direct sum factors each summand, so a non-Asplund summand is fatal.
    if facts.sup == Verdict::NotAsplund {
        return Ok(not_asplund(Rule::NonAsplundGate));
    }
    let c0 = facts.norms_c0.expect("always computed");
    if sum.p.is_extreme() {
        if !c0? {
            return Ok(not_asplund(Rule::NonAsplundGate));
        }
        if facts.all_compact {
            return Ok(compact_node(summand_sup));
        }
        let sz = facts.sup.index().expect("checked Asplund").clone();
        return Ok(NodeEval {
            exponent: exponent_from_index(&sz),
            verdict: Verdict::Index(sz),
            compact: false,
            rule: Rule::SupOfSummands,
            summand_sup,
        });
    }
    // c₀ and 1 < p < ∞: the norms only matter for the compact case.
    if facts.all_compact && c0? {
        return Ok(compact_node(summand_sup));
    }
    let exponent = facts.exponent.max(Ordinal::one());
    Ok(NodeEval {
        verdict: Verdict::Index(Ordinal::omega_pow(exponent.clone())),
        compact: false,
        rule: Rule::EpsProfileSup,
        summand_sup,
        exponent,
    })
}

fn compact_node(summand_sup: Option<Verdict>) -> NodeEval {
    NodeEval {
        verdict: Verdict::Index(Ordinal::one()),
        compact: true,
        rule: Rule::CompactSum,
        summand_sup,
        exponent: Ordinal::one(),
    }
}

//! Finite budget grids for product derivations, and integer covers of
//! B_q-type sets by scaled products.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fanset::FanSet;
use super::skeleton::{Mask, Skeleton};
use super::EngineError;
use crate::rational::{ceil_int, serde_str, Exponent, QPow, Rational};

/// Cap on the number of tuples a grid or cover may enumerate.
const ENUM_LIMIT: usize = 1 << 20;

fn invalid(msg: &str) -> EngineError {
    EngineError::InvalidParams(msg.to_string())
}

/// Parameters of a budget grid. `eps` and `delta` are magnitudes; the
/// scalars `aᵢ^q` and diameters are q-th powers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AEpsGrid {
    pub q: Exponent,
    pub a_q: Vec<QPow>,
    pub diam_q: Vec<QPow>,
    #[serde(with = "serde_str")]
    pub eps: Rational,
    #[serde(with = "serde_str")]
    pub delta: Rational,
}

impl AEpsGrid {
    pub fn n(&self) -> usize {
        self.a_q.len()
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.a_q.is_empty() || self.a_q.len() != self.diam_q.len() {
            return Err(invalid("need one scalar and one diameter per factor"));
        }
        let total: Rational = self.a_q.iter().map(QPow::value).sum();
        if total > Rational::one() {
            return Err(invalid("scalars must satisfy sum a_i^q <= 1"));
        }
        if !self.delta.is_positive() || self.delta >= self.eps {
            return Err(invalid("requires 0 < delta < eps"));
        }
        Ok(())
    }

    fn step(&self) -> Rational {
        (&self.eps - &self.delta) / Rational::from_integer(4.into())
    }
}

/// All tuples `(ε̄ᵢ)` of multiples of `(ε−δ)/4` with `ε̄ᵢ ≤ diam Kᵢ` and
/// `Σ aᵢ^q ε̄ᵢ^q ≥ (δ/2)^q`. For fractional q both tests are applied to
/// enclosures so that borderline tuples are kept.
pub fn a_eps_grid(g: &AEpsGrid) -> Result<Vec<Vec<Rational>>, EngineError> {
    g.validate()?;
    let step = g.step();
    let mut values: Vec<Vec<(Rational, Rational)>> = Vec::with_capacity(g.n());
    for d in &g.diam_q {
        let mut v = Vec::new();
        for j in 0u64.. {
            let x = &step * Rational::from_integer(j.into());
            let xq = g.q.pow(&x);
            if xq.lo > *d.value() {
                break;
            }
            v.push((x, xq.hi));
        }
        values.push(v);
    }
    let total = values
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(v.len()))
        .filter(|&t| t <= ENUM_LIMIT)
        .ok_or_else(|| invalid("grid too large"))?;
    let floor = g.q.pow(&(&g.delta / Rational::from_integer(2.into()))).lo;
    let n = g.n();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let budget: Rational = (0..n).map(|i| g.a_q[i].value() * &values[i][idx[i]].1).sum();
        if budget >= floor {
            out.push((0..n).map(|i| values[i][idx[i]].0.clone()).collect());
        }
        for i in 0..n {
            idx[i] += 1;
            if idx[i] < values[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(out)
}

/// `⌈4d/(ε−δ) + 1⌉ⁿ` with `d` the largest diameter (rounded up).
pub fn a_eps_grid_size_bound(g: &AEpsGrid) -> Result<BigInt, EngineError> {
    g.validate()?;
    let d_q = g
        .diam_q
        .iter()
        .map(QPow::value)
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let d = g.q.root(&d_q).hi;
    let per = ceil_int(&(Rational::from_integer(4.into()) * d / (&g.eps - &g.delta) + Rational::one()));
    Ok(num_traits::pow(per, g.n()))
}

/// `∏ (kᵢ/l) Kᵢ` for one tuple of the cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridProduct {
    pub k: Vec<u64>,
}

impl GridProduct {
    /// The scalars `kᵢ/l` as magnitudes.
    pub fn scales(&self, l: u64) -> Vec<Rational> {
        self.k
            .iter()
            .map(|&k| Rational::new(k.into(), l.into()))
            .collect()
    }
}

/// Cover of `B_q(Kᵢ)` by the products `∏ (kᵢ/l) Kᵢ` over
/// `L = {k ∈ ℕⁿ, kᵢ ≥ 1 : Σ kᵢ^q ≤ (l + n^{1/q})^q}`. Scaled copies are
/// taken over balanced hulls, `(k/l)K = {c·x : |c| ≤ k/l, x ∈ K}`.
#[derive(Debug, Clone, Serialize)]
pub struct BqCover {
    pub l: u64,
    pub q: Exponent,
    pub radius_q: Vec<QPow>,
    pub products: Vec<GridProduct>,
    #[serde(skip)]
    factors: Vec<(Skeleton, Mask)>,
    #[serde(skip)]
    budget_hi: Rational,
    #[serde(skip)]
    k_max: u64,
}

impl BqCover {
    pub fn n(&self) -> usize {
        self.factors.len()
    }

    fn in_l(&self, k: &[u64]) -> bool {
        if k.iter().any(|&ki| ki == 0 || ki > self.k_max) {
            return false;
        }
        let s: Rational = k
            .iter()
            .map(|&ki| self.q.pow(&Rational::from_integer(ki.into())).lo)
            .sum();
        s <= self.budget_hi
    }
}

pub fn bq_cover(factors: &[FanSet], l: u64, q: &Exponent) -> Result<BqCover, EngineError> {
    if l == 0 {
        return Err(invalid("requires l >= 1"));
    }
    if factors.is_empty() {
        return Err(invalid("requires at least one factor"));
    }
    let n = factors.len();
    let mut compiled = Vec::with_capacity(n);
    for f in factors {
        if f.has_product() {
            return Err(EngineError::OutsideExactFragment("factors must be product-free".into()));
        }
        compiled.push(Skeleton::compile(f)?);
    }
    let radius_q = compiled
        .iter()
        .map(|(s, m)| QPow::new(s.radius_q(m)).expect("nonnegative"))
        .collect();
    let n_root = q.root(&Rational::from_integer(n.into())).hi;
    let reach = Rational::from_integer(l.into()) + n_root;
    let budget_hi = q.pow(&reach).hi;
    let k_max = reach
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| invalid("l too large"))?;
    let mut cover = BqCover {
        l,
        q: q.clone(),
        radius_q,
        products: Vec::new(),
        factors: compiled,
        budget_hi,
        k_max,
    };
    let per = usize::try_from(k_max).map_err(|_| invalid("l too large"))?;
    per.checked_pow(n as u32)
        .filter(|&t| t <= ENUM_LIMIT)
        .ok_or_else(|| invalid("cover too large"))?;
    let mut k = vec![1u64; n];
    loop {
        if cover.in_l(&k) {
            cover.products.push(GridProduct { k: k.clone() });
        }
        let mut i = n;
        loop {
            if i == 0 {
                // Tuples were produced with the last coordinate fastest.
                return Ok(cover);
            }
            i -= 1;
            k[i] += 1;
            if k[i] <= k_max {
                break;
            }
            k[i] = 1;
        }
    }
}

/// A point `(cᵢ·xᵢ)` of the sum, with `xᵢ` addressed by its child-index path
/// in the i-th factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BqPoint {
    #[serde(with = "crate::rational::serde_str_vec")]
    pub coeffs: Vec<Rational>,
    pub paths: Vec<Vec<usize>>,
}

/// Whether the point lies in some product of the cover. Points too far
/// from the origin are rejected outright; otherwise the least tuple
/// `kᵢ = max(1, ⌈l·|cᵢ|⌉)` is tested, which suffices since `L` is closed
/// under lowering coordinates.
pub fn bq_member(point: &BqPoint, cover: &BqCover) -> Result<bool, EngineError> {
    let n = cover.n();
    if point.coeffs.len() != n || point.paths.len() != n {
        return Err(invalid("point arity does not match the cover"));
    }
    let mut norm_lo = Rational::zero();
    for ((c, path), (skel, mask)) in point.coeffs.iter().zip(&point.paths).zip(&cover.factors) {
        let x = skel
            .node_at(path)
            .filter(|&x| mask.contains(x))
            .ok_or_else(|| EngineError::UnknownPath(path.clone()))?;
        norm_lo += cover.q.pow(&c.abs()).lo * skel.norm_q(x);
    }
    let l = Rational::from_integer(cover.l.into());
    let reach_q = &cover.budget_hi / cover.q.pow(&l).lo;
    let r_max = cover
        .radius_q
        .iter()
        .map(QPow::value)
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    if norm_lo > reach_q * r_max {
        return Ok(false);
    }
    let mut k = Vec::with_capacity(n);
    for c in &point.coeffs {
        let ki = ceil_int(&(&l * c.abs())).max(BigInt::one());
        match ki.to_u64() {
            Some(v) => k.push(v),
            None => return Ok(false),
        }
    }
    Ok(cover.in_l(&k))
}

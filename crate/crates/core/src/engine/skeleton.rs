//! Compiled form of a fan set: a finite tree of edges, each either taken once
//! or repeated ω times on fresh axes, together with a bit mask of the nodes
//! that belong to the set.
//!
//! A skeleton node stands for every copy of that point. Two points in the
//! same repeated subtree can sit in different copies, so the largest distance
//! between skeleton points `u`, `u'` splits at the parent of the highest
//! repeated edge above their common ancestor. All distances are q-th powers
//! and therefore sums of edge weights.

use std::ops::Range;

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use super::fanset::{Component, FanSet};
use super::EngineError;
use crate::rational::{QPow, Rational};

pub type Mask = FixedBitSet;

#[derive(Debug, Clone)]
struct Node {
    parent: Option<usize>,
    w_q: Rational,
    repeated: bool,
    children: Vec<usize>,
    norm_q: Rational,
    end: usize,
}

/// Nodes are stored in preorder, so every subtree is a contiguous range.
#[derive(Debug, Clone)]
pub struct Skeleton {
    nodes: Vec<Node>,
}

impl Skeleton {
    fn with_root() -> Self {
        Skeleton {
            nodes: vec![Node {
                parent: None,
                w_q: Rational::zero(),
                repeated: false,
                children: Vec::new(),
                norm_q: Rational::zero(),
                end: 1,
            }],
        }
    }

    /// Compiles a set without products. The root (node 0) is the origin.
    pub fn compile(set: &FanSet) -> Result<(Skeleton, Mask), EngineError> {
        let (skel, mut masks) = Skeleton::compile_parts(std::slice::from_ref(set))?;
        Ok((skel, masks.pop().expect("one part")))
    }

    /// Compiles several sets around a shared origin, each on its own axes,
    /// returning one mask per set.
    pub fn compile_parts(parts: &[FanSet]) -> Result<(Skeleton, Vec<Mask>), EngineError> {
        let mut skel = Skeleton::with_root();
        let mut masks = Vec::with_capacity(parts.len());
        for part in parts {
            part.validate()?;
            let mut marks = Vec::new();
            skel.place(part, 0, &Rational::from_integer(1.into()), &mut marks)?;
            masks.push(marks);
        }
        skel.finish();
        let n = skel.len();
        let masks = masks
            .into_iter()
            .map(|marks| {
                let mut m = Mask::with_capacity(n);
                for x in marks {
                    m.insert(x);
                }
                m
            })
            .collect();
        Ok((skel, masks))
    }

    fn push_child(&mut self, parent: usize, w_q: Rational, repeated: bool) -> usize {
        let id = self.nodes.len();
        let norm_q = &self.nodes[parent].norm_q + &w_q;
        self.nodes.push(Node {
            parent: Some(parent),
            w_q,
            repeated,
            children: Vec::new(),
            norm_q,
            end: id + 1,
        });
        self.nodes[parent].children.push(id);
        id
    }

    fn place(
        &mut self,
        set: &FanSet,
        at: usize,
        scale: &Rational,
        marks: &mut Vec<usize>,
    ) -> Result<(), EngineError> {
        match set {
            FanSet::Empty => {}
            FanSet::Sing => marks.push(at),
            FanSet::Fan { w_q, prefix, tail } => {
                marks.push(at);
                let w = w_q.value() * scale;
                for body in prefix {
                    let c = self.push_child(at, w.clone(), false);
                    self.place(body, c, scale, marks)?;
                }
                let c = self.push_child(at, w, true);
                self.place(tail, c, scale, marks)?;
            }
            FanSet::UnionApex(members) => {
                for m in members {
                    self.place(m, at, scale, marks)?;
                }
            }
            FanSet::Scale { a_q, set } => {
                if a_q.is_zero() {
                    if !set.is_empty() {
                        marks.push(at);
                    }
                } else {
                    self.place(set, at, &(scale * a_q.value()), marks)?;
                }
            }
            FanSet::ProdQ(_) => {
                return Err(EngineError::OutsideExactFragment(
                    "products are only supported at the top level".into(),
                ))
            }
            FanSet::DisjUnion(components) => {
                for Component { shift_q, set } in components {
                    match shift_q {
                        Some(s) => {
                            let c = self.push_child(at, s.value() * scale, false);
                            self.place(set, c, scale, marks)?;
                        }
                        None => self.place(set, at, scale, marks)?,
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(&mut self) {
        for x in (0..self.nodes.len()).rev() {
            if let Some(&last) = self.nodes[x].children.last() {
                self.nodes[x].end = self.nodes[last].end;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same tree with every edge weight multiplied by `a_q`.
    pub fn scaled(&self, a_q: &Rational) -> Skeleton {
        let mut out = self.clone();
        for node in &mut out.nodes {
            node.w_q = &node.w_q * a_q;
            node.norm_q = &node.norm_q * a_q;
        }
        out
    }

    pub fn norm_q(&self, x: usize) -> &Rational {
        &self.nodes[x].norm_q
    }

    pub fn weight_q(&self, x: usize) -> &Rational {
        &self.nodes[x].w_q
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.nodes[x].parent
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.nodes[x].children
    }

    pub fn is_repeated(&self, x: usize) -> bool {
        self.nodes[x].repeated
    }

    pub fn subtree(&self, x: usize) -> Range<usize> {
        x..self.nodes[x].end
    }

    pub fn empty_mask(&self) -> Mask {
        Mask::with_capacity(self.len())
    }

    pub fn full_subtree_mask(&self, x: usize) -> Mask {
        let mut m = self.empty_mask();
        m.insert_range(self.subtree(x));
        m
    }

    /// Child-index path from the root to `x`.
    pub fn path(&self, mut x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(p) = self.nodes[x].parent {
            let idx = self.nodes[p]
                .children
                .iter()
                .position(|&c| c == x)
                .expect("child listed under its parent");
            out.push(idx);
            x = p;
        }
        out.reverse();
        out
    }

    pub fn node_at(&self, path: &[usize]) -> Option<usize> {
        let mut x = 0;
        for &i in path {
            x = *self.nodes[x].children.get(i)?;
        }
        Some(x)
    }

    /// For each node, the largest norm of a marked node in its subtree.
    pub fn max_norm_below(&self, mask: &Mask) -> Vec<Option<Rational>> {
        let mut out: Vec<Option<Rational>> = vec![None; self.len()];
        for x in (0..self.len()).rev() {
            let mut best = mask.contains(x).then(|| self.nodes[x].norm_q.clone());
            for &c in &self.nodes[x].children {
                if let Some(v) = &out[c] {
                    if best.as_ref().is_none_or(|b| v > b) {
                        best = Some(v.clone());
                    }
                }
            }
            out[x] = best;
        }
        out
    }

    /// Half the local diameter at every node: the largest `n(u) − n(x)` over
    /// marked `u` below a repeated child of `x`. Zero where nothing qualifies.
    pub fn rho(&self, mask: &Mask) -> Vec<Rational> {
        let below = self.max_norm_below(mask);
        (0..self.len())
            .map(|x| {
                let node = &self.nodes[x];
                node.children
                    .iter()
                    .filter(|&&c| self.nodes[c].repeated)
                    .filter_map(|&c| below[c].as_ref())
                    .max()
                    .map(|m| m - &node.norm_q)
                    .unwrap_or_else(Rational::zero)
            })
            .collect()
    }

    /// Local diameter (q-th power) of the masked set at each node: every
    /// w*-neighbourhood of `x` contains all but finitely many copies of each
    /// repeated child subtree, and the widest pair sits in two such copies.
    /// The value is attained, so there is no inf/sup gap at the boundary.
    pub fn lambda(&self, mask: &Mask) -> Vec<Rational> {
        let two = Rational::from_integer(2.into());
        self.rho(mask).into_iter().map(|r| r * &two).collect()
    }

    /// `{x ∈ mask : λ(x) > t_q}`.
    pub fn derive(&self, mask: &Mask, t_q: &Rational) -> Mask {
        let lam = self.lambda(mask);
        let mut out = self.empty_mask();
        for x in mask.ones() {
            if lam[x] > *t_q {
                out.insert(x);
            }
        }
        out
    }

    /// `{x ∈ mask : ρ(x) ≥ v}` for a precomputed ρ.
    pub fn rho_at_least(&self, mask: &Mask, rho: &[Rational], v: &Rational) -> Mask {
        let mut out = self.empty_mask();
        for x in mask.ones() {
            if rho[x] >= *v {
                out.insert(x);
            }
        }
        out
    }

    /// Largest point norm (q-th power); zero for the empty set.
    pub fn radius_q(&self, mask: &Mask) -> Rational {
        mask.ones()
            .map(|x| &self.nodes[x].norm_q)
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn diam_q(&self, mask: &Mask) -> Rational {
        self.max_dist_q(mask, mask).unwrap_or_else(Rational::zero)
    }

    /// Largest distance (q-th power) between a point of `a` and a point of
    /// `b`; `None` if either is empty.
    pub fn max_dist_q(&self, a: &Mask, b: &Mask) -> Option<Rational> {
        let below_a = self.max_norm_below(a);
        let below_b = self.max_norm_below(b);
        below_a[0].as_ref()?;
        below_b[0].as_ref()?;
        let mut best = Rational::zero();
        let mut offer = |v: Rational| {
            if v > best {
                best = v;
            }
        };
        for x in 0..self.len() {
            let node = &self.nodes[x];
            let n = &node.norm_q;
            let kids = &node.children;
            for &c in kids {
                // Both ends below the same repeated edge, in distinct copies.
                if self.nodes[c].repeated {
                    if let (Some(u), Some(v)) = (&below_a[c], &below_b[c]) {
                        offer(u + v - n - n);
                    }
                }
                // One end at x itself.
                if a.contains(x) {
                    if let Some(v) = &below_b[c] {
                        offer(v - n);
                    }
                }
                if b.contains(x) {
                    if let Some(u) = &below_a[c] {
                        offer(u - n);
                    }
                }
            }
            // Ends below two distinct children.
            for (i, &c1) in kids.iter().enumerate() {
                let Some(u) = &below_a[c1] else { continue };
                for (j, &c2) in kids.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    if let Some(v) = &below_b[c2] {
                        offer(u + v - n - n);
                    }
                }
            }
        }
        Some(best)
    }

    /// Marked nodes that still have a marked point below a repeated child.
    pub fn apex_count(&self, mask: &Mask) -> usize {
        let below = self.max_norm_below(mask);
        mask.ones()
            .filter(|&x| {
                self.nodes[x]
                    .children
                    .iter()
                    .any(|&c| self.nodes[c].repeated && below[c].is_some())
            })
            .count()
    }

    /// w*-closedness: every repeated subtree meeting the set has its parent
    /// in the set, since the parent is the limit of the copies.
    pub fn is_closed(&self, mask: &Mask) -> bool {
        let below = self.max_norm_below(mask);
        (1..self.len()).all(|c| {
            let p = self.nodes[c].parent.expect("non-root");
            !self.nodes[c].repeated || below[c].is_none() || mask.contains(p)
        })
    }

    /// Reads a masked set back as a fan-set expression with absolute weights.
    pub fn to_fanset(&self, mask: &Mask) -> FanSet {
        let below = self.max_norm_below(mask);
        self.convert(0, mask, &below)
    }

    fn convert(&self, x: usize, mask: &Mask, below: &[Option<Rational>]) -> FanSet {
        let live: Vec<usize> = self.nodes[x]
            .children
            .iter()
            .copied()
            .filter(|&c| below[c].is_some())
            .collect();
        let weight = |c: usize| QPow::new(self.nodes[c].w_q.clone()).expect("weights are nonnegative");
        if !mask.contains(x) {
            debug_assert!(live.iter().all(|&c| !self.nodes[c].repeated));
            if live.is_empty() {
                return FanSet::Empty;
            }
            return FanSet::DisjUnion(
                live.iter()
                    .map(|&c| Component::shifted(weight(c), self.convert(c, mask, below)))
                    .collect(),
            );
        }
        let mut fans: Vec<(QPow, Vec<FanSet>, FanSet)> = Vec::new();
        for &c in live.iter().filter(|&&c| self.nodes[c].repeated) {
            fans.push((weight(c), Vec::new(), self.convert(c, mask, below)));
        }
        let mut loose = Vec::new();
        for &c in live.iter().filter(|&&c| !self.nodes[c].repeated) {
            let w = weight(c);
            let body = self.convert(c, mask, below);
            match fans.iter_mut().find(|f| f.0 == w) {
                Some(f) => f.1.push(body),
                None => loose.push(Component::shifted(w, body)),
            }
        }
        let mut fans: Vec<FanSet> = fans
            .into_iter()
            .map(|(w, prefix, tail)| FanSet::fan(w, prefix, tail))
            .collect();
        let apex = match fans.len() {
            0 => FanSet::Sing,
            1 => fans.pop().expect("one fan"),
            _ => FanSet::UnionApex(fans),
        };
        if loose.is_empty() {
            apex
        } else {
            loose.insert(0, Component::at_origin(apex));
            FanSet::DisjUnion(loose)
        }
    }
}

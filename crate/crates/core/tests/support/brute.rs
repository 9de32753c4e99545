//! Brute-force ε-derivation on explicitly materialized point sets.
//!
//! Every repeated fan edge is copied twice. Points carry their coordinates
//! (as q-th powers, one per axis) and the sequence of axes leading to them.
//! The smallest w*-neighborhood of a point `x` that the finite model can
//! see is `x` together with everything hanging below a repeated edge at `x`:
//! any finite set of coordinate constraints still admits all but finitely
//! many copies. Local diameters are then plain pairwise maxima.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use szlenk::engine::{Component, FanSet};
use szlenk::rational::Rational;

pub const COPIES: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    /// Axes from the origin, each flagged when it is a repeated edge.
    pub path: Vec<(u32, bool)>,
    pub coords: BTreeMap<u32, Rational>,
}

impl Point {
    fn origin() -> Self {
        Point {
            path: Vec::new(),
            coords: BTreeMap::new(),
        }
    }

    fn step(&self, axis: u32, w: Rational, repeated: bool) -> Self {
        let mut p = self.clone();
        p.path.push((axis, repeated));
        if !w.is_zero() {
            p.coords.insert(axis, w);
        }
        p
    }

    pub fn norm_q(&self) -> Rational {
        self.coords.values().sum()
    }

    /// Whether `y` lies in the smallest visible neighborhood of `self`.
    pub fn sees(&self, y: &Point) -> bool {
        let n = self.path.len();
        y.path.len() > n && y.path[..n] == self.path[..] && y.path[n].1
    }
}

/// `‖x − y‖^q`. Axes are never shared with different weights, so the sum
/// runs over the symmetric difference.
pub fn dist_q(x: &Point, y: &Point) -> Rational {
    let mut d = Rational::zero();
    for (a, v) in &x.coords {
        match y.coords.get(a) {
            Some(u) => assert_eq!(u, v, "axis {a} carries two weights"),
            None => d += v,
        }
    }
    for (a, v) in &y.coords {
        if !x.coords.contains_key(a) {
            d += v;
        }
    }
    d
}

pub struct Expander {
    next_axis: u32,
}

impl Expander {
    pub fn expand(set: &FanSet) -> Vec<Point> {
        let mut e = Expander { next_axis: 0 };
        let mut out = BTreeSet::new();
        e.go(set, &Point::origin(), &Rational::from_integer(1.into()), &mut out);
        out.into_iter().collect()
    }

    fn axis(&mut self) -> u32 {
        self.next_axis += 1;
        self.next_axis
    }

    fn go(&mut self, set: &FanSet, at: &Point, scale: &Rational, out: &mut BTreeSet<Point>) {
        match set {
            FanSet::Empty => {}
            FanSet::Sing => {
                out.insert(at.clone());
            }
            FanSet::Fan { w_q, prefix, tail } => {
                out.insert(at.clone());
                let w = w_q.value() * scale;
                for body in prefix {
                    let a = self.axis();
                    self.go(body, &at.step(a, w.clone(), false), scale, out);
                }
                for _ in 0..COPIES {
                    let a = self.axis();
                    self.go(tail, &at.step(a, w.clone(), true), scale, out);
                }
            }
            FanSet::UnionApex(members) => {
                for m in members {
                    self.go(m, at, scale, out);
                }
            }
            FanSet::Scale { a_q, set } => {
                if a_q.is_zero() {
                    if !set.is_empty() {
                        out.insert(at.clone());
                    }
                } else {
                    self.go(set, at, &(scale * a_q.value()), out);
                }
            }
            FanSet::DisjUnion(components) => {
                for Component { shift_q, set } in components {
                    match shift_q {
                        Some(s) => {
                            let a = self.axis();
                            self.go(set, &at.step(a, s.value() * scale, false), scale, out);
                        }
                        None => self.go(set, at, scale, out),
                    }
                }
            }
            FanSet::ProdQ(_) => panic!("products are expanded factorwise"),
        }
    }
}

fn diam_of(points: &[&Point]) -> Rational {
    let mut d = Rational::zero();
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            let v = dist_q(x, y);
            if v > d {
                d = v;
            }
        }
    }
    d
}

pub fn diam_q(points: &[Point]) -> Rational {
    diam_of(&points.iter().collect::<Vec<_>>())
}

pub fn radius_q(points: &[Point]) -> Rational {
    points.iter().map(Point::norm_q).max().unwrap_or_else(Rational::zero)
}

/// Local diameter of `x` inside `set`.
pub fn local_diam_q(set: &[Point], x: &Point) -> Rational {
    let mut nb: Vec<&Point> = vec![x];
    nb.extend(set.iter().filter(|y| x.sees(y)));
    diam_of(&nb)
}

pub fn derive(set: &[Point], eps_q: &Rational) -> Vec<Point> {
    set.iter()
        .filter(|x| local_diam_q(set, x) > *eps_q)
        .cloned()
        .collect()
}

/// Sizes of the successive derived sets, starting with the input and
/// ending with the first empty one.
pub fn trace(set: &FanSet, eps_q: &Rational) -> Vec<usize> {
    let mut cur = Expander::expand(set);
    let mut sizes = vec![cur.len()];
    while !cur.is_empty() {
        cur = derive(&cur, eps_q);
        sizes.push(cur.len());
    }
    sizes
}

pub fn sz(set: &FanSet, eps_q: &Rational) -> usize {
    trace(set, eps_q).len() - 1
}

/// Product of materialized factors with weights `a_q`; points are index
/// tuples and distances are weighted sums of factor distances.
pub struct Product {
    pub factors: Vec<Vec<Point>>,
    pub a_q: Vec<Rational>,
    dist: Vec<Vec<Vec<Rational>>>,
}

impl Product {
    pub fn new(parts: &[(Rational, FanSet)]) -> Self {
        let factors: Vec<Vec<Point>> = parts.iter().map(|(_, f)| Expander::expand(f)).collect();
        let dist = factors
            .iter()
            .map(|pts| {
                pts.iter()
                    .map(|x| pts.iter().map(|y| dist_q(x, y)).collect())
                    .collect()
            })
            .collect();
        Product {
            a_q: parts.iter().map(|(a, _)| a.clone()).collect(),
            factors,
            dist,
        }
    }

    pub fn all(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for f in &self.factors {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..f.len()).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        if self.factors.iter().any(Vec::is_empty) {
            out.clear();
        }
        out
    }

    pub fn dist_q(&self, x: &[usize], y: &[usize]) -> Rational {
        (0..x.len())
            .map(|i| &self.a_q[i] * &self.dist[i][x[i]][y[i]])
            .sum()
    }

    fn near(&self, x: &[usize], y: &[usize]) -> bool {
        (0..x.len()).all(|i| x[i] == y[i] || self.factors[i][x[i]].sees(&self.factors[i][y[i]]))
    }

    pub fn derive(&self, set: &BTreeSet<Vec<usize>>, eps_q: &Rational) -> BTreeSet<Vec<usize>> {
        set.iter()
            .filter(|x| {
                let nb: Vec<&Vec<usize>> = set.iter().filter(|y| self.near(x, y)).collect();
                nb.iter().enumerate().any(|(i, a)| {
                    nb[i + 1..].iter().any(|b| self.dist_q(a, b) > *eps_q)
                })
            })
            .cloned()
            .collect()
    }

    pub fn sz(&self, eps_q: &Rational) -> usize {
        let mut cur: BTreeSet<Vec<usize>> = self.all().into_iter().collect();
        let mut k = 0;
        while !cur.is_empty() {
            cur = self.derive(&cur, eps_q);
            k += 1;
        }
        k
    }

    pub fn sizes(&self, eps_q: &Rational, steps: usize) -> Vec<usize> {
        let mut cur: BTreeSet<Vec<usize>> = self.all().into_iter().collect();
        let mut out = vec![cur.len()];
        for _ in 0..steps {
            cur = self.derive(&cur, eps_q);
            out.push(cur.len());
        }
        out
    }
}

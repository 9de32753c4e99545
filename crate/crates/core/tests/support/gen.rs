#![allow(dead_code)]

use proptest::prelude::*;
use szlenk::engine::{Component, FanSet};
use szlenk::rational::{QPow, Rational};

pub fn qp(n: i64, d: i64) -> QPow {
    QPow::from_ratio(n, d)
}

pub fn weight() -> impl Strategy<Value = QPow> {
    (1i64..=6, 1i64..=6).prop_map(|(n, d)| qp(n, d))
}

pub fn eps() -> impl Strategy<Value = Rational> {
    (0i64..=16, 1i64..=6).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

/// Fan sets of depth at most three built from every constructor except
/// products.
pub fn fanset() -> impl Strategy<Value = FanSet> {
    let leaf = prop_oneof![Just(FanSet::Sing), weight().prop_map(FanSet::simple_fan)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (weight(), prop::option::of(inner.clone()), inner.clone())
                .prop_map(|(w, p, t)| FanSet::fan(w, p.into_iter().collect(), t)),
            (weight(), inner.clone()).prop_map(|(a, s)| FanSet::scale(a, s)),
            (weight(), inner.clone(), weight(), inner.clone()).prop_map(|(w1, a, w2, b)| {
                FanSet::UnionApex(vec![FanSet::fan(w1, vec![], a), FanSet::fan(w2, vec![], b)])
            }),
            (inner.clone(), weight(), inner).prop_map(|(a, s, b)| {
                FanSet::DisjUnion(vec![Component::at_origin(a), Component::shifted(s, b)])
            }),
        ]
    })
}

/// Small factors for product comparisons.
pub fn small_fanset() -> impl Strategy<Value = FanSet> {
    prop_oneof![
        Just(FanSet::Sing),
        weight().prop_map(FanSet::simple_fan),
        (1usize..=2, weight()).prop_map(|(n, w)| FanSet::depth_fan(n, w)),
        (weight(), weight()).prop_map(|(a, b)| FanSet::fan(a, vec![FanSet::simple_fan(b)], FanSet::Sing)),
    ]
}

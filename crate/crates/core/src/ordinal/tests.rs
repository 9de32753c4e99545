use proptest::prelude::*;

use super::*;

fn w() -> Ordinal {
    Ordinal::omega()
}

fn o(s: &str) -> Ordinal {
    parse_ordinal(s).unwrap()
}

#[test]
fn comparison_examples() {
    assert!(o("w^2") > o("w*5 + 3"));
    assert_eq!(Ordinal::zero().cmp(&Ordinal::zero()), Ordering::Equal);
    assert!(o("w^w") > o("w^3*9"));
    assert!(o("w + 1") > w());
    assert!(o("w*2") > o("w + 100"));
}

#[test]
fn arithmetic_examples() {
    assert_eq!(o("w*2 + 1").add(&w()), o("w*3"));
    assert_eq!(o("w^2 + w").mul(&Ordinal::nat(3)), o("w^2*3 + w"));
    assert_eq!(Ordinal::omega_pow(w()), o("w^w"));
    assert_eq!(Ordinal::nat(1).add(&w()), w());
    assert_eq!(Ordinal::nat(2).mul(&w()), w());
    assert_eq!(w().mul(&Ordinal::nat(2)), o("w + w"));
    assert_eq!(o("w + 1").mul(&w()), o("w^2"));
    assert_eq!(o("w*3 + 2").mul(&o("w + 2")), o("w^2 + w*6 + 2"));
}

#[test]
fn classification_examples() {
    assert!(o("w^3").is_power_of_omega());
    assert!(!o("w^3*2").is_power_of_omega());
    assert!(Ordinal::one().is_power_of_omega());
    assert_eq!(o("w^w").cofinality_class(), Cofinality::Omega);
    assert_eq!(o("5").cofinality_class(), Cofinality::One);
    assert_eq!(Ordinal::zero().cofinality_class(), Cofinality::Zero);
    assert!(!o("w^2 + 1").is_limit());
    assert!(o("w^2 + w").is_limit());
}

#[test]
fn least_omega_power_examples() {
    assert_eq!(o("w^2*3 + w").least_omega_power_above(), o("w^3"));
    assert_eq!(Ordinal::zero().least_omega_power_above(), Ordinal::one());
    assert_eq!(o("w^w").least_omega_power_above(), o("w^(w+1)"));
    assert_eq!(o("7").least_omega_power_above(), w());
}

#[test]
fn family_sup_examples() {
    let f = OrdFamily::affine(w(), Ordinal::one()).unwrap();
    assert_eq!(f.sup(), o("w^2"));
    assert_eq!(OrdFamily::Const(o("w^w")).sup(), o("w^w"));
    assert_eq!(OrdFamily::affine(Ordinal::one(), Ordinal::zero()).unwrap().sup(), w());
    // An offset above every s·n wins outright.
    let dominated = OrdFamily::affine(Ordinal::nat(3), o("w^2")).unwrap();
    assert_eq!(dominated.sup(), o("w^2"));
    assert!(OrdFamily::affine(Ordinal::zero(), w()).is_err());
}

#[test]
fn fundamental_sequence_examples() {
    assert_eq!(o("w^2").fundamental_sequence(3).unwrap(), o("w*3"));
    assert_eq!(o("w^w").fundamental_sequence(2).unwrap(), o("w^2"));
    assert_eq!(o("w*2").fundamental_sequence(4).unwrap(), o("w + 4"));
    assert_eq!(
        o("w^2").fundamental_sequence(0).unwrap(),
        Ordinal::zero()
    );
    assert!(matches!(
        o("w + 1").fundamental_sequence(1),
        Err(OrdinalError::NotALimit(_))
    ));
    assert!(Ordinal::zero().fundamental_sequence(1).is_err());
}

#[test]
fn parser_accepts_the_text_syntax() {
    let v = o("w^(w)*3 + w*2 + 5");
    assert_eq!(
        v,
        Ordinal::from_cnf(vec![(w(), 3), (Ordinal::one(), 2), (Ordinal::zero(), 5)]).unwrap()
    );
    assert_eq!(o("w + w^2"), o("w^2"));
    assert_eq!(o("ω^ω"), o("w^w"));
    assert_eq!(o("(w)^2"), o("w^2"));
    assert_eq!(o("w^w^2"), Ordinal::omega_pow(o("w^2")));
    assert_eq!(o("  0 "), Ordinal::zero());
}

#[test]
fn parser_reports_positions() {
    let e = parse_ordinal("w^^").unwrap_err();
    assert_eq!(e.pos, 2);
    assert!(parse_ordinal("").is_err());
    assert!(parse_ordinal("2^3").is_err());
    assert!(parse_ordinal("w + ").is_err());
    assert!(parse_ordinal("(w").is_err());
    assert!(parse_ordinal("w)").is_err());
    assert!(parse_ordinal("99999999999999999999999").is_err());
    assert!(parse_ordinal(&"(".repeat(500)).is_err());
}

#[test]
fn display_round_trips_through_parser() {
    for s in ["0", "1", "w", "w^2*3 + w + 1", "w^(w + 1)*2 + w^w", "w^w^w", "w^(w*2)*3"] {
        let v = o(s);
        assert_eq!(v.to_string(), s);
        assert_eq!(o(&v.to_string()), v);
    }
}

#[test]
fn json_encoding() {
    let v = o("w^2*3 + w");
    let json = serde_json::to_string(&v).unwrap();
    assert_eq!(
        json,
        r#"{"cnf":[[{"cnf":[[{"cnf":[]},2]]},3],[{"cnf":[[{"cnf":[]},1]]},1]]}"#
    );
    assert_eq!(serde_json::from_str::<Ordinal>(&json).unwrap(), v);
    assert_eq!(serde_json::to_string(&Ordinal::zero()).unwrap(), r#"{"cnf":[]}"#);
    assert_eq!(serde_json::from_str::<Ordinal>(r#""w*2""#).unwrap(), o("w*2"));
    // Non-normal forms are rejected.
    assert!(serde_json::from_str::<Ordinal>(r#"{"cnf":[[{"cnf":[]},1],[{"cnf":[[{"cnf":[]},1]]},1]]}"#).is_err());
    assert!(serde_json::from_str::<Ordinal>(r#"{"cnf":[[{"cnf":[]},0]]}"#).is_err());
}

#[test]
fn overflow_is_reported_not_wrapped() {
    let big = Ordinal::nat(u64::MAX);
    assert!(big.checked_add(&Ordinal::one()).is_none());
    assert!(w().mul_nat(2).checked_mul_nat(u64::MAX).is_none());
    assert!(parse_ordinal("18446744073709551615 + 1").is_err());
}

/// Ordinals below ω^ω as coefficient vectors indexed by exponent; an
/// independent model of the arithmetic for that fragment.
fn poly(a: &Ordinal) -> Vec<u64> {
    let mut v = vec![0u64; 8];
    for (e, c) in a.cnf() {
        v[e.as_nat().unwrap() as usize] = *c;
    }
    v
}

fn poly_add(a: &[u64], b: &[u64]) -> Vec<u64> {
    let Some(d) = (0..b.len()).rev().find(|&i| b[i] != 0) else {
        return a.to_vec();
    };
    let mut out = b.to_vec();
    for i in d + 1..a.len() {
        out[i] = a[i];
    }
    out[d] = a[d] + b[d];
    out
}

fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let Some(lead) = (0..a.len()).rev().find(|&i| a[i] != 0) else {
        return vec![0; 8];
    };
    let mut out = vec![0u64; 8];
    for j in (0..b.len()).rev() {
        if b[j] == 0 {
            continue;
        }
        let piece = if j == 0 {
            let mut p = a.to_vec();
            p[lead] *= b[0];
            p
        } else {
            let mut p = vec![0u64; 8];
            p[lead + j] = b[j];
            p
        };
        out = poly_add(&out, &piece);
    }
    out
}

fn small_poly_ordinal() -> impl Strategy<Value = Ordinal> {
    proptest::collection::vec(0u64..4, 3).prop_map(|cs| {
        let terms = cs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| **c > 0)
            .map(|(e, c)| (Ordinal::nat(e as u64), *c))
            .collect();
        Ordinal::from_cnf(terms).unwrap()
    })
}

fn small_ordinal() -> impl Strategy<Value = Ordinal> {
    let leaf = (0u64..4).prop_map(Ordinal::nat);
    leaf.prop_recursive(3, 12, 3, |inner| {
        proptest::collection::vec((inner, 1u64..4), 1..4).prop_map(|mut terms| {
            terms.sort_by(|a, b| b.0.cmp(&a.0));
            terms.dedup_by(|a, b| a.0 == b.0);
            Ordinal::from_cnf(terms).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn matches_polynomial_model_below_omega_omega(a in small_poly_ordinal(), b in small_poly_ordinal()) {
        prop_assert_eq!(poly(&a.add(&b)), poly_add(&poly(&a), &poly(&b)));
        prop_assert_eq!(poly(&a.mul(&b)), poly_mul(&poly(&a), &poly(&b)));
        let lex = poly(&a).iter().rev().cmp(poly(&b).iter().rev());
        prop_assert_eq!(a.cmp(&b), lex);
    }

    #[test]
    fn naturals_agree_with_u64(a in 0u64..1000, b in 0u64..1000) {
        prop_assert_eq!(Ordinal::nat(a).add(&Ordinal::nat(b)), Ordinal::nat(a + b));
        prop_assert_eq!(Ordinal::nat(a).mul(&Ordinal::nat(b)), Ordinal::nat(a * b));
        prop_assert_eq!(Ordinal::nat(a).cmp(&Ordinal::nat(b)), a.cmp(&b));
    }

    #[test]
    fn addition_and_multiplication_laws(a in small_ordinal(), b in small_ordinal(), c in small_ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.add(&b) >= b);
        prop_assert!(a.add(&b) >= a);
        if !b.is_zero() {
            prop_assert!(a.add(&b) > a);
        }
    }

    #[test]
    fn least_omega_power_is_least(x in small_ordinal()) {
        let p = x.least_omega_power_above();
        prop_assert!(p.is_power_of_omega());
        prop_assert!(p > x);
        // Every smaller ω-power is at most x; the candidates are ω^e for e
        // below the exponent of p.
        let e = p.lead_exp();
        let below = x.lead_exp();
        prop_assert!(Ordinal::omega_pow(below.clone()) <= x || x.is_zero());
        prop_assert_eq!(e, if x.is_zero() { Ordinal::zero() } else { below.succ() });
    }

    #[test]
    fn family_sup_is_least_upper_bound(s in small_ordinal(), o in small_ordinal()) {
        prop_assume!(!s.is_zero());
        let f = OrdFamily::affine(s.clone(), o.clone()).unwrap();
        let sup = f.sup();
        for n in 0..=50 {
            prop_assert!(f.eval(n) <= sup);
        }
        if o < s.mul(&Ordinal::omega()) {
            prop_assert!(sup.is_limit());
            // Anything below the sup is exceeded by some member: check the
            // fundamental sequence of the sup.
            for k in 1..6 {
                let below = sup.fundamental_sequence(k).unwrap();
                prop_assert!((0..=50).any(|n| f.eval(n) > below));
            }
        } else {
            prop_assert_eq!(sup, o);
        }
    }

    #[test]
    fn fundamental_sequences_increase_to_the_limit(a in small_ordinal()) {
        prop_assume!(a.is_limit());
        let mut prev = a.fundamental_sequence(0).unwrap();
        for k in 1..8 {
            let next = a.fundamental_sequence(k).unwrap();
            prop_assert!(next > prev);
            prop_assert!(next < a);
            prev = next;
        }
    }

    #[test]
    fn json_and_text_round_trip(a in small_ordinal()) {
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ordinal>(&json).unwrap(), a.clone());
        prop_assert_eq!(parse_ordinal(&a.to_string()).unwrap(), a);
    }
}

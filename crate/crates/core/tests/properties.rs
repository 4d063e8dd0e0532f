use klooster_core::field::{FieldElement, FieldSpec};
use klooster_core::kloosterman::{kloosterman, KloostermanTable};
use klooster_core::sl_group::{trace_distribution_closed, GroupParams};
use klooster_core::weights::{
    dual_weights, weight_distribution_direct, weight_distribution_macwilliams,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn element(spec: &FieldSpec, bits: u32) -> FieldElement {
    spec.element(bits & (spec.order() - 1)).unwrap()
}

proptest! {
    #[test]
    fn field_laws(r in 1u32..=16, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = FieldSpec::with_default_poly(r).unwrap();
        let (a, b, c) = (element(&f, a), element(&f, b), element(&f, c));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.trace(f.add(a, b)), f.trace(a) ^ f.trace(b));
        prop_assert_eq!(f.trace(a), f.trace_frobenius(a));
        prop_assert_eq!(f.trace(f.square(a)), f.trace(a));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
        }
    }

    #[test]
    fn kloosterman_weil_bound(r in 1u32..=8, m in 1u32..=3, a in 1u32..256) {
        let f = FieldSpec::with_default_poly(r).unwrap();
        let a = element(&f, a);
        prop_assume!(!a.is_zero());
        let k = kloosterman(&f, m, a).unwrap();
        let bound = (m as f64 + 1.0) * (f.order() as f64).powf(m as f64 / 2.0);
        prop_assert!((k as f64).abs() <= bound + 1e-9);
        // K_m(a) = K_m(a^2) by Frobenius invariance.
        prop_assert_eq!(k, kloosterman(&f, m, f.square(a)).unwrap());
    }
}

#[test]
fn trace_is_balanced() {
    for r in 1..=12 {
        let f = FieldSpec::with_default_poly(r).unwrap();
        let ones = f.elements().filter(|&a| f.trace(a) == 1).count() as u32;
        assert_eq!(ones, f.order() / 2, "r = {r}");
    }
}

#[test]
fn moments_independent_of_modulus() {
    let a = FieldSpec::new(4, 0b1_0011).unwrap();
    let b = FieldSpec::new(4, 0b1_1001).unwrap();
    for m in 1..=3 {
        let ta = KloostermanTable::new(&a, m).unwrap();
        let tb = KloostermanTable::new(&b, m).unwrap();
        assert_eq!(ta.histogram(), tb.histogram());
        for h in 0..8 {
            assert_eq!(ta.moment(h), tb.moment(h));
        }
    }
}

#[test]
fn reducible_modulus_rejected() {
    assert!(FieldSpec::new(4, 0b1_0101).is_err());
    assert!(FieldSpec::new(3, 0b1_0011).is_err());
}

#[test]
fn sum_of_kloosterman_is_one() {
    // sum over a != 0 of K_1(a) = 1 for every q = 2^r.
    for r in 1..=8 {
        let f = FieldSpec::with_default_poly(r).unwrap();
        let t = KloostermanTable::new(&f, 1).unwrap();
        assert_eq!(t.moment(1), BigInt::from(1));
    }
}

#[test]
fn sl4_truncated_routes_agree() {
    let params = GroupParams::new(4, FieldSpec::with_default_poly(2).unwrap()).unwrap();
    let direct =
        weight_distribution_direct(&trace_distribution_closed(&params).unwrap(), 10).unwrap();
    let mw = weight_distribution_macwilliams(&dual_weights(&params).unwrap(), 10).unwrap();
    assert_eq!(direct, mw);
}

#[test]
fn every_default_modulus_is_irreducible() {
    for r in 1..=klooster_core::field::MAX_DEGREE {
        let poly = klooster_core::field::default_poly(r).unwrap();
        assert!(klooster_core::field::is_irreducible(poly), "r = {r}");
        assert_eq!(FieldSpec::with_default_poly(r).unwrap().degree(), r);
    }
    assert!(FieldSpec::with_default_poly(21).is_err());
}

use proptest::prelude::*;

use dkdv_core::exactnum::field_image;
use dkdv_core::{Field, LaurentSeries, Mod61, Rational};

type S = LaurentSeries<Rational>;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

/// Nonzero series with valuation in `[-5, 5]` and known order a few terms past it.
fn series() -> impl Strategy<Value = S> {
    (-5i64..=5, rational(), prop::collection::vec(rational(), 0..5), 0i64..4).prop_filter_map(
        "leading coefficient must be nonzero",
        |(v, lead, rest, slack)| {
            if lead.is_zero() {
                return None;
            }
            let k = v + rest.len() as i64 + slack;
            let mut coeffs = vec![lead];
            coeffs.extend(rest);
            Some(S::from_coeffs(v, coeffs, k))
        },
    )
}

fn image(s: &S) -> LaurentSeries<Mod61> {
    LaurentSeries::from_terms(
        s.terms().map(|(e, c)| (e, field_image::<Mod61>(c).unwrap())),
        s.known_order(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn double_inverse_is_identity(a in series()) {
        let back = a.inv().unwrap().inv().unwrap();
        prop_assert_eq!(back.known_order(), a.known_order());
        prop_assert!(back.agrees_with(&a), "{} vs {}", back, a);
    }

    #[test]
    fn product_with_inverse_is_one(a in series()) {
        let v = a.valuation().unwrap();
        let p = a.mul(&a.inv().unwrap());
        prop_assert_eq!(p.known_order(), a.known_order() - v);
        prop_assert!(p.agrees_with(&S::one(p.known_order())), "{}", p);
    }

    #[test]
    fn valuation_is_additive(a in series(), b in series()) {
        let p = a.mul(&b);
        prop_assert_eq!(p.valuation().unwrap(), a.valuation().unwrap() + b.valuation().unwrap());
    }

    #[test]
    fn known_order_follows_truncation_rules(a in series(), b in series()) {
        let (va, vb) = (a.valuation().unwrap(), b.valuation().unwrap());
        prop_assert_eq!(a.add(&b).known_order(), a.known_order().min(b.known_order()));
        prop_assert_eq!(a.mul(&b).known_order(), (a.known_order() + vb).min(b.known_order() + va));
        prop_assert_eq!(a.inv().unwrap().known_order(), a.known_order() - 2 * va);
    }

    #[test]
    fn arithmetic_is_deterministic(a in series(), b in series()) {
        prop_assert_eq!(a.mul(&b).add(&a), a.mul(&b).add(&a));
        prop_assert_eq!(a.inv().unwrap().sub(&b), a.inv().unwrap().sub(&b));
    }

    #[test]
    fn reduction_mod_p_commutes(a in series(), b in series()) {
        prop_assert_eq!(image(&a.mul(&b)), image(&a).mul(&image(&b)));
        prop_assert_eq!(image(&a.add(&b)), image(&a).add(&image(&b)));
        prop_assert_eq!(image(&a.inv().unwrap()), image(&a).inv().unwrap());
    }

    #[test]
    fn json_roundtrip(a in series()) {
        prop_assert_eq!(S::from_json(&a.to_json()).unwrap(), a.clone());
        let m = image(&a);
        prop_assert_eq!(LaurentSeries::<Mod61>::from_json(&m.to_json()).unwrap(), m);
    }
}

#[test]
fn field_axioms_on_small_values() {
    for x in -6i64..=6 {
        for y in 1i64..=6 {
            let r = Rational::new(x, y).unwrap();
            let m: Mod61 = field_image(&r).unwrap();
            if x != 0 {
                assert_eq!(m.times(&m.recip().unwrap()), Mod61::one());
            }
            assert_eq!(m.plus(&m.negated()), Mod61::zero());
        }
    }
}

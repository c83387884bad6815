use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use ordspace::abelian::{flag_cone, rat, FlagOrder, QuadField};
use ordspace::cones::{check_axioms, ConeDocument};
use ordspace::realization::{magnus_cone, PLHomeo, RationalEnumeration};
use ordspace::tower::{tower_cone, SignVector};
use ordspace::{Ball, Cone, Element, Family, Sign};

fn pl_map() -> impl Strategy<Value = PLHomeo> {
    (
        prop::collection::vec((1i64..4, 1i64..4), 1..6),
        -5i64..5,
        -5i64..5,
        (1i64..4, 1i64..4),
        (1i64..4, 1i64..4),
    )
        .prop_map(|(steps, x0, y0, (ln, ld), (rn, rd))| {
            let (mut x, mut y) = (x0, y0);
            let mut pts = vec![(rat(x, 1), rat(y, 1))];
            for (dx, dy) in steps {
                x += dx;
                y += dy;
                pts.push((rat(x, 1), rat(y, 1)));
            }
            PLHomeo::new(pts, rat(ln, ld), rat(rn, rd)).unwrap()
        })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn quad() -> impl Strategy<Value = QuadField> {
    (-4i64..5, -3i64..4, 1i64..4).prop_map(|(a, b, d)| QuadField::new(rat(a, d), rat(b, d)))
}

/// A random functional followed by the standard basis, so the flag is total.
fn flag(dim: usize) -> impl Strategy<Value = FlagOrder> {
    prop::collection::vec(quad(), dim).prop_map(move |v| {
        let mut rows = vec![v];
        rows.extend(FlagOrder::lex(dim).functionals().iter().cloned());
        FlagOrder::new(rows).unwrap()
    })
}

fn free_word(rank: i32, max_len: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec((1..=rank, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Element::free(&ls.into_iter().map(|(i, s)| if s { i } else { -i }).collect::<Vec<_>>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pl_composition_is_associative(f in pl_map(), g in pl_map(), h in pl_map()) {
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
    }

    #[test]
    fn pl_inverse_is_exact(f in pl_map(), x in rational()) {
        prop_assert!(f.compose(&f.inverse()).is_identity());
        prop_assert!(f.inverse().compose(&f).is_identity());
        prop_assert_eq!(f.inverse_eval(&f.eval(&x)), x.clone());
        prop_assert_eq!(f.inverse().eval(&f.eval(&x)), x);
    }

    #[test]
    fn pl_compose_matches_pointwise(f in pl_map(), g in pl_map(), x in rational()) {
        prop_assert_eq!(f.compose(&g).eval(&x), f.eval(&g.eval(&x)));
    }

    #[test]
    fn pl_support_matches_evaluation(f in pl_map(), g in pl_map(), x in rational()) {
        let h = f.compose(&g.inverse());
        let d = h.eval(&x) - &x;
        let hit: Vec<_> = h.support().into_iter().filter(|s| s.contains(&x)).collect();
        if d.is_zero() {
            prop_assert!(hit.is_empty());
        } else {
            prop_assert_eq!(hit.len(), 1);
            prop_assert_eq!(hit[0].sign as i32, if d.is_positive() { 1 } else { -1 });
        }
    }

    #[test]
    fn enumeration_is_a_bijection(i in 0u64..100_000, q in rational()) {
        let e = RationalEnumeration;
        let i = BigUint::from(i);
        prop_assert_eq!(e.index_of(&e.nth(&i)), i);
        prop_assert_eq!(e.nth(&e.index_of(&q)), q);
    }

    #[test]
    fn random_flags_are_cones(f in prop_oneof![flag(2), flag(3)]) {
        let fam = Family::Abelian(f.dim());
        let ball = Ball::enumerate(&fam, 3).unwrap();
        prop_assert!(check_axioms(flag_cone(f).as_ref(), &ball).unwrap().is_verified());
    }

    #[test]
    fn descriptors_round_trip(f in flag(2), signs in prop::collection::vec(any::<bool>(), 1..4), n in 2u32..4) {
        let cones: Vec<Cone> = vec![
            flag_cone(f),
            tower_cone(&SignVector::new(signs)).unwrap(),
            magnus_cone(n).unwrap(),
            ordspace::braid::dehornoy_cone(n as usize + 1).unwrap(),
        ];
        for c in cones {
            let doc = ConeDocument::of(&c).unwrap();
            let back = ConeDocument::from_json(&doc.to_json()).unwrap();
            prop_assert_eq!(&back, &doc);
            let rebuilt = back.build().unwrap();
            for g in Ball::enumerate(c.family(), 2).unwrap().iter() {
                prop_assert_eq!(rebuilt.classify(g).unwrap(), c.classify(g).unwrap());
            }
        }
    }

    #[test]
    fn magnus_is_conjugation_invariant(g in free_word(2, 6), u in free_word(2, 4)) {
        let p = magnus_cone(2).unwrap();
        let fam = Family::free(2);
        let c = fam.product(&[u.clone(), g.clone(), fam.invert(&u).unwrap()]).unwrap();
        prop_assert_eq!(p.classify(&c).unwrap(), p.classify(&g).unwrap());
        let s = p.classify(&g).unwrap();
        prop_assert_eq!(s == Sign::Identity, g == Element::free(&[]));
    }
}

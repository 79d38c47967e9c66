use std::cmp::Ordering;
use std::sync::OnceLock;

use ibpkit::cone::Cone;
use ibpkit::corpus;
use ibpkit::hypernum::Rational;
use ibpkit::ibp0::{lattice_split_identities, Element, Ibp0, Residuated};
use ibpkit::lmonoid::{k_envelope, LMonoid, Orientation, Point, SymbolicMonoid};
use ibpkit::scan::{Carrier, Window};
use ibpkit::semihoop::{ConeHoop, GroupState, Semihoop, SemihoopState};
use ibpkit::states::{join_hyperstate, lambda_family, measure_family, Hyperstate, RadicalState};
use proptest::prelude::*;

struct Fixture {
    ibp: Ibp0,
    elements: Vec<Element>,
}

fn fixtures() -> &'static [Fixture] {
    static ALL: OnceLock<Vec<Fixture>> = OnceLock::new();
    ALL.get_or_init(|| {
        let algebras = [
            corpus::finite(corpus::boolean(2)),
            corpus::finite(corpus::rot_goedel(3)),
            corpus::chang(1),
            corpus::chang(2),
            corpus::finite(corpus::boolean(1)).product(&corpus::chang(1)),
            corpus::finite(corpus::rot_goedel(3)).product(&corpus::chang(1)),
            corpus::chang(1).product(&corpus::chang(1)),
        ];
        algebras
            .into_iter()
            .map(|a| {
                let ibp = Ibp0::new(a, Window::new(4)).expect("corpus algebras are IBP0");
                let elements = ibp.algebra().elements(4);
                Fixture { ibp, elements }
            })
            .collect()
    })
}

fn pick(f: &Fixture, i: usize) -> &Element {
    &f.elements[i % f.elements.len()]
}

fn cone(exps: &[u32]) -> Cone {
    Cone::new(exps)
}

fn weights(k: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..6, 1i64..4).prop_map(|(n, d)| Rational::new(n, d)), k)
}

fn hyperstate(ibp: &Ibp0, m: usize, l: usize) -> Hyperstate {
    let measures = measure_family(ibp.skeleton().atoms().len(), 4);
    let entries = [Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 1), Rational::new(2, 1)];
    let lambdas = lambda_family(ibp.algebra().cone_rank(), &entries);
    let state = RadicalState::from_lambda(ibp, &lambdas[l % lambdas.len()]).unwrap();
    Hyperstate::Split { measure: measures[m % measures.len()].clone(), state }
}

/// The family member, when it joins to a valid hyperstate.
fn valid_hyperstate(ibp: &Ibp0, m: usize, l: usize) -> Option<Hyperstate> {
    let Hyperstate::Split { measure, state } = hyperstate(ibp, m, l) else { unreachable!() };
    let (s, report) = join_hyperstate(ibp, &measure, &state).unwrap();
    report.is_valid().then_some(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn decomposition_recomposes(f in 0usize..7, i in any::<usize>()) {
        let fx = &fixtures()[f];
        let (ibp, a) = (&fx.ibp, pick(fx, i));
        let alg = ibp.algebra();
        let d = ibp.decompose(a).unwrap();
        prop_assert_eq!(&ibp.recompose(&d), a);
        prop_assert_eq!(alg.join(&d.b, &alg.neg(&d.b)), alg.top());
        let not_c = alg.neg(&d.c);
        prop_assert!(alg.leq(&not_c, &d.c) && not_c != d.c);
    }

    #[test]
    fn skeleton_join_radical_is_radical(f in 0usize..7, i in any::<usize>(), j in any::<usize>()) {
        let fx = &fixtures()[f];
        let ibp = &fx.ibp;
        let b = &ibp.skeleton().elements()[i % ibp.skeleton().len()];
        let c = ibp.decompose(pick(fx, j)).unwrap().c;
        prop_assert!(ibp.is_radical(&ibp.algebra().join(b, &c)));
    }

    #[test]
    fn lattice_splits_hold(f in 0usize..7) {
        let report = lattice_split_identities(fixtures()[f].ibp.algebra(), &Window::new(3));
        prop_assert!(report.is_valid(), "{:?}", report.first_failure());
    }

    #[test]
    fn hyperstates_are_monotone_and_additive(f in 0usize..7, m in any::<usize>(), l in any::<usize>(), i in any::<usize>(), j in any::<usize>()) {
        let fx = &fixtures()[f];
        let ibp = &fx.ibp;
        let alg = ibp.algebra();
        let s = valid_hyperstate(ibp, m, l);
        prop_assume!(s.is_some());
        let s = s.unwrap();
        let (x, y) = (pick(fx, i), pick(fx, j));
        let (sx, sy) = (s.value(ibp, x).unwrap(), s.value(ibp, y).unwrap());
        if alg.leq(x, y) {
            prop_assert_ne!(sx.cmp(&sy), Ordering::Greater);
        }
        if alg.mul(x, y) == alg.bot() {
            prop_assert_eq!(s.value(ibp, &alg.oplus(x, y)).unwrap(), sx + sy);
        }
    }

    #[test]
    fn radicals_have_standard_part_one(f in 0usize..7, m in any::<usize>(), l in any::<usize>(), i in any::<usize>()) {
        let fx = &fixtures()[f];
        let ibp = &fx.ibp;
        let s = valid_hyperstate(ibp, m, l);
        prop_assume!(s.is_some());
        let s = s.unwrap();
        let x = pick(fx, i);
        if ibp.is_radical(x) {
            prop_assert_eq!(s.value(ibp, x).unwrap().std, Rational::from(1));
        }
        if ibp.is_coradical(x) {
            prop_assert_eq!(s.value(ibp, x).unwrap().std, Rational::from(0));
        }
    }

    #[test]
    fn finite_algebras_have_standard_values(f in 0usize..2, m in any::<usize>(), i in any::<usize>()) {
        let fx = &fixtures()[f];
        let s = hyperstate(&fx.ibp, m, 0);
        prop_assert_eq!(s.value(&fx.ibp, pick(fx, i)).unwrap().inf, Rational::from(0));
    }

    #[test]
    fn cone_states_are_valuations(lambda in weights(2), x in prop::array::uniform2(0u32..20), y in prop::array::uniform2(0u32..20)) {
        let h = ConeHoop::new(2);
        let w = SemihoopState::Weights(lambda);
        let (x, y) = (cone(&x), cone(&y));
        let at = |m: &Cone| w.at_cone(m).unwrap();
        prop_assert_eq!(at(&h.mul(&x, &y)), at(&x) + at(&y));
        prop_assert_eq!(at(&h.meet(&x, &y)) + at(&h.join(&x, &y)), at(&x) + at(&y));
    }

    #[test]
    fn sigma_after_h_is_w(lambda in weights(3), x in prop::array::uniform3(0u32..30)) {
        let h = ConeHoop::new(3);
        let m = LMonoid::Symbolic(h.monoid_reduct());
        let (group, embedding) = k_envelope(&m);
        let x = cone(&x);
        let sigma = GroupState::Linear(lambda.clone());
        let value = sigma.eval(&group, &embedding.apply(&Point::Tuple(x)));
        prop_assert_eq!(value, SemihoopState::Weights(lambda).at_cone(&x).unwrap());
    }

    #[test]
    fn h_preserves_meet_and_join(x in prop::array::uniform2(0u32..30), y in prop::array::uniform2(0u32..30)) {
        for orientation in [Orientation::Natural, Orientation::Reversed] {
            let s = SymbolicMonoid::new(2, orientation);
            let (group, h) = k_envelope(&LMonoid::Symbolic(s));
            let (x, y) = (cone(&x), cone(&y));
            let image = |c: Cone| h.apply(&Point::Tuple(c));
            prop_assert_eq!(image(s.meet(&x, &y)), group.k_meet(&image(x), &image(y)));
            prop_assert_eq!(image(s.join(&x, &y)), group.k_join(&image(x), &image(y)));
        }
    }

    #[test]
    fn addition_distributes_over_join(a in 0usize..64, b in 0usize..64, c in 0usize..64, which in 0usize..19) {
        let monoids = corpus::lmonoid_corpus();
        let m = LMonoid::Finite(monoids[which % monoids.len()].1.clone());
        let (group, _) = k_envelope(&m);
        let classes = group.classes();
        let pick = |i: usize| classes[i % classes.len()].clone();
        let (e1, e2, e3) = (pick(a), pick(b), pick(c));
        let lhs = group.add(&e1, &group.k_join(&e2, &e3));
        let rhs = group.k_join(&group.add(&e1, &e2), &group.add(&e1, &e3));
        prop_assert!(group.k_equal(&lhs, &rhs), "{lhs} vs {rhs}");
    }
}

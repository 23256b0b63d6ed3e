mod common;

use common::{naive_closure, naive_compose, naive_meet, pairs_of, Pairs};
use proptest::prelude::*;
use relrep::format::{parse_algebra, print_algebra};
use relrep::model::{generate_closure, Representation};
use relrep::point::{self, Basic, BasisSet, TableVerdict};
use relrep::{check_representation, extract_tables, necessary_laws, FiniteAlgebra, Relation};

fn relation(n: usize) -> impl Strategy<Value = Relation> {
    proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
        let pairs = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (i / n, i % n)).collect::<Vec<_>>();
        Relation::from_pairs(n, pairs).unwrap()
    })
}

fn same_base_triple() -> impl Strategy<Value = (Relation, Relation, Relation)> {
    (1usize..=7).prop_flat_map(|n| (relation(n), relation(n), relation(n)))
}

fn union(a: &Relation, b: &Relation) -> Relation {
    a.complement().intersect(&b.complement()).unwrap().complement()
}

proptest! {
    #[test]
    fn compose_matches_set_definition((a, b, _) in same_base_triple()) {
        prop_assert_eq!(pairs_of(&a.compose(&b).unwrap()), naive_compose(&pairs_of(&a), &pairs_of(&b)));
        prop_assert_eq!(pairs_of(&a.intersect(&b).unwrap()), naive_meet(&pairs_of(&a), &pairs_of(&b)));
    }

    #[test]
    fn composition_is_associative((a, b, c) in same_base_triple()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn meet_is_a_semilattice((a, b, c) in same_base_triple()) {
        prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
        prop_assert_eq!(a.intersect(&a).unwrap(), a.clone());
        prop_assert_eq!(
            a.intersect(&b).unwrap().intersect(&c).unwrap(),
            a.intersect(&b.intersect(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn composition_is_monotone((a, b, c) in same_base_triple()) {
        let bigger = union(&a, &c);
        prop_assert!(a.is_subset(&bigger));
        prop_assert!(a.compose(&b).unwrap().is_subset(&bigger.compose(&b).unwrap()));
        prop_assert!(b.compose(&a).unwrap().is_subset(&b.compose(&bigger).unwrap()));
    }

    #[test]
    fn identity_is_neutral(a in (1usize..=9).prop_flat_map(relation)) {
        let id = Relation::identity(a.base_size()).unwrap();
        prop_assert_eq!(a.compose(&id).unwrap(), a.clone());
        prop_assert_eq!(id.compose(&a).unwrap(), a);
    }

    #[test]
    fn closure_is_the_least_fixpoint((a, b, _) in (1usize..=3).prop_flat_map(|n| (relation(n), relation(n), relation(n)))) {
        let model = generate_closure(vec![("a".to_string(), a.clone()), ("b".to_string(), b.clone())]).unwrap();
        let got: std::collections::HashSet<Pairs> = model.members().iter().map(|m| pairs_of(&m.value)).collect();
        prop_assert_eq!(got.len(), model.len());
        prop_assert_eq!(got, naive_closure(&[pairs_of(&a), pairs_of(&b)]));

        // Closing again adds nothing, and the tables are those of the model.
        let again = generate_closure(model.members().iter().map(|m| (m.name.clone(), m.value.clone())).collect()).unwrap();
        prop_assert_eq!(again.len(), model.len());
        // The law checks are cubic in the member count; keep them to
        // closures of moderate size.
        if model.len() <= 64 {
            let alg = extract_tables(&model).unwrap();
            prop_assert!(necessary_laws(&alg).is_empty());
            prop_assert!(check_representation(&Representation::canonical(model).unwrap()).is_ok());
        }
    }

    #[test]
    fn printed_algebras_reparse(seed in any::<u64>(), count in 1usize..4) {
        for alg in common::corpus(count, seed) {
            let text = print_algebra(&alg);
            prop_assert_eq!(parse_algebra(&text).unwrap(), alg);
        }
    }

    #[test]
    fn point_tables_agree_with_samples(seed in any::<u64>()) {
        let verdict = point::verify_tables(50, seed);
        prop_assert!(matches!(verdict, TableVerdict::Ok { .. }), "{:?}", verdict);
    }
}

/// Where `z` can sit relative to `x < y` in a dense order without endpoints,
/// as the pair of classes `(x ? z, z ? y)`.
const BETWEEN_LT: [(Basic, Basic); 5] = [
    (Basic::Gt, Basic::Lt),
    (Basic::Eq, Basic::Lt),
    (Basic::Lt, Basic::Lt),
    (Basic::Lt, Basic::Eq),
    (Basic::Lt, Basic::Gt),
];

fn flip(b: Basic) -> Basic {
    match b {
        Basic::Lt => Basic::Gt,
        Basic::Eq => Basic::Eq,
        Basic::Gt => Basic::Lt,
    }
}

/// Composition of comparison relations derived from order types alone.
fn order_type_compose(a: BasisSet, b: BasisSet) -> BasisSet {
    let mut out = BasisSet::EMPTY;
    let realized = |class: Basic| -> Vec<(Basic, Basic)> {
        match class {
            Basic::Lt => BETWEEN_LT.to_vec(),
            // x > y: mirror the x < y positions.
            Basic::Gt => BETWEEN_LT.iter().map(|&(p, q)| (flip(q), flip(p))).collect(),
            // x = y: z is below, equal to, or above both.
            Basic::Eq => vec![(Basic::Gt, Basic::Lt), (Basic::Eq, Basic::Eq), (Basic::Lt, Basic::Gt)],
        }
    };
    for class in [Basic::Lt, Basic::Eq, Basic::Gt] {
        if realized(class).iter().any(|&(p, q)| a.contains(p) && b.contains(q)) {
            out = out.union(BasisSet::from(class));
        }
    }
    out
}

#[test]
fn basis_composition_matches_order_types() {
    for a in BasisSet::all() {
        for b in BasisSet::all() {
            assert_eq!(a.compose(b), order_type_compose(a, b), "{a} ; {b}");
            for c in BasisSet::all() {
                assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)));
                if a.is_subset(c) {
                    assert!(a.compose(b).is_subset(c.compose(b)));
                }
            }
        }
    }
}

#[test]
fn point_tables_from_order_types() {
    let alg = point::point_algebra();
    let interp = point::point_interpretation();
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(order_type_compose(interp[a], interp[b]), interp[alg.comp(a, b)]);
        }
    }
    assert_eq!(point::verify_tables(1000, 0), TableVerdict::Ok { cells: 18, samples: 1000 });
}

#[test]
fn closure_oracle_on_lt() {
    let lt = Relation::from_pairs(2, [(0, 1)]).unwrap();
    let alg = extract_tables(&generate_closure(vec![("lt".to_string(), lt)]).unwrap()).unwrap();
    let expected: FiniteAlgebra = FiniteAlgebra::from_names(
        &["lt", "m1"],
        &[&["m1", "m1"], &["m1", "m1"]],
        &[&["lt", "m1"], &["m1", "m1"]],
    )
    .unwrap();
    assert_eq!(alg, expected);
}

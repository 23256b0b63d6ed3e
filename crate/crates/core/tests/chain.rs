mod common;

use common::{naive_compose, naive_meet, pairs_of, Pairs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relrep::chain::{
    check_hypotheses, derive_identity_lemma, parse_certificate, run_chain, verify_certificate, ChainError,
    FailureReport, FailureWitness, Hypothesis, LemmaOutcome, ModelTriple, Point, Rel,
};
use relrep::point::{BasisSet, Rational};
use relrep::Relation;

fn relation(n: usize, mask: u64) -> Relation {
    Relation::from_pairs(n, (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n))).unwrap()
}

fn all_triples(n: usize) -> impl Iterator<Item = ModelTriple> {
    let per = 1u64 << (n * n);
    (0..per * per * per).map(move |k| {
        let (z, e, r) = (k % per, k / per % per, k / per / per);
        ModelTriple::finite(relation(n, z), relation(n, e), relation(n, r)).unwrap()
    })
}

fn sets(m: &ModelTriple) -> (Pairs, Pairs, Pairs) {
    let get = |r| pairs_of(m.relation(r).unwrap());
    (get(Rel::Z), get(Rel::E), get(Rel::R))
}

/// The six equations, checked on pair sets.
fn equations_hold(z: &Pairs, e: &Pairs, r: &Pairs) -> bool {
    naive_compose(r, e) == *r
        && naive_compose(e, r) == *r
        && naive_compose(r, r) == *r
        && naive_compose(z, r) == *z
        && naive_compose(r, z) == *z
        && naive_meet(r, e) == *z
}

fn genuine(m: &ModelTriple, report: &FailureReport) -> bool {
    match &report.witness {
        FailureWitness::Pair { x, y } => m.violates_at(report.hypothesis, x, y),
        FailureWitness::Collision { a, b } => {
            report.hypothesis == Hypothesis::Distinct && m.relation(*a) == m.relation(*b)
        }
    }
}

#[test]
fn no_triple_over_one_or_two_points_satisfies_everything() {
    for n in 1..=2 {
        let mut count = 0;
        for m in all_triples(n) {
            let failures = check_hypotheses(&m);
            assert!(!failures.is_empty());
            let (z, e, r) = sets(&m);
            assert_eq!(
                failures.iter().all(|f| f.hypothesis == Hypothesis::Distinct),
                equations_hold(&z, &e, &r)
            );
            count += 1;
        }
        assert_eq!(count, if n == 1 { 8 } else { 4096 });
    }
}

#[test]
fn equations_force_identity_part_of_r_into_z() {
    let mut satisfying = 0;
    for n in 1..=2 {
        for m in all_triples(n) {
            let (z, e, r) = sets(&m);
            if !equations_hold(&z, &e, &r) {
                continue;
            }
            satisfying += 1;
            assert!(r.iter().filter(|(x, y)| x == y).all(|p| z.contains(p)));
            assert!(matches!(derive_identity_lemma(&m), LemmaOutcome::ConfirmedInclusion { .. }));
        }
    }
    assert!(satisfying > 0);
}

#[test]
fn finite_chains_stop_with_a_genuine_violation() {
    for n in 1..=2 {
        for m in all_triples(n) {
            for depth in [1, 2, 3] {
                match run_chain(&m, depth) {
                    Ok(_) => panic!("a base of {n} points cannot hold {} chain points and y", depth + 1),
                    Err(ChainError::Blocked(report)) => assert!(genuine(&m, &report), "{report} on {m:?}"),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn sampled_three_and_four_point_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3000 {
        let n = rng.random_range(3..=4);
        let mut draw = || relation(n, rng.random_range(0..1u64 << (n * n)));
        let m = ModelTriple::finite(draw(), draw(), draw()).unwrap();
        match run_chain(&m, n) {
            Ok(_) => panic!("{n} points cannot hold {} chain points", n + 2),
            Err(ChainError::Blocked(report)) => assert!(genuine(&m, &report), "{report}"),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn symbolic_chain_is_the_dyadic_sequence() {
    let m = ModelTriple::qsymbolic();
    let cert = run_chain(&m, 60).unwrap();
    assert_eq!(cert.anchor(), &Point::Rational(Rational::one()));
    for (k, p) in cert.points().iter().enumerate() {
        let den = 1i64 << k;
        let expected = Rational::new(den - 1, den).unwrap();
        assert_eq!(p.as_rational(), Some(&expected), "x_{k}");
    }
    let text = cert.to_text();
    assert_eq!(parse_certificate(&text, &m).unwrap(), cert);
    assert_eq!(text.lines().filter(|l| l.starts_with("pair ")).count(), 61 * 60 / 2 + 61);
}

#[test]
fn every_symbolic_triple_either_chains_or_fails_genuinely() {
    for z in BasisSet::all() {
        for e in BasisSet::all() {
            for r in BasisSet::all() {
                let m = ModelTriple::symbolic(z, e, r);
                match run_chain(&m, 4) {
                    Ok(cert) => {
                        verify_certificate(&m, &cert).unwrap();
                        // The start pair lies in r \ z.
                        assert!(r.difference(z) != BasisSet::EMPTY);
                    }
                    Err(ChainError::Blocked(report)) => assert!(genuine(&m, &report), "{report} on {m:?}"),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

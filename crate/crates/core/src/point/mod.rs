//! Relations definable over the rationals by comparison, and the point algebra.
//!
//! Every relation here is a union of the basic classes `<`, `=`, `>`, so the
//! whole model is the 8-element [`BasisSet`] algebra. Composition witnesses
//! are constructed exactly: a midpoint, an endpoint, or a point one unit past
//! both ends. The last case is where the table relies on ℚ having no least or
//! greatest element (the `LT;GT` and `GT;LT` cells).

mod basis;
mod rational;

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use basis::{Basic, BasisSet};
pub use rational::{ParseRationalError, Rational};

use crate::algebra::{FiniteAlgebra, Op};

pub fn compose_symbolic(a: BasisSet, b: BasisSet) -> BasisSet {
    a.compose(b)
}

pub fn intersect_symbolic(a: BasisSet, b: BasisSet) -> BasisSet {
    a.intersect(b)
}

/// Whether `(x, y)` belongs to the relation `a`.
pub fn member(x: &Rational, y: &Rational, a: BasisSet) -> bool {
    a.contains(Basic::of(x.cmp(y)))
}

/// Candidate intermediate points, in the order they are tried.
fn witness_candidates(x: &Rational, y: &Rational) -> [Rational; 5] {
    let one = Rational::one();
    let (lo, hi) = match x.cmp(y) {
        Ordering::Greater => (y, x),
        _ => (x, y),
    };
    [x.midpoint(y), x.clone(), y.clone(), hi + &one, lo - &one]
}

/// A point `z` with `(x, z) ∈ a` and `(z, y) ∈ b`, if one exists.
///
/// Tries the midpoint, then `x`, then `y`, then `max + 1`, then `min - 1`.
/// Each basic composition is realized by one of these, so the scan is complete.
pub fn witness(x: &Rational, y: &Rational, a: BasisSet, b: BasisSet) -> Option<Rational> {
    witness_candidates(x, y)
        .into_iter()
        .find(|z| member(x, z, a) && member(z, y, b))
}

/// The point algebra: elements `z`, `e`, `r` standing for the empty relation,
/// the identity and `<` on ℚ.
pub fn point_algebra() -> FiniteAlgebra {
    const Z: usize = 0;
    const E: usize = 1;
    const R: usize = 2;
    FiniteAlgebra::new(
        vec!["z".into(), "e".into(), "r".into()],
        vec![vec![Z, Z, Z], vec![Z, E, R], vec![Z, R, R]],
        vec![vec![Z, Z, Z], vec![Z, E, Z], vec![Z, Z, R]],
    )
    .expect("point algebra tables are well formed")
}

/// The relations the point algebra's elements denote, in element order.
pub fn point_interpretation() -> [BasisSet; 3] {
    [BasisSet::EMPTY, BasisSet::EQ, BasisSet::LT]
}

/// The symbolic seeds `z`, `e`, `r` whose closure is the point algebra.
pub fn point_seeds() -> Vec<(String, BasisSet)> {
    ["z", "e", "r"].iter().map(|s| s.to_string()).zip(point_interpretation()).collect()
}

/// All eight basis sets as named seeds.
pub fn all_basis_seeds() -> Vec<(String, BasisSet)> {
    BasisSet::all().map(|b| (b.label().to_string(), b)).collect()
}

/// Seeded pseudorandom rational pairs; about a third of them are equal pairs.
pub fn sample_pairs(count: usize, seed: u64) -> Vec<(Rational, Rational)> {
    const BOUND: i64 = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let num = rng.random_range(-BOUND..=BOUND);
        let den = rng.random_range(1..=BOUND);
        Rational::new(num, den).expect("denominator is positive")
    };
    (0..count)
        .map(|_| {
            let x = draw(&mut rng);
            let y = if rng.random_ratio(1, 3) { x.clone() } else { draw(&mut rng) };
            (x, y)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// The table claims `(x, y)` is in the result but no witness exists.
    MissingWitness,
    /// The table excludes `(x, y)` but `witness` proves membership.
    Witnessed { witness: Rational },
    /// Meet cell disagrees with pointwise membership.
    MeetMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub op: Op,
    pub a: usize,
    pub b: usize,
    pub x: Rational,
    pub y: Rational,
    pub kind: DiscrepancyKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TableVerdict {
    Ok { cells: usize, samples: usize },
    Discrepancy(Discrepancy),
}

/// Checks an algebra's tables against the relations its elements denote.
///
/// For every cell and every sampled pair: membership claimed by a composition
/// cell must come with a validated witness, and a pair outside the claimed
/// result must admit no witness among the candidate constructions. Meet cells
/// are checked pointwise.
pub fn verify_tables_with(
    algebra: &FiniteAlgebra,
    interpretation: &[BasisSet],
    sample_count: usize,
    seed: u64,
) -> TableVerdict {
    assert_eq!(algebra.len(), interpretation.len(), "one relation per element");
    let samples = sample_pairs(sample_count, seed);
    let m = algebra.len();
    for op in Op::ALL {
        for a in 0..m {
            for b in 0..m {
                let claimed = interpretation[algebra.apply(op, a, b)];
                let (ra, rb) = (interpretation[a], interpretation[b]);
                for (x, y) in &samples {
                    let kind = match op {
                        Op::Comp => {
                            let in_claim = member(x, y, claimed);
                            match witness(x, y, ra, rb) {
                                Some(z) if !in_claim => Some(DiscrepancyKind::Witnessed { witness: z }),
                                Some(z) if !(member(x, &z, ra) && member(&z, y, rb)) => {
                                    Some(DiscrepancyKind::MissingWitness)
                                }
                                None if in_claim => Some(DiscrepancyKind::MissingWitness),
                                _ => None,
                            }
                        }
                        Op::Meet => (member(x, y, claimed) != (member(x, y, ra) && member(x, y, rb)))
                            .then_some(DiscrepancyKind::MeetMismatch),
                    };
                    if let Some(kind) = kind {
                        return TableVerdict::Discrepancy(Discrepancy {
                            op,
                            a,
                            b,
                            x: x.clone(),
                            y: y.clone(),
                            kind,
                        });
                    }
                }
            }
        }
    }
    TableVerdict::Ok { cells: 2 * m * m, samples: samples.len() }
}

/// [`verify_tables_with`] on the point algebra and its intended meaning.
pub fn verify_tables(sample_count: usize, seed: u64) -> TableVerdict {
    verify_tables_with(&point_algebra(), &point_interpretation(), sample_count, seed)
}

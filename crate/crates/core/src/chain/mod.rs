//! Why a model of the point algebra cannot be finite, as executable checks.
//!
//! Given relations `z`, `e`, `r` on a set `U` with `r;e = r = e;r`, `r;r = r`,
//! `z;r = z = r;z`, `r·e = z` and the three pairwise distinct, the identity
//! part of `r` lies inside `z`, `r \ z` is non-empty, and density of `r` lets
//! us grow a chain `x_0, x_1, ..` below an anchor `y` with every
//! `(x_i, x_j)`, `i < j`, and every `(x_i, y)` in `r \ z`. Those points are
//! pairwise distinct, so `U` is infinite.
//!
//! The functions here replay that argument on a [`ModelTriple`]: on the
//! symbolic model over ℚ it runs for as long as asked, on a finite model it
//! stops at the first step a hypothesis fails to support and names that
//! hypothesis with a concrete pair. Steps are attempted in a fixed order
//! (identity lemma, start pair, then each extension) so reports are
//! reproducible.

// Failure reports carry rational points and stay off the hot path.
#![allow(clippy::result_large_err)]

mod certificate;

use std::fmt;

use serde::{Serialize, Serializer};

pub use certificate::{
    parse_certificate, verify_certificate, CertificateParseError, ChainCertificate, Membership, Target, VerifyError,
};

use crate::model::RelationValue;
use crate::point::{self, Basic, BasisSet, Rational};
use crate::relation::{RelError, Relation};

/// The three relations of a model triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rel {
    Z,
    E,
    R,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Z => "z",
            Rel::E => "e",
            Rel::R => "r",
        })
    }
}

/// The seven conditions on a model triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// `r;e = r`
    RE,
    /// `e;r = r`
    ER,
    /// `r;r = r`
    RR,
    /// `z;r = z`
    ZR,
    /// `r;z = z`
    RZ,
    /// `r·e = z`
    Meet,
    /// `z`, `e`, `r` pairwise distinct
    Distinct,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 7] = [
        Hypothesis::RE,
        Hypothesis::ER,
        Hypothesis::RR,
        Hypothesis::ZR,
        Hypothesis::RZ,
        Hypothesis::Meet,
        Hypothesis::Distinct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::RE => "R_E",
            Hypothesis::ER => "E_R",
            Hypothesis::RR => "R_R",
            Hypothesis::ZR => "Z_R",
            Hypothesis::RZ => "R_Z",
            Hypothesis::Meet => "MEET",
            Hypothesis::Distinct => "DISTINCT",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Hypothesis {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Left and right side of an equational hypothesis.
fn sides<R: RelationValue>(h: Hypothesis, z: &R, e: &R, r: &R) -> Option<(R, R)> {
    let ok = |v: Result<R, RelError>| v.expect("triple members share a base");
    Some(match h {
        Hypothesis::RE => (ok(r.compose(e)), r.clone()),
        Hypothesis::ER => (ok(e.compose(r)), r.clone()),
        Hypothesis::RR => (ok(r.compose(r)), r.clone()),
        Hypothesis::ZR => (ok(z.compose(r)), z.clone()),
        Hypothesis::RZ => (ok(r.compose(z)), z.clone()),
        Hypothesis::Meet => (ok(r.meet(e)), z.clone()),
        Hypothesis::Distinct => return None,
    })
}

/// A point of a model: a base index for finite models, a rational for the
/// symbolic one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Index(usize),
    Rational(Rational),
}

impl Point {
    pub fn rational(q: Rational) -> Point {
        Point::Rational(q)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Point::Rational(q) => Some(q),
            Point::Index(_) => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Rational(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::Index(i) => serializer.serialize_u64(*i as u64),
            Point::Rational(q) => q.serialize(serializer),
        }
    }
}

/// Relations `z`, `e`, `r` on a finite base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteTriple {
    z: Relation,
    e: Relation,
    r: Relation,
}

/// Either a finite triple or a triple of comparison relations over ℚ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelTriple {
    Finite(FiniteTriple),
    Symbolic { z: BasisSet, e: BasisSet, r: BasisSet },
}

/// Representative pair of each comparison class.
fn representative(b: Basic) -> (Point, Point) {
    let (x, y) = match b {
        Basic::Lt => (0, 1),
        Basic::Eq => (0, 0),
        Basic::Gt => (1, 0),
    };
    (Point::Rational(Rational::from_integer(x)), Point::Rational(Rational::from_integer(y)))
}

fn first_pair(rel: &Relation) -> Option<(Point, Point)> {
    rel.pairs().next().map(|(x, y)| (Point::Index(x), Point::Index(y)))
}

fn first_class(b: BasisSet) -> Option<(Point, Point)> {
    b.basics().next().map(representative)
}

impl ModelTriple {
    pub fn finite(z: Relation, e: Relation, r: Relation) -> Result<Self, RelError> {
        z.intersect(&e)?;
        z.intersect(&r)?;
        Ok(ModelTriple::Finite(FiniteTriple { z, e, r }))
    }

    pub fn symbolic(z: BasisSet, e: BasisSet, r: BasisSet) -> Self {
        ModelTriple::Symbolic { z, e, r }
    }

    /// `(∅, =, <)` over ℚ.
    pub fn qsymbolic() -> Self {
        let [z, e, r] = point::point_interpretation();
        ModelTriple::Symbolic { z, e, r }
    }

    pub fn base_size(&self) -> Option<usize> {
        match self {
            ModelTriple::Finite(t) => Some(t.z.base_size()),
            ModelTriple::Symbolic { .. } => None,
        }
    }

    pub fn relation(&self, rel: Rel) -> Option<&Relation> {
        match self {
            ModelTriple::Finite(t) => Some(match rel {
                Rel::Z => &t.z,
                Rel::E => &t.e,
                Rel::R => &t.r,
            }),
            ModelTriple::Symbolic { .. } => None,
        }
    }

    fn basis(&self, rel: Rel) -> Option<BasisSet> {
        match *self {
            ModelTriple::Symbolic { z, e, r } => Some(match rel {
                Rel::Z => z,
                Rel::E => e,
                Rel::R => r,
            }),
            ModelTriple::Finite(_) => None,
        }
    }

    /// Whether `(x, y) ∈ rel`. Points of the wrong kind, or out of range,
    /// belong to nothing.
    pub fn member(&self, x: &Point, y: &Point, rel: Rel) -> bool {
        match (self, x, y) {
            (ModelTriple::Finite(_), Point::Index(x), Point::Index(y)) => {
                self.relation(rel).is_some_and(|r| r.contains(*x, *y))
            }
            (ModelTriple::Symbolic { .. }, Point::Rational(x), Point::Rational(y)) => {
                self.basis(rel).is_some_and(|b| point::member(x, y, b))
            }
            _ => false,
        }
    }

    /// Whether `(x, y) ∈ r \ z`.
    pub fn in_r_not_z(&self, x: &Point, y: &Point) -> bool {
        self.member(x, y, Rel::R) && !self.member(x, y, Rel::Z)
    }

    /// A point `w` with `(x, w) ∈ first` and `(w, y) ∈ second`: the lowest
    /// index on a finite model, the constructive witness on ℚ.
    pub fn witness(&self, x: &Point, y: &Point, first: Rel, second: Rel) -> Option<Point> {
        match (self, x, y) {
            (ModelTriple::Finite(t), Point::Index(_), Point::Index(_)) => (0..t.z.base_size())
                .map(Point::Index)
                .find(|w| self.member(x, w, first) && self.member(w, y, second)),
            (ModelTriple::Symbolic { .. }, Point::Rational(qx), Point::Rational(qy)) => {
                let (a, b) = (self.basis(first)?, self.basis(second)?);
                point::witness(qx, qy, a, b).map(Point::Rational)
            }
            _ => None,
        }
    }

    /// Points `x` with `(x, x) ∈ rel`. On ℚ all points look alike, so `0`
    /// stands for all of them.
    fn reflexive_points(&self, rel: Rel) -> Vec<Point> {
        match self {
            ModelTriple::Finite(t) => (0..t.z.base_size())
                .filter(|&x| self.relation(rel).is_some_and(|r| r.contains(x, x)))
                .map(Point::Index)
                .collect(),
            ModelTriple::Symbolic { .. } => {
                let zero = Point::Rational(Rational::zero());
                if self.member(&zero, &zero, rel) {
                    vec![zero]
                } else {
                    vec![]
                }
            }
        }
    }

    /// First pair in `inside \ outside` (row-major on finite models, by
    /// comparison class `<`, `=`, `>` on ℚ).
    fn first_in_difference(&self, inside: Rel, outside: Rel) -> Option<(Point, Point)> {
        match self {
            ModelTriple::Finite(_) => {
                let (a, b) = (self.relation(inside)?, self.relation(outside)?);
                first_pair(&a.difference(b).expect("same base"))
            }
            ModelTriple::Symbolic { .. } => first_class(self.basis(inside)?.difference(self.basis(outside)?)),
        }
    }

    /// Whether the pair lies in exactly one side of hypothesis `h`.
    pub fn violates_at(&self, h: Hypothesis, x: &Point, y: &Point) -> bool {
        match self {
            ModelTriple::Finite(t) => match (sides(h, &t.z, &t.e, &t.r), x, y) {
                (Some((l, r)), Point::Index(x), Point::Index(y)) => l.contains(*x, *y) != r.contains(*x, *y),
                _ => false,
            },
            ModelTriple::Symbolic { z, e, r } => match (sides(h, z, e, r), x, y) {
                (Some((l, r)), Point::Rational(x), Point::Rational(y)) => {
                    point::member(x, y, l) != point::member(x, y, r)
                }
                _ => false,
            },
        }
    }

    fn same(&self, a: Rel, b: Rel) -> bool {
        match self {
            ModelTriple::Finite(_) => self.relation(a) == self.relation(b),
            ModelTriple::Symbolic { .. } => self.basis(a) == self.basis(b),
        }
    }
}

/// What shows a hypothesis failing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureWitness {
    /// A pair in one side of the equation but not the other.
    Pair { x: Point, y: Point },
    /// Two of the relations coincide.
    Collision { a: Rel, b: Rel },
}

impl fmt::Display for FailureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureWitness::Pair { x, y } => write!(f, "at ({x}, {y})"),
            FailureWitness::Collision { a, b } => write!(f, "{a} = {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisFailure {
    pub hypothesis: Hypothesis,
    pub witness: FailureWitness,
}

impl fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails {}", self.hypothesis, self.witness)
    }
}

/// Every failing hypothesis, each with a witness: the first differing pair
/// for an equation, or each coinciding pair of relations for DISTINCT.
pub fn check_hypotheses(m: &ModelTriple) -> Vec<HypothesisFailure> {
    let mut out = Vec::new();
    for h in Hypothesis::ALL {
        let diff = match m {
            ModelTriple::Finite(t) => sides(h, &t.z, &t.e, &t.r).map(|(l, r)| {
                let n = l.base_size();
                (0..n)
                    .flat_map(|x| (0..n).map(move |y| (x, y)))
                    .find(|&(x, y)| l.contains(x, y) != r.contains(x, y))
                    .map(|(x, y)| (Point::Index(x), Point::Index(y)))
            }),
            ModelTriple::Symbolic { z, e, r } => sides(h, z, e, r).map(|(l, r)| {
                first_class(l.difference(r).union(r.difference(l)))
            }),
        };
        match diff {
            Some(Some((x, y))) => out.push(HypothesisFailure { hypothesis: h, witness: FailureWitness::Pair { x, y } }),
            Some(None) => {}
            None => {
                for (a, b) in [(Rel::Z, Rel::E), (Rel::Z, Rel::R), (Rel::E, Rel::R)] {
                    if m.same(a, b) {
                        out.push(HypothesisFailure { hypothesis: h, witness: FailureWitness::Collision { a, b } });
                    }
                }
            }
        }
    }
    out
}

/// Which part of the argument a step belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Showing `Id ∩ r ⊆ z`.
    IdentityLemma,
    /// Finding `(x_0, y) ∈ r \ z`.
    Start,
    /// Splitting `(x_n, y)` through a new point.
    Density,
    /// Re-establishing `(x_i, x_{n+1}) ∈ r \ z` for earlier points.
    Induction,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::IdentityLemma => "identity lemma",
            Stage::Start => "start pair",
            Stage::Density => "density step",
            Stage::Induction => "induction step",
        })
    }
}

/// The first hypothesis that failed to support a step of the argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureReport {
    pub stage: Stage,
    pub hypothesis: Hypothesis,
    pub witness: FailureWitness,
    /// Chain points built before the failure.
    pub chain_points: usize,
}

impl fmt::Display for FailureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails {} ({}", self.hypothesis, self.witness, self.stage)?;
        if self.chain_points > 0 {
            write!(f, ", after {} chain points", self.chain_points)?;
        }
        f.write_str(")")
    }
}

fn blocked(stage: Stage, hypothesis: Hypothesis, x: &Point, y: &Point, chain_points: usize) -> FailureReport {
    FailureReport {
        stage,
        hypothesis,
        witness: FailureWitness::Pair { x: x.clone(), y: y.clone() },
        chain_points,
    }
}

/// One successful derivation of `(x, x) ∈ z` through the middle point `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaTrace {
    pub x: Point,
    pub y: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LemmaOutcome {
    /// `Id ∩ r ⊆ z`, with one trace per reflexive point of `r`.
    ConfirmedInclusion { traces: Vec<LemmaTrace> },
    Blocked { report: FailureReport },
}

/// Derives `Id ∩ r ⊆ z` point by point. For each `(x, x) ∈ r`: `r = r;e`
/// gives `y` with `(x, y) ∈ r`, `(y, x) ∈ e`; then `(y, x) ∈ e;r = r`,
/// `(y, x) ∈ r·e = z`, and `(x, x) ∈ r;z = z`.
pub fn derive_identity_lemma(m: &ModelTriple) -> LemmaOutcome {
    let mut traces = Vec::new();
    for x in m.reflexive_points(Rel::R) {
        let stop = |h, a: &Point, b: &Point| LemmaOutcome::Blocked {
            report: blocked(Stage::IdentityLemma, h, a, b, 0),
        };
        let Some(y) = m.witness(&x, &x, Rel::R, Rel::E) else {
            return stop(Hypothesis::RE, &x, &x);
        };
        if !m.member(&y, &x, Rel::R) {
            return stop(Hypothesis::ER, &y, &x);
        }
        if !m.member(&y, &x, Rel::Z) {
            return stop(Hypothesis::Meet, &y, &x);
        }
        if !m.member(&x, &x, Rel::Z) {
            return stop(Hypothesis::RZ, &x, &x);
        }
        traces.push(LemmaTrace { x, y });
    }
    LemmaOutcome::ConfirmedInclusion { traces }
}

/// A pair `(x_0, y) ∈ r \ z`. When there is none, either `z ⊄ r` (so
/// `r·e ≠ z`) or `r = z`.
pub fn find_start(m: &ModelTriple) -> Result<(Point, Point), FailureReport> {
    if let Some(pair) = m.first_in_difference(Rel::R, Rel::Z) {
        return Ok(pair);
    }
    if let Some((x, y)) = m.first_in_difference(Rel::Z, Rel::R) {
        return Err(blocked(Stage::Start, Hypothesis::Meet, &x, &y, 0));
    }
    Err(FailureReport {
        stage: Stage::Start,
        hypothesis: Hypothesis::Distinct,
        witness: FailureWitness::Collision { a: Rel::Z, b: Rel::R },
        chain_points: 0,
    })
}

/// The certificate of length 0 for a start pair.
pub fn start_certificate(x0: Point, y: Point) -> ChainCertificate {
    ChainCertificate::start(x0, y)
}

/// Adds `x_{n+1}` to a valid certificate of length `n`.
pub fn extend_chain(m: &ModelTriple, cert: &ChainCertificate) -> Result<ChainCertificate, FailureReport> {
    let mut next = cert.clone();
    extend_in_place(m, &mut next)?;
    Ok(next)
}

fn extend_in_place(m: &ModelTriple, cert: &mut ChainCertificate) -> Result<(), FailureReport> {
    let n = cert.length();
    let y = cert.anchor().clone();
    let xn = cert.point(n).clone();
    let count = cert.points().len();

    // (x_n, y) ∈ r = r;r.
    let Some(w) = m.witness(&xn, &y, Rel::R, Rel::R) else {
        return Err(blocked(Stage::Density, Hypothesis::RR, &xn, &y, count));
    };
    // (x_n, w) ∈ z would put (x_n, y) in z;r = z; (w, y) ∈ z in r;z = z.
    if m.member(&xn, &w, Rel::Z) {
        return Err(blocked(Stage::Density, Hypothesis::ZR, &xn, &y, count));
    }
    if m.member(&w, &y, Rel::Z) {
        return Err(blocked(Stage::Density, Hypothesis::RZ, &xn, &y, count));
    }
    for i in 0..n {
        let xi = cert.point(i);
        // (x_i, x_n), (x_n, w) ∈ r give (x_i, w) ∈ r;r = r.
        if !m.member(xi, &w, Rel::R) {
            return Err(blocked(Stage::Induction, Hypothesis::RR, xi, &w, count));
        }
        // (x_i, w) ∈ z would put (x_i, y) in z;r = z.
        if m.member(xi, &w, Rel::Z) {
            return Err(blocked(Stage::Induction, Hypothesis::ZR, xi, &y, count));
        }
    }
    if w == y || cert.points().contains(&w) {
        // A repeated point means some (p, p) ∈ r \ z, which the identity
        // lemma rules out; report whatever blocks the lemma.
        if let LemmaOutcome::Blocked { mut report } = derive_identity_lemma(m) {
            report.chain_points = count;
            return Err(report);
        }
        unreachable!("identity lemma holds but the chain revisited {w}");
    }
    cert.push(w);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("{0}")]
    Blocked(FailureReport),
    #[error("constructed certificate failed verification: {0}")]
    Unverified(VerifyError),
}

/// Runs the whole argument to the requested depth and re-verifies the result
/// with [`verify_certificate`].
pub fn run_chain(m: &ModelTriple, depth: usize) -> Result<ChainCertificate, ChainError> {
    if depth == 0 {
        return Err(ChainError::ZeroDepth);
    }
    if let LemmaOutcome::Blocked { report } = derive_identity_lemma(m) {
        return Err(ChainError::Blocked(report));
    }
    let (x0, y) = find_start(m).map_err(ChainError::Blocked)?;
    let mut cert = ChainCertificate::start(x0, y);
    for _ in 0..depth {
        extend_in_place(m, &mut cert).map_err(ChainError::Blocked)?;
    }
    verify_certificate(m, &cert).map_err(ChainError::Unverified)?;
    Ok(cert)
}

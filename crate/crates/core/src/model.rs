//! Concrete models (sets of relations closed under `;` and `·`), closure
//! generation, table extraction and representation checking.
//!
//! Everything here is generic over [`RelationValue`], so the same code runs on
//! dense finite relations and on the symbolic dense-order relations of
//! [`crate::point`].

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Op};
use crate::relation::{RelError, Relation};

/// A value that behaves like a binary relation under composition and meet.
pub trait RelationValue: Clone + Eq + Hash + fmt::Debug + fmt::Display {
    fn compose(&self, other: &Self) -> Result<Self, RelError>;
    fn meet(&self, other: &Self) -> Result<Self, RelError>;

    fn apply(&self, op: Op, other: &Self) -> Result<Self, RelError> {
        match op {
            Op::Comp => self.compose(other),
            Op::Meet => self.meet(other),
        }
    }
}

impl RelationValue for Relation {
    fn compose(&self, other: &Self) -> Result<Self, RelError> {
        Relation::compose(self, other)
    }

    fn meet(&self, other: &Self) -> Result<Self, RelError> {
        self.intersect(other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a model needs at least one member")]
    Empty,
    #[error(transparent)]
    Relation(#[from] RelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("members {first} and {second} are the same relation")]
    DuplicateMember { first: String, second: String },
    #[error("not closed: {a} {op} {b} is not a member")]
    NotClosed { op: Op, a: String, b: String },
    #[error("closure exceeded {0} members")]
    TooLarge(usize),
}

/// Named relations closed under both operations, without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConcreteModel<R> {
    members: Vec<Member<R>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Member<R> {
    pub name: String,
    pub value: R,
}

impl<R: RelationValue> ConcreteModel<R> {
    /// Validates distinctness and closure.
    pub fn new(members: Vec<(String, R)>) -> Result<Self, ModelError> {
        if members.is_empty() {
            return Err(ModelError::Empty);
        }
        for (i, (name, value)) in members.iter().enumerate() {
            if let Some((first, _)) = members[..i].iter().find(|(_, v)| v == value) {
                return Err(ModelError::DuplicateMember { first: first.clone(), second: name.clone() });
            }
        }
        let model = ConcreteModel {
            members: members.into_iter().map(|(name, value)| Member { name, value }).collect(),
        };
        extract_tables(&model)?;
        Ok(model)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Member<R>] {
        &self.members
    }

    pub fn value(&self, i: usize) -> &R {
        &self.members[i].value
    }

    pub fn name(&self, i: usize) -> &str {
        &self.members[i].name
    }

    pub fn position(&self, value: &R) -> Option<usize> {
        self.members.iter().position(|m| &m.value == value)
    }
}

impl ConcreteModel<Relation> {
    pub fn base_size(&self) -> usize {
        self.members[0].value.base_size()
    }
}

/// Upper bound on closure size used by [`generate_closure`].
pub const DEFAULT_CLOSURE_LIMIT: usize = 1 << 16;

/// Least superset of `seeds` closed under composition and meet.
///
/// Duplicate seeds are dropped (the first name wins). New members are named
/// `m<index>` and appended in discovery order: each sweep scans pairs `(i, j)`
/// in member-index order, computing `i;j` before `i·j`, and skips pairs already
/// scanned by an earlier sweep.
pub fn generate_closure<R: RelationValue>(seeds: Vec<(String, R)>) -> Result<ConcreteModel<R>, ModelError> {
    generate_closure_with_limit(seeds, DEFAULT_CLOSURE_LIMIT)
}

pub fn generate_closure_with_limit<R: RelationValue>(
    seeds: Vec<(String, R)>,
    limit: usize,
) -> Result<ConcreteModel<R>, ModelError> {
    if seeds.is_empty() {
        return Err(ModelError::Empty);
    }
    let mut members: Vec<(String, R)> = Vec::new();
    let mut index: HashMap<R, usize> = HashMap::new();
    for (name, value) in seeds {
        if let Some(first) = members.first() {
            // Surface base mismatches up front.
            first.1.meet(&value)?;
        }
        if !index.contains_key(&value) {
            index.insert(value.clone(), members.len());
            members.push((name, value));
        }
    }

    let mut scanned = 0;
    while scanned < members.len() {
        let len = members.len();
        for i in 0..len {
            for j in 0..len {
                if i < scanned && j < scanned {
                    continue;
                }
                for op in Op::ALL {
                    let value = members[i].1.apply(op, &members[j].1)?;
                    if !index.contains_key(&value) {
                        if members.len() >= limit {
                            return Err(ModelError::TooLarge(limit));
                        }
                        let name = fresh_name(&members);
                        index.insert(value.clone(), members.len());
                        members.push((name, value));
                    }
                }
            }
        }
        scanned = len;
    }
    ConcreteModel::new(members)
}

fn fresh_name<R>(members: &[(String, R)]) -> String {
    let mut name = format!("m{}", members.len());
    while members.iter().any(|(n, _)| *n == name) {
        name.push('\'');
    }
    name
}

#[allow(clippy::needless_range_loop)]
/// Reads the operation tables off a model: `comp[i][j]` is the index of
/// `members[i] ; members[j]`, likewise for meet.
pub fn extract_tables<R: RelationValue>(model: &ConcreteModel<R>) -> Result<FiniteAlgebra, ModelError> {
    let index: HashMap<&R, usize> = model.members.iter().enumerate().map(|(i, m)| (&m.value, i)).collect();
    let m = model.len();
    let mut tables = [vec![vec![0; m]; m], vec![vec![0; m]; m]];
    for (t, op) in Op::ALL.into_iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                let value = model.value(i).apply(op, model.value(j))?;
                tables[t][i][j] = *index.get(&value).ok_or_else(|| ModelError::NotClosed {
                    op,
                    a: model.name(i).to_string(),
                    b: model.name(j).to_string(),
                })?;
            }
        }
    }
    let [comp, meet] = tables;
    let names = model.members.iter().map(|m| m.name.clone()).collect();
    Ok(FiniteAlgebra::new(names, comp, meet)?)
}

/// A candidate representation: element `a` of the algebra is sent to member
/// `assignment[a]` of the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Representation<R> {
    pub algebra: FiniteAlgebra,
    pub model: ConcreteModel<R>,
    pub assignment: Vec<usize>,
}

impl<R: RelationValue> Representation<R> {
    pub fn new(algebra: FiniteAlgebra, model: ConcreteModel<R>, assignment: Vec<usize>) -> Self {
        Representation { algebra, model, assignment }
    }

    /// The relation assigned to element `a`.
    pub fn image(&self, a: usize) -> &R {
        self.model.value(self.assignment[a])
    }

    /// The identity assignment of `extract_tables(model)` onto `model`.
    pub fn canonical(model: ConcreteModel<R>) -> Result<Self, ModelError> {
        let algebra = extract_tables(&model)?;
        let assignment = (0..model.len()).collect();
        Ok(Representation { algebra, model, assignment })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepFailure<R> {
    /// Element `element` has no valid member index.
    Unassigned { element: usize },
    /// Two elements share an image.
    Injectivity { a: usize, b: usize },
    /// `assignment(a op b)` is `expected` but the images compute to `actual`.
    Operation { op: Op, a: usize, b: usize, expected: usize, actual: R },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict<R> {
    pub failures: Vec<RepFailure<R>>,
}

impl<R> Verdict<R> {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl<R: RelationValue> RepFailure<R> {
    pub fn describe(&self, rep: &Representation<R>) -> String {
        let name = |a: usize| rep.algebra.name(a);
        match self {
            RepFailure::Unassigned { element } => format!("{} has no image", name(*element)),
            RepFailure::Injectivity { a, b } => format!("{} and {} share an image", name(*a), name(*b)),
            RepFailure::Operation { op, a, b, expected, actual } => format!(
                "{} {} {}: expected {} = {}, images give {}",
                name(*a),
                op,
                name(*b),
                rep.model.name(*expected),
                rep.model.value(*expected),
                actual
            ),
        }
    }
}

/// Checks that the assignment is injective and preserves both operations.
/// Failures are returned as data.
pub fn check_representation<R: RelationValue>(rep: &Representation<R>) -> Verdict<R> {
    let m = rep.algebra.len();
    let mut failures = Vec::new();
    for a in 0..m {
        if rep.assignment.get(a).is_none_or(|&i| i >= rep.model.len()) {
            failures.push(RepFailure::Unassigned { element: a });
        }
    }
    if !failures.is_empty() {
        return Verdict { failures };
    }
    for a in 0..m {
        for b in a + 1..m {
            if rep.assignment[a] == rep.assignment[b] {
                failures.push(RepFailure::Injectivity { a, b });
            }
        }
    }
    for op in Op::ALL {
        for a in 0..m {
            for b in 0..m {
                let expected = rep.assignment[rep.algebra.apply(op, a, b)];
                let actual = rep
                    .image(a)
                    .apply(op, rep.image(b))
                    .expect("model members share a base");
                if &actual != rep.model.value(expected) {
                    failures.push(RepFailure::Operation { op, a, b, expected, actual });
                }
            }
        }
    }
    Verdict { failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    fn named(name: &str, r: Relation) -> (String, Relation) {
        (name.to_string(), r)
    }

    #[test]
    fn identity_alone_is_closed() {
        let model = generate_closure(vec![named("id", Relation::identity(2).unwrap())]).unwrap();
        assert_eq!(model.len(), 1);
        assert_eq!(model.name(0), "id");
    }

    #[test]
    fn two_chain_closure_adds_empty() {
        // lt;lt = {} since there is no middle point; lt·{} = {}.
        let lt = rel(2, &[(0, 1)]);
        assert!(lt.compose(&lt).unwrap().is_empty());
        let model = generate_closure(vec![named("lt", lt.clone())]).unwrap();
        assert_eq!(model.len(), 2);
        assert_eq!(model.value(0), &lt);
        assert!(model.value(1).is_empty());
        assert_eq!(model.name(1), "m1");
    }

    #[test]
    fn duplicate_seeds_keep_first_name() {
        let id = Relation::identity(2).unwrap();
        let model = generate_closure(vec![named("a", id.clone()), named("b", id)]).unwrap();
        assert_eq!(model.len(), 1);
        assert_eq!(model.name(0), "a");
    }

    #[test]
    fn mismatched_seed_bases_fail() {
        let err = generate_closure(vec![named("a", rel(2, &[])), named("b", rel(3, &[]))]).unwrap_err();
        assert_eq!(err, ModelError::Relation(RelError::BaseMismatch { left: 2, right: 3 }));
        assert_eq!(generate_closure::<Relation>(vec![]).unwrap_err(), ModelError::Empty);
    }

    #[test]
    fn closure_limit_is_enforced() {
        let seeds = vec![named("a", rel(3, &[(0, 1), (1, 2)])), named("b", rel(3, &[(1, 0), (2, 2), (0, 0)]))];
        assert_eq!(generate_closure_with_limit(seeds, 3).unwrap_err(), ModelError::TooLarge(3));
    }

    #[test]
    fn single_empty_member_tables() {
        let model = ConcreteModel::new(vec![named("z", rel(2, &[]))]).unwrap();
        let alg = extract_tables(&model).unwrap();
        assert_eq!(alg.comp(0, 0), 0);
        assert_eq!(alg.meet(0, 0), 0);
    }

    #[test]
    fn two_chain_tables() {
        let model = ConcreteModel::new(vec![named("lt", rel(2, &[(0, 1)])), named("z", rel(2, &[]))]).unwrap();
        let alg = extract_tables(&model).unwrap();
        // comp: every product is empty; meet: lt·lt = lt, everything else empty.
        assert_eq!(alg.table(Op::Comp), &[vec![1, 1], vec![1, 1]]);
        assert_eq!(alg.table(Op::Meet), &[vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn unclosed_members_are_rejected() {
        let err = ConcreteModel::new(vec![named("lt", rel(2, &[(0, 1)]))]).unwrap_err();
        assert_eq!(err, ModelError::NotClosed { op: Op::Comp, a: "lt".into(), b: "lt".into() });
        let err = ConcreteModel::new(vec![named("a", rel(1, &[])), named("b", rel(1, &[]))]).unwrap_err();
        assert!(matches!(err, ModelError::DuplicateMember { .. }));
    }

    fn ze_algebra() -> FiniteAlgebra {
        FiniteAlgebra::from_names(&["z", "e"], &[&["z", "z"], &["z", "e"]], &[&["z", "z"], &["z", "e"]]).unwrap()
    }

    #[test]
    fn ze_algebra_on_one_point() {
        let model = ConcreteModel::new(vec![named("z", rel(1, &[])), named("e", rel(1, &[(0, 0)]))]).unwrap();
        let rep = Representation::new(ze_algebra(), model, vec![0, 1]);
        assert!(check_representation(&rep).is_ok());
    }

    #[test]
    fn collapsed_assignment_reports_injectivity_and_operations() {
        let model = ConcreteModel::new(vec![named("z", rel(1, &[])), named("e", rel(1, &[(0, 0)]))]).unwrap();
        let rep = Representation::new(ze_algebra(), model.clone(), vec![0, 0]);
        let verdict = check_representation(&rep);
        assert_eq!(verdict.failures[0], RepFailure::Injectivity { a: 0, b: 1 });
        let short = Representation::new(ze_algebra(), model, vec![0]);
        assert_eq!(check_representation(&short).failures, vec![RepFailure::Unassigned { element: 1 }]);
    }

    #[test]
    fn swapped_assignment_reports_operation_failure() {
        let model = ConcreteModel::new(vec![named("z", rel(1, &[])), named("e", rel(1, &[(0, 0)]))]).unwrap();
        let rep = Representation::new(ze_algebra(), model, vec![1, 0]);
        let verdict = check_representation(&rep);
        assert!(!verdict.is_ok());
        let first = &verdict.failures[0];
        assert!(matches!(first, RepFailure::Operation { op: Op::Comp, a: 0, b: 1, expected: 1, .. }));
        assert!(first.describe(&rep).contains("z comp e"));
    }
}

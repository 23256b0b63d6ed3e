//! Finite algebras of binary relations under composition and intersection.
//!
//! * [`relation`]: dense relations over `{0, .., n-1}` and their operations.
//! * [`algebra`] and [`model`]: abstract operation tables, concrete models,
//!   closure, table extraction and representation checking.
//! * [`point`]: the comparison relations over ℚ and the point algebra.
//! * [`search`]: deciding representability over a fixed finite base, with an
//!   exhaustive oracle and a DIMACS CNF export.
//! * [`chain`]: the hypothesis checks, identity lemma and unbounded chain
//!   construction that force any model of the point algebra to be infinite.
//! * [`format`]: the text formats for algebras and relation files.

pub mod algebra;
pub mod chain;
pub mod format;
pub mod model;
pub mod point;
pub mod relation;
pub mod search;

pub use algebra::{find_isomorphism, necessary_laws, FiniteAlgebra, Law, LawViolation, Op};
pub use model::{
    check_representation, extract_tables, generate_closure, ConcreteModel, RelationValue, Representation, Verdict,
};
pub use relation::{RelError, Relation};

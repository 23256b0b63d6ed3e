use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::model::RelationValue;
use crate::relation::RelError;

/// One of the three comparison classes of a pair of rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basic {
    Lt,
    Eq,
    Gt,
}

impl Basic {
    pub const ALL: [Basic; 3] = [Basic::Lt, Basic::Eq, Basic::Gt];

    pub fn of(ord: Ordering) -> Basic {
        match ord {
            Ordering::Less => Basic::Lt,
            Ordering::Equal => Basic::Eq,
            Ordering::Greater => Basic::Gt,
        }
    }

    fn bit(self) -> u8 {
        match self {
            Basic::Lt => 1,
            Basic::Eq => 2,
            Basic::Gt => 4,
        }
    }

    /// Composition of basic relations over a dense order without endpoints.
    /// The `Lt;Gt` and `Gt;Lt` cells need unboundedness (a point above, or
    /// below, both ends).
    fn compose(self, other: Basic) -> BasisSet {
        use Basic::*;
        match (self, other) {
            (Eq, b) => BasisSet::from(b),
            (a, Eq) => BasisSet::from(a),
            (Lt, Lt) => BasisSet::LT,
            (Gt, Gt) => BasisSet::GT,
            (Lt, Gt) | (Gt, Lt) => BasisSet::FULL,
        }
    }
}

/// A union of basic relations over ℚ: one of the 8 subsets of `{LT, EQ, GT}`.
///
/// `EMPTY`, `EQ` and `LT` are the empty relation, the identity and the strict
/// order respectively.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisSet(u8);

impl BasisSet {
    pub const EMPTY: BasisSet = BasisSet(0);
    pub const LT: BasisSet = BasisSet(1);
    pub const EQ: BasisSet = BasisSet(2);
    pub const GT: BasisSet = BasisSet(4);
    pub const FULL: BasisSet = BasisSet(7);

    /// All eight subsets, ordered by bit pattern.
    pub fn all() -> impl Iterator<Item = BasisSet> {
        (0..8).map(BasisSet)
    }

    pub fn from_bits(bits: u8) -> Option<BasisSet> {
        (bits < 8).then_some(BasisSet(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, b: Basic) -> bool {
        self.0 & b.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn basics(self) -> impl Iterator<Item = Basic> {
        Basic::ALL.into_iter().filter(move |&b| self.contains(b))
    }

    pub fn union(self, other: BasisSet) -> BasisSet {
        BasisSet(self.0 | other.0)
    }

    pub fn intersect(self, other: BasisSet) -> BasisSet {
        BasisSet(self.0 & other.0)
    }

    pub fn difference(self, other: BasisSet) -> BasisSet {
        BasisSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: BasisSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Union of the basic compositions over all pairs of members.
    pub fn compose(self, other: BasisSet) -> BasisSet {
        self.basics()
            .flat_map(|a| other.basics().map(move |b| a.compose(b)))
            .fold(BasisSet::EMPTY, BasisSet::union)
    }

    /// Short whitespace-free name used when printing tables.
    pub fn label(self) -> &'static str {
        ["empty", "lt", "eq", "le", "gt", "ne", "ge", "full"][self.0 as usize]
    }
}

impl From<Basic> for BasisSet {
    fn from(b: Basic) -> Self {
        BasisSet(b.bit())
    }
}

impl RelationValue for BasisSet {
    fn compose(&self, other: &Self) -> Result<Self, RelError> {
        Ok(BasisSet::compose(*self, *other))
    }

    fn meet(&self, other: &Self) -> Result<Self, RelError> {
        Ok(self.intersect(*other))
    }
}

impl fmt::Display for BasisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .basics()
            .map(|b| match b {
                Basic::Lt => "LT",
                Basic::Eq => "EQ",
                Basic::Gt => "GT",
            })
            .collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl fmt::Debug for BasisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for BasisSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_compositions() {
        assert_eq!(BasisSet::LT.compose(BasisSet::LT), BasisSet::LT);
        assert_eq!(BasisSet::EQ.compose(BasisSet::LT), BasisSet::LT);
        assert_eq!(BasisSet::LT.compose(BasisSet::EQ), BasisSet::LT);
        assert_eq!(BasisSet::LT.compose(BasisSet::GT), BasisSet::FULL);
        assert_eq!(BasisSet::GT.compose(BasisSet::LT), BasisSet::FULL);
        assert_eq!(BasisSet::GT.compose(BasisSet::EQ), BasisSet::GT);
        assert_eq!(BasisSet::EMPTY.compose(BasisSet::FULL), BasisSet::EMPTY);
    }

    #[test]
    fn intersections() {
        assert_eq!(BasisSet::LT.intersect(BasisSet::EQ), BasisSet::EMPTY);
        assert_eq!(BasisSet::GT.intersect(BasisSet::GT), BasisSet::GT);
        let le = BasisSet::LT.union(BasisSet::EQ);
        let ge = BasisSet::EQ.union(BasisSet::GT);
        assert_eq!(le.intersect(ge), BasisSet::EQ);
    }

    #[test]
    fn composition_is_associative_on_all_512_triples() {
        for a in BasisSet::all() {
            for b in BasisSet::all() {
                for c in BasisSet::all() {
                    assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)), "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn labels_and_display() {
        assert_eq!(BasisSet::FULL.to_string(), "{LT,EQ,GT}");
        assert_eq!(BasisSet::EMPTY.to_string(), "{}");
        let labels: Vec<_> = BasisSet::all().map(BasisSet::label).collect();
        assert_eq!(labels.len(), 8);
        assert!(BasisSet::from_bits(8).is_none());
    }
}

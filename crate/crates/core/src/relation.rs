//! Dense binary relations over a finite base `{0, .., n-1}`.
//!
//! A [`Relation`] is an `n × n` bit matrix with one `u64` word per row, so the
//! base size is capped at [`MAX_BASE_SIZE`]. Composition is a boolean matrix
//! product computed as row-OR sweeps: row `x` of `a;b` is the union of the rows
//! `z` of `b` for every `z` set in row `x` of `a`.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest base size a dense relation can hold (one machine word per row).
pub const MAX_BASE_SIZE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("base size must be at least 1")]
    EmptyBase,
    #[error("base size {0} exceeds the supported maximum of {MAX_BASE_SIZE}")]
    BaseTooLarge(usize),
    #[error("pair ({x}, {y}) lies outside a base of size {n}")]
    PairOutOfRange { x: usize, y: usize, n: usize },
    #[error("base sizes differ: {left} vs {right}")]
    BaseMismatch { left: usize, right: usize },
}

fn check_base(n: usize) -> Result<(), RelError> {
    match n {
        0 => Err(RelError::EmptyBase),
        n if n > MAX_BASE_SIZE => Err(RelError::BaseTooLarge(n)),
        _ => Ok(()),
    }
}

/// A set of ordered pairs over `{0, .., n-1}`. Equality is extensional.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Result<Self, RelError> {
        check_base(n)?;
        Ok(Relation { n, rows: vec![0; n] })
    }

    pub fn full(n: usize) -> Result<Self, RelError> {
        check_base(n)?;
        let mask = row_mask(n);
        Ok(Relation { n, rows: vec![mask; n] })
    }

    /// The identity relation `{(x, x)}` on a base of size `n`.
    pub fn identity(n: usize) -> Result<Self, RelError> {
        check_base(n)?;
        Ok(Relation { n, rows: (0..n).map(|x| 1u64 << x).collect() })
    }

    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rel = Relation::empty(n)?;
        for (x, y) in pairs {
            if x >= n || y >= n {
                return Err(RelError::PairOutOfRange { x, y, n });
            }
            rel.rows[x] |= 1 << y;
        }
        Ok(rel)
    }

    /// Builds a relation from row bitsets; bit `y` of `rows[x]` is the pair `(x, y)`.
    pub fn from_rows(rows: Vec<u64>) -> Result<Self, RelError> {
        let n = rows.len();
        check_base(n)?;
        let mask = row_mask(n);
        for (x, row) in rows.iter().enumerate() {
            if row & !mask != 0 {
                let y = (row & !mask).trailing_zeros() as usize;
                return Err(RelError::PairOutOfRange { x, y, n });
            }
        }
        Ok(Relation { n, rows })
    }

    pub fn base_size(&self) -> usize {
        self.n
    }

    pub fn row(&self, x: usize) -> u64 {
        self.rows[x]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.n && y < self.n && self.rows[x] >> y & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, &row)| BitIter(row).map(move |y| (x, y)))
    }

    fn same_base(&self, other: &Relation) -> Result<(), RelError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(RelError::BaseMismatch { left: self.n, right: other.n })
        }
    }

    /// Relational composition `self ; other`.
    pub fn compose(&self, other: &Relation) -> Result<Relation, RelError> {
        self.same_base(other)?;
        let rows = self
            .rows
            .iter()
            .map(|&row| BitIter(row).fold(0u64, |acc, z| acc | other.rows[z]))
            .collect();
        Ok(Relation { n: self.n, rows })
    }

    pub fn intersect(&self, other: &Relation) -> Result<Relation, RelError> {
        self.same_base(other)?;
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect();
        Ok(Relation { n: self.n, rows })
    }

    /// `(U × U) \ self`.
    pub fn complement(&self) -> Relation {
        let mask = row_mask(self.n);
        Relation { n: self.n, rows: self.rows.iter().map(|r| !r & mask).collect() }
    }

    /// `self \ other`.
    pub fn difference(&self, other: &Relation) -> Result<Relation, RelError> {
        self.same_base(other)?;
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a & !b).collect();
        Ok(Relation { n: self.n, rows })
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }
}

pub(crate) fn row_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the positions of set bits, lowest first.
#[derive(Clone, Copy)]
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let bit = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(bit)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, y)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation(n={}, {})", self.n, self)
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Relation", 2)?;
        s.serialize_field("base_size", &self.n)?;
        s.serialize_field("pairs", &self.pairs().collect::<Vec<_>>())?;
        s.end()
    }
}

//! Abstract finite algebras `(A, ;, ·)` given by operation tables.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// The two operations of the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    /// Relational composition `;`.
    Comp,
    /// Intersection `·`.
    Meet,
}

impl Op {
    pub const ALL: [Op; 2] = [Op::Comp, Op::Meet];

    pub fn name(self) -> &'static str {
        match self {
            Op::Comp => "comp",
            Op::Meet => "meet",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("an algebra needs at least one element")]
    NoElements,
    #[error("element name {0:?} is empty or contains whitespace")]
    InvalidName(String),
    #[error("element name {0:?} appears twice")]
    DuplicateName(String),
    #[error("table {op}: expected {expected} rows/columns, found {found} in row {row}")]
    TableShape { op: Op, row: usize, expected: usize, found: usize },
    #[error("table {op}: cell ({row}, {col}) holds {value}, not an element index")]
    IndexOutOfRange { op: Op, row: usize, col: usize, value: usize },
}

/// Element names plus total `m × m` composition and meet tables.
///
/// Laws such as commutativity of meet are not enforced here; they are checked
/// by [`necessary_laws`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteAlgebra {
    elements: Vec<String>,
    comp: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(
        elements: Vec<String>,
        comp: Vec<Vec<usize>>,
        meet: Vec<Vec<usize>>,
    ) -> Result<Self, AlgebraError> {
        let m = elements.len();
        if m == 0 {
            return Err(AlgebraError::NoElements);
        }
        for (i, name) in elements.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(AlgebraError::InvalidName(name.clone()));
            }
            if elements[..i].contains(name) {
                return Err(AlgebraError::DuplicateName(name.clone()));
            }
        }
        for (op, table) in [(Op::Comp, &comp), (Op::Meet, &meet)] {
            if table.len() != m {
                return Err(AlgebraError::TableShape { op, row: table.len(), expected: m, found: table.len() });
            }
            for (row, cells) in table.iter().enumerate() {
                if cells.len() != m {
                    return Err(AlgebraError::TableShape { op, row, expected: m, found: cells.len() });
                }
                if let Some((col, &value)) = cells.iter().enumerate().find(|(_, &v)| v >= m) {
                    return Err(AlgebraError::IndexOutOfRange { op, row, col, value });
                }
            }
        }
        Ok(FiniteAlgebra { elements, comp, meet })
    }

    /// Convenience constructor from string names, mostly for tests and fixtures.
    pub fn from_names(elements: &[&str], comp: &[&[&str]], meet: &[&[&str]]) -> Result<Self, AlgebraError> {
        let names: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let lookup = |s: &str| names.iter().position(|n| n == s).unwrap_or(usize::MAX);
        let table = |rows: &[&[&str]]| -> Vec<Vec<usize>> {
            rows.iter().map(|row| row.iter().map(|s| lookup(s)).collect()).collect()
        };
        let comp = table(comp);
        let meet = table(meet);
        FiniteAlgebra::new(names, comp, meet)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|n| n == name)
    }

    pub fn apply(&self, op: Op, a: usize, b: usize) -> usize {
        match op {
            Op::Comp => self.comp[a][b],
            Op::Meet => self.meet[a][b],
        }
    }

    pub fn comp(&self, a: usize, b: usize) -> usize {
        self.comp[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn table(&self, op: Op) -> &[Vec<usize>] {
        match op {
            Op::Comp => &self.comp,
            Op::Meet => &self.meet,
        }
    }

    /// The same algebra with elements listed in a new order: element `k` of the
    /// result is element `order[k]` of `self`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self, AlgebraError> {
        let m = self.len();
        let mut inverse = vec![usize::MAX; m];
        for (k, &old) in order.iter().enumerate() {
            if old < m {
                inverse[old] = k;
            }
        }
        let elements = order.iter().map(|&old| self.elements.get(old).cloned().unwrap_or_default()).collect();
        let remap = |table: &[Vec<usize>]| -> Vec<Vec<usize>> {
            order
                .iter()
                .map(|&a| order.iter().map(|&b| inverse[table[a][b]]).collect())
                .collect()
        };
        FiniteAlgebra::new(elements, remap(&self.comp), remap(&self.meet))
    }
}

/// Laws valid in every algebra of binary relations under `;` and `·`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    CompAssociative,
    MeetCommutative,
    MeetAssociative,
    MeetIdempotent,
    /// `a ≤ a'` (i.e. `a·a' = a`) implies `a;b ≤ a';b` and `b;a ≤ b;a'`.
    CompMonotone,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::CompAssociative => "comp associativity",
            Law::MeetCommutative => "meet commutativity",
            Law::MeetAssociative => "meet associativity",
            Law::MeetIdempotent => "meet idempotence",
            Law::CompMonotone => "comp monotonicity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawViolation {
    pub law: Law,
    /// Element indices witnessing the failure (one to three of them).
    pub witness: Vec<usize>,
}

impl LawViolation {
    pub fn describe(&self, algebra: &FiniteAlgebra) -> String {
        let names: Vec<&str> = self.witness.iter().map(|&i| algebra.name(i)).collect();
        format!("{} fails at ({})", self.law, names.join(", "))
    }
}

/// Checks the necessary laws, reporting the first witness (lexicographic) of
/// each failing law. An empty result means every law holds.
pub fn necessary_laws(algebra: &FiniteAlgebra) -> Vec<LawViolation> {
    let m = algebra.len();
    let c = |a, b| algebra.comp(a, b);
    let t = |a, b| algebra.meet(a, b);
    let le = |a, b| t(a, b) == a;
    let mut out = Vec::new();

    let triples = || (0..m).flat_map(move |a| (0..m).flat_map(move |b| (0..m).map(move |d| (a, b, d))));
    let pairs = || (0..m).flat_map(move |a| (0..m).map(move |b| (a, b)));

    if let Some((a, b, d)) = triples().find(|&(a, b, d)| c(c(a, b), d) != c(a, c(b, d))) {
        out.push(LawViolation { law: Law::CompAssociative, witness: vec![a, b, d] });
    }
    if let Some((a, b)) = pairs().find(|&(a, b)| t(a, b) != t(b, a)) {
        out.push(LawViolation { law: Law::MeetCommutative, witness: vec![a, b] });
    }
    if let Some((a, b, d)) = triples().find(|&(a, b, d)| t(t(a, b), d) != t(a, t(b, d))) {
        out.push(LawViolation { law: Law::MeetAssociative, witness: vec![a, b, d] });
    }
    if let Some(a) = (0..m).find(|&a| t(a, a) != a) {
        out.push(LawViolation { law: Law::MeetIdempotent, witness: vec![a] });
    }
    let monotone_fails = |(a, a2, b): (usize, usize, usize)| {
        le(a, a2) && (!le(c(a, b), c(a2, b)) || !le(c(b, a), c(b, a2)))
    };
    if let Some((a, a2, b)) = triples().find(|&t| monotone_fails(t)) {
        out.push(LawViolation { law: Law::CompMonotone, witness: vec![a, a2, b] });
    }
    out
}

/// Finds a bijection `f` (as `f[i]` = image of element `i` of `a` in `b`) that
/// commutes with both tables, by backtracking over partial permutations.
pub fn find_isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let m = a.len();
    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; m];
    if extend_iso(a, b, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend_iso(a: &FiniteAlgebra, b: &FiniteAlgebra, next: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    let m = a.len();
    if next == m {
        return true;
    }
    for cand in 0..m {
        if used[cand] {
            continue;
        }
        map[next] = cand;
        used[cand] = true;
        if consistent_prefix(a, b, next, map) && extend_iso(a, b, next + 1, map, used) {
            return true;
        }
        used[cand] = false;
    }
    map[next] = usize::MAX;
    false
}

/// Checks every table instance whose operands and result all lie in `0..=last`
/// and involve `last`.
fn consistent_prefix(a: &FiniteAlgebra, b: &FiniteAlgebra, last: usize, map: &[usize]) -> bool {
    for op in Op::ALL {
        for x in 0..=last {
            for (p, q) in [(x, last), (last, x)] {
                let r = a.apply(op, p, q);
                if r <= last && map[r] != b.apply(op, map[p], map[q]) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point() -> FiniteAlgebra {
        FiniteAlgebra::from_names(
            &["z", "e", "r"],
            &[&["z", "z", "z"], &["z", "e", "r"], &["z", "r", "r"]],
            &[&["z", "z", "z"], &["z", "e", "z"], &["z", "z", "r"]],
        )
        .unwrap()
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(FiniteAlgebra::new(vec![], vec![], vec![]), Err(AlgebraError::NoElements));
        let dup = FiniteAlgebra::from_names(&["a", "a"], &[&["a", "a"], &["a", "a"]], &[&["a", "a"], &["a", "a"]]);
        assert_eq!(dup, Err(AlgebraError::DuplicateName("a".into())));
        let bad = FiniteAlgebra::new(vec!["a b".into()], vec![vec![0]], vec![vec![0]]);
        assert!(matches!(bad, Err(AlgebraError::InvalidName(_))));
        let short = FiniteAlgebra::new(vec!["a".into(), "b".into()], vec![vec![0, 0], vec![0]], vec![vec![0, 0]; 2]);
        assert!(matches!(short, Err(AlgebraError::TableShape { op: Op::Comp, row: 1, .. })));
        let range = FiniteAlgebra::new(vec!["a".into()], vec![vec![0]], vec![vec![3]]);
        assert!(matches!(range, Err(AlgebraError::IndexOutOfRange { op: Op::Meet, .. })));
    }

    #[test]
    fn point_algebra_satisfies_necessary_laws() {
        let alg = point();
        // Brute-force re-check of every triple, independent of the law scanner.
        let m = alg.len();
        for a in 0..m {
            assert_eq!(alg.meet(a, a), a);
            for b in 0..m {
                assert_eq!(alg.meet(a, b), alg.meet(b, a));
                for c in 0..m {
                    assert_eq!(alg.comp(alg.comp(a, b), c), alg.comp(a, alg.comp(b, c)));
                    assert_eq!(alg.meet(alg.meet(a, b), c), alg.meet(a, alg.meet(b, c)));
                }
            }
        }
        assert!(necessary_laws(&alg).is_empty());
    }

    #[test]
    fn altered_comp_cell_breaks_associativity() {
        // e;e = z instead of e: (e;e);r = z but e;(e;r) = e;r = r.
        let alg = FiniteAlgebra::from_names(
            &["z", "e", "r"],
            &[&["z", "z", "z"], &["z", "z", "r"], &["z", "r", "r"]],
            &[&["z", "z", "z"], &["z", "e", "z"], &["z", "z", "r"]],
        )
        .unwrap();
        let v = necessary_laws(&alg);
        let assoc: Vec<_> = v.iter().filter(|v| v.law == Law::CompAssociative).collect();
        assert_eq!(assoc.len(), 1);
        let w = &assoc[0].witness;
        assert_ne!(alg.comp(alg.comp(w[0], w[1]), w[2]), alg.comp(w[0], alg.comp(w[1], w[2])));
    }

    #[test]
    fn asymmetric_meet_is_reported() {
        let alg = FiniteAlgebra::from_names(
            &["z", "e", "r"],
            &[&["z", "z", "z"], &["z", "e", "r"], &["z", "r", "r"]],
            &[&["z", "z", "z"], &["z", "e", "r"], &["z", "z", "r"]],
        )
        .unwrap();
        let v = necessary_laws(&alg);
        assert!(v.iter().any(|v| v.law == Law::MeetCommutative && v.witness == vec![1, 2]));
        assert_eq!(v[0].describe(&alg).split(' ').next(), Some("meet"));
    }

    #[test]
    fn isomorphism_with_itself_is_identity() {
        assert_eq!(find_isomorphism(&point(), &point()), Some(vec![0, 1, 2]));
    }

    #[test]
    fn isomorphism_recovers_relabeling() {
        let alg = point();
        let order = [2, 0, 1];
        let shuffled = alg.reordered(&order).unwrap();
        assert_eq!(shuffled.elements(), &["r", "z", "e"]);
        let f = find_isomorphism(&alg, &shuffled).unwrap();
        for (i, &j) in f.iter().enumerate() {
            assert_eq!(alg.name(i), shuffled.name(j));
        }
    }

    #[test]
    fn no_isomorphism_to_collapsed_comp() {
        let flat = FiniteAlgebra::from_names(
            &["z", "e", "r"],
            &[&["z", "z", "z"], &["z", "z", "z"], &["z", "z", "z"]],
            &[&["z", "z", "z"], &["z", "e", "z"], &["z", "z", "r"]],
        )
        .unwrap();
        assert_eq!(find_isomorphism(&point(), &flat), None);
    }
}

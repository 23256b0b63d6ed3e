//! DIMACS CNF export of the representation problem, and decoding of solver
//! assignments.
//!
//! Variable layout for an algebra with `m` elements over `n` points:
//!
//! * base variables `v(a, x, y) = a·n² + x·n + y + 1` ("element `a` holds
//!   `(x, y)`"),
//! * then, for each composition entry `c = a;b` (row-major), each pair
//!   `(x, y)` (row-major) and each middle point `z`, an auxiliary `t` implying
//!   `a(x, z) ∧ b(z, y)`,
//! * then, for each element pair `a < b` and each pair `(x, y)`, an auxiliary
//!   `d` implying `a(x, y) ≠ b(x, y)`.
//!
//! Clauses per composition entry and pair: `¬a(x,z) ∨ ¬b(z,y) ∨ c(x,y)` for
//! each `z`, `¬t_z ∨ a(x,z)` and `¬t_z ∨ b(z,y)` for each `z`, and
//! `¬c(x,y) ∨ t_0 ∨ … ∨ t_{n-1}`. Per meet entry and pair: `¬c ∨ a`, `¬c ∨ b`,
//! `¬a ∨ ¬b ∨ c`. Per element pair: `¬d ∨ a ∨ b` and `¬d ∨ ¬a ∨ ¬b` for each
//! `(x, y)`, plus one clause `⋁ d(x, y)`.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, Op};
use crate::model::{check_representation, generate_closure, ModelError, Representation};
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfInstance {
    pub variable_count: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Lines of the leading comment block, without the `c ` prefix.
    pub comments: Vec<String>,
    pub element_count: usize,
    pub base_size: usize,
}

impl CnfInstance {
    pub fn base_var(&self, a: usize, x: usize, y: usize) -> i32 {
        base_var(self.base_size, a, x, y)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for line in &self.comments {
            let _ = writeln!(out, "c {line}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.variable_count, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Evaluates the formula under a total assignment (`values[v - 1]` is the
    /// value of variable `v`).
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let v = values[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }
}

fn base_var(n: usize, a: usize, x: usize, y: usize) -> i32 {
    (a * n * n + x * n + y + 1) as i32
}

/// Encodes "the algebra has a representation over `n` points" as CNF.
pub fn encode_cnf(algebra: &FiniteAlgebra, n: usize) -> CnfInstance {
    assert!(n >= 1, "base size must be at least 1");
    let m = algebra.len();
    let v = |a, x, y| base_var(n, a, x, y);
    let mut next = (m * n * n) as i32;
    let fresh = |next: &mut i32| {
        *next += 1;
        *next
    };
    let mut clauses: Vec<Vec<i32>> = Vec::new();

    let base_end = (m * n * n) as i32;
    for a in 0..m {
        for b in 0..m {
            let c = algebra.comp(a, b);
            for x in 0..n {
                for y in 0..n {
                    let ts: Vec<i32> = (0..n).map(|_| fresh(&mut next)).collect();
                    for z in 0..n {
                        clauses.push(vec![-v(a, x, z), -v(b, z, y), v(c, x, y)]);
                    }
                    for (z, &t) in ts.iter().enumerate() {
                        clauses.push(vec![-t, v(a, x, z)]);
                        clauses.push(vec![-t, v(b, z, y)]);
                    }
                    let mut support = vec![-v(c, x, y)];
                    support.extend(&ts);
                    clauses.push(support);
                }
            }
        }
    }
    let comp_end = next;
    for a in 0..m {
        for b in 0..m {
            let c = algebra.meet(a, b);
            for x in 0..n {
                for y in 0..n {
                    clauses.push(vec![-v(c, x, y), v(a, x, y)]);
                    clauses.push(vec![-v(c, x, y), v(b, x, y)]);
                    clauses.push(vec![-v(a, x, y), -v(b, x, y), v(c, x, y)]);
                }
            }
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            let mut any = Vec::with_capacity(n * n);
            for x in 0..n {
                for y in 0..n {
                    let d = fresh(&mut next);
                    clauses.push(vec![-d, v(a, x, y), v(b, x, y)]);
                    clauses.push(vec![-d, -v(a, x, y), -v(b, x, y)]);
                    any.push(d);
                }
            }
            clauses.push(any);
        }
    }
    let variable_count = next as usize;

    let mut comments = vec![
        format!("representation of a {m}-element algebra over a base of {n} points"),
        format!("elements: {}", algebra.elements().join(" ")),
        format!("v(a,x,y) = a*{} + x*{n} + y + 1: element a holds pair (x,y); variables 1..={base_end}", n * n),
    ];
    if comp_end > base_end {
        comments.push(format!(
            "t(a,b,x,y,z) -> a(x,z) & b(z,y) for comp entries (a,b) row-major, pairs (x,y) row-major, z ascending; variables {}..={comp_end}",
            base_end + 1
        ));
    }
    if next > comp_end {
        comments.push(format!(
            "d(a,b,x,y) -> a(x,y) != b(x,y) for element pairs a<b, pairs (x,y) row-major; variables {}..={next}",
            comp_end + 1
        ));
    }
    CnfInstance { variable_count, clauses, comments, element_count: m, base_size: n }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("instance is for {instance_elements} elements over {instance_base} points, not {elements} over {base}")]
    Mismatch { instance_elements: usize, instance_base: usize, elements: usize, base: usize },
    #[error("assignment does not set base variable {0}")]
    MissingVariable(i32),
    #[error("assignment gives variable {0} both polarities")]
    Conflict(i32),
    #[error("{op} entry ({a}, {b}) is violated by the decoded relations")]
    TableViolation { op: Op, a: String, b: String },
    #[error("elements {a} and {b} decode to the same relation")]
    Injectivity { a: String, b: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Reads base-variable polarities into relations and checks them against the
/// algebra's tables.
pub fn decode_cnf(
    instance: &CnfInstance,
    assignment: &[i32],
    algebra: &FiniteAlgebra,
    n: usize,
) -> Result<Representation<Relation>, DecodeError> {
    let m = algebra.len();
    if instance.element_count != m || instance.base_size != n {
        return Err(DecodeError::Mismatch {
            instance_elements: instance.element_count,
            instance_base: instance.base_size,
            elements: m,
            base: n,
        });
    }
    let base_count = m * n * n;
    let mut values: Vec<Option<bool>> = vec![None; base_count];
    for &lit in assignment {
        let var = lit.unsigned_abs() as usize;
        if lit == 0 || var > base_count {
            continue;
        }
        let value = lit > 0;
        match values[var - 1] {
            Some(old) if old != value => return Err(DecodeError::Conflict(var as i32)),
            _ => values[var - 1] = Some(value),
        }
    }
    if let Some(missing) = values.iter().position(Option::is_none) {
        return Err(DecodeError::MissingVariable(missing as i32 + 1));
    }
    let images: Vec<Relation> = (0..m)
        .map(|a| {
            let pairs = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|&(x, y)| values[instance.base_var(a, x, y) as usize - 1] == Some(true));
            Relation::from_pairs(n, pairs).expect("pairs are in range")
        })
        .collect();

    for op in Op::ALL {
        for a in 0..m {
            for b in 0..m {
                let got = match op {
                    Op::Comp => images[a].compose(&images[b]),
                    Op::Meet => images[a].intersect(&images[b]),
                }
                .expect("same base");
                if got != images[algebra.apply(op, a, b)] {
                    return Err(DecodeError::TableViolation {
                        op,
                        a: algebra.name(a).to_string(),
                        b: algebra.name(b).to_string(),
                    });
                }
            }
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            if images[a] == images[b] {
                return Err(DecodeError::Injectivity { a: algebra.name(a).to_string(), b: algebra.name(b).to_string() });
            }
        }
    }
    let seeds: Vec<(String, Relation)> = algebra.elements().iter().cloned().zip(images).collect();
    let model = generate_closure(seeds)?;
    debug_assert_eq!(model.len(), m, "image of a table-respecting assignment is closed");
    let rep = Representation::new(algebra.clone(), model, (0..m).collect());
    debug_assert!(check_representation(&rep).is_ok());
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {token:?} is not a literal")]
pub struct AssignmentParseError {
    pub line: usize,
    pub token: String,
}

/// Parses a solver assignment: whitespace-separated signed integers over any
/// number of lines. `c` comment lines, `s` status lines, `v` prefixes and
/// `0` terminators are skipped.
pub fn parse_assignment(text: &str) -> Result<Vec<i32>, AssignmentParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.starts_with('c') || trimmed.starts_with('s') {
            continue;
        }
        for token in trimmed.split_whitespace() {
            if token == "v" {
                continue;
            }
            let lit: i32 = token
                .parse()
                .map_err(|_| AssignmentParseError { line: i + 1, token: token.to_string() })?;
            if lit != 0 {
                out.push(lit);
            }
        }
    }
    Ok(out)
}

/// The full satisfying assignment (base and auxiliary variables) induced by a
/// representation, as signed literals.
pub fn assignment_for(instance: &CnfInstance, images: &[Relation]) -> Vec<i32> {
    let (m, n) = (instance.element_count, instance.base_size);
    let mut values = vec![false; instance.variable_count];
    for (a, rel) in images.iter().enumerate() {
        for (x, y) in rel.pairs() {
            values[instance.base_var(a, x, y) as usize - 1] = true;
        }
    }
    // Auxiliaries in the same order encode_cnf allocates them.
    let mut var = m * n * n;
    for a in 0..m {
        for b in 0..m {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        values[var] = images[a].contains(x, z) && images[b].contains(z, y);
                        var += 1;
                    }
                }
            }
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            for x in 0..n {
                for y in 0..n {
                    values[var] = images[a].contains(x, y) != images[b].contains(x, y);
                    var += 1;
                }
            }
        }
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| if v { i as i32 + 1 } else { -(i as i32 + 1) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::point_algebra;

    fn ze() -> FiniteAlgebra {
        FiniteAlgebra::from_names(&["z", "e"], &[&["z", "z"], &["z", "e"]], &[&["z", "z"], &["z", "e"]]).unwrap()
    }

    /// vars = m·n² + E·n³ + P·n², clauses = E·n²·(3n+1) + M·3n² + P·(2n²+1).
    fn expected_counts(m: usize, n: usize) -> (usize, usize) {
        let (e, p) = (m * m, m * (m - 1) / 2);
        (m * n * n + e * n * n * n + p * n * n, e * n * n * (3 * n + 1) + e * 3 * n * n + p * (2 * n * n + 1))
    }

    #[test]
    fn point_algebra_counts() {
        let cnf = encode_cnf(&point_algebra(), 2);
        assert_eq!(expected_counts(3, 2), (96, 387));
        assert_eq!((cnf.variable_count, cnf.clauses.len()), (96, 387));
        assert!(cnf.to_dimacs().contains("\np cnf 96 387\n"));
        for (m, n) in [(1, 1), (2, 3), (3, 3), (4, 2)] {
            let alg = FiniteAlgebra::new(
                (0..m).map(|i| format!("a{i}")).collect(),
                vec![vec![0; m]; m],
                vec![vec![0; m]; m],
            )
            .unwrap();
            let cnf = encode_cnf(&alg, n);
            assert_eq!((cnf.variable_count, cnf.clauses.len()), expected_counts(m, n));
        }
    }

    #[test]
    fn clauses_are_well_formed() {
        let cnf = encode_cnf(&point_algebra(), 3);
        for clause in &cnf.clauses {
            assert!(!clause.is_empty());
            assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= cnf.variable_count));
        }
        let dimacs = cnf.to_dimacs();
        assert!(dimacs.starts_with("c "));
        assert!(dimacs.lines().filter(|l| !l.starts_with('c') && !l.starts_with('p')).all(|l| l.ends_with(" 0")));
    }

    #[test]
    fn decode_hand_built_ze_assignment() {
        let cnf = encode_cnf(&ze(), 1);
        // v(z,0,0) = 1 false, v(e,0,0) = 2 true.
        let rep = decode_cnf(&cnf, &[-1, 2], &ze(), 1).unwrap();
        assert!(rep.image(0).is_empty());
        assert_eq!(rep.image(1), &Relation::identity(1).unwrap());
        let full = assignment_for(&cnf, &[rep.image(0).clone(), rep.image(1).clone()]);
        let values: Vec<bool> = full.iter().map(|&l| l > 0).collect();
        assert!(cnf.satisfied_by(&values));
    }

    #[test]
    fn decode_missing_variables() {
        let cnf = encode_cnf(&ze(), 1);
        assert_eq!(decode_cnf(&cnf, &[2], &ze(), 1).unwrap_err(), DecodeError::MissingVariable(1));
        assert!(matches!(decode_cnf(&cnf, &[-1, 2], &ze(), 2), Err(DecodeError::Mismatch { .. })));
        assert_eq!(decode_cnf(&cnf, &[1, -1, 2], &ze(), 1).unwrap_err(), DecodeError::Conflict(1));
    }

    #[test]
    fn decode_all_false_point_assignment() {
        let cnf = encode_cnf(&point_algebra(), 2);
        let all_false: Vec<i32> = (1..=cnf.variable_count as i32).map(|v| -v).collect();
        assert_eq!(
            decode_cnf(&cnf, &all_false, &point_algebra(), 2).unwrap_err(),
            DecodeError::Injectivity { a: "z".into(), b: "e".into() }
        );
    }

    #[test]
    fn decode_reports_first_table_violation() {
        let cnf = encode_cnf(&ze(), 1);
        // z = {(0,0)}, e = {}: z;z = {(0,0)} = z holds, z;e = {} but table says z.
        let err = decode_cnf(&cnf, &[1, -2], &ze(), 1).unwrap_err();
        assert_eq!(err, DecodeError::TableViolation { op: Op::Comp, a: "z".into(), b: "e".into() });
    }

    #[test]
    fn assignment_parsing() {
        let text = "c solver output\ns SATISFIABLE\nv 1 -2\nv 3 0\n";
        assert_eq!(parse_assignment(text).unwrap(), vec![1, -2, 3]);
        assert_eq!(parse_assignment("1\n-2\n\n3").unwrap(), vec![1, -2, 3]);
        assert_eq!(parse_assignment("1 x").unwrap_err(), AssignmentParseError { line: 1, token: "x".into() });
    }
}

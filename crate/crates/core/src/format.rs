//! Text formats.
//!
//! Algebra files:
//!
//! ```text
//! # comment to end of line
//! elements: z e r
//! table comp:
//! z z z
//! z e r
//! z r r
//! table meet:
//! z z z
//! z e z
//! z z r
//! ```
//!
//! Row `i`, column `j` of a table names `op(i, j)`. [`print_algebra`] writes
//! exactly this layout without comments, and [`parse_algebra`] reads it back.
//!
//! Relation files declare a base size and named pair lists:
//!
//! ```text
//! base 2
//! rel z:
//! rel e:
//! 0 0
//! 1 1
//! rel r:
//! 0 1
//! ```

use std::fmt::Write as _;

use crate::algebra::{FiniteAlgebra, Op};
use crate::chain::ModelTriple;
use crate::relation::Relation;

/// A parse error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn error(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, column, message: message.into() }
}

/// Non-empty lines with comments removed, as (line number, tokens with
/// 1-based columns).
fn tokenize(text: &str) -> Vec<(usize, Vec<(usize, &str)>)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain([(body.len(), ' ')]) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push((body[..s].chars().count() + 1, &body[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push((i + 1, tokens));
        }
    }
    out
}

/// Line to blame for something missing at the end of the input.
fn end_line(text: &str) -> usize {
    text.lines().count().max(1)
}

/// A parsed algebra with the lines its sections started on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSpecFile {
    pub algebra: FiniteAlgebra,
    pub elements_line: usize,
    pub comp_line: usize,
    pub meet_line: usize,
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra, FormatError> {
    parse_algebra_spec(text).map(|s| s.algebra)
}

pub fn parse_algebra_spec(text: &str) -> Result<AlgebraSpecFile, FormatError> {
    let lines = tokenize(text);
    let mut names: Option<(usize, Vec<String>)> = None;
    let mut tables: [Option<Table>; 2] = [None, None];
    let mut current: Option<Op> = None;

    for (line, tokens) in &lines {
        let line = *line;
        let (col, head) = tokens[0];
        match head {
            "elements:" => {
                if names.is_some() {
                    return Err(error(line, col, "elements: duplicate section"));
                }
                let mut list: Vec<String> = Vec::new();
                for &(c, t) in &tokens[1..] {
                    if list.iter().any(|n| n == t) {
                        return Err(error(line, c, format!("element {t:?} listed twice")));
                    }
                    list.push(t.to_string());
                }
                if list.is_empty() {
                    return Err(error(line, col, "elements: no names"));
                }
                names = Some((line, list));
                current = None;
            }
            "table" => {
                let op = match tokens.get(1) {
                    Some(&(_, "comp:")) => Op::Comp,
                    Some(&(_, "meet:")) => Op::Meet,
                    Some(&(c, other)) => return Err(error(line, c, format!("unknown table {other:?}"))),
                    None => return Err(error(line, col, "table: missing name")),
                };
                if let Some(&(c, extra)) = tokens.get(2) {
                    return Err(error(line, c, format!("unexpected {extra:?} after table header")));
                }
                if names.is_none() {
                    return Err(error(line, col, "table before elements:"));
                }
                if let Some(op) = current {
                    check_rows(op, &tables, names.as_ref().map_or(0, |n| n.1.len()), line)?;
                }
                let slot = &mut tables[op as usize];
                if slot.is_some() {
                    return Err(error(line, col, format!("table {op}: duplicate section")));
                }
                *slot = Some((line, Vec::new()));
                current = Some(op);
            }
            _ => {
                let (Some(op), Some((_, list))) = (current, &names) else {
                    return Err(error(line, col, format!("unexpected {head:?} outside a table")));
                };
                let m = list.len();
                let rows = &mut tables[op as usize].as_mut().expect("current table exists").1;
                if rows.len() == m {
                    return Err(error(line, col, format!("table {op}: more than {m} rows")));
                }
                if tokens.len() != m {
                    return Err(error(
                        line,
                        col,
                        format!("table {op}: row has {} entries, expected {m}", tokens.len()),
                    ));
                }
                let mut row = Vec::with_capacity(m);
                for &(c, t) in tokens {
                    let idx = list
                        .iter()
                        .position(|n| n == t)
                        .ok_or_else(|| error(line, c, format!("unknown element {t:?}")))?;
                    row.push(idx);
                }
                rows.push(row);
            }
        }
    }

    let last = end_line(text);
    let Some((elements_line, names)) = names else {
        return Err(error(last, 1, "elements: absent"));
    };
    if let Some(op) = current {
        check_rows(op, &tables, names.len(), last)?;
    }
    let [comp, meet] = tables;
    let (comp_line, comp) = comp.ok_or_else(|| error(last, 1, "table comp: absent"))?;
    let (meet_line, meet) = meet.ok_or_else(|| error(last, 1, "table meet: absent"))?;
    let algebra = FiniteAlgebra::new(names, comp, meet).map_err(|e| error(elements_line, 1, e.to_string()))?;
    Ok(AlgebraSpecFile { algebra, elements_line, comp_line, meet_line })
}

/// Start line and rows of a table section.
type Table = (usize, Vec<Vec<usize>>);

fn check_rows(op: Op, tables: &[Option<Table>; 2], m: usize, line: usize) -> Result<(), FormatError> {
    let found = tables[op as usize].as_ref().map_or(0, |t| t.1.len());
    if found < m {
        return Err(error(line, 1, format!("table {op}: {found} rows, expected {m}")));
    }
    Ok(())
}

/// The canonical text of an algebra; [`parse_algebra`] inverts it.
pub fn print_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = String::new();
    writeln!(out, "elements: {}", alg.elements().join(" ")).unwrap();
    for op in Op::ALL {
        writeln!(out, "table {op}:").unwrap();
        for row in alg.table(op) {
            let names: Vec<&str> = row.iter().map(|&i| alg.name(i)).collect();
            writeln!(out, "{}", names.join(" ")).unwrap();
        }
    }
    out
}

/// Named relations over a declared base, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationFile {
    pub base_size: usize,
    pub relations: Vec<(String, Relation)>,
}

impl RelationFile {
    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }
}

pub fn parse_relations(text: &str) -> Result<RelationFile, FormatError> {
    let lines = tokenize(text);
    let mut iter = lines.iter();
    let Some((line, tokens)) = iter.next() else {
        return Err(error(1, 1, "base: absent"));
    };
    let base_size = match tokens.as_slice() {
        [(_, "base"), (c, n)] => match n.parse::<usize>() {
            Ok(n) if (1..=crate::relation::MAX_BASE_SIZE).contains(&n) => n,
            _ => {
                return Err(error(
                    *line,
                    *c,
                    format!("base size must be 1..={}, found {n:?}", crate::relation::MAX_BASE_SIZE),
                ))
            }
        },
        [(c, _), ..] => return Err(error(*line, *c, "expected `base <n>` first")),
        [] => unreachable!("tokenize drops empty lines"),
    };

    let mut named: Vec<(String, Vec<(usize, usize)>)> = Vec::new();
    for (line, tokens) in iter {
        let line = *line;
        match tokens.as_slice() {
            [(_, "rel"), (c, name)] => {
                let Some(name) = name.strip_suffix(':').filter(|n| !n.is_empty()) else {
                    return Err(error(line, *c, "expected `rel <name>:`"));
                };
                if named.iter().any(|(n, _)| n == name) {
                    return Err(error(line, *c, format!("relation {name:?} defined twice")));
                }
                named.push((name.to_string(), Vec::new()));
            }
            [(cx, x), (cy, y)] => {
                let Some((_, pairs)) = named.last_mut() else {
                    return Err(error(line, *cx, "pair before any `rel <name>:`"));
                };
                let coord = |c: usize, s: &str| match s.parse::<usize>() {
                    Ok(v) if v < base_size => Ok(v),
                    _ => Err(error(line, c, format!("{s:?} is not a point of base {base_size}"))),
                };
                pairs.push((coord(*cx, x)?, coord(*cy, y)?));
            }
            [(c, t), ..] => return Err(error(line, *c, format!("unexpected {t:?}"))),
            [] => unreachable!("tokenize drops empty lines"),
        }
    }
    let relations = named
        .into_iter()
        .map(|(n, pairs)| (n, Relation::from_pairs(base_size, pairs).expect("pairs checked against base")))
        .collect();
    Ok(RelationFile { base_size, relations })
}

pub fn print_relations(file: &RelationFile) -> String {
    let mut out = String::new();
    writeln!(out, "base {}", file.base_size).unwrap();
    for (name, rel) in &file.relations {
        writeln!(out, "rel {name}:").unwrap();
        for (x, y) in rel.pairs() {
            writeln!(out, "{x} {y}").unwrap();
        }
    }
    out
}

/// A finite model triple: a relation file defining exactly `z`, `e`, `r`.
pub fn parse_model_triple(text: &str) -> Result<ModelTriple, FormatError> {
    let file = parse_relations(text)?;
    let last = end_line(text);
    if let Some((extra, _)) = file.relations.iter().find(|(n, _)| !["z", "e", "r"].contains(&n.as_str())) {
        return Err(error(last, 1, format!("relation {extra:?} is not one of z, e, r")));
    }
    let get = |n: &str| file.get(n).cloned().ok_or_else(|| error(last, 1, format!("rel {n}: absent")));
    Ok(ModelTriple::finite(get("z")?, get("e")?, get("r")?).expect("one base size"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::point_algebra;

    const POINT: &str = include_str!("../../../data/point_algebra.alg");

    #[test]
    fn canonical_file_is_the_point_algebra() {
        assert_eq!(parse_algebra(POINT).unwrap(), point_algebra());
        assert_eq!(print_algebra(&point_algebra()), POINT);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# point algebra\n\nelements: z e r   # three\n".to_string() + &POINT[POINT.find("table").unwrap()..];
        assert_eq!(parse_algebra(&text).unwrap(), point_algebra());
    }

    #[test]
    fn missing_meet() {
        let text = &POINT[..POINT.find("table meet").unwrap()];
        let e = parse_algebra(text).unwrap_err();
        assert_eq!(e.message, "table meet: absent");
    }

    #[test]
    fn short_row_is_an_arity_error_on_its_line() {
        let text = POINT.replace("z e r\nz r r", "z e\nz r r");
        let e = parse_algebra(&text).unwrap_err();
        assert_eq!((e.line, e.column), (4, 1));
        assert!(e.message.contains("row has 2 entries, expected 3"), "{e}");
    }

    #[test]
    fn unknown_name_has_column() {
        let text = POINT.replace("z e r\nz r r", "z e q\nz r r");
        let e = parse_algebra(&text).unwrap_err();
        assert_eq!((e.line, e.column), (4, 5));
    }

    #[test]
    fn duplicate_and_incomplete_sections() {
        let e = parse_algebra(&format!("{POINT}table comp:\n")).unwrap_err();
        assert!(e.message.contains("duplicate"), "{e}");
        let e = parse_algebra("elements: z e\ntable comp:\nz z\ntable meet:\nz z\nz e\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert_eq!(e.message, "table comp: 1 rows, expected 2");
        assert!(parse_algebra("elements: a a\n").unwrap_err().message.contains("twice"));
    }

    #[test]
    fn relation_files() {
        let text = "base 2\nrel z:\nrel e:\n0 0\n1 1\nrel r:\n0 1\n";
        let file = parse_relations(text).unwrap();
        assert_eq!(print_relations(&file), text);
        let triple = parse_model_triple(text).unwrap();
        assert_eq!(triple.base_size(), Some(2));
        let e = parse_relations("base 2\nrel r:\n0 2\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        assert_eq!(parse_model_triple("base 1\nrel z:\n").unwrap_err().message, "rel e: absent");
        assert_eq!(parse_relations("rel r:\n").unwrap_err().line, 1);
    }
}

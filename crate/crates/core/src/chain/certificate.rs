use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{ModelTriple, Point, Rel};

/// Second coordinate of a recorded membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Point(usize),
    Anchor,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Point(j) => write!(f, "{j}"),
            Target::Anchor => f.write_str("y"),
        }
    }
}

/// A claim `(x_from, to) ∈ r \ z`, optionally through a chain point `w`
/// with `(x_from, x_w)` and `(x_w, to)` both in `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub from: usize,
    pub to: Target,
    pub witness: Option<usize>,
}

/// Chain points `x_0, .., x_n` below an anchor `y`, with one membership
/// claim per required pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainCertificate {
    length: usize,
    anchor: Point,
    points: Vec<Point>,
    #[serde(skip)]
    memberships: Vec<Membership>,
}

impl ChainCertificate {
    pub(super) fn start(x0: Point, y: Point) -> Self {
        ChainCertificate {
            length: 0,
            anchor: y,
            points: vec![x0],
            memberships: vec![Membership { from: 0, to: Target::Anchor, witness: None }],
        }
    }

    /// Appends `x_{n+1}`. The caller has established the new memberships.
    pub(super) fn push(&mut self, w: Point) {
        let k = self.points.len();
        for m in self.memberships.iter_mut().rev() {
            if m.from == k - 1 && m.to == Target::Anchor {
                m.witness = Some(k);
                break;
            }
        }
        self.points.push(w);
        self.length = k;
        for i in 0..k {
            let witness = (i + 1 < k).then_some(k - 1);
            self.memberships.push(Membership { from: i, to: Target::Point(k), witness });
        }
        self.memberships.push(Membership { from: k, to: Target::Anchor, witness: None });
    }

    /// Number of extension steps; the chain has `length + 1` points.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn memberships(&self) -> &[Membership] {
        &self.memberships
    }

    fn target(&self, t: Target) -> Option<&Point> {
        match t {
            Target::Point(j) => self.points.get(j),
            Target::Anchor => Some(&self.anchor),
        }
    }

    /// The line-oriented text form read back by [`parse_certificate`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "chain n={} y={}", self.length, self.anchor).unwrap();
        for (i, p) in self.points.iter().enumerate() {
            writeln!(out, "point {i} {p}").unwrap();
        }
        for m in &self.memberships {
            let w = m.witness.map_or("-".to_string(), |w| w.to_string());
            writeln!(out, "pair {} {} in r not-z witness {w}", m.from, m.to).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum VerifyError {
    #[error("certificate has no points")]
    Empty,
    #[error("length {length} does not match {points} points")]
    Length { length: usize, points: usize },
    #[error("point {first} and {second} coincide")]
    Repeated { first: Target, second: Target },
    #[error("pair ({from}, {to}) refers to a missing point")]
    OutOfRange { from: usize, to: Target },
    #[error("pair ({from}, {to}) does not run forward along the chain")]
    Misordered { from: usize, to: Target },
    #[error("pair ({from}, {to}) is not in r")]
    NotInR { from: usize, to: Target },
    #[error("pair ({from}, {to}) is in z")]
    InZ { from: usize, to: Target },
    #[error("witness {witness} does not split ({from}, {to}) in r;r")]
    BadWitness { from: usize, to: Target, witness: usize },
    #[error("no claim for pair ({from}, {to})")]
    Missing { from: usize, to: Target },
}

/// Checks a certificate against the model from scratch: all points distinct,
/// every claim true, every witness valid, and every pair `(x_i, x_j)`,
/// `i < j`, and `(x_i, y)` claimed.
pub fn verify_certificate(m: &ModelTriple, cert: &ChainCertificate) -> Result<(), VerifyError> {
    let len = cert.points.len();
    if len == 0 {
        return Err(VerifyError::Empty);
    }
    if cert.length + 1 != len {
        return Err(VerifyError::Length { length: cert.length, points: len });
    }
    let mut seen: HashMap<&Point, Target> = HashMap::with_capacity(len + 1);
    seen.insert(&cert.anchor, Target::Anchor);
    for (i, p) in cert.points.iter().enumerate() {
        if let Some(&first) = seen.get(p) {
            return Err(VerifyError::Repeated { first, second: Target::Point(i) });
        }
        seen.insert(p, Target::Point(i));
    }

    // covered[i * (len + 1) + j] for j < len, anchor at j = len.
    let mut covered = vec![false; len * (len + 1)];
    for mb in &cert.memberships {
        let (from, to) = (mb.from, mb.to);
        let (Some(x), Some(t)) = (cert.points.get(from), cert.target(to)) else {
            return Err(VerifyError::OutOfRange { from, to });
        };
        let col = match to {
            Target::Point(j) if j <= from => return Err(VerifyError::Misordered { from, to }),
            Target::Point(j) => j,
            Target::Anchor => len,
        };
        if !m.member(x, t, Rel::R) {
            return Err(VerifyError::NotInR { from, to });
        }
        if m.member(x, t, Rel::Z) {
            return Err(VerifyError::InZ { from, to });
        }
        if let Some(w) = mb.witness {
            let ok = cert
                .points
                .get(w)
                .is_some_and(|p| m.member(x, p, Rel::R) && m.member(p, t, Rel::R));
            if !ok {
                return Err(VerifyError::BadWitness { from, to, witness: w });
            }
        }
        covered[from * (len + 1) + col] = true;
    }
    for i in 0..len {
        for col in i + 1..=len {
            if !covered[i * (len + 1) + col] {
                let to = if col == len { Target::Anchor } else { Target::Point(col) };
                return Err(VerifyError::Missing { from: i, to });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct CertificateParseError {
    pub line: usize,
    pub message: String,
}

/// Reads the text form of a certificate. Points are indices for a finite
/// model and rationals for the symbolic one. Claims are not checked here;
/// pass the result to [`verify_certificate`].
pub fn parse_certificate(text: &str, m: &ModelTriple) -> Result<ChainCertificate, CertificateParseError> {
    let finite = m.base_size().is_some();
    let point = |s: &str| -> Result<Point, String> {
        if finite {
            s.parse().map(Point::Index).map_err(|_| format!("bad point index {s:?}"))
        } else {
            s.parse().map(Point::Rational).map_err(|e| format!("bad rational {s:?}: {e}"))
        }
    };
    let index = |s: &str| s.parse::<usize>().map_err(|_| format!("bad index {s:?}"));

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let err = |line, message: String| CertificateParseError { line, message };

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty certificate".into()))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let (length, anchor) = match words.as_slice() {
        ["chain", n, y] => {
            let n = n.strip_prefix("n=").ok_or_else(|| err(line, "expected n=<length>".into()))?;
            let y = y.strip_prefix("y=").ok_or_else(|| err(line, "expected y=<point>".into()))?;
            (index(n).map_err(|e| err(line, e))?, point(y).map_err(|e| err(line, e))?)
        }
        _ => return Err(err(line, "expected `chain n=<length> y=<point>`".into())),
    };

    let mut points = Vec::new();
    let mut memberships = Vec::new();
    for (line, text) in lines {
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.as_slice() {
            ["point", i, p] => {
                if !memberships.is_empty() {
                    return Err(err(line, "point after pair lines".into()));
                }
                let i = index(i).map_err(|e| err(line, e))?;
                if i != points.len() {
                    return Err(err(line, format!("expected point {}, found {i}", points.len())));
                }
                points.push(point(p).map_err(|e| err(line, e))?);
            }
            ["pair", i, j, "in", "r", "not-z", "witness", w] => {
                let from = index(i).map_err(|e| err(line, e))?;
                let to = match *j {
                    "y" => Target::Anchor,
                    j => Target::Point(index(j).map_err(|e| err(line, e))?),
                };
                let witness = match *w {
                    "-" => None,
                    w => Some(index(w).map_err(|e| err(line, e))?),
                };
                memberships.push(Membership { from, to, witness });
            }
            _ => return Err(err(line, format!("unrecognized line {text:?}"))),
        }
    }
    Ok(ChainCertificate { length, anchor, points, memberships })
}

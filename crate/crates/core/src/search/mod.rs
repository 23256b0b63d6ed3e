//! Deciding whether an abstract algebra has a representation over a base of
//! `n` points.
//!
//! The unknowns are the membership bits "element `a` holds pair `(x, y)`".
//! [`search`] decides them depth first in `(element, x, y)` order, trying
//! `false` before `true`, and after every decision tightens per-element lower
//! and upper bound relations until nothing changes. For a composition entry
//! `c = a;b` that means `low(a);low(b) ⊆ low(c)`, `up(c) ⊆ up(a);up(b)`, plus
//! the backward consequences of a pair missing from `up(c)` or a pair of
//! `low(c)` with a single possible middle point. Meet entries are handled
//! pointwise. A branch dies when some lower bound escapes its upper bound or
//! two fully decided elements coincide.
//!
//! [`exhaustive_scan`] is the brute-force oracle used to cross-check the
//! pruning, and [`cnf`] exports the same decision problem for external
//! solvers.

pub mod cnf;
mod nonrep;
mod packed;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use nonrep::{nonrep_certificate, NonRepOptions, NonRepReport, SizeMethod, SizeReport, Verdict as NonRepVerdict};
pub use packed::MAX_PACKED_BASE;
use packed::Packing;

use crate::algebra::{FiniteAlgebra, Op};
use crate::model::{check_representation, ConcreteModel, ModelError, Representation};
use crate::relation::{BitIter, Relation};

/// Largest algebra the search handles.
pub const MAX_ELEMENTS: usize = 16;
/// Default cap on branching decisions.
pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;
/// Default cap on the number of assignments [`exhaustive_scan`] will enumerate.
pub const DEFAULT_SCAN_CEILING: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    /// Explore sequentially in the fixed decision order.
    pub deterministic: bool,
    /// Accept only assignments that are lexicographically least among their
    /// images under permutations of the base.
    pub symmetry_pruning: bool,
    pub node_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { deterministic: false, symmetry_pruning: false, node_limit: DEFAULT_NODE_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("base size must be between 1 and {MAX_PACKED_BASE}, got {0}")]
    BaseSize(usize),
    #[error("algebras with more than {MAX_ELEMENTS} elements are not supported (got {0})")]
    TooManyElements(usize),
    #[error("node limit must be at least 1")]
    NodeLimit,
    #[error("exhaustive scan needs 2^{required_log2} assignments but the ceiling is {allowed}")]
    CeilingExceeded { required_log2: u32, allowed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchProblem {
    algebra: FiniteAlgebra,
    base_size: usize,
    options: SearchOptions,
}

impl SearchProblem {
    pub fn new(algebra: FiniteAlgebra, base_size: usize, options: SearchOptions) -> Result<Self, SearchError> {
        check_dims(&algebra, base_size)?;
        if options.node_limit == 0 {
            return Err(SearchError::NodeLimit);
        }
        Ok(SearchProblem { algebra, base_size, options })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn options(&self) -> &SearchOptions {
        &self.options
    }
}

fn check_dims(algebra: &FiniteAlgebra, n: usize) -> Result<(), SearchError> {
    if n == 0 || n > MAX_PACKED_BASE {
        return Err(SearchError::BaseSize(n));
    }
    if algebra.len() > MAX_ELEMENTS {
        return Err(SearchError::TooManyElements(algebra.len()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { representation: Representation<Relation> },
    ExhaustedNone { nodes: u64 },
    LimitReached { nodes: u64 },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }

    pub fn representation(&self) -> Option<&Representation<Relation>> {
        match self {
            SearchOutcome::Found { representation } => Some(representation),
            _ => None,
        }
    }

    pub fn nodes(&self) -> Option<u64> {
        match self {
            SearchOutcome::Found { .. } => None,
            SearchOutcome::ExhaustedNone { nodes } | SearchOutcome::LimitReached { nodes } => Some(*nodes),
        }
    }
}

/// Builds the representation whose images are the given packed relations,
/// using the element names as member names.
fn build_representation(algebra: &FiniteAlgebra, packing: &Packing, images: &[u64]) -> Result<Representation<Relation>, ModelError> {
    let members = images
        .iter()
        .enumerate()
        .map(|(a, &r)| (algebra.name(a).to_string(), packing.unpack(r)))
        .collect();
    let model = ConcreteModel::new(members)?;
    Ok(Representation::new(algebra.clone(), model, (0..algebra.len()).collect()))
}

/// Whether fully decided packed images form a representation.
fn satisfies(algebra: &FiniteAlgebra, packing: &Packing, images: &[u64]) -> bool {
    let m = algebra.len();
    for a in 0..m {
        for b in a + 1..m {
            if images[a] == images[b] {
                return false;
            }
        }
    }
    (0..m).all(|a| {
        (0..m).all(|b| {
            packing.compose(images[a], images[b]) == images[algebra.comp(a, b)]
                && images[a] & images[b] == images[algebra.meet(a, b)]
        })
    })
}

/// Brute-force enumeration of every assignment of relations to elements.
pub fn exhaustive_scan(algebra: &FiniteAlgebra, n: usize) -> Result<SearchOutcome, SearchError> {
    exhaustive_scan_with_ceiling(algebra, n, DEFAULT_SCAN_CEILING)
}

pub fn exhaustive_scan_with_ceiling(algebra: &FiniteAlgebra, n: usize, ceiling: u64) -> Result<SearchOutcome, SearchError> {
    check_dims(algebra, n)?;
    let m = algebra.len();
    let required_log2 = (n * n * m) as u32;
    if required_log2 >= 64 || (1u64 << required_log2) > ceiling {
        return Err(SearchError::CeilingExceeded { required_log2, allowed: ceiling });
    }
    let packing = Packing::new(n);
    let values = 1u64 << (n * n);
    let total = 1u64 << required_log2;
    let mut images = vec![0u64; m];
    for count in 0..total {
        // Odometer with the last element varying fastest.
        let mut rest = count;
        for a in (0..m).rev() {
            images[a] = rest % values;
            rest /= values;
        }
        if satisfies(algebra, &packing, &images) {
            let representation = build_representation(algebra, &packing, &images)
                .expect("a satisfying assignment is a closed, duplicate-free model");
            return Ok(SearchOutcome::Found { representation });
        }
    }
    Ok(SearchOutcome::ExhaustedNone { nodes: total })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Bounds {
    low: [u64; MAX_ELEMENTS],
    up: [u64; MAX_ELEMENTS],
}

/// A branch that propagation refuted, reported to the observer of
/// [`search_observed`]: the bounds right after the decision, before
/// propagation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedBranch {
    pub low: Vec<Relation>,
    pub up: Vec<Relation>,
}

enum Flow {
    Found(Vec<u64>),
    Exhausted,
    Limit,
    Stopped,
}

struct Searcher<'a> {
    algebra: &'a FiniteAlgebra,
    packing: Packing,
    m: usize,
    comp: Vec<(usize, usize, usize)>,
    meet: Vec<(usize, usize, usize)>,
    symmetry: Option<Vec<Vec<usize>>>,
    limit: u64,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl<'a> Searcher<'a> {
    fn new(problem: &'a SearchProblem) -> Self {
        let algebra = &problem.algebra;
        let m = algebra.len();
        let entries = |op| {
            (0..m)
                .flat_map(|a| (0..m).map(move |b| (a, b)))
                .map(|(a, b)| (a, b, algebra.apply(op, a, b)))
                .collect::<Vec<_>>()
        };
        let n = problem.base_size;
        Searcher {
            algebra,
            packing: Packing::new(n),
            m,
            comp: entries(Op::Comp),
            meet: entries(Op::Meet),
            symmetry: problem.options.symmetry_pruning.then(|| permutations(n)),
            limit: problem.options.node_limit,
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    fn initial(&self) -> Bounds {
        let mut b = Bounds { low: [0; MAX_ELEMENTS], up: [0; MAX_ELEMENTS] };
        b.up[..self.m].fill(self.packing.all);
        b
    }

    /// Tightens bounds to a fixpoint; `false` on contradiction.
    fn propagate(&self, s: &mut Bounds) -> bool {
        let p = &self.packing;
        let n = p.n;
        loop {
            let before = *s;
            for &(a, b, c) in &self.comp {
                s.low[c] |= p.compose(s.low[a], s.low[b]);
                s.up[c] &= p.compose(s.up[a], s.up[b]);
                for x in 0..n {
                    let up_c = p.row(s.up[c], x);
                    // (x,z) ∈ a forces row z of b inside row x of c.
                    for z in BitIter(p.row(s.low[a], x)) {
                        s.up[b] &= !((!up_c & p.row(s.up[b], z)) << (z * n));
                    }
                    // (z,y) ∈ b with (x,y) ∉ c rules out (x,z) ∈ a.
                    for z in BitIter(p.row(s.up[a], x)) {
                        if p.row(s.low[b], z) & !up_c != 0 {
                            s.up[a] &= !(1 << (x * n + z));
                        }
                    }
                    // A required pair of c with exactly one possible middle point.
                    for y in BitIter(p.row(s.low[c], x)) {
                        let mut mids = BitIter(p.row(s.up[a], x)).filter(|&z| p.row(s.up[b], z) >> y & 1 == 1);
                        if let (Some(z), None) = (mids.next(), mids.next()) {
                            s.low[a] |= 1 << (x * n + z);
                            s.low[b] |= 1 << (z * n + y);
                        }
                    }
                }
            }
            for &(a, b, c) in &self.meet {
                s.low[c] |= s.low[a] & s.low[b];
                s.up[c] &= s.up[a] & s.up[b];
                s.low[a] |= s.low[c];
                s.low[b] |= s.low[c];
                s.up[b] &= !(s.low[a] & !s.up[c]);
                s.up[a] &= !(s.low[b] & !s.up[c]);
            }
            if (0..self.m).any(|a| s.low[a] & !s.up[a] != 0) {
                return false;
            }
            if *s == before {
                break;
            }
        }
        for a in 0..self.m {
            if s.low[a] != s.up[a] {
                continue;
            }
            for b in a + 1..self.m {
                if s.low[b] == s.up[b] && s.low[a] == s.low[b] {
                    return false;
                }
            }
        }
        true
    }

    fn next_decision(&self, s: &Bounds) -> Option<(usize, u64)> {
        (0..self.m).find_map(|a| {
            let free = s.up[a] & !s.low[a];
            (free != 0).then(|| (a, 1u64 << free.trailing_zeros()))
        })
    }

    fn accept_leaf(&self, s: &Bounds) -> Option<Vec<u64>> {
        let images = s.low[..self.m].to_vec();
        if let Some(perms) = &self.symmetry {
            let smaller = perms.iter().any(|perm| {
                let permuted: Vec<u64> = images.iter().map(|&r| self.packing.permute(r, perm)).collect();
                permuted < images
            });
            if smaller {
                return None;
            }
        }
        satisfies(self.algebra, &self.packing, &images).then_some(images)
    }

    fn count_node(&self) -> bool {
        self.nodes.fetch_add(1, Ordering::Relaxed) < self.limit
    }

    fn children(&self, s: &Bounds, a: usize, bit: u64) -> [Bounds; 2] {
        let mut off = *s;
        off.up[a] &= !bit;
        let mut on = *s;
        on.low[a] |= bit;
        [off, on]
    }

    fn dfs(&self, s: Bounds, observe: &mut dyn FnMut(&Bounds)) -> Flow {
        if self.stop.load(Ordering::Relaxed) {
            return Flow::Stopped;
        }
        let Some((a, bit)) = self.next_decision(&s) else {
            return match self.accept_leaf(&s) {
                Some(images) => Flow::Found(images),
                None => Flow::Exhausted,
            };
        };
        for mut child in self.children(&s, a, bit) {
            if !self.count_node() {
                return Flow::Limit;
            }
            let decided = child;
            if !self.propagate(&mut child) {
                observe(&decided);
                continue;
            }
            match self.dfs(child, observe) {
                Flow::Exhausted => {}
                other => return other,
            }
        }
        Flow::Exhausted
    }

    /// Expands the tree breadth first until at least `target` open branches
    /// remain, for parallel exploration.
    fn frontier(&self, root: Bounds, target: usize) -> Result<Vec<Bounds>, Flow> {
        let mut level = vec![root];
        while level.len() < target {
            let mut next = Vec::with_capacity(level.len() * 2);
            let mut expanded = false;
            for s in level {
                match self.next_decision(&s) {
                    None => {
                        if let Some(images) = self.accept_leaf(&s) {
                            return Err(Flow::Found(images));
                        }
                    }
                    Some((a, bit)) => {
                        expanded = true;
                        for mut child in self.children(&s, a, bit) {
                            if !self.count_node() {
                                return Err(Flow::Limit);
                            }
                            if self.propagate(&mut child) {
                                next.push(child);
                            }
                        }
                    }
                }
            }
            level = next;
            if !expanded || level.is_empty() {
                break;
            }
        }
        Ok(level)
    }

    fn outcome(&self, flow: Flow) -> SearchOutcome {
        let nodes = self.nodes.load(Ordering::Relaxed).min(self.limit);
        match flow {
            Flow::Found(images) => {
                let representation = build_representation(self.algebra, &self.packing, &images)
                    .expect("a satisfying assignment is a closed, duplicate-free model");
                debug_assert!(check_representation(&representation).is_ok());
                SearchOutcome::Found { representation }
            }
            Flow::Exhausted => SearchOutcome::ExhaustedNone { nodes },
            Flow::Limit | Flow::Stopped => SearchOutcome::LimitReached { nodes },
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Searches for a representation of `problem.algebra()` over
/// `problem.base_size()` points.
pub fn search(problem: &SearchProblem) -> SearchOutcome {
    if problem.options.deterministic {
        return search_observed(problem, |_| {});
    }
    let searcher = Searcher::new(problem);
    let mut root = searcher.initial();
    if !searcher.propagate(&mut root) {
        return searcher.outcome(Flow::Exhausted);
    }
    let target = 4 * rayon::current_num_threads().max(1);
    let frontier = match searcher.frontier(root, target) {
        Ok(f) => f,
        Err(flow) => return searcher.outcome(flow),
    };
    let flow = frontier
        .into_par_iter()
        .map(|s| match searcher.dfs(s, &mut |_| {}) {
            Flow::Found(images) => {
                searcher.stop.store(true, Ordering::Relaxed);
                Flow::Found(images)
            }
            Flow::Limit => {
                searcher.stop.store(true, Ordering::Relaxed);
                Flow::Limit
            }
            other => other,
        })
        .reduce(
            || Flow::Exhausted,
            |x, y| match (x, y) {
                (f @ Flow::Found(_), _) | (_, f @ Flow::Found(_)) => f,
                (Flow::Limit, _) | (_, Flow::Limit) => Flow::Limit,
                (Flow::Stopped, _) | (_, Flow::Stopped) => Flow::Stopped,
                _ => Flow::Exhausted,
            },
        );
    searcher.outcome(flow)
}

/// Sequential search that reports every branch killed by propagation.
pub fn search_observed(problem: &SearchProblem, mut observer: impl FnMut(PrunedBranch)) -> SearchOutcome {
    let searcher = Searcher::new(problem);
    let packing = searcher.packing;
    let m = searcher.m;
    let mut report = |b: &Bounds| {
        observer(PrunedBranch {
            low: b.low[..m].iter().map(|&r| packing.unpack(r)).collect(),
            up: b.up[..m].iter().map(|&r| packing.unpack(r)).collect(),
        })
    };
    let mut root = searcher.initial();
    if !searcher.propagate(&mut root) {
        report(&searcher.initial());
        return searcher.outcome(Flow::Exhausted);
    }
    let flow = searcher.dfs(root, &mut report);
    searcher.outcome(flow)
}

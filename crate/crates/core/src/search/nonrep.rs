use serde::Serialize;

use super::{
    exhaustive_scan_with_ceiling, search, SearchError, SearchOptions, SearchOutcome, SearchProblem,
    DEFAULT_SCAN_CEILING,
};
use crate::algebra::FiniteAlgebra;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NonRepOptions {
    pub search: SearchOptions,
    /// Sizes whose assignment space fits under this count are enumerated
    /// exhaustively; larger ones go to the propagating search.
    pub scan_ceiling: u64,
}

impl Default for NonRepOptions {
    fn default() -> Self {
        NonRepOptions { search: SearchOptions::default(), scan_ceiling: DEFAULT_SCAN_CEILING }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeMethod {
    Exhaustive,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub base_size: usize,
    pub method: SizeMethod,
    pub outcome: SearchOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Every size `1..=max_size` was refuted completely.
    NoRepresentation { max_size: usize },
    /// A representation exists at this size.
    Representable { base_size: usize },
    /// Some size hit the node limit and nothing was found.
    Inconclusive { sizes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonRepReport {
    pub sizes: Vec<SizeReport>,
    pub verdict: Verdict,
}

/// Decides representability at every base size `1..=max_size`, stopping at the
/// first size where a representation is found.
pub fn nonrep_certificate(
    algebra: &FiniteAlgebra,
    max_size: usize,
    options: NonRepOptions,
) -> Result<NonRepReport, SearchError> {
    if max_size == 0 {
        return Err(SearchError::BaseSize(0));
    }
    let mut sizes = Vec::new();
    for n in 1..=max_size {
        let (method, outcome) = match exhaustive_scan_with_ceiling(algebra, n, options.scan_ceiling) {
            Ok(outcome) => (SizeMethod::Exhaustive, outcome),
            Err(SearchError::CeilingExceeded { .. }) => {
                let problem = SearchProblem::new(algebra.clone(), n, options.search)?;
                (SizeMethod::Search, search(&problem))
            }
            Err(e) => return Err(e),
        };
        let found = outcome.is_found();
        sizes.push(SizeReport { base_size: n, method, outcome });
        if found {
            return Ok(NonRepReport { sizes, verdict: Verdict::Representable { base_size: n } });
        }
    }
    let limited: Vec<usize> = sizes
        .iter()
        .filter(|s| matches!(s.outcome, SearchOutcome::LimitReached { .. }))
        .map(|s| s.base_size)
        .collect();
    let verdict = if limited.is_empty() {
        Verdict::NoRepresentation { max_size }
    } else {
        Verdict::Inconclusive { sizes: limited }
    };
    Ok(NonRepReport { sizes, verdict })
}

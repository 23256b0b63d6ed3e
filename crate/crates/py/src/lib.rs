//! Python bindings: relations, algebras, representation search and the chain
//! construction.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use relrep::chain::{self, ChainError, ModelTriple};
use relrep::format;
use relrep::point;
use relrep::search::{self as rsearch, cnf, NonRepOptions, NonRepVerdict, SearchOptions, SearchOutcome, SearchProblem};
use relrep::{extract_tables, generate_closure, necessary_laws, FiniteAlgebra, Op};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Relation", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyRelation(relrep::Relation);

#[pymethods]
impl PyRelation {
    #[new]
    #[pyo3(signature = (n, pairs=Vec::new()))]
    fn new(n: usize, pairs: Vec<(usize, usize)>) -> PyResult<Self> {
        relrep::Relation::from_pairs(n, pairs).map(PyRelation).map_err(value_error)
    }

    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        relrep::Relation::identity(n).map(PyRelation).map_err(value_error)
    }

    #[getter]
    fn base_size(&self) -> usize {
        self.0.base_size()
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.pairs().collect()
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        self.0.contains(x, y)
    }

    fn compose(&self, other: &PyRelation) -> PyResult<Self> {
        self.0.compose(&other.0).map(PyRelation).map_err(value_error)
    }

    fn intersect(&self, other: &PyRelation) -> PyResult<Self> {
        self.0.intersect(&other.0).map(PyRelation).map_err(value_error)
    }

    fn complement(&self) -> Self {
        PyRelation(self.0.complement())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Relation({}, {})", self.0.base_size(), self.0)
    }
}

#[pyclass(name = "Algebra", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyAlgebra(FiniteAlgebra);

#[pymethods]
impl PyAlgebra {
    /// Parses the algebra file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        format::parse_algebra(text).map(PyAlgebra).map_err(value_error)
    }

    #[staticmethod]
    fn point() -> Self {
        PyAlgebra(point::point_algebra())
    }

    /// Tables of the closure of named relations.
    #[staticmethod]
    fn closure(seeds: Vec<(String, PyRelation)>) -> PyResult<Self> {
        let model = generate_closure(seeds.into_iter().map(|(n, r)| (n, r.0)).collect()).map_err(value_error)?;
        extract_tables(&model).map(PyAlgebra).map_err(value_error)
    }

    #[getter]
    fn elements(&self) -> Vec<String> {
        self.0.elements().to_vec()
    }

    fn comp(&self, a: &str, b: &str) -> PyResult<String> {
        self.apply(Op::Comp, a, b)
    }

    fn meet(&self, a: &str, b: &str) -> PyResult<String> {
        self.apply(Op::Meet, a, b)
    }

    /// Descriptions of violated laws; empty when all hold.
    fn violations(&self) -> Vec<String> {
        necessary_laws(&self.0).iter().map(|v| v.describe(&self.0)).collect()
    }

    fn to_text(&self) -> String {
        format::print_algebra(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Algebra({})", self.0.elements().join(" "))
    }
}

impl PyAlgebra {
    fn apply(&self, op: Op, a: &str, b: &str) -> PyResult<String> {
        let idx = |s: &str| self.0.index_of(s).ok_or_else(|| value_error(format!("unknown element {s:?}")));
        Ok(self.0.name(self.0.apply(op, idx(a)?, idx(b)?)).to_string())
    }
}

/// Searches for a representation over `n` points. Returns a dict with
/// `status` ("found", "none" or "limit"), `nodes`, and `images` mapping
/// element names to relations when found.
#[pyfunction]
#[pyo3(signature = (algebra, n, deterministic=true, symmetry=false, node_limit=rsearch::DEFAULT_NODE_LIMIT))]
fn search<'py>(
    py: Python<'py>,
    algebra: &PyAlgebra,
    n: usize,
    deterministic: bool,
    symmetry: bool,
    node_limit: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let options = SearchOptions { deterministic, symmetry_pruning: symmetry, node_limit };
    let problem = SearchProblem::new(algebra.0.clone(), n, options).map_err(value_error)?;
    let outcome = py.detach(|| rsearch::search(&problem));
    let d = PyDict::new(py);
    match &outcome {
        SearchOutcome::Found { representation } => {
            d.set_item("status", "found")?;
            let images = PyDict::new(py);
            for a in 0..representation.algebra.len() {
                images.set_item(representation.algebra.name(a), PyRelation(representation.image(a).clone()))?;
            }
            d.set_item("images", images)?;
        }
        SearchOutcome::ExhaustedNone { nodes } => {
            d.set_item("status", "none")?;
            d.set_item("nodes", nodes)?;
        }
        SearchOutcome::LimitReached { nodes } => {
            d.set_item("status", "limit")?;
            d.set_item("nodes", nodes)?;
        }
    }
    Ok(d)
}

/// True when every base size `1..=max_size` is refuted.
#[pyfunction]
fn no_representation_up_to(py: Python<'_>, algebra: &PyAlgebra, max_size: usize) -> PyResult<bool> {
    let alg = algebra.0.clone();
    let report = py
        .detach(move || rsearch::nonrep_certificate(&alg, max_size, NonRepOptions::default()))
        .map_err(value_error)?;
    Ok(matches!(report.verdict, NonRepVerdict::NoRepresentation { .. }))
}

/// The DIMACS text of the representation problem at base size `n`.
#[pyfunction]
fn encode_cnf(algebra: &PyAlgebra, n: usize) -> PyResult<String> {
    if n == 0 || n > rsearch::MAX_PACKED_BASE {
        return Err(value_error(format!("base size must be 1..={}", rsearch::MAX_PACKED_BASE)));
    }
    Ok(cnf::encode_cnf(&algebra.0, n).to_dimacs())
}

/// Runs the chain construction. `model` is "qsymbolic" or the text of a
/// relation file defining z, e, r. Returns the verified certificate text;
/// raises ValueError with the failure report when the construction stops.
#[pyfunction]
#[pyo3(signature = (depth, model="qsymbolic"))]
#[allow(clippy::result_large_err)]
fn run_chain(py: Python<'_>, depth: usize, model: &str) -> PyResult<String> {
    let triple = if model == "qsymbolic" {
        ModelTriple::qsymbolic()
    } else {
        format::parse_model_triple(model).map_err(value_error)?
    };
    match py.detach(|| chain::run_chain(&triple, depth)) {
        Ok(cert) => Ok(cert.to_text()),
        Err(ChainError::Blocked(report)) => Err(value_error(report)),
        Err(e) => Err(value_error(e)),
    }
}

/// Checks the point algebra's tables against sampled rationals.
#[pyfunction]
#[pyo3(signature = (samples=1000, seed=0))]
fn verify_point_tables(samples: usize, seed: u64) -> bool {
    matches!(point::verify_tables(samples, seed), point::TableVerdict::Ok { .. })
}

#[pymodule]
fn relrep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRelation>()?;
    m.add_class::<PyAlgebra>()?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(no_representation_up_to, m)?)?;
    m.add_function(wrap_pyfunction!(encode_cnf, m)?)?;
    m.add_function(wrap_pyfunction!(run_chain, m)?)?;
    m.add_function(wrap_pyfunction!(verify_point_tables, m)?)?;
    Ok(())
}

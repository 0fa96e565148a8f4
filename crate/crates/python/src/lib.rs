//! The `sigpds` Python module.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use sigpds::algebra::laws::{LawReport, LawStatus};
use sigpds::format::{parse_system, Domain, SystemFile};
use sigpds::frontend::{self, Caps, RunError};
use sigpds::signatures::{Alphabet, StackSignature};

create_exception!(sigpds, CapExceeded, PyException, "A closure or step cap was exceeded.");

fn to_py(e: RunError) -> PyErr {
    match e {
        RunError::Cap(m) => CapExceeded::new_err(m),
        RunError::Input(m) | RunError::Unsupported(m) => PyValueError::new_err(m),
    }
}

/// A parsed system file.
#[pyclass(name = "System", module = "sigpds", frozen)]
struct PySystem {
    file: SystemFile,
    caps: Caps,
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (text, closure_cap=None, step_cap=None))]
    fn new(text: &str, closure_cap: Option<usize>, step_cap: Option<usize>) -> PyResult<Self> {
        let file = parse_system(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let mut caps = Caps::default();
        caps.closure = closure_cap.unwrap_or(caps.closure);
        caps.budget = step_cap.unwrap_or(caps.budget);
        Ok(PySystem { file, caps })
    }

    #[staticmethod]
    #[pyo3(signature = (path, closure_cap=None, step_cap=None))]
    fn load(path: &str, closure_cap: Option<usize>, step_cap: Option<usize>) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        Self::new(&text, closure_cap, step_cap)
    }

    #[getter]
    fn domain(&self) -> String {
        self.file.domain.to_string()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.file.states().to_vec()
    }

    #[getter]
    fn alphabet(&self) -> Option<Vec<String>> {
        self.file.alphabet().map(|a| a.names().to_vec())
    }

    /// Edges of the saturated automaton as `(from, symbol, weight, to)`.
    fn presat(&self) -> PyResult<Vec<(String, String, String, String)>> {
        let out = self.file.presat(&self.caps).map_err(to_py)?;
        Ok(out.automaton.edges.into_iter().map(|e| (e.from, e.symbol, e.weight, e.to)).collect())
    }

    /// Meaning of the closure indices in rendered weights, if any.
    fn legend(&self) -> PyResult<Option<String>> {
        Ok(self.file.presat(&self.caps).map_err(to_py)?.legend)
    }

    fn delta(&self, p: &str, w: &str, q: &str) -> PyResult<String> {
        self.file.delta(p, w, q, &self.caps).map_err(to_py)
    }

    /// The min-height weight, `None` when no run exists.
    fn minheight(&self, p: &str, w: &str, q: &str) -> PyResult<Option<u64>> {
        Ok(match self.file.minheight(p, w, q, &self.caps).map_err(to_py)? {
            sigpds::domains::Height::Finite(n) => Some(n),
            sigpds::domains::Height::Infinite => None,
        })
    }

    #[pyo3(signature = (p, w, q, w2="-"))]
    fn reach(&self, p: &str, w: &str, q: &str, w2: &str) -> PyResult<bool> {
        self.file.reach(p, w, q, w2, &self.caps).map_err(to_py)
    }

    /// `(reachable, weight)` for the named target automaton glued at `q`.
    fn reach_target(&self, p: &str, w: &str, q: &str, target: &str) -> PyResult<(bool, String)> {
        let out = self.file.reach_target(p, w, q, target, &self.caps).map_err(to_py)?;
        Ok((out.reachable, out.weight))
    }

    #[pyo3(signature = (p, w, q, w2="-"))]
    fn cover(&self, p: &str, w: &str, q: &str, w2: &str) -> PyResult<bool> {
        self.file.cover(p, w, q, w2, &self.caps).map_err(to_py)
    }

    #[pyo3(signature = (p, w, q, w2="-"))]
    fn trreach(&self, p: &str, w: &str, q: &str, w2: &str) -> PyResult<bool> {
        self.file.trreach(p, w, q, w2, &self.caps).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("System(domain={}, states={})", self.file.domain, self.file.states().len())
    }
}

/// A stack signature over a named alphabet, written `pop/push` or `TOP`.
#[pyclass(name = "Signature", module = "sigpds", frozen)]
struct PySignature {
    alphabet: Alphabet,
    sig: StackSignature,
}

impl PySignature {
    fn wrap(&self, sig: StackSignature) -> PySignature {
        PySignature { alphabet: self.alphabet.clone(), sig }
    }
}

#[pymethods]
impl PySignature {
    #[new]
    fn new(text: &str, alphabet: Vec<String>) -> PyResult<Self> {
        let alphabet = Alphabet::new(alphabet);
        let sig = alphabet.parse_signature(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PySignature { alphabet, sig })
    }

    #[getter]
    fn is_top(&self) -> bool {
        self.sig.is_top()
    }

    fn __mul__(&self, other: &PySignature) -> PySignature {
        self.wrap(self.sig.mul(&other.sig))
    }

    fn leq(&self, other: &PySignature) -> bool {
        self.sig.leq(&other.sig)
    }

    fn join(&self, other: &PySignature) -> PySignature {
        self.wrap(self.sig.join(&other.sig))
    }

    fn __eq__(&self, other: &PySignature) -> bool {
        self.sig == other.sig
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.sig.hash(&mut h);
        h.finish()
    }

    fn __str__(&self) -> String {
        self.alphabet.render(&self.sig)
    }

    fn __repr__(&self) -> String {
        format!("Signature('{}')", self.alphabet.render(&self.sig))
    }
}

fn report_dict<'py>(py: Python<'py>, r: &LawReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("subject", &r.subject)?;
    d.set_item("samples", r.samples)?;
    d.set_item("seed", r.seed)?;
    d.set_item("passed", r.passed())?;
    let laws = PyList::empty(py);
    for l in &r.laws {
        let x = PyDict::new(py);
        x.set_item("name", &l.name)?;
        x.set_item("law", &l.law)?;
        x.set_item("passed", l.status == LawStatus::Pass)?;
        x.set_item("checked", l.checked)?;
        x.set_item("failures", l.failures)?;
        x.set_item("witness", &l.witness)?;
        laws.append(x)?;
    }
    d.set_item("laws", laws)?;
    Ok(d)
}

/// Law reports for a domain: the weight structure, then its lifting.
#[pyfunction]
#[pyo3(signature = (domain, system=None, samples=1000, seed=1))]
fn laws<'py>(
    py: Python<'py>,
    domain: &str,
    system: Option<&PySystem>,
    samples: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let d = Domain::parse(domain).ok_or_else(|| PyValueError::new_err(format!("unknown domain `{domain}`")))?;
    let caps = system.map(|s| s.caps).unwrap_or_default();
    let reports = frontend::laws(d, system.map(|s| &s.file), samples, seed, &caps).map_err(to_py)?;
    reports.iter().map(|r| report_dict(py, r)).collect()
}

#[pymodule]
#[pyo3(name = "sigpds")]
fn sigpds_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PySignature>()?;
    m.add_function(wrap_pyfunction!(laws, m)?)?;
    m.add("CapExceeded", m.py().get_type::<CapExceeded>())?;
    m.add("DOMAINS", Domain::ALL.iter().map(|d| d.to_string()).collect::<Vec<_>>())?;
    Ok(())
}

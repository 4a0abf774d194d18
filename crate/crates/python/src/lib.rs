//! Python bindings: terms, patterns, environments, rules and the
//! untyped/typed step relations.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use cls_core::inference::{infer as infer_pattern, StepError, TypedSystem};
use cls_core::matching::match_pattern;
use cls_core::rewrite::{
    explore as explore_graph, parse_rules, untyped_step, Rule, Transition, TransitionGraph,
};
use cls_core::syntax::{congruent as congruent_terms, parse_pattern, parse_term};
use cls_core::typesys::{type_of_term, TypeEnv as CoreEnv, TypeSet};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(cls_py, IllTypedError, PyException);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(frozen, module = "cls_py")]
struct Term(cls_core::syntax::Term);

#[pymethods]
impl Term {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_term(text).map(Term).map_err(value_err)
    }

    fn size(&self) -> usize {
        self.0.size()
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Term({:?})", self.0.to_string())
    }

    fn __eq__(&self, other: &Term) -> bool {
        self.0 == other.0
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }
}

#[pyclass(frozen, module = "cls_py")]
struct Pattern(cls_core::syntax::Pattern);

#[pymethods]
impl Pattern {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_pattern(text).map(Pattern).map_err(value_err)
    }

    /// Variable names with their kind markers, sorted.
    fn variables(&self) -> Vec<String> {
        self.0.vars().iter().map(|v| v.to_string()).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Pattern({:?})", self.0.to_string())
    }
}

fn names(set: &TypeSet) -> Vec<String> {
    set.iter().map(|t| t.name().to_string()).collect()
}

#[pyclass(frozen, module = "cls_py")]
struct TypeEnv(CoreEnv);

#[pymethods]
impl TypeEnv {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        CoreEnv::parse(text).map(TypeEnv).map_err(value_err)
    }

    /// `(present, required)` as sorted lists of basic type names.
    fn type_of(&self, term: &Term) -> PyResult<(Vec<String>, Vec<String>)> {
        let ty =
            type_of_term(&term.0, &self.0).map_err(|e| IllTypedError::new_err(e.to_string()))?;
        Ok((names(&ty.present), names(&ty.required)))
    }

    fn types(&self) -> Vec<String> {
        self.0.basic_types().map(|t| t.name().to_string()).collect()
    }
}

#[pyclass(frozen, module = "cls_py")]
struct Rules(Vec<Rule>);

#[pymethods]
impl Rules {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_rules(text).map(Rules).map_err(value_err)
    }

    fn names(&self) -> Vec<String> {
        self.0.iter().map(|r| r.name.to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.iter().map(|r| format!("rule {r};\n")).collect()
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<Term> {
    Term::new(text)
}

#[pyfunction]
fn congruent(a: &Term, b: &Term) -> bool {
    congruent_terms(&a.0, &b.0)
}

/// Every instantiation under which `pattern` denotes `term`, each as a
/// dict from variable (with marker) to the printed value.
#[pyfunction(name = "match")]
fn match_<'py>(
    py: Python<'py>,
    pattern: &Pattern,
    term: &Term,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let found = match_pattern(&pattern.0, &term.0).map_err(value_err)?;
    found
        .iter()
        .map(|sigma| {
            let d = PyDict::new(py);
            for (v, b) in sigma.iter() {
                d.set_item(v.to_string(), b.to_string())?;
            }
            Ok(d)
        })
        .collect()
}

fn transitions(ts: Vec<Transition>) -> Vec<(String, Term)> {
    ts.into_iter()
        .map(|t| (t.rule.to_string(), Term(t.target)))
        .collect()
}

fn step_err(e: StepError) -> PyErr {
    match e {
        StepError::IllTypedState { .. } => IllTypedError::new_err(e.to_string()),
        other => value_err(other),
    }
}

/// Untyped successors as `(rule, term)` pairs.
#[pyfunction]
fn step(rules: &Rules, term: &Term) -> PyResult<Vec<(String, Term)>> {
    untyped_step(&rules.0, &term.0)
        .map(transitions)
        .map_err(value_err)
}

/// Typed successors as `(rule, term)` pairs; raises `IllTypedError` if
/// `term` is not a correct system.
#[pyfunction]
fn typed_step(env: &TypeEnv, rules: &Rules, term: &Term) -> PyResult<Vec<(String, Term)>> {
    let sys = TypedSystem::new(env.0.clone(), rules.0.clone()).map_err(value_err)?;
    sys.step(&term.0).map(transitions).map_err(step_err)
}

/// Principal typing of a pattern: `{"scheme", "present", "required",
/// "constraints"}`, all printed.
#[pyfunction]
fn infer<'py>(py: Python<'py>, env: &TypeEnv, pattern: &Pattern) -> PyResult<Bound<'py, PyDict>> {
    let r = infer_pattern(&pattern.0, &env.0).map_err(value_err)?;
    let scheme = PyDict::new(py);
    for (v, (phi, psi)) in &r.basis_scheme {
        scheme.set_item(v.to_string(), (phi.to_string(), psi.to_string()))?;
    }
    let d = PyDict::new(py);
    d.set_item("scheme", scheme)?;
    d.set_item("present", r.phi.to_string())?;
    d.set_item("required", r.psi.to_string())?;
    let cs: Vec<String> = r.constraints.iter().map(|c| c.to_string()).collect();
    d.set_item("constraints", cs)?;
    Ok(d)
}

fn graph_dict<'py>(py: Python<'py>, g: TransitionGraph) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("dot", g.to_dot())?;
    let edges: Vec<(usize, String, usize)> = g
        .edges
        .iter()
        .map(|e| (e.from, e.rule.to_string(), e.to))
        .collect();
    d.set_item("edges", edges)?;
    d.set_item("truncated", g.truncated)?;
    let states: Vec<Term> = g.states.into_iter().map(Term).collect();
    d.set_item("states", states)?;
    Ok(d)
}

/// Bounded exploration: `{"states", "edges", "truncated", "dot"}`, with
/// edges as `(from, rule, to)` index triples. `env=None` explores the
/// untyped semantics.
#[pyfunction]
#[pyo3(signature = (rules, term, env=None, max_states=1000, max_depth=100))]
fn explore<'py>(
    py: Python<'py>,
    rules: &Rules,
    term: &Term,
    env: Option<&TypeEnv>,
    max_states: usize,
    max_depth: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let g = match env {
        None => py
            .detach(|| {
                explore_graph(
                    |t| untyped_step(&rules.0, t),
                    &term.0,
                    max_states,
                    max_depth,
                )
            })
            .map_err(value_err)?,
        Some(env) => {
            let sys = TypedSystem::new(env.0.clone(), rules.0.clone()).map_err(value_err)?;
            py.detach(|| explore_graph(|t| sys.step(t), &term.0, max_states, max_depth))
                .map_err(step_err)?
        }
    };
    graph_dict(py, g)
}

#[pymodule]
fn cls_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Term>()?;
    m.add_class::<Pattern>()?;
    m.add_class::<TypeEnv>()?;
    m.add_class::<Rules>()?;
    m.add("IllTypedError", m.py().get_type::<IllTypedError>())?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(congruent, m)?)?;
    m.add_function(wrap_pyfunction!(match_, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(typed_step, m)?)?;
    m.add_function(wrap_pyfunction!(infer, m)?)?;
    m.add_function(wrap_pyfunction!(explore, m)?)?;
    Ok(())
}

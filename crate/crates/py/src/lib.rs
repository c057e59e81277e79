//! Python bindings: `import thl`.

use std::sync::OnceLock;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use thl_core::gram;
use thl_core::homfly::{evaluate, EvalParams, HomflyEngine};
use thl_core::signs;
use thl_core::tangle::{self, build_link, build_unoriented_link};
use thl_core::{ComplexValue, Convention, Error, Forest, GeneratorWord, SignSeq};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn engine() -> &'static HomflyEngine {
    static ENGINE: OnceLock<HomflyEngine> = OnceLock::new();
    ENGINE.get_or_init(HomflyEngine::new)
}

fn convention(name: &str) -> PyResult<Convention> {
    name.parse().map_err(err)
}

fn params(r: u32, k: u32) -> PyResult<EvalParams> {
    EvalParams::new(r, k).map_err(err)
}

#[pyclass(frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct Tree(thl_core::Tree);

#[pymethods]
impl Tree {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(Tree).map_err(err)
    }

    fn leaf_count(&self) -> usize {
        self.0.leaf_count()
    }

    fn caret_count(&self) -> usize {
        self.0.caret_count()
    }

    /// Leaf colouring when the root carries `+`.
    fn signs(&self) -> String {
        signs::format_signs(&signs::propagate_tree(&self.0, thl_core::Sign::Plus))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Tree('{}')", self.0)
    }
}

#[pyclass(frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct GroupElement(thl_core::GroupElement);

#[pymethods]
impl GroupElement {
    #[new]
    fn new(plus: &str, minus: &str) -> PyResult<Self> {
        let p = plus.parse().map_err(err)?;
        let m = minus.parse().map_err(err)?;
        thl_core::GroupElement::new(p, m)
            .map(GroupElement)
            .map_err(err)
    }

    #[staticmethod]
    fn from_word(word: &str) -> PyResult<Self> {
        word.parse::<GeneratorWord>()
            .map(|w| GroupElement(w.eval()))
            .map_err(err)
    }

    #[staticmethod]
    fn identity() -> Self {
        GroupElement(thl_core::GroupElement::identity())
    }

    #[staticmethod]
    fn x0() -> Self {
        GroupElement(thl_core::GroupElement::x0())
    }

    #[staticmethod]
    fn x1() -> Self {
        GroupElement(thl_core::GroupElement::x1())
    }

    #[getter]
    fn plus(&self) -> Tree {
        Tree(self.0.plus().clone())
    }

    #[getter]
    fn minus(&self) -> Tree {
        Tree(self.0.minus().clone())
    }

    fn leaf_count(&self) -> usize {
        self.0.leaf_count()
    }

    fn is_reduced(&self) -> bool {
        self.0.is_reduced()
    }

    fn is_oriented(&self) -> bool {
        signs::is_oriented(&self.0)
    }

    fn reduce(&self) -> Self {
        GroupElement(self.0.reduce())
    }

    fn invert(&self) -> Self {
        GroupElement(self.0.invert())
    }

    /// Add an opposing caret pair at leaf `i` (0-based).
    fn stabilize(&self, i: usize) -> PyResult<Self> {
        self.0.stabilize(i).map(GroupElement).map_err(err)
    }

    fn __mul__(&self, other: &GroupElement) -> Self {
        GroupElement(self.0.multiply(&other.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("GroupElement('{}', '{}')", self.0.plus(), self.0.minus())
    }
}

/// Leaf signs of a forest (one tree text per root) applied to an n-sign.
#[pyfunction]
fn propagate(trees: Vec<String>, sigma: &str) -> PyResult<String> {
    let ts = trees
        .iter()
        .map(|t| t.parse())
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let s: SignSeq = sigma.parse().map_err(err)?;
    signs::propagate(&Forest::new(ts), &s)
        .map(|x| x.to_string())
        .map_err(err)
}

#[pyfunction]
fn enumerate_oriented(max_leaves: usize) -> PyResult<Vec<GroupElement>> {
    Ok(signs::enumerate_oriented(max_leaves)
        .map_err(err)?
        .into_iter()
        .map(GroupElement)
        .collect())
}

/// PD JSON of the link of `g`.
#[pyfunction]
#[pyo3(signature = (g, unoriented = false, convention = "standard"))]
fn link_pd(g: &GroupElement, unoriented: bool, convention: &str) -> PyResult<String> {
    let c = self::convention(convention)?;
    let d = if unoriented {
        build_unoriented_link(&g.0, c)
    } else {
        build_link(&g.0, c)
    }
    .map_err(err)?;
    serde_json::to_string(&d.tangle().to_pd()).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Whether the chequerboard surface of the unoriented link is orientable.
#[pyfunction]
fn shading_orientable(g: &GroupElement) -> PyResult<bool> {
    let d = build_unoriented_link(&g.0, Convention::Standard).map_err(err)?;
    Ok(tangle::shade(&d).orientable)
}

/// HOMFLYPT polynomial of the link of `g` as `[(a, z, coefficient)]` and text.
#[pyfunction]
#[pyo3(signature = (g, convention = "standard"))]
fn homfly(g: &GroupElement, convention: &str) -> PyResult<(Vec<(i32, i32, String)>, String)> {
    let p = engine()
        .link_poly(&g.0, self::convention(convention)?)
        .map_err(err)?;
    Ok((
        p.terms().map(|(a, z, c)| (a, z, c.to_string())).collect(),
        p.to_string(),
    ))
}

/// HOMFLYPT of the link of `g` evaluated at `(r, k)`.
#[pyfunction]
#[pyo3(signature = (g, r, k, convention = "standard"))]
fn homfly_value(g: &GroupElement, r: u32, k: u32, convention: &str) -> PyResult<ComplexValue> {
    let p = engine()
        .link_poly(&g.0, self::convention(convention)?)
        .map_err(err)?;
    Ok(evaluate(&p, params(r, k)?))
}

#[pyfunction]
#[pyo3(signature = (g, r, k, convention = "standard"))]
fn phi(g: &GroupElement, r: u32, k: u32, convention: &str) -> PyResult<ComplexValue> {
    engine()
        .phi(&g.0, params(r, k)?, self::convention(convention)?)
        .map_err(err)
}

#[pyfunction]
fn delta(r: u32, k: u32) -> PyResult<f64> {
    Ok(params(r, k)?.delta())
}

/// Gram matrix `[φ(g_i⁻¹ g_j)]`.
#[pyfunction]
#[pyo3(signature = (family, r, k, convention = "standard"))]
fn element_gram(
    family: Vec<GroupElement>,
    r: u32,
    k: u32,
    convention: &str,
) -> PyResult<Vec<Vec<ComplexValue>>> {
    let fam: Vec<_> = family.into_iter().map(|g| g.0).collect();
    let m = gram::element_gram(engine(), &fam, params(r, k)?, self::convention(convention)?)
        .map_err(err)?;
    Ok(m.entries)
}

/// Ascending eigenvalues of a Hermitian matrix.
#[pyfunction]
fn hermitian_eigenvalues(matrix: Vec<Vec<ComplexValue>>) -> PyResult<Vec<f64>> {
    Ok(gram::hermitian_eigenvalues(&matrix).map_err(err)?.values)
}

#[pymodule]
fn thl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Tree>()?;
    m.add_class::<GroupElement>()?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_oriented, m)?)?;
    m.add_function(wrap_pyfunction!(link_pd, m)?)?;
    m.add_function(wrap_pyfunction!(shading_orientable, m)?)?;
    m.add_function(wrap_pyfunction!(homfly, m)?)?;
    m.add_function(wrap_pyfunction!(homfly_value, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(element_gram, m)?)?;
    m.add_function(wrap_pyfunction!(hermitian_eigenvalues, m)?)?;
    Ok(())
}

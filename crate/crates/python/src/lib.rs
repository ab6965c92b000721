//! Python bindings for `treedet`.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use treedet::determinantal::{self as det, Labeling};
use treedet::law::SubsetLaw;
use treedet::matching::{self, Coefficients, Count};
use treedet::recursions;
use treedet::spectral::{self, ProjectionMatrix};
use treedet::tree::{self, bipartition_by_parity, Bipartition, Class};
use treedet::{Caps, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse { .. }
        | Error::InvalidGraph(_)
        | Error::VertexOutOfRange { .. }
        | Error::CapExceeded { .. }
        | Error::Domain(_)
        | Error::GroundMismatch(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn caps() -> Caps {
    Caps::from_env()
}

/// A finite tree with vertices `0..n`.
#[pyclass(name = "Tree", module = "treedet_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTree {
    inner: tree::Tree,
}

#[pymethods]
impl PyTree {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyTree { inner: tree::Tree::new(n, edges).map_err(to_py)? })
    }

    /// Parses edge-list text: first line `n`, then one `u v` per edge.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyTree { inner: tree::parse_tree(text).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        self.inner.check_vertex(v).map_err(to_py)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn diameter(&self) -> usize {
        self.inner.diameter()
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    /// `(ball, original_ids)` for `B_r(o)`.
    fn ball(&self, o: usize, r: usize) -> PyResult<(PyTree, Vec<usize>)> {
        let w = self.inner.ball(o, r).map_err(to_py)?;
        Ok((PyTree { inner: w.graph }, w.original))
    }

    /// Color classes `(S, T)` by distance parity from `root`, with `root ∈ S`.
    fn bipartition(&self, root: usize) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let b = bipartition_by_parity(&self.inner.root_at(root).map_err(to_py)?, Class::S);
        Ok((b.s(), b.t()))
    }

    fn __repr__(&self) -> String {
        format!("Tree(n={}, edges={})", self.inner.n(), self.inner.edges().len())
    }
}

fn bip_from_s(t: &tree::Tree, s: Option<Vec<usize>>) -> PyResult<Bipartition> {
    match s {
        None => Ok(bipartition_by_parity(&t.root_at(0).map_err(to_py)?, Class::S)),
        Some(s) => {
            let mut mask = vec![false; t.n()];
            for v in s {
                t.check_vertex(v).map_err(to_py)?;
                mask[v] = true;
            }
            let b = Bipartition::from_s_mask(mask);
            if !b.is_proper_for(t) {
                return Err(PyValueError::new_err("S is not a color class of a proper 2-coloring"));
            }
            Ok(b)
        }
    }
}

type Rows = Vec<Vec<f64>>;

fn rows(m: &DMatrix<f64>) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn projection(k: Vec<Vec<f64>>) -> PyResult<ProjectionMatrix> {
    let n = k.len();
    if k.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("kernel must be a square list of rows"));
    }
    ProjectionMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| k[i][j])).map_err(to_py)
}

fn law_dict<'py>(py: Python<'py>, law: &SubsetLaw) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (s, p) in law.iter() {
        d.set_item(PyTuple::new(py, s)?, p)?;
    }
    Ok(d)
}

#[pyfunction]
fn gen_path(n: usize) -> PyResult<PyTree> {
    Ok(PyTree { inner: tree::gen_path(n, &caps()).map_err(to_py)? })
}

/// Complete `k`-ary tree of depth `n`, root 0.
#[pyfunction]
fn gen_kary(k: usize, n: usize) -> PyResult<PyTree> {
    Ok(PyTree { inner: tree::gen_kary(k, n, &caps()).map_err(to_py)?.into_tree() })
}

#[pyfunction]
fn gen_regular_ball(d: usize, n: usize) -> PyResult<PyTree> {
    Ok(PyTree { inner: tree::gen_regular_ball(d, n, &caps()).map_err(to_py)?.into_tree() })
}

#[pyfunction]
fn gen_alternating(n: usize) -> PyResult<PyTree> {
    Ok(PyTree { inner: tree::gen_alternating(n, &caps()).map_err(to_py)?.into_tree() })
}

#[pyfunction]
fn gen_star(k: usize) -> PyTree {
    PyTree { inner: tree::gen_star(k) }
}

#[pyfunction]
fn random_tree(n: usize, seed: u64) -> PyResult<PyTree> {
    use rand::SeedableRng;
    if n == 0 {
        return Err(PyValueError::new_err("a tree needs at least one vertex"));
    }
    Ok(PyTree { inner: tree::random_tree(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed)) })
}

/// All non-isomorphic trees on `n` vertices.
#[pyfunction]
fn free_trees(n: usize) -> Vec<PyTree> {
    tree::free_trees(n).into_iter().map(|inner| PyTree { inner }).collect()
}

/// `(nu, mm)`; `mm` is an int, or `None` above the exact-count threshold.
#[pyfunction]
fn max_matching(t: &PyTree) -> (usize, Option<BigUint>, f64) {
    let s = matching::max_matching_stats(&t.inner, &caps());
    let exact = match &s.mm {
        Count::Exact(c) => Some(c.clone()),
        Count::Log(_) => None,
    };
    (s.nu, exact, s.mm.ln())
}

/// Coefficients of `P_G(z)` by number of uncovered vertices.
#[pyfunction]
fn matching_polynomial(t: &PyTree) -> Vec<BigUint> {
    match matching::matching_polynomial_exact(&t.inner).coefficients() {
        Coefficients::Exact(c) => c.clone(),
        Coefficients::Log(_) => unreachable!("exact polynomial"),
    }
}

#[pyfunction]
fn sample_uniform_max_matching(t: &PyTree, seed: u64) -> Vec<(usize, usize)> {
    matching::sample_uniform_max_matching(&t.inner, seed).edges()
}

#[pyfunction]
fn sample_boltzmann(t: &PyTree, z: f64, seed: u64) -> PyResult<Vec<(usize, usize)>> {
    Ok(matching::sample_boltzmann(&t.inner, z, seed).map_err(to_py)?.edges())
}

/// The unique matching whose uncovered set is `uncovered`.
#[pyfunction]
fn reconstruct_matching(t: &PyTree, uncovered: Vec<usize>) -> PyResult<Vec<(usize, usize)>> {
    Ok(matching::reconstruct_matching(&t.inner, &uncovered).map_err(to_py)?.edges())
}

/// Law of the uncovered set, for a uniform maximum matching or, with `z`,
/// the Boltzmann matching.
#[pyfunction]
#[pyo3(signature = (t, z=None))]
fn uncovered_law<'py>(py: Python<'py>, t: &PyTree, z: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let law = match z {
        None => matching::exact_uncovered_law(&t.inner, &caps()),
        Some(z) => matching::exact_boltzmann_uncovered_law(&t.inner, z, &caps()),
    }
    .map_err(to_py)?;
    law_dict(py, &law)
}

#[pyfunction]
#[pyo3(signature = (t, z, s=None))]
fn delta_law<'py>(py: Python<'py>, t: &PyTree, z: f64, s: Option<Vec<usize>>) -> PyResult<Bound<'py, PyDict>> {
    let bip = bip_from_s(&t.inner, s)?;
    law_dict(py, &matching::exact_delta_law(&t.inner, &bip, z, &caps()).map_err(to_py)?)
}

#[pyfunction]
fn kernel_projection(t: &PyTree) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(spectral::kernel_projection(&t.inner, &caps()).map_err(to_py)?.matrix()))
}

#[pyfunction]
fn range_projection(t: &PyTree) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(spectral::range_projection(&t.inner, &caps()).map_err(to_py)?.matrix()))
}

/// `(range, kernel)` projections of the window `B_R(o)`.
#[pyfunction]
fn windowed_projection(t: &PyTree, o: usize, radius: usize) -> PyResult<(Rows, Rows)> {
    let (r, k) = spectral::windowed_projection(&t.inner, o, radius, &caps()).map_err(to_py)?;
    Ok((rows(r.matrix()), rows(k.matrix())))
}

/// `P^z_{G,S,T}`; `S` defaults to the color class of vertex 0.
#[pyfunction]
#[pyo3(signature = (t, z, s=None))]
fn positive_temp_projection(t: &PyTree, z: f64, s: Option<Vec<usize>>) -> PyResult<Vec<Vec<f64>>> {
    let bip = bip_from_s(&t.inner, s)?;
    Ok(rows(spectral::positive_temp_projection(&t.inner, &bip, z, &caps()).map_err(to_py)?.matrix()))
}

#[pyfunction]
fn rank_exact(t: &PyTree) -> usize {
    spectral::rank_exact(&t.inner)
}

#[pyfunction]
fn rank_windowed(t: &PyTree, radius: usize) -> PyResult<f64> {
    spectral::rank_windowed(&t.inner, radius).map_err(to_py)
}

/// `{"m": [...], "w": [...]}` for the recursion rooted at `root`; `z = 0`
/// selects the zero-temperature recursion.
#[pyfunction]
#[pyo3(signature = (t, root, z=0.0))]
fn recursion_values<'py>(py: Python<'py>, t: &PyTree, root: usize, z: f64) -> PyResult<Bound<'py, PyDict>> {
    let rooted = t.inner.root_at(root).map_err(to_py)?;
    let v = if z == 0.0 { recursions::solve_m_zero(&rooted) } else { recursions::solve_m_z(&rooted, z).map_err(to_py)? };
    let d = PyDict::new(py);
    d.set_item("m", v.m)?;
    d.set_item("w", v.w)?;
    Ok(d)
}

/// Row `o` of the kernel built from the recursions: `P̄_G` at `z = 0`,
/// otherwise `P^z_{G,S,T}`.
#[pyfunction]
#[pyo3(signature = (t, o, z=0.0, s=None))]
fn kernel_row(t: &PyTree, o: usize, z: f64, s: Option<Vec<usize>>) -> PyResult<Vec<f64>> {
    if z == 0.0 {
        return recursions::zero_kernel_row(&t.inner, o).map_err(to_py);
    }
    let bip = bip_from_s(&t.inner, s)?;
    recursions::ptemp_kernel_row(&t.inner, &bip, z, o).map_err(to_py)
}

/// `(value, tail_bound)` of the canopy limit series.
#[pyfunction]
#[pyo3(signature = (d, terms=100))]
fn canopy_limit(d: usize, terms: usize) -> PyResult<(f64, f64)> {
    let l = recursions::canopy_limit(d, terms).map_err(to_py)?;
    Ok((l.value, l.tail_bound))
}

/// `log a_n` for `n = 1..=n_max`.
#[pyfunction]
fn canopy_log_counts(k: usize, n_max: usize) -> PyResult<Vec<f64>> {
    Ok(recursions::canopy_counts(k, n_max).map_err(to_py)?.into_iter().map(|c| c.log_a).collect())
}

#[pyfunction]
fn pelda_sequence(n_max: usize) -> Vec<f64> {
    recursions::pelda_sequence(n_max)
}

#[pyfunction]
fn inclusion_prob(kernel: Vec<Vec<f64>>, subset: Vec<usize>) -> PyResult<f64> {
    let k = projection(kernel)?;
    if let Some(&v) = subset.iter().find(|&&v| v >= k.dim()) {
        return Err(PyValueError::new_err(format!("vertex {v} outside the ground set")));
    }
    Ok(det::inclusion_prob(k.matrix(), &subset).value)
}

#[pyfunction]
fn exact_law<'py>(py: Python<'py>, kernel: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    law_dict(py, &det::exact_law(&projection(kernel)?, &caps()).map_err(to_py)?)
}

#[pyfunction]
fn sample_determinantal(kernel: Vec<Vec<f64>>, seed: u64) -> PyResult<Vec<usize>> {
    Ok(det::sample_determinantal_seeded(&projection(kernel)?, seed))
}

#[pyfunction]
fn window_marginal<'py>(py: Python<'py>, kernel: Vec<Vec<f64>>, window: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let k = projection(kernel)?;
    if let Some(&v) = window.iter().find(|&&v| v >= k.dim()) {
        return Err(PyValueError::new_err(format!("vertex {v} outside the ground set")));
    }
    law_dict(py, &det::window_marginal(k.matrix(), &window, &caps()).map_err(to_py)?)
}

/// Chain-rule entropy along a random vertex order drawn from `seed`.
#[pyfunction]
#[pyo3(signature = (kernel, seed=0))]
fn entropy_chain_rule(kernel: Vec<Vec<f64>>, seed: u64) -> PyResult<f64> {
    det::entropy_chain_rule(&projection(kernel)?, &Labeling::Seed(seed), &caps()).map_err(to_py)
}

fn report_dict<'py>(py: Python<'py>, r: &det::VerificationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("check", &r.check)?;
    d.set_item("max_dev", r.max_dev)?;
    d.set_item("tolerance", r.tolerance)?;
    d.set_item("passed", r.passed)?;
    d.set_item("components", r.components.clone())?;
    Ok(d)
}

#[pyfunction]
fn verify_uncovered<'py>(py: Python<'py>, t: &PyTree) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &det::verify_uncovered_determinantal(&t.inner, &caps()).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (t, z, s=None))]
fn verify_boltzmann<'py>(py: Python<'py>, t: &PyTree, z: f64, s: Option<Vec<usize>>) -> PyResult<Bound<'py, PyDict>> {
    let bip = bip_from_s(&t.inner, s)?;
    report_dict(py, &det::verify_boltzmann_determinantal(&t.inner, &bip, z, &caps()).map_err(to_py)?)
}

#[pymodule]
fn treedet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(gen_path, m)?)?;
    m.add_function(wrap_pyfunction!(gen_kary, m)?)?;
    m.add_function(wrap_pyfunction!(gen_regular_ball, m)?)?;
    m.add_function(wrap_pyfunction!(gen_alternating, m)?)?;
    m.add_function(wrap_pyfunction!(gen_star, m)?)?;
    m.add_function(wrap_pyfunction!(random_tree, m)?)?;
    m.add_function(wrap_pyfunction!(free_trees, m)?)?;
    m.add_function(wrap_pyfunction!(max_matching, m)?)?;
    m.add_function(wrap_pyfunction!(matching_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(sample_uniform_max_matching, m)?)?;
    m.add_function(wrap_pyfunction!(sample_boltzmann, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_matching, m)?)?;
    m.add_function(wrap_pyfunction!(uncovered_law, m)?)?;
    m.add_function(wrap_pyfunction!(delta_law, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_projection, m)?)?;
    m.add_function(wrap_pyfunction!(range_projection, m)?)?;
    m.add_function(wrap_pyfunction!(windowed_projection, m)?)?;
    m.add_function(wrap_pyfunction!(positive_temp_projection, m)?)?;
    m.add_function(wrap_pyfunction!(rank_exact, m)?)?;
    m.add_function(wrap_pyfunction!(rank_windowed, m)?)?;
    m.add_function(wrap_pyfunction!(recursion_values, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_row, m)?)?;
    m.add_function(wrap_pyfunction!(canopy_limit, m)?)?;
    m.add_function(wrap_pyfunction!(canopy_log_counts, m)?)?;
    m.add_function(wrap_pyfunction!(pelda_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(inclusion_prob, m)?)?;
    m.add_function(wrap_pyfunction!(exact_law, m)?)?;
    m.add_function(wrap_pyfunction!(sample_determinantal, m)?)?;
    m.add_function(wrap_pyfunction!(window_marginal, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_chain_rule, m)?)?;
    m.add_function(wrap_pyfunction!(verify_uncovered, m)?)?;
    m.add_function(wrap_pyfunction!(verify_boltzmann, m)?)?;
    Ok(())
}

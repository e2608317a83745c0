//! Python bindings. Labels are 0-based, entropies are in bits and `alpha`
//! selects the Rényi order (`1.0` is Shannon, `math.inf` is min-entropy).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mincouple_core as core;
use mincouple_core::{Pmf, RenyiOrder, SplitLimits};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn order(alpha: f64) -> PyResult<RenyiOrder> {
    RenyiOrder::new(alpha).map_err(err)
}

fn pmfs(ps: Vec<Vec<f64>>) -> PyResult<Vec<Pmf>> {
    ps.iter()
        .enumerate()
        .map(|(row, p)| {
            core::make_pmf(p).map_err(|e| PyValueError::new_err(format!("distribution {row}: {e}")))
        })
        .collect()
}

fn limits(max_steps: Option<usize>, eps: Option<f64>) -> SplitLimits {
    SplitLimits { max_steps, eps }
}

#[pyfunction]
#[pyo3(signature = (masses, alpha = 1.0))]
fn entropy(masses: Vec<f64>, alpha: f64) -> PyResult<f64> {
    let p = core::make_pmf(&masses).map_err(err)?;
    Ok(p.entropy(order(alpha)?))
}

#[pyfunction]
fn capped_geometric(gamma: f64, k: usize) -> PyResult<Vec<f64>> {
    core::capped_geometric(gamma, k).map(Pmf::into_masses).map_err(err)
}

/// Rényi entropy of the geometric distribution with parameter 1/2.
#[pyfunction]
#[pyo3(signature = (alpha = 1.0))]
fn geometric_entropy(alpha: f64) -> PyResult<f64> {
    Ok(core::geometric_entropy(order(alpha)?))
}

/// Whether `q` is majorized by `p`.
#[pyfunction]
fn majorizes(p: Vec<f64>, q: Vec<f64>) -> PyResult<bool> {
    let p = core::make_pmf(&p).map_err(err)?;
    let q = core::make_pmf(&q).map_err(err)?;
    Ok(core::majorizes(&p, &q))
}

/// Greatest lower bound under majorization, sorted descending.
#[pyfunction]
fn greatest_lower_bound(ps: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let g = core::greatest_lower_bound(&pmfs(ps)?).map_err(err)?;
    Ok(g.masses().to_vec())
}

#[pyclass(frozen, module = "mincouple")]
struct AliasDecomposition {
    inner: core::AliasDecomposition,
}

#[pymethods]
impl AliasDecomposition {
    #[getter]
    fn p(&self) -> Vec<f64> {
        self.inner.p().to_vec()
    }

    #[getter]
    fn q(&self) -> Vec<f64> {
        self.inner.q().to_vec()
    }

    /// `None` where no mass moves out of the rank.
    #[getter]
    fn alias(&self) -> Vec<Option<usize>> {
        self.inner.alias().to_vec()
    }

    #[getter]
    fn excess(&self) -> Vec<f64> {
        self.inner.excess().to_vec()
    }

    fn sample(&self, seed: u64, count: usize) -> Vec<usize> {
        core::sample_alias(&self.inner, seed, count)
    }

    fn __repr__(&self) -> String {
        format!("AliasDecomposition(n={})", self.inner.len())
    }
}

/// Decomposes `p = q + transfers` for `q` majorized by `p`. Both inputs are
/// sorted descending first.
#[pyfunction]
fn majorized_alias(p: Vec<f64>, q: Vec<f64>) -> PyResult<AliasDecomposition> {
    let p = core::sort_descending(&core::make_pmf(&p).map_err(err)?);
    let q = core::sort_descending(&core::make_pmf(&q).map_err(err)?);
    let n = p.len().max(q.len());
    let inner = core::majorized_alias(&p.padded(n), &q.padded(n)).map_err(err)?;
    Ok(AliasDecomposition { inner })
}

/// Returns `(sticks, rows)` where `rows[i][y]` says whether stick `y` counts
/// toward `rhos[i]`.
#[pyfunction]
#[pyo3(signature = (rhos, max_steps = None, eps = None))]
fn bernoulli_splitting(
    rhos: Vec<f64>,
    max_steps: Option<usize>,
    eps: Option<f64>,
) -> PyResult<(Vec<f64>, Vec<Vec<bool>>)> {
    let s = core::bernoulli_splitting(&rhos, limits(max_steps, eps)).map_err(err)?;
    let rows = (0..rhos.len()).map(|i| s.row(i)).collect();
    Ok((s.sticks().to_vec(), rows))
}

#[pyclass(frozen, module = "mincouple")]
struct Coupling {
    inner: core::Coupling,
}

#[pymethods]
impl Coupling {
    #[staticmethod]
    #[pyo3(signature = (ps, max_steps = None, eps = None))]
    fn compute(ps: Vec<Vec<f64>>, max_steps: Option<usize>, eps: Option<f64>) -> PyResult<Self> {
        let inner = core::compute_coupling(&pmfs(ps)?, limits(max_steps, eps)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn q(&self) -> Vec<f64> {
        self.inner.q().masses().to_vec()
    }

    #[getter]
    fn maps(&self) -> Vec<Vec<usize>> {
        self.inner.maps().to_vec()
    }

    /// `(rank, stick)` of each cell.
    #[getter]
    fn provenance(&self) -> Vec<(usize, usize)> {
        self.inner
            .provenance()
            .iter()
            .map(|o| (o.rank, o.stick))
            .collect()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[pyo3(signature = (alpha = 1.0))]
    fn entropy(&self, alpha: f64) -> PyResult<f64> {
        Ok(self.inner.entropy(order(alpha)?))
    }

    fn pushforward(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.inner.m() {
            return Err(PyValueError::new_err(format!(
                "index {i} out of range for {} distributions",
                self.inner.m()
            )));
        }
        Ok(self.inner.pushforward(i))
    }

    /// Re-checks the coupling against `ps`; returns a dict with `passed`,
    /// `checks` as `(name, passed, detail)` and the entropy figures.
    #[pyo3(signature = (ps, alpha = 1.0))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        ps: Vec<Vec<f64>>,
        alpha: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = core::verify_coupling(&self.inner, &pmfs(ps)?, order(alpha)?);
        let d = PyDict::new(py);
        d.set_item("passed", r.passed())?;
        let checks: Vec<(&str, bool, String)> = r
            .checks
            .iter()
            .map(|c| (c.name, c.passed, c.detail.clone()))
            .collect();
        d.set_item("checks", checks)?;
        d.set_item("tv", r.tv.clone())?;
        d.set_item("entropy_q", r.entropy_q)?;
        d.set_item("entropy_glb", r.entropy_glb)?;
        d.set_item("gap", r.gap)?;
        d.set_item("gap_bound", r.gap_bound)?;
        d.set_item("support", r.support)?;
        d.set_item("support_bound", r.support_bound)?;
        Ok(d)
    }

    /// `count` draws as `(cell, labels)` pairs.
    fn sample(&self, seed: u64, count: usize) -> Vec<(usize, Vec<usize>)> {
        core::sample_coupling(&self.inner, seed, count)
            .map(|d| (d.cell, d.labels))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.num_cells()
    }

    fn __repr__(&self) -> String {
        format!(
            "Coupling(m={}, n={}, cells={})",
            self.inner.m(),
            self.inner.n(),
            self.inner.num_cells()
        )
    }
}

#[pyfunction]
fn glb_entropy_score(joint: Vec<Vec<f64>>) -> PyResult<f64> {
    core::glb_entropy_score(&joint).map_err(err)
}

#[pyfunction]
fn causal_direction<'py>(py: Python<'py>, joint: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let r = core::causal_direction(&joint).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("h_x", r.h_x)?;
    d.set_item("h_y", r.h_y)?;
    d.set_item("noise_forward", r.noise_forward)?;
    d.set_item("noise_backward", r.noise_backward)?;
    d.set_item("score_forward", r.score_forward)?;
    d.set_item("score_backward", r.score_backward)?;
    let direction = match r.direction {
        core::Direction::XToY => "X->Y",
        core::Direction::YToX => "Y->X",
        core::Direction::Tie => "tie",
    };
    d.set_item("direction", direction)?;
    Ok(d)
}

#[pymodule]
fn mincouple(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(capped_geometric, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(majorizes, m)?)?;
    m.add_function(wrap_pyfunction!(greatest_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(majorized_alias, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_splitting, m)?)?;
    m.add_function(wrap_pyfunction!(glb_entropy_score, m)?)?;
    m.add_function(wrap_pyfunction!(causal_direction, m)?)?;
    m.add_class::<AliasDecomposition>()?;
    m.add_class::<Coupling>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

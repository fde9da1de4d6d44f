//! Python bindings. Matrices cross the boundary as lists of lists of
//! `complex`; reports as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qonsager::{BoundaryParams, CMatrix, ModelParams, RunConfig, Sampler, C64};

type Rows = Vec<Vec<C64>>;

fn py_err(e: qonsager::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn from_rows(rows: Rows) -> PyResult<CMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || rows.iter().any(|r| r.len() != nc) {
        return Err(PyValueError::new_err(
            "expected a non-empty rectangular matrix",
        ));
    }
    CMatrix::new(nr, nc, rows.concat()).map_err(py_err)
}

const BOUNDARY_KEYS: [&str; 8] = [
    "eps_plus",
    "eps_minus",
    "k_plus",
    "k_minus",
    "kappa",
    "kappa_star",
    "kappa_plus",
    "kappa_minus",
];

fn boundary_from_dict(d: &Bound<'_, PyDict>) -> PyResult<BoundaryParams> {
    for key in d.keys() {
        let k: String = key.extract()?;
        if !BOUNDARY_KEYS.contains(&k.as_str()) {
            return Err(PyValueError::new_err(format!(
                "unknown boundary constant `{k}`"
            )));
        }
    }
    let get = |k: &str| -> PyResult<C64> {
        d.get_item(k)?
            .ok_or_else(|| PyValueError::new_err(format!("missing boundary constant `{k}`")))?
            .extract()
    };
    Ok(BoundaryParams {
        eps_plus: get("eps_plus")?,
        eps_minus: get("eps_minus")?,
        k_plus: get("k_plus")?,
        k_minus: get("k_minus")?,
        kappa: get("kappa")?,
        kappa_star: get("kappa_star")?,
        kappa_plus: get("kappa_plus")?,
        kappa_minus: get("kappa_minus")?,
    })
}

fn boundary_to_dict<'py>(py: Python<'py>, b: &BoundaryParams) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let vals = [
        b.eps_plus,
        b.eps_minus,
        b.k_plus,
        b.k_minus,
        b.kappa,
        b.kappa_star,
        b.kappa_plus,
        b.kappa_minus,
    ];
    for (k, v) in BOUNDARY_KEYS.iter().zip(vals) {
        d.set_item(k, v)?;
    }
    Ok(d)
}

/// An open chain: deformation `q`, per-site twists and inhomogeneities, and
/// the eight boundary constants.
#[pyclass(name = "Model", module = "qonsager_py", frozen)]
struct PyModel {
    inner: ModelParams,
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(q: C64, t: Vec<C64>, v: Vec<C64>, boundary: &Bound<'_, PyDict>) -> PyResult<Self> {
        let b = boundary_from_dict(boundary)?;
        let inner = ModelParams::new(q, t, v, b).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Generic random model on `n_sites` sites from a seed.
    #[staticmethod]
    fn random(n_sites: usize, seed: u64) -> Self {
        Self {
            inner: Sampler::new(seed).model(n_sites),
        }
    }

    #[getter]
    fn q(&self) -> C64 {
        self.inner.q
    }

    #[getter]
    fn t(&self) -> Vec<C64> {
        self.inner.t.clone()
    }

    #[getter]
    fn v(&self) -> Vec<C64> {
        self.inner.v.clone()
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    #[getter]
    fn boundary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        boundary_to_dict(py, &self.inner.boundary)
    }

    fn transfer(&self, u: C64) -> PyResult<Rows> {
        qonsager::transfer(u, &self.inner)
            .map(|m| to_rows(&m))
            .map_err(py_err)
    }

    fn hamiltonian(&self) -> PyResult<Rows> {
        qonsager::mccoy_wu_hamiltonian(&self.inner)
            .map(|m| to_rows(&m))
            .map_err(py_err)
    }

    /// Eigenvalues of the Hamiltonian, sorted by real then imaginary part.
    fn spectrum(&self) -> PyResult<Vec<C64>> {
        let h = qonsager::mccoy_wu_hamiltonian(&self.inner).map_err(py_err)?;
        qonsager::diagonalize(&h)
            .map(|s| s.eigenvalues)
            .map_err(py_err)
    }

    /// Dressed K-matrix on the chain, as a `2·2^N` square matrix.
    fn dressed_kminus(&self, u: C64) -> PyResult<Rows> {
        qonsager::dressed_kminus(u, &self.inner)
            .map(|k| to_rows(&k.k.to_full()))
            .map_err(py_err)
    }

    /// Relative residual of the reflection equation for the dressed K-matrix.
    #[pyo3(signature = (u, v, t = C64::new(1.0, 0.0)))]
    fn reflection_residual(&self, u: C64, v: C64, t: C64) -> PyResult<f64> {
        let ku = qonsager::dressed_kminus(u, &self.inner).map_err(py_err)?.k;
        let kv = qonsager::dressed_kminus(v, &self.inner).map_err(py_err)?.k;
        qonsager::boundary::check_reflection(&ku, &kv, self.inner.q, t, u, v).map_err(py_err)
    }

    /// Largest relative commutator among the transfer matrices at `us`.
    fn commutation_residual(&self, us: Vec<C64>) -> PyResult<f64> {
        qonsager::transfer::check_commutation(&self.inner, &us).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(n_sites={}, q={})",
            self.inner.n_sites(),
            self.inner.q
        )
    }
}

/// Twisted R-matrix `R(u; q, t)` as a 4x4 matrix.
#[pyfunction]
fn r_matrix(u: C64, q: C64, t: C64) -> Rows {
    to_rows(&qonsager::r_matrix(u, q, t))
}

/// Relative Yang-Baxter residual at one parameter point.
#[pyfunction]
fn check_ybe(q: C64, t: C64, u: C64, v: C64, w: C64) -> PyResult<f64> {
    qonsager::check_ybe(q, t, u, v, w).map_err(py_err)
}

/// c-number K-matrix for the right boundary.
#[pyfunction]
fn kminus(u: C64, q: C64, boundary: &Bound<'_, PyDict>) -> PyResult<Rows> {
    let b = boundary_from_dict(boundary)?;
    qonsager::build_kminus_c(u, &b, q)
        .map(|m| to_rows(&m))
        .map_err(py_err)
}

/// c-number K-matrix for the left boundary.
#[pyfunction]
fn kplus(u: C64, q: C64, boundary: &Bound<'_, PyDict>) -> PyResult<Rows> {
    let b = boundary_from_dict(boundary)?;
    qonsager::build_kplus_c(u, &b, q)
        .map(|m| to_rows(&m))
        .map_err(py_err)
}

/// `‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F)`.
#[pyfunction]
fn rel_residual(a: Rows, b: Rows) -> PyResult<f64> {
    qonsager::rel_residual(&from_rows(a)?, &from_rows(b)?).map_err(py_err)
}

/// `(name, description)` for every suite.
#[pyfunction]
fn list_suites() -> Vec<(&'static str, &'static str)> {
    qonsager::list_suites().to_vec()
}

fn load_config(
    config: Option<&str>,
    n_sites: Option<usize>,
    seed: Option<u64>,
) -> PyResult<RunConfig> {
    let mut cfg = match config {
        Some(text) => RunConfig::from_json(text).map_err(py_err)?,
        None => RunConfig::default(),
    };
    if let Some(n) = n_sites {
        cfg.n_sites = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Runs the verification suites and returns the JSON report. `config` is a
/// JSON document; omitted fields take their defaults.
#[pyfunction]
#[pyo3(signature = (config = None, suites = None, n_sites = None, seed = None))]
fn verify(
    py: Python<'_>,
    config: Option<&str>,
    suites: Option<Vec<String>>,
    n_sites: Option<usize>,
    seed: Option<u64>,
) -> PyResult<String> {
    let mut cfg = load_config(config, n_sites, seed)?;
    if let Some(s) = suites {
        cfg.suites = s;
    }
    let rep = py.detach(|| qonsager::run_suite(&cfg)).map_err(py_err)?;
    Ok(qonsager::emit_report(&rep, qonsager::Format::Json))
}

/// Spectrum of the Hamiltonian drawn from a configuration, as the export
/// subcommand computes it.
#[pyfunction]
#[pyo3(signature = (config = None, n_sites = None, seed = None))]
fn export_spectrum(
    config: Option<&str>,
    n_sites: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Vec<C64>> {
    let cfg = load_config(config, n_sites, seed)?;
    qonsager::export_spectrum(&cfg)
        .map(|(_, s)| s.eigenvalues)
        .map_err(py_err)
}

#[pymodule]
fn qonsager_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(r_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(check_ybe, m)?)?;
    m.add_function(wrap_pyfunction!(kminus, m)?)?;
    m.add_function(wrap_pyfunction!(kplus, m)?)?;
    m.add_function(wrap_pyfunction!(rel_residual, m)?)?;
    m.add_function(wrap_pyfunction!(list_suites, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(export_spectrum, m)?)?;
    m.add("SUITES", qonsager::SUITES.to_vec())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let m = qonsager::r_matrix(C64::new(1.1, 0.2), C64::new(0.8, 0.6), C64::new(0.0, 1.0));
        assert_eq!(from_rows(to_rows(&m)).unwrap(), m);
    }

    #[test]
    fn ragged_rows_rejected() {
        let one = C64::new(1.0, 0.0);
        assert!(from_rows(vec![vec![one, one], vec![one]]).is_err());
        assert!(from_rows(vec![]).is_err());
    }

    #[test]
    fn config_flags_apply() {
        let cfg = load_config(Some(r#"{"suites": ["ybe"]}"#), Some(3), Some(9)).unwrap();
        assert_eq!((cfg.n_sites, cfg.seed), (3, 9));
        assert_eq!(cfg.suites, vec!["ybe".to_string()]);
    }
}

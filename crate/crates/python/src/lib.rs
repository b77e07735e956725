//! Python bindings for `kekulattice-core`.

use kekulattice_core as core;
use kekulattice_core::{Vec2, Zone};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_zone(zone: &str) -> PyResult<Zone> {
    match zone.to_ascii_uppercase().as_str() {
        "B2" => Ok(Zone::B2),
        "B6" => Ok(Zone::B6),
        other => Err(PyValueError::new_err(format!("zone must be 'B2' or 'B6', got {other:?}"))),
    }
}

/// Hopping amplitudes `(t, u, v)` on the three bond classes of the Kekulé cell.
#[pyclass(name = "HoppingTriple", module = "kekulattice", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyHoppingTriple(core::HoppingTriple);

#[pymethods]
impl PyHoppingTriple {
    #[new]
    fn new(t: f64, u: f64, v: f64) -> Self {
        Self(core::HoppingTriple::new(t, u, v))
    }

    #[staticmethod]
    fn pristine(t: f64) -> Self {
        Self(core::HoppingTriple::pristine(t))
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }

    #[getter]
    fn u(&self) -> f64 {
        self.0.u
    }

    #[getter]
    fn v(&self) -> f64 {
        self.0.v
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn std_dev(&self) -> f64 {
        self.0.std_dev()
    }

    /// Spectral gap `3√2·s`.
    fn gap(&self) -> f64 {
        self.0.gap()
    }

    fn sorted(&self) -> Self {
        Self(self.0.sorted())
    }

    fn as_tuple(&self) -> (f64, f64, f64) {
        (self.0.t, self.0.u, self.0.v)
    }

    fn __repr__(&self) -> String {
        format!("HoppingTriple({}, {}, {})", self.0.t, self.0.u, self.0.v)
    }
}

/// Midpoint grid on a Brillouin zone (`"B2"` or `"B6"`).
#[pyclass(name = "QuadratureGrid", module = "kekulattice", frozen)]
struct PyGrid(core::QuadratureGrid);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (zone, n, shift = (0.5, 0.5)))]
    fn new(zone: &str, n: usize, shift: (f64, f64)) -> PyResult<Self> {
        Ok(Self(core::make_grid(parse_zone(zone)?, n, shift).map_err(value_error)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn zone(&self) -> &'static str {
        match self.0.zone {
            Zone::B2 => "B2",
            Zone::B6 => "B6",
        }
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("QuadratureGrid('{}', {})", self.zone(), self.0.n)
    }
}

#[pyclass(name = "EnergyBreakdown", module = "kekulattice", frozen, get_all)]
struct PyEnergy {
    quantum: f64,
    elastic: f64,
    total: f64,
    grid_n: usize,
    quad_error: f64,
}

#[pyclass(name = "MinimizerResult", module = "kekulattice", frozen, get_all)]
struct PyMinimizerResult {
    cfg: PyHoppingTriple,
    energy: f64,
    sym_class: &'static str,
    gap: f64,
    mu: f64,
    iterations: usize,
    converged: bool,
    cross_check_delta: Option<f64>,
}

#[pyclass(name = "PhasePoint", module = "kekulattice", frozen, get_all)]
struct PyPhasePoint {
    mu: f64,
    cfg: PyHoppingTriple,
    phase: &'static str,
    sym_class: &'static str,
    gap: f64,
    energy: f64,
    energy_pristine: f64,
}

/// The six sorted eigenvalues of `T(k)`.
#[pyfunction]
fn bands(cfg: PyHoppingTriple, kx: f64, ky: f64) -> [f64; 6] {
    core::bloch::bloch_t(&cfg.0, &Vec2::new(kx, ky)).bands().values
}

/// `(3s/√2, 3E)`: the extreme values of `|T(0)|`.
#[pyfunction]
fn spectral_bounds(cfg: PyHoppingTriple) -> PyResult<(f64, f64)> {
    core::bloch::spectral_bounds(&cfg.0).map_err(value_error)
}

#[pyfunction]
fn vtr_abs_t(cfg: PyHoppingTriple, grid: &PyGrid) -> PyResult<f64> {
    core::energy::vtr_abs_t(&cfg.0, &grid.0).map_err(value_error)
}

/// Energy per atom on a B6 grid.
#[pyfunction]
fn total_energy(cfg: PyHoppingTriple, mu: f64, grid: &PyGrid) -> PyResult<PyEnergy> {
    let e = core::energy::total_energy(&cfg.0, mu, &grid.0).map_err(value_error)?;
    Ok(PyEnergy {
        quantum: e.quantum,
        elastic: e.elastic,
        total: e.total,
        grid_n: e.grid_n,
        quad_error: e.quad_error,
    })
}

#[pyfunction]
fn pristine_optimum(mu: f64, grid: &PyGrid) -> PyResult<f64> {
    core::energy::pristine_optimum(mu, &grid.0).map_err(value_error)
}

#[pyfunction]
fn kekule_projection(cfg: PyHoppingTriple) -> PyHoppingTriple {
    PyHoppingTriple(core::sympoly::kekule_projection(&cfg.0).triple())
}

/// `Σ√eig(A*A)` from the characteristic quartic.
#[pyfunction]
fn g_from_quartic(cfg: PyHoppingTriple, kx: f64, ky: f64) -> PyResult<f64> {
    core::sympoly::g_from_quartic(&core::sympoly::charpoly_coeffs(&cfg.0, &Vec2::new(kx, ky))).map_err(value_error)
}

fn options(seed: u64, cross_check: bool) -> core::MinimizeOptions {
    core::MinimizeOptions {
        seed,
        cross_check,
        ..Default::default()
    }
}

#[pyfunction]
#[pyo3(signature = (mu, grid, seed = 0, cross_check = true))]
fn minimize(py: Python<'_>, mu: f64, grid: &PyGrid, seed: u64, cross_check: bool) -> PyResult<PyMinimizerResult> {
    let r = py
        .detach(|| core::minimize::minimize_energy(mu, &grid.0, &options(seed, cross_check)))
        .map_err(value_error)?;
    Ok(PyMinimizerResult {
        cfg: PyHoppingTriple(r.cfg),
        energy: r.energy,
        sym_class: r.sym_class.as_str(),
        gap: r.gap,
        mu: r.mu,
        iterations: r.iterations,
        converged: r.converged,
        cross_check_delta: r.cross_check_delta,
    })
}

#[pyfunction]
#[pyo3(signature = (mu_from, mu_to, steps, grid, seed = 0))]
fn phase_scan(
    py: Python<'_>,
    mu_from: f64,
    mu_to: f64,
    steps: usize,
    grid: &PyGrid,
    seed: u64,
) -> PyResult<Vec<PyPhasePoint>> {
    let points = py
        .detach(|| core::minimize::phase_scan(mu_from, mu_to, steps, &grid.0, &options(seed, true)))
        .map_err(value_error)?;
    Ok(points
        .into_iter()
        .map(|p| PyPhasePoint {
            mu: p.mu,
            cfg: PyHoppingTriple(p.cfg),
            phase: p.phase.as_str(),
            sym_class: p.sym_class.as_str(),
            gap: p.gap,
            energy: p.energy_kekule,
            energy_pristine: p.energy_pristine,
        })
        .collect())
}

/// `(μ_c, error)` on a B6 grid with `n` points per axis.
#[pyfunction]
fn mu_c(n: usize) -> PyResult<(f64, f64)> {
    let g = core::make_grid(Zone::B6, n, (0.5, 0.5)).map_err(value_error)?;
    let r = core::perturbation::mu_c(&g).map_err(value_error)?;
    Ok((r.value, r.error))
}

/// `(∮(3/m − m), error)` on a B2 grid with `n` points per axis.
#[pyfunction]
fn mu_c_prime_bound(n: usize) -> PyResult<(f64, f64)> {
    let g = core::make_grid(Zone::B2, n, (0.5, 0.5)).map_err(value_error)?;
    let r = core::perturbation::mu_c_prime_bound(&g).map_err(value_error)?;
    Ok((r.value, r.error))
}

/// Sorted Kagome bands at `k`.
#[pyfunction]
fn kagome_bands(kx: f64, ky: f64) -> [f64; 3] {
    core::kagome::kagome_bands(&Vec2::new(kx, ky)).values()
}

/// Runs the invariant suites; returns `(all_pass, report)`.
#[pyfunction]
#[pyo3(signature = (seed = 0, samples = 100, inject_fault = false))]
fn verify(seed: u64, samples: usize, inject_fault: bool) -> PyResult<(bool, String)> {
    let opts = core::verify::VerifyOptions {
        seed,
        samples,
        inject_fault,
        ..Default::default()
    };
    let r = core::verify::run_verify(&opts).map_err(value_error)?;
    Ok((r.all_pass(), r.render()))
}

#[pymodule]
fn kekulattice(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHoppingTriple>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyEnergy>()?;
    m.add_class::<PyMinimizerResult>()?;
    m.add_class::<PyPhasePoint>()?;
    m.add_function(wrap_pyfunction!(bands, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(vtr_abs_t, m)?)?;
    m.add_function(wrap_pyfunction!(total_energy, m)?)?;
    m.add_function(wrap_pyfunction!(pristine_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(kekule_projection, m)?)?;
    m.add_function(wrap_pyfunction!(g_from_quartic, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(phase_scan, m)?)?;
    m.add_function(wrap_pyfunction!(mu_c, m)?)?;
    m.add_function(wrap_pyfunction!(mu_c_prime_bound, m)?)?;
    m.add_function(wrap_pyfunction!(kagome_bands, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

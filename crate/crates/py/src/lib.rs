//! Python bindings. Thin wrappers around the core types, with characters
//! addressed by integer index (the group kind fixes the interpretation:
//! SO(2) mode m, SO(3) level l, or finite character-table row).

use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use reduced_weyl::domains::DomainSpec;
use reduced_weyl::group_actions::{rotation_in_plane, GroupAction};
use reduced_weyl::oscillatory::{convergence_report, AmplitudeSpec};
use reduced_weyl::reduced_volume::{reduced_volume_mc, reduced_volume_quadrature};
use reduced_weyl::representations::IrrepLabel;
use reduced_weyl::spectra::{counting_function, model_spectrum, CountingSample, SpectrumSource};
use reduced_weyl::symbols::{invariance_residual, SymbolSpec};
use reduced_weyl::weyl::{fit, predict, FitMode};

fn err(e: reduced_weyl::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Action", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAction {
    inner: GroupAction,
}

#[pymethods]
impl PyAction {
    /// Rotations of the (i, j) coordinate plane of R^n.
    #[staticmethod]
    #[pyo3(signature = (ambient_dim, i=0, j=1))]
    fn planar_so2(ambient_dim: usize, i: usize, j: usize) -> PyResult<Self> {
        Ok(PyAction { inner: GroupAction::planar_so2(ambient_dim, i, j).map_err(err)? })
    }

    /// SO(3) acting on the first three coordinates of R^n.
    #[staticmethod]
    fn standard_so3(ambient_dim: usize) -> PyResult<Self> {
        Ok(PyAction { inner: GroupAction::standard_so3(ambient_dim).map_err(err)? })
    }

    /// Cyclic rotation group of the given order in the plane.
    #[staticmethod]
    fn cyclic(order: usize) -> PyResult<Self> {
        if order == 0 {
            return Err(PyValueError::new_err("cyclic group order must be positive"));
        }
        let step = 2.0 * std::f64::consts::PI / order as f64;
        let els: Vec<DMatrix<f64>> =
            (0..order).map(|k| rotation_in_plane(2, 0, 1, k as f64 * step)).collect();
        Ok(PyAction { inner: GroupAction::finite(2, els).map_err(err)? })
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    #[getter]
    fn is_finite(&self) -> bool {
        self.inner.is_finite()
    }

    #[getter]
    fn group_dim(&self) -> usize {
        self.inner.group_dim()
    }
}

impl PyAction {
    fn label(&self, character: i64) -> PyResult<IrrepLabel> {
        use reduced_weyl::group_actions::ActionKind;
        Ok(match self.inner.kind() {
            ActionKind::PlanarSO2 { .. } => IrrepLabel::So2(character),
            ActionKind::StandardSO3 => {
                let l = u32::try_from(character)
                    .map_err(|_| PyValueError::new_err("SO(3) level must be nonnegative"))?;
                IrrepLabel::So3(l)
            }
            ActionKind::Finite(_) => {
                let r = usize::try_from(character)
                    .map_err(|_| PyValueError::new_err("character row must be nonnegative"))?;
                IrrepLabel::FiniteRow(r)
            }
        })
    }
}

#[pyclass(name = "Domain", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDomain {
    inner: DomainSpec,
}

#[pymethods]
impl PyDomain {
    #[staticmethod]
    fn disk(radius: f64) -> Self {
        PyDomain { inner: DomainSpec::Disk { radius } }
    }

    #[staticmethod]
    fn annulus(r_in: f64, r_out: f64) -> Self {
        PyDomain { inner: DomainSpec::Annulus { r_in, r_out } }
    }

    #[staticmethod]
    fn ball(radius: f64) -> Self {
        PyDomain { inner: DomainSpec::Ball { radius } }
    }

    /// Box centered at the origin with the given half-widths.
    #[staticmethod]
    fn box_(half_widths: Vec<f64>) -> Self {
        PyDomain { inner: DomainSpec::Box { half_widths } }
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "Symbol", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySymbol {
    inner: SymbolSpec,
}

#[pymethods]
impl PySymbol {
    /// |ξ|^order (order even).
    #[staticmethod]
    fn euclidean_power(order: u32) -> PyResult<Self> {
        Ok(PySymbol { inner: SymbolSpec::euclidean_power(order).map_err(err)? })
    }

    /// ⟨Qξ, ξ⟩^{order/2} for a symmetric positive matrix Q.
    #[staticmethod]
    fn quadratic_form(q: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = q.len();
        if q.iter().any(|row| row.len() != n) {
            return Err(PyValueError::new_err("quadratic form matrix must be square"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| q[i][j]);
        Ok(PySymbol { inner: SymbolSpec::invariant_quadratic(m).map_err(err)? })
    }

    #[getter]
    fn order(&self) -> u32 {
        self.inner.order()
    }
}

#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum {
    source: SpectrumSource,
    action: GroupAction,
}

#[pymethods]
impl PySpectrum {
    /// Dirichlet disk modes, characters indexed by the SO(2) mode m.
    #[staticmethod]
    fn disk(radius: f64) -> PyResult<Self> {
        Ok(PySpectrum {
            source: SpectrumSource::ExactDisk { radius },
            action: GroupAction::planar_so2(2, 0, 1).map_err(err)?,
        })
    }

    #[staticmethod]
    fn annulus(r_in: f64, r_out: f64) -> PyResult<Self> {
        Ok(PySpectrum {
            source: SpectrumSource::ExactAnnulus { r_in, r_out },
            action: GroupAction::planar_so2(2, 0, 1).map_err(err)?,
        })
    }

    /// Dirichlet 3-ball. `axial=False` labels characters by the SO(3)
    /// level l, `axial=True` by the mode m of rotation about the third axis.
    #[staticmethod]
    #[pyo3(signature = (radius, axial=false))]
    fn ball(radius: f64, axial: bool) -> PyResult<Self> {
        let action = if axial {
            GroupAction::planar_so2(3, 0, 1).map_err(err)?
        } else {
            GroupAction::standard_so3(3).map_err(err)?
        };
        Ok(PySpectrum { source: SpectrumSource::ExactBall3D { radius }, action })
    }

    /// Five-point finite-difference Laplacian reduced by a finite group.
    #[staticmethod]
    fn finite_difference(domain: &PyDomain, action: &PyAction, h: f64) -> Self {
        PySpectrum {
            source: SpectrumSource::FiniteDifference {
                domain: domain.inner.clone(),
                group: action.inner.clone(),
                h,
            },
            action: action.inner.clone(),
        }
    }

    #[getter]
    fn validity_ceiling(&self) -> f64 {
        self.source.validity_ceiling()
    }

    /// Ascending (eigenvalue, multiplicity) pairs up to lambda_max.
    fn eigenvalues(&self, character: i64, lambda_max: f64) -> PyResult<Vec<(f64, usize)>> {
        let chi = PyAction { inner: self.action.clone() }.label(character)?;
        model_spectrum(&self.source, chi, lambda_max).map_err(err)
    }

    /// Counting function N_χ over a λ grid.
    fn counts(&self, character: i64, lambda_grid: Vec<f64>) -> PyResult<Vec<usize>> {
        let chi = PyAction { inner: self.action.clone() }.label(character)?;
        let cap = self.source.validity_ceiling();
        let top = lambda_grid.iter().cloned().fold(0.0f64, f64::max).min(cap);
        let eigs = model_spectrum(&self.source, chi, top).map_err(err)?;
        Ok(counting_function(&eigs, &lambda_grid, chi).into_iter().map(|s| s.count).collect())
    }
}

/// Monte Carlo reduced volume; returns {value, stderr, n_samples, low_confidence}.
#[pyfunction]
#[pyo3(signature = (action, symbol, domain, level=1.0, n_samples=100_000, seed=0))]
fn volume_mc<'py>(
    py: Python<'py>,
    action: &PyAction,
    symbol: &PySymbol,
    domain: &PyDomain,
    level: f64,
    n_samples: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let e = reduced_volume_mc(&action.inner, &symbol.inner, &domain.inner, level, n_samples, seed)
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("value", e.value)?;
    d.set_item("stderr", e.stderr)?;
    d.set_item("n_samples", e.n_samples)?;
    d.set_item("low_confidence", e.low_confidence)?;
    Ok(d)
}

/// Quadrature reduced volume; returns {value, refinement_delta}.
#[pyfunction]
#[pyo3(signature = (action, symbol, domain, level=1.0, resolution=(48, 48, 48)))]
fn volume_quadrature<'py>(
    py: Python<'py>,
    action: &PyAction,
    symbol: &PySymbol,
    domain: &PyDomain,
    level: f64,
    resolution: (usize, usize, usize),
) -> PyResult<Bound<'py, PyDict>> {
    let e =
        reduced_volume_quadrature(&action.inner, &symbol.inner, &domain.inner, level, resolution)
            .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("value", e.value)?;
    d.set_item("refinement_delta", e.refinement_delta)?;
    Ok(d)
}

/// Predicted counting asymptotics N_χ(λ) ≈ C·λ^p for one character;
/// returns {coefficient, exponent, remainder_exponent}.
#[pyfunction]
fn predict_counting<'py>(
    py: Python<'py>,
    action: &PyAction,
    character: i64,
    symbol: &PySymbol,
    domain: &PyDomain,
    reduced_volume: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let chi = action.label(character)?;
    let p = predict(&action.inner, chi, &symbol.inner, &domain.inner, reduced_volume)
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("coefficient", p.coefficient)?;
    d.set_item("exponent", p.exponent)?;
    d.set_item("remainder_exponent", p.remainder_exponent)?;
    Ok(d)
}

/// Power-law fit of counting data; fixing the exponent fits the coefficient
/// alone. Returns {coefficient, exponent, window, residual_rms, n_points}.
#[pyfunction]
#[pyo3(signature = (lambdas, counts, exponent=None))]
fn fit_counts<'py>(
    py: Python<'py>,
    lambdas: Vec<f64>,
    counts: Vec<u64>,
    exponent: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    if lambdas.len() != counts.len() {
        return Err(PyValueError::new_err("lambdas and counts must have equal length"));
    }
    let samples: Vec<CountingSample> = lambdas
        .iter()
        .zip(&counts)
        .map(|(&lambda, &count)| CountingSample {
            lambda,
            count: count as usize,
            character: IrrepLabel::So2(0),
        })
        .collect();
    let mode = match exponent {
        Some(p) => FitMode::FixedExponent(p),
        None => FitMode::FreeExponent,
    };
    let f = fit(&samples, mode).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("coefficient", f.fitted_coefficient)?;
    d.set_item("exponent", f.fitted_exponent)?;
    d.set_item("window", f.window)?;
    d.set_item("residual_rms", f.residual_rms)?;
    d.set_item("n_points", f.n_points)?;
    Ok(d)
}

/// Max |a(k·z) − a(z)| over sampled points and group elements.
#[pyfunction]
#[pyo3(signature = (symbol, action, n_samples=512, seed=0))]
fn symbol_invariance_residual(
    symbol: &PySymbol,
    action: &PyAction,
    n_samples: u64,
    seed: u64,
) -> f64 {
    invariance_residual(&symbol.inner, &action.inner, n_samples, seed)
}

/// Stationary-phase convergence table e(μ) = |I(μ)/(2πμ)^κ − L₀| over a
/// descending μ list; returns {mu, abs_error, empirical_orders, leading}.
#[pyfunction]
fn oscillatory_convergence<'py>(
    py: Python<'py>,
    action: &PyAction,
    character: i64,
    r_x: f64,
    rho1: f64,
    rho2: f64,
    mu_list: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let chi = action.label(character)?;
    let amp = AmplitudeSpec::new(r_x, rho1, rho2).map_err(err)?;
    let rep = convergence_report(&action.inner, chi, &amp, &mu_list).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mu", rep.rows.iter().map(|r| r.mu).collect::<Vec<_>>())?;
    d.set_item("abs_error", rep.rows.iter().map(|r| r.abs_error).collect::<Vec<_>>())?;
    d.set_item("empirical_orders", rep.empirical_orders)?;
    d.set_item("leading", rep.leading)?;
    Ok(d)
}

#[pymodule]
fn reduced_weyl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", reduced_weyl::VERSION)?;
    m.add_class::<PyAction>()?;
    m.add_class::<PyDomain>()?;
    m.add_class::<PySymbol>()?;
    m.add_class::<PySpectrum>()?;
    m.add_function(wrap_pyfunction!(volume_mc, m)?)?;
    m.add_function(wrap_pyfunction!(volume_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(predict_counting, m)?)?;
    m.add_function(wrap_pyfunction!(fit_counts, m)?)?;
    m.add_function(wrap_pyfunction!(symbol_invariance_residual, m)?)?;
    m.add_function(wrap_pyfunction!(oscillatory_convergence, m)?)?;
    Ok(())
}

//! Python bindings: `import sphere_re_py`.

use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use sphere_re::euler::{self, EreSolution};
use sphere_re::inertia;
use sphere_re::lagrange::{self, Hemisphere, LreCandidate, Orientation, Winding};
use sphere_re::verify::{self, ReCandidate, ReKind, VerificationReport};
use sphere_re::{Error, Masses, MeridianShape3, PotentialKind, Shape3};

create_exception!(sphere_re_py, ValidationError, PyValueError, "Input that does not describe a valid problem.");
create_exception!(sphere_re_py, NumericalError, PyArithmeticError, "A solver or integration that did not succeed.");

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::DegenerateShape(..)
        | Error::UnrealizableShape(_)
        | Error::SingularSeparation { .. }
        | Error::ExcludedAngle(_)
        | Error::NoLreForRepulsive
        | Error::InvalidInput(_) => ValidationError::new_err(msg),
        _ => NumericalError::new_err(msg),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| NumericalError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn potential_of(name: &str) -> PyResult<PotentialKind> {
    name.parse().map_err(|e: Error| err(e))
}

fn masses_of(obj: Option<&Bound<'_, PyAny>>) -> PyResult<Masses> {
    match obj {
        None => Ok(Masses::unit()),
        Some(o) => match o.cast::<PyMasses>() {
            Ok(m) => Ok(m.get().0),
            Err(_) => Masses::new(o.extract::<[f64; 3]>()?).map_err(err),
        },
    }
}

fn config_tuples(config: &sphere_re::Config) -> Vec<(f64, f64)> {
    config.iter().map(|p| (p.theta, p.phi)).collect()
}

/// Three positive masses.
#[pyclass(name = "Masses", module = "sphere_re_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMasses(Masses);

#[pymethods]
impl PyMasses {
    #[new]
    fn new(m1: f64, m2: f64, m3: f64) -> PyResult<Self> {
        Masses::new([m1, m2, m3]).map(Self).map_err(err)
    }

    #[staticmethod]
    fn equal(m: f64) -> PyResult<Self> {
        Masses::equal(m).map(Self).map_err(err)
    }

    #[getter]
    fn values(&self) -> [f64; 3] {
        self.0.values()
    }

    #[getter]
    fn total(&self) -> f64 {
        self.0.total()
    }

    fn __repr__(&self) -> String {
        let [a, b, c] = self.0.values();
        format!("Masses({a}, {b}, {c})")
    }
}

/// Triangle on the sphere given by its arc angles.
#[pyclass(name = "Shape", module = "sphere_re_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyShape(Shape3);

#[pymethods]
impl PyShape {
    #[new]
    fn new(sigma12: f64, sigma23: f64, sigma31: f64) -> PyResult<Self> {
        Shape3::new(sigma12, sigma23, sigma31).map(Self).map_err(err)
    }

    #[staticmethod]
    fn equilateral(sigma: f64) -> PyResult<Self> {
        Shape3::equilateral(sigma).map(Self).map_err(err)
    }

    #[getter]
    fn sides(&self) -> [f64; 3] {
        self.0.sides()
    }

    #[getter]
    fn cosines(&self) -> [f64; 3] {
        self.0.cosines()
    }

    #[getter]
    fn chords(&self) -> [f64; 3] {
        self.0.chords()
    }

    #[getter]
    fn realizability_margin(&self) -> f64 {
        self.0.realizability_margin()
    }

    #[pyo3(signature = (tol=1e-12))]
    fn is_equilateral(&self, tol: f64) -> bool {
        self.0.is_equilateral(tol)
    }

    #[pyo3(signature = (tol=1e-12))]
    fn is_isosceles(&self, tol: f64) -> bool {
        self.0.is_isosceles(tol)
    }

    fn __repr__(&self) -> String {
        let [a, b, c] = self.0.sides();
        format!("Shape({a}, {b}, {c})")
    }
}

/// Collinear shape on a rotating meridian.
#[pyclass(name = "MeridianShape", module = "sphere_re_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMeridianShape(MeridianShape3);

#[pymethods]
impl PyMeridianShape {
    #[new]
    fn new(a: f64, x: f64) -> PyResult<Self> {
        MeridianShape3::new(a, x).map(Self).map_err(err)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.0.y()
    }

    #[getter]
    fn arcs(&self) -> [f64; 3] {
        euler::meridian_arcs(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("MeridianShape(a={}, x={})", self.0.a, self.0.x)
    }
}

/// A relative equilibrium ready for verification.
#[pyclass(name = "Candidate", module = "sphere_re_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCandidate(ReCandidate);

#[pymethods]
impl PyCandidate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| ValidationError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| NumericalError::new_err(e.to_string()))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind {
            ReKind::Ere => "ere",
            ReKind::Lre => "lre",
            ReKind::FixedPoint => "fixed-point",
        }
    }

    #[getter]
    fn omega2(&self) -> f64 {
        self.0.omega2
    }

    #[getter]
    fn config(&self) -> Vec<(f64, f64)> {
        config_tuples(&self.0.config)
    }

    #[getter]
    fn masses(&self) -> PyMasses {
        PyMasses(self.0.masses)
    }

    #[getter]
    fn meridian(&self) -> bool {
        self.0.meridian
    }

    #[pyo3(signature = (t_end=verify::DEFAULT_T, dt=verify::DEFAULT_DT))]
    fn verify(&self, py: Python<'_>, t_end: f64, dt: f64) -> PyResult<PyReport> {
        check_window(t_end, dt)?;
        Ok(PyReport(py.detach(|| verify::verify_re(&self.0, t_end, dt))))
    }

    fn __repr__(&self) -> String {
        format!("Candidate(kind={:?}, omega2={})", self.kind(), self.0.omega2)
    }
}

/// Solved collinear relative equilibrium.
#[pyclass(name = "EreSolution", module = "sphere_re_py", frozen)]
struct PyEreSolution {
    sol: EreSolution,
    masses: Masses,
    potential: PotentialKind,
}

#[pymethods]
impl PyEreSolution {
    #[getter]
    fn shape(&self) -> PyMeridianShape {
        PyMeridianShape(self.sol.shape)
    }

    #[getter]
    fn thetas(&self) -> [f64; 3] {
        self.sol.thetas
    }

    #[getter]
    fn s(&self) -> Option<i8> {
        self.sol.s
    }

    #[getter]
    fn omega2(&self) -> Option<f64> {
        self.sol.omega2
    }

    #[getter]
    fn fixed_point(&self) -> bool {
        self.sol.fixed_point
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.sol.degenerate
    }

    #[getter]
    fn residuals(&self) -> [f64; 3] {
        self.sol.residuals
    }

    #[getter]
    fn relative_residual(&self) -> f64 {
        self.sol.relative_residual()
    }

    fn candidate(&self) -> PyCandidate {
        PyCandidate(ReCandidate::from_ere(&self.sol, &self.masses, &self.potential))
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.sol)
    }

    fn __repr__(&self) -> String {
        format!("EreSolution(thetas={:?}, omega2={:?})", self.sol.thetas, self.sol.omega2)
    }
}

/// Reconstructed Lagrangian relative equilibrium.
#[pyclass(name = "LreSolution", module = "sphere_re_py", frozen)]
struct PyLreSolution {
    lre: LreCandidate,
    masses: Masses,
    potential: PotentialKind,
}

#[pymethods]
impl PyLreSolution {
    #[getter]
    fn shape(&self) -> PyShape {
        PyShape(self.lre.shape)
    }

    #[getter]
    fn psi_l(&self) -> [f64; 3] {
        self.lre.psi_l
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.lre.lambda
    }

    #[getter]
    fn cos_thetas(&self) -> [f64; 3] {
        self.lre.cos_thetas
    }

    #[getter]
    fn config(&self) -> Vec<(f64, f64)> {
        config_tuples(&self.lre.config)
    }

    #[getter]
    fn phi_diffs(&self) -> [f64; 3] {
        self.lre.phi_diffs
    }

    #[getter]
    fn omega2(&self) -> f64 {
        self.lre.omega2
    }

    #[getter]
    fn omega2_alt(&self) -> f64 {
        self.lre.omega2_alt
    }

    #[getter]
    fn relative_residual(&self) -> f64 {
        self.lre.relative_eom_residual()
    }

    fn candidate(&self) -> PyCandidate {
        PyCandidate(ReCandidate::from_lre(&self.lre, &self.masses, &self.potential))
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.lre)
    }

    fn __repr__(&self) -> String {
        let [a, b, c] = self.lre.shape.sides();
        format!("LreSolution(shape=({a}, {b}, {c}), omega2={})", self.lre.omega2)
    }
}

/// Outcome of integrating a candidate.
#[pyclass(name = "VerificationReport", module = "sphere_re_py", frozen)]
struct PyReport(VerificationReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.0.pass
    }

    #[getter]
    fn sigma_drift(&self) -> f64 {
        self.0.sigma_drift
    }

    #[getter]
    fn energy_drift(&self) -> f64 {
        self.0.energy_drift
    }

    #[getter]
    fn momentum_drift(&self) -> [f64; 3] {
        self.0.momentum_drift
    }

    #[getter]
    fn frame_drift(&self) -> f64 {
        self.0.frame_drift
    }

    #[getter]
    fn steps(&self) -> usize {
        self.0.steps
    }

    #[getter]
    fn aborted_at(&self) -> Option<f64> {
        self.0.aborted.as_ref().map(|a| a.time)
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0)
    }

    fn __bool__(&self) -> bool {
        self.0.pass
    }

    fn __repr__(&self) -> String {
        format!("VerificationReport(pass={}, sigma_drift={:e})", self.0.pass, self.0.sigma_drift)
    }
}

fn check_window(t_end: f64, dt: f64) -> PyResult<()> {
    if t_end > 0.0 && dt > 0.0 && t_end.is_finite() && dt.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::new_err(format!("T and dt must be positive, got T = {t_end}, dt = {dt}")))
    }
}

fn orientation_of(north: bool, positive: bool) -> Orientation {
    Orientation {
        hemisphere: if north { Hemisphere::North } else { Hemisphere::South },
        winding: if positive { Winding::Positive } else { Winding::Negative },
    }
}

/// Solve the collinear shape `(a, x)`.
#[pyfunction]
#[pyo3(signature = (a, x, masses=None, potential="cotangent"))]
fn solve_ere(a: f64, x: f64, masses: Option<&Bound<'_, PyAny>>, potential: &str) -> PyResult<PyEreSolution> {
    let masses = masses_of(masses)?;
    let potential = potential_of(potential)?;
    let shape = MeridianShape3::new(a, x).map_err(err)?;
    let sol = euler::solve_ere(&shape, &masses, &potential).map_err(err)?;
    Ok(PyEreSolution { sol, masses, potential })
}

/// Zero set of the shape determinant; one dict per hit.
#[pyfunction]
#[pyo3(signature = (grid=720, x_grid=None, masses=None, potential="cotangent"))]
fn ere_scan(
    py: Python<'_>,
    grid: usize,
    x_grid: Option<usize>,
    masses: Option<&Bound<'_, PyAny>>,
    potential: &str,
) -> PyResult<Py<PyAny>> {
    let x_grid = x_grid.unwrap_or(2 * grid);
    if grid < 2 || x_grid < 2 {
        return Err(ValidationError::new_err("grids need at least 2 nodes"));
    }
    let masses = masses_of(masses)?;
    let potential = potential_of(potential)?;
    let hits = py.detach(|| euler::ere_scan(&masses, &potential, grid, x_grid));
    to_py(py, &hits)
}

/// Reconstruct the LRE with the given arc angles, optionally polishing them
/// onto the nearby solution first.
#[pyfunction]
#[pyo3(signature = (sigma12, sigma23, sigma31, masses=None, potential="cotangent", polish=false, north=true, positive=false))]
#[allow(clippy::too_many_arguments)]
fn lre_solve(
    sigma12: f64,
    sigma23: f64,
    sigma31: f64,
    masses: Option<&Bound<'_, PyAny>>,
    potential: &str,
    polish: bool,
    north: bool,
    positive: bool,
) -> PyResult<PyLreSolution> {
    let masses = masses_of(masses)?;
    let potential = potential_of(potential)?;
    let mut shape = Shape3::new(sigma12, sigma23, sigma31).map_err(err)?;
    if polish {
        shape = lagrange::lre_polish(&shape, &masses, &potential).map_err(err)?;
    }
    let lre = lagrange::lre_reconstruct(&shape, &masses, &potential, orientation_of(north, positive)).map_err(err)?;
    Ok(PyLreSolution { lre, masses, potential })
}

/// `ω²` of an LRE shape.
#[pyfunction]
#[pyo3(signature = (shape, masses=None, potential="cotangent"))]
fn lre_omega2(shape: PyRef<'_, PyShape>, masses: Option<&Bound<'_, PyAny>>, potential: &str) -> PyResult<f64> {
    lagrange::lre_omega2(&shape.0, &masses_of(masses)?, &potential_of(potential)?).map_err(err)
}

/// Nearby LRE shape with `σ12` held fixed.
#[pyfunction]
#[pyo3(signature = (shape, masses=None, potential="cotangent"))]
fn lre_polish(shape: PyRef<'_, PyShape>, masses: Option<&Bound<'_, PyAny>>, potential: &str) -> PyResult<PyShape> {
    lagrange::lre_polish(&shape.0, &masses_of(masses)?, &potential_of(potential)?).map(PyShape).map_err(err)
}

/// Equal-mass isosceles LRE roots `σ` for a given `σ12`.
#[pyfunction]
#[pyo3(signature = (sigma12, samples=2001))]
fn isosceles_lre_roots(sigma12: f64, samples: usize) -> PyResult<Vec<f64>> {
    if !(sigma12 > 0.0 && sigma12 < std::f64::consts::PI) {
        return Err(ValidationError::new_err(format!("sigma12 must lie in (0, pi), got {sigma12}")));
    }
    Ok(lagrange::isosceles_lre_roots(sigma12, samples))
}

/// Equal-mass isosceles collinear family: dict with branch, thetas, omega2.
#[pyfunction]
fn isosceles_ere(py: Python<'_>, theta: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &euler::isosceles_ere_classify(theta).map_err(err)?)
}

/// Eigenpairs of the shape matrix, ascending: `[(lambda, psi), ...]`.
#[pyfunction]
#[pyo3(signature = (shape, masses=None))]
fn principal_axes(shape: PyRef<'_, PyShape>, masses: Option<&Bound<'_, PyAny>>) -> PyResult<Vec<(f64, [f64; 3])>> {
    let j = inertia::shape_matrix(&shape.0, &masses_of(masses)?);
    Ok(inertia::principal_axes(&j).iter().map(|c| (c.lambda, c.psi)).collect())
}

/// Critical meridian angle separating the two equal-mass collinear regimes.
#[pyfunction]
fn critical_angle() -> f64 {
    euler::critical_angle_ac()
}

/// Integrate many candidates in parallel.
#[pyfunction]
#[pyo3(signature = (candidates, t_end=verify::DEFAULT_T, dt=verify::DEFAULT_DT))]
fn verify_batch(py: Python<'_>, candidates: Vec<PyRef<'_, PyCandidate>>, t_end: f64, dt: f64) -> PyResult<Vec<PyReport>> {
    check_window(t_end, dt)?;
    let cs: Vec<ReCandidate> = candidates.iter().map(|c| c.0.clone()).collect();
    Ok(py.detach(|| verify::verify_batch(&cs, t_end, dt)).into_iter().map(PyReport).collect())
}

#[pymodule]
fn sphere_re_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyMasses>()?;
    m.add_class::<PyShape>()?;
    m.add_class::<PyMeridianShape>()?;
    m.add_class::<PyCandidate>()?;
    m.add_class::<PyEreSolution>()?;
    m.add_class::<PyLreSolution>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(solve_ere, m)?)?;
    m.add_function(wrap_pyfunction!(ere_scan, m)?)?;
    m.add_function(wrap_pyfunction!(lre_solve, m)?)?;
    m.add_function(wrap_pyfunction!(lre_omega2, m)?)?;
    m.add_function(wrap_pyfunction!(lre_polish, m)?)?;
    m.add_function(wrap_pyfunction!(isosceles_lre_roots, m)?)?;
    m.add_function(wrap_pyfunction!(isosceles_ere, m)?)?;
    m.add_function(wrap_pyfunction!(principal_axes, m)?)?;
    m.add_function(wrap_pyfunction!(critical_angle, m)?)?;
    m.add_function(wrap_pyfunction!(verify_batch, m)?)?;
    Ok(())
}

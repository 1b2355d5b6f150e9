//! Python bindings. Rationals go in as `str`, `int`, `fractions.Fraction`
//! or `float` and come back as `"p/q"` strings.

use latticeflow::rational::{fraction_string, from_f64, frac, int};
use latticeflow::{
    compare_flows as core_compare, evolve_discrete as core_discrete, evolve_ode as core_ode, parse_rational,
    BranchPolicy, MultiLayerParams, OdeOptions, Rational, RectangleState, SideLawParams, TiePolicy, VelocityLaw,
    VelocityTable,
};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyFloat, PyInt, PyString};

fn err(e: latticeflow::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = obj.cast::<PyString>() {
        return parse_rational(s.to_str()?).map_err(err);
    }
    if obj.is_instance_of::<PyInt>() {
        return Ok(int(obj.extract::<i128>()?));
    }
    if obj.is_instance_of::<PyFloat>() {
        return from_f64(obj.extract::<f64>()?).map_err(err);
    }
    if let (Ok(n), Ok(d)) = (obj.getattr("numerator"), obj.getattr("denominator")) {
        let d: i128 = d.extract()?;
        if d == 0 {
            return Err(PyValueError::new_err("zero denominator"));
        }
        return Ok(frac(n.extract()?, d));
    }
    Err(PyTypeError::new_err("expected str, int, float or Fraction"))
}

fn rationals(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Rational>> {
    obj.try_iter()?.map(|item| rational(&item?)).collect()
}

fn tie(name: &str) -> PyResult<TiePolicy> {
    match name {
        "smaller-step" => Ok(TiePolicy::SmallerStep),
        "larger-step" => Ok(TiePolicy::LargerStep),
        _ => Err(PyValueError::new_err(format!("unknown tie policy '{name}'"))),
    }
}

fn branch(name: &str) -> PyResult<BranchPolicy> {
    match name {
        "lower" => Ok(BranchPolicy::Lower),
        "upper" => Ok(BranchPolicy::Upper),
        _ => Err(PyValueError::new_err(format!("unknown branch '{name}'"))),
    }
}

fn json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

type Interval = (String, String, u64);

fn intervals(table: &VelocityTable) -> Vec<Interval> {
    table.intervals().iter().map(|(a, b, f)| (fraction_string(a), fraction_string(b), *f)).collect()
}

/// Law of a single side in a medium with one contrast parameter.
#[pyclass(name = "SideLaw", frozen)]
struct PySideLaw {
    inner: SideLawParams,
}

#[pymethods]
impl PySideLaw {
    #[new]
    fn new(alpha: &Bound<'_, PyAny>, gamma: &Bound<'_, PyAny>, delta: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = SideLawParams::new(rational(alpha)?, rational(gamma)?, rational(delta)?).map_err(err)?;
        Ok(PySideLaw { inner })
    }

    #[getter]
    fn alpha(&self) -> String {
        fraction_string(&self.inner.alpha())
    }

    #[getter]
    fn gamma(&self) -> String {
        fraction_string(&self.inner.gamma())
    }

    #[getter]
    fn delta(&self) -> String {
        fraction_string(&self.inner.delta())
    }

    fn velocity(&self, y: &Bound<'_, PyAny>) -> PyResult<u64> {
        self.inner.velocity_closed_form(rational(y)?).map_err(err)
    }

    /// Velocity obtained by iterating the one-step problem until periodic.
    fn orbit_velocity(&self, y: &Bound<'_, PyAny>) -> PyResult<u64> {
        self.inner.effective_velocity(rational(y)?).map_err(err)
    }

    fn optimal_step(&self, y: &Bound<'_, PyAny>) -> PyResult<u64> {
        self.inner.optimal_step(rational(y)?).map_err(err)
    }

    fn minimizers(&self, y: &Bound<'_, PyAny>) -> PyResult<Vec<u64>> {
        self.inner.minimizers(rational(y)?).map_err(err)
    }

    fn envelope(&self, y: &Bound<'_, PyAny>) -> PyResult<(u64, u64)> {
        Ok(self.inner.velocity_envelope(rational(y)?))
    }

    fn pinning_threshold(&self) -> String {
        fraction_string(&self.inner.pinning_threshold())
    }

    fn singular_set(&self, y_max: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
        Ok(self.inner.singular_set(rational(y_max)?).iter().map(fraction_string).collect())
    }

    /// `(Y_lo, Y_hi, f)` for every plateau on `(0, y_max]`.
    fn table(&self, y_max: &Bound<'_, PyAny>) -> PyResult<Vec<Interval>> {
        Ok(intervals(&self.inner.velocity_table(rational(y_max)?).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("SideLaw(alpha={}, gamma={}, delta={})", self.alpha(), self.gamma(), self.delta())
    }
}

/// Law of a side when the contrast parameters form `K` periodic layers.
#[pyclass(name = "MultiLayerLaw", frozen)]
struct PyMultiLayerLaw {
    inner: MultiLayerParams,
}

#[pymethods]
impl PyMultiLayerLaw {
    #[new]
    fn new(alpha: &Bound<'_, PyAny>, gamma: &Bound<'_, PyAny>, deltas: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = MultiLayerParams::new(rational(alpha)?, rational(gamma)?, rationals(deltas)?).map_err(err)?;
        Ok(PyMultiLayerLaw { inner })
    }

    #[getter]
    fn deltas(&self) -> Vec<String> {
        self.inner.deltas().iter().map(fraction_string).collect()
    }

    #[getter]
    fn layers(&self) -> usize {
        self.inner.layers()
    }

    fn velocity(&self, y: &Bound<'_, PyAny>) -> PyResult<u64> {
        self.inner.velocity_closed_form_k(rational(y)?).map_err(err)
    }

    fn orbit_velocity(&self, y: &Bound<'_, PyAny>) -> PyResult<u64> {
        self.inner.effective_velocity_k(rational(y)?).map_err(err)
    }

    fn optimal_step(&self, y: &Bound<'_, PyAny>) -> PyResult<u64> {
        self.inner.optimal_step(rational(y)?).map_err(err)
    }

    fn pinning_threshold(&self) -> String {
        fraction_string(&self.inner.pinning_threshold_k())
    }

    fn singular_set(&self, y_max: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
        Ok(self.inner.singular_set_k(rational(y_max)?).iter().map(fraction_string).collect())
    }

    fn table(&self, y_max: &Bound<'_, PyAny>) -> PyResult<Vec<Interval>> {
        Ok(intervals(&self.inner.velocity_table_k(rational(y_max)?).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("MultiLayerLaw(deltas={:?})", self.deltas())
    }
}

fn law_of(obj: &Bound<'_, PyAny>) -> PyResult<MultiLayerParams> {
    if let Ok(l) = obj.cast::<PySideLaw>() {
        return Ok(l.get().inner.into());
    }
    if let Ok(l) = obj.cast::<PyMultiLayerLaw>() {
        return Ok(l.get().inner.clone());
    }
    Err(PyTypeError::new_err("expected SideLaw or MultiLayerLaw"))
}

/// Discrete flow of a centred `width × height` cell rectangle; returns the
/// trajectory as a dict.
#[pyfunction]
#[pyo3(signature = (law, width, height, epsilon, horizon, tie_policy = "smaller-step"))]
fn evolve_discrete<'py>(
    py: Python<'py>,
    law: &Bound<'py, PyAny>,
    width: i64,
    height: i64,
    epsilon: &Bound<'py, PyAny>,
    horizon: &Bound<'py, PyAny>,
    tie_policy: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let start = RectangleState::centered(width, height).map_err(err)?;
    let traj = core_discrete(start, &law_of(law)?, rational(epsilon)?, rational(horizon)?, tie(tie_policy)?)
        .map_err(err)?;
    json(py, &traj.to_json())
}

/// Homogenized side-length ODE from `(l1, l2)`; returns the trajectory as a dict.
#[pyfunction]
#[pyo3(signature = (law, l1, l2, horizon, branch_policy = "upper"))]
fn evolve_ode<'py>(
    py: Python<'py>,
    law: &Bound<'py, PyAny>,
    l1: &Bound<'py, PyAny>,
    l2: &Bound<'py, PyAny>,
    horizon: &Bound<'py, PyAny>,
    branch_policy: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let options = OdeOptions::new(rational(horizon)?, branch(branch_policy)?);
    let traj = core_ode(rational(l1)?, rational(l2)?, &law_of(law)?, &options).map_err(err)?;
    json(py, &traj.to_json())
}

/// Sup-in-time distance between the discrete and continuum flows for each spacing.
#[pyfunction]
#[pyo3(signature = (law, l1, l2, epsilons, horizon, tie_policy = "smaller-step", branch_policy = "upper"))]
#[allow(clippy::too_many_arguments)]
fn compare_flows<'py>(
    py: Python<'py>,
    law: &Bound<'py, PyAny>,
    l1: &Bound<'py, PyAny>,
    l2: &Bound<'py, PyAny>,
    epsilons: &Bound<'py, PyAny>,
    horizon: &Bound<'py, PyAny>,
    tie_policy: &str,
    branch_policy: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let law = law_of(law)?;
    let (l1, l2, eps, horizon) = (rational(l1)?, rational(l2)?, rationals(epsilons)?, rational(horizon)?);
    let (tie, branch) = (tie(tie_policy)?, branch(branch_policy)?);
    let report = py.detach(|| core_compare(l1, l2, &law, &eps, horizon, tie, branch)).map_err(err)?;
    json(py, &report.to_json())
}

#[pymodule]
fn latticeflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySideLaw>()?;
    m.add_class::<PyMultiLayerLaw>()?;
    m.add_function(wrap_pyfunction!(evolve_discrete, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_ode, m)?)?;
    m.add_function(wrap_pyfunction!(compare_flows, m)?)?;
    Ok(())
}

//! Python bindings for the `complementarity` crate.

use complementarity::entanglement::{self, table_basis};
use complementarity::harness::{
    self, BasisSource, ComplementarityRecord, PseudopureReport, SweepSpec, VerifyOptions,
};
use complementarity::interferometer::{self, extended_visibility_in, sweep_interferogram};
use complementarity::prep::{self, family_state};
use complementarity::{Error, FamilyParams, PreferredBasis, StateClassTag, SweepMode, C64};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

/// A normalized pure state; qubit 0 is the most significant bit.
#[pyclass(name = "PureState", module = "complementarity_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPureState {
    inner: complementarity::PureState,
}

impl PyPureState {
    pub fn inner(&self) -> &complementarity::PureState {
        &self.inner
    }
}

#[pymethods]
impl PyPureState {
    /// Builds a state from `2ⁿ` amplitudes, renormalizing them.
    #[new]
    fn new(amplitudes: Vec<C64>) -> PyResult<Self> {
        let inner = complementarity::PureState::normalized(amplitudes).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ghz(alpha1: f64) -> Self {
        Self { inner: prep::ghz_state(alpha1) }
    }

    #[staticmethod]
    fn w(alpha1: f64, alpha2_0: f64) -> Self {
        Self { inner: prep::w_state(alpha1, alpha2_0) }
    }

    #[staticmethod]
    fn intermediate(alpha1: f64, alpha2_0: f64, alpha3_00: f64) -> Self {
        Self { inner: prep::intermediate_state(alpha1, alpha2_0, alpha3_00) }
    }

    #[staticmethod]
    #[pyo3(signature = (seed, n_qubits = 3))]
    fn random(seed: u64, n_qubits: usize) -> PyResult<Self> {
        if !(1..=12).contains(&n_qubits) {
            return Err(PyValueError::new_err("n_qubits must lie in 1..=12"));
        }
        Ok(Self { inner: prep::random_pure_state(seed, n_qubits) })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Concurrence between qubit `k` and the rest.
    #[pyo3(signature = (k = 0))]
    fn concurrence(&self, k: usize) -> PyResult<f64> {
        entanglement::concurrence_bipartition(&self.inner, k).map_err(py_err)
    }

    /// Wootters concurrence of a two-qubit state.
    fn concurrence_two_qubit(&self) -> PyResult<f64> {
        entanglement::concurrence_two_qubit(&self.inner).map_err(py_err)
    }

    #[pyo3(signature = (k = 0))]
    fn predictability(&self, k: usize) -> PyResult<f64> {
        entanglement::predictability(&self.inner, k).map_err(py_err)
    }

    #[pyo3(signature = (k = 0))]
    fn visibility(&self, k: usize) -> PyResult<f64> {
        entanglement::single_visibility_direct(&self.inner, k).map_err(py_err)
    }

    /// `S = √(V² + P²)` of qubit `k`.
    #[pyo3(signature = (k = 0))]
    fn character(&self, k: usize) -> PyResult<f64> {
        entanglement::single_particle_character(&self.inner, k).map_err(py_err)
    }

    /// Eigenbasis of the reduced state of qubits 1 and 2, as four
    /// amplitude lists.
    fn preferred_basis(&self) -> PyResult<Vec<Vec<C64>>> {
        let b = entanglement::preferred_basis(&self.inner).map_err(py_err)?;
        Ok(basis_vectors(&b))
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        let amps: Vec<String> = self
            .inner
            .amplitudes()
            .iter()
            .map(|a| format!("{:.6}{:+.6}j", a.re, a.im))
            .collect();
        format!("PureState([{}])", amps.join(", "))
    }
}

fn basis_vectors(b: &PreferredBasis) -> Vec<Vec<C64>> {
    b.vectors().iter().map(|v| v.iter().copied().collect()).collect()
}

/// Phase points swept by the interferometer.
#[pyclass(name = "PhaseGrid", module = "complementarity_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPhaseGrid {
    inner: complementarity::PhaseGrid,
}

#[pymethods]
impl PyPhaseGrid {
    #[new]
    #[pyo3(signature = (mode = "locked", n = 360))]
    fn new(mode: &str, n: usize) -> PyResult<Self> {
        let inner = complementarity::PhaseGrid::new(parse(mode)?, n).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// `φ₁ = φ₂` over `n` points.
    #[staticmethod]
    fn locked(n: usize) -> PyResult<Self> {
        let inner = complementarity::PhaseGrid::locked(n).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// `n1 × n2` product grid, `φ₁` slow.
    #[staticmethod]
    fn independent(n1: usize, n2: usize) -> PyResult<Self> {
        let inner = complementarity::PhaseGrid::independent(n1, n2).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("PhaseGrid(mode='{}', points={})", self.inner.mode(), self.inner.len())
    }
}

/// Outcome probabilities of a phase sweep.
#[pyclass(name = "Interferogram", module = "complementarity_py", frozen)]
pub struct PyInterferogram {
    inner: interferometer::Interferogram,
}

fn check_port(i: usize, n: usize) -> PyResult<()> {
    if i >= n {
        return Err(py_err(Error::PortOutOfRange(i)));
    }
    Ok(())
}

#[pymethods]
impl PyInterferogram {
    fn phases(&self) -> Vec<(f64, f64)> {
        self.inner.samples().iter().map(|s| (s.phi1, s.phi2)).collect()
    }

    /// `p(i, j)` at every grid point.
    fn joint(&self, i: usize, j: usize) -> PyResult<Vec<f64>> {
        check_port(i, 2)?;
        check_port(j, 4)?;
        Ok(self.inner.samples().iter().map(|s| s.joint(i, j)).collect())
    }

    /// `p̄(i, j) = p(i, j) − p_A(i) p_BC(j) + 1/4` at every grid point.
    fn corrected(&self, i: usize, j: usize) -> PyResult<Vec<f64>> {
        check_port(i, 2)?;
        check_port(j, 4)?;
        Ok(self.inner.samples().iter().map(|s| s.corrected_port(i, j)).collect())
    }

    fn single(&self, i: usize) -> PyResult<Vec<f64>> {
        check_port(i, 2)?;
        Ok(self.inner.samples().iter().map(|s| s.single_a[i]).collect())
    }

    #[pyo3(signature = (i = 0, j = 0))]
    fn visibility(&self, i: usize, j: usize) -> PyResult<f64> {
        interferometer::visibility_two_party(&self.inner, i, j).map_err(py_err)
    }

    #[pyo3(signature = (i = 0))]
    fn single_visibility(&self, i: usize) -> PyResult<f64> {
        interferometer::visibility_single(&self.inner, i).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn basis_from(
    state: &complementarity::PureState,
    basis: Option<Vec<Vec<C64>>>,
) -> PyResult<PreferredBasis> {
    let Some(vectors) = basis else {
        return entanglement::preferred_basis(state).map_err(py_err);
    };
    let vectors: Vec<complementarity::CVector> = vectors
        .into_iter()
        .map(|v| {
            if v.len() != 4 {
                return Err(PyValueError::new_err("basis vectors need 4 amplitudes"));
            }
            Ok(complementarity::CVector::from_vec(v))
        })
        .collect::<PyResult<_>>()?;
    let vectors: [complementarity::CVector; 4] = vectors
        .try_into()
        .map_err(|_| PyValueError::new_err("basis needs 4 vectors"))?;
    PreferredBasis::from_vectors(vectors, 4).map_err(py_err)
}

/// Sweeps the interferometer over `grid`, measuring BC in `basis`
/// (default: the preferred basis of `state`).
#[pyfunction]
#[pyo3(signature = (state, grid, basis = None))]
fn sweep(
    py: Python<'_>,
    state: &PyPureState,
    grid: &PyPhaseGrid,
    basis: Option<Vec<Vec<C64>>>,
) -> PyResult<PyInterferogram> {
    let b = basis_from(&state.inner, basis)?;
    let inner = py
        .detach(|| sweep_interferogram(&state.inner, &b, &grid.inner))
        .map_err(py_err)?;
    Ok(PyInterferogram { inner })
}

/// Per-state quantifiers from a verification run.
#[pyclass(name = "Record", module = "complementarity_py", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyRecord {
    state: String,
    family: String,
    seed: Option<u64>,
    concurrence: f64,
    predictability: f64,
    v_single: f64,
    s: f64,
    v2: f64,
    residual_equality: f64,
    slack_inequality: Option<f64>,
}

impl From<ComplementarityRecord> for PyRecord {
    fn from(r: ComplementarityRecord) -> Self {
        Self {
            state: r.state.to_string(),
            family: r.state.class.to_string(),
            seed: r.state.seed,
            concurrence: r.concurrence,
            predictability: r.predictability,
            v_single: r.v_single,
            s: r.s,
            v2: r.v2,
            residual_equality: r.residual_equality,
            slack_inequality: r.slack_inequality,
        }
    }
}

#[pymethods]
impl PyRecord {
    fn __repr__(&self) -> String {
        format!(
            "Record(state='{}', concurrence={:.6}, s={:.6}, v2={:.6}, residual={:.2e})",
            self.state, self.concurrence, self.s, self.v2, self.residual_equality
        )
    }
}

fn options(mode: &str, phase_points: usize, basis: &str) -> PyResult<VerifyOptions> {
    Ok(VerifyOptions {
        mode: parse::<SweepMode>(mode)?,
        phase_points,
        basis: parse::<BasisSource>(basis)?,
    })
}

/// Interferometric check of `V² + S² = 1` for one state.
#[pyfunction]
#[pyo3(signature = (state, mode = "independent", phase_points = 360))]
fn verify(py: Python<'_>, state: &PyPureState, mode: &str, phase_points: usize) -> PyResult<PyRecord> {
    let opts = options(mode, phase_points, "eigensolve")?;
    py.detach(|| harness::verify_equality(&state.inner, &opts))
        .map(PyRecord::from)
        .map_err(py_err)
}

/// Verifies `count` random states with seeds `seed, seed + 1, …`.
#[pyfunction]
#[pyo3(signature = (seed, count, mode = "independent", phase_points = 360))]
fn verify_random(
    py: Python<'_>,
    seed: u64,
    count: usize,
    mode: &str,
    phase_points: usize,
) -> PyResult<Vec<PyRecord>> {
    let opts = options(mode, phase_points, "eigensolve")?;
    let records = py
        .detach(|| harness::verify_random(seed, count, &opts))
        .map_err(py_err)?;
    Ok(records.into_iter().map(PyRecord::from).collect())
}

/// Sweeps `parameter` of a named family over `[start, stop]`.
#[pyfunction]
#[pyo3(signature = (
    family, parameter = "alpha1", start = 0.0, stop = std::f64::consts::PI, points = 33,
    alpha1 = None, alpha2_0 = None, alpha3_00 = None,
    mode = "independent", phase_points = 360, basis = None
))]
#[allow(clippy::too_many_arguments)]
fn family_sweep(
    py: Python<'_>,
    family: &str,
    parameter: &str,
    start: f64,
    stop: f64,
    points: usize,
    alpha1: Option<f64>,
    alpha2_0: Option<f64>,
    alpha3_00: Option<f64>,
    mode: &str,
    phase_points: usize,
    basis: Option<&str>,
) -> PyResult<Vec<PyRecord>> {
    let class: StateClassTag = parse(family)?;
    let mut fixed = FamilyParams::default();
    for (name, v) in [("alpha1", alpha1), ("alpha2_0", alpha2_0), ("alpha3_00", alpha3_00)] {
        if let Some(v) = v {
            fixed.set(name, v).map_err(py_err)?;
        }
    }
    let basis = match basis {
        Some(b) => parse(b)?,
        None => BasisSource::default_for(class),
    };
    let spec = SweepSpec {
        family: class,
        parameter: parameter.to_string(),
        values: harness::linspace(start, stop, points),
        fixed,
        phase_points,
        mode: parse(mode)?,
        basis,
    };
    let records = py.detach(|| harness::family_sweep(&spec)).map_err(py_err)?;
    Ok(records.into_iter().map(PyRecord::from).collect())
}

/// Closed-form measurement basis of a named family.
#[pyfunction]
#[pyo3(signature = (family, alpha1, alpha2_0 = 0.0, alpha3_00 = 0.0))]
fn family_basis(family: &str, alpha1: f64, alpha2_0: f64, alpha3_00: f64) -> PyResult<Vec<Vec<C64>>> {
    let class: StateClassTag = parse(family)?;
    let p = FamilyParams::intermediate(alpha1, alpha2_0, alpha3_00).constrained(class);
    let b = table_basis(&p, class).map_err(py_err)?;
    Ok(basis_vectors(&b))
}

/// Family state with unconstrained angles forced to the family's values.
#[pyfunction]
#[pyo3(signature = (family, alpha1, alpha2_0 = 0.0, alpha3_00 = 0.0))]
fn family(family: &str, alpha1: f64, alpha2_0: f64, alpha3_00: f64) -> PyResult<PyPureState> {
    let class: StateClassTag = parse(family)?;
    let p = FamilyParams::intermediate(alpha1, alpha2_0, alpha3_00).constrained(class);
    Ok(PyPureState { inner: family_state(class, &p) })
}

/// Two-party visibility along `Σ cᵢ Φᵢ`.
///
/// Returns `(weighted, coherent, per_port)`.
#[pyfunction]
fn extended_visibility(
    py: Python<'_>,
    state: &PyPureState,
    coeffs: [C64; 4],
    grid: &PyPhaseGrid,
) -> PyResult<(f64, f64, [f64; 4])> {
    let b = entanglement::preferred_basis(&state.inner).map_err(py_err)?;
    let e = py
        .detach(|| extended_visibility_in(&state.inner, &b, &coeffs, &grid.inner))
        .map_err(py_err)?;
    Ok((e.weighted, e.coherent, e.per_port))
}

/// Compares the rescaled interferogram of the pseudopure mixture with the
/// pure one.
#[pyclass(name = "PseudopureReport", module = "complementarity_py", frozen, get_all)]
pub struct PyPseudopureReport {
    epsilon: f64,
    n_points: usize,
    max_deviation: f64,
    mixed_bound: f64,
}

impl From<PseudopureReport> for PyPseudopureReport {
    fn from(r: PseudopureReport) -> Self {
        Self {
            epsilon: r.epsilon,
            n_points: r.n_points,
            max_deviation: r.max_deviation,
            mixed_bound: r.mixed_bound,
        }
    }
}

#[pyfunction]
fn pseudopure_check(
    py: Python<'_>,
    state: &PyPureState,
    epsilon: f64,
    grid: &PyPhaseGrid,
) -> PyResult<PyPseudopureReport> {
    py.detach(|| harness::pseudopure_check(&state.inner, epsilon, &grid.inner))
        .map(PyPseudopureReport::from)
        .map_err(py_err)
}

#[pymodule]
pub fn complementarity_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyPhaseGrid>()?;
    m.add_class::<PyInterferogram>()?;
    m.add_class::<PyRecord>()?;
    m.add_class::<PyPseudopureReport>()?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_random, m)?)?;
    m.add_function(wrap_pyfunction!(family_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(family_basis, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(extended_visibility, m)?)?;
    m.add_function(wrap_pyfunction!(pseudopure_check, m)?)?;
    Ok(())
}

//! Python bindings. Arrays come back as nested lists; complex numbers as
//! Python `complex`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ringcascade_core as core;
use ringcascade_core::CascadeError;

fn py_err(e: CascadeError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "ArraySpec", module = "ringcascade", skip_from_py_object)]
#[derive(Clone)]
struct PyArraySpec {
    inner: core::ArraySpec,
}

#[pymethods]
impl PyArraySpec {
    /// Source ring plus empty rings. `delta_cavity` defaults to
    /// `[delta_atom, 0, 0, ...]`.
    #[new]
    #[pyo3(signature = (g, delta_atom, kappa, delta_cavity=None))]
    fn new(g: Complex64, delta_atom: f64, kappa: Vec<f64>, delta_cavity: Option<Vec<f64>>) -> PyResult<Self> {
        let n = kappa.len();
        let delta_cavity = delta_cavity.unwrap_or_else(|| {
            let mut d = vec![0.0; n];
            if let Some(first) = d.first_mut() {
                *first = delta_atom;
            }
            d
        });
        let inner = core::ArraySpec::chain(g, delta_atom, kappa, delta_cavity);
        inner.validate().map_err(py_err)?;
        Ok(PyArraySpec { inner })
    }

    #[staticmethod]
    fn uniform(n: usize, g: Complex64, delta_atom: f64, kappa: f64, delta_empty: f64) -> PyResult<Self> {
        let inner = core::ArraySpec::uniform(n, g, delta_atom, kappa, delta_empty);
        inner.validate().map_err(py_err)?;
        Ok(PyArraySpec { inner })
    }

    #[getter]
    fn n_cavities(&self) -> usize {
        self.inner.n_cavities
    }

    #[getter]
    fn g(&self) -> Complex64 {
        self.inner.g
    }

    #[getter]
    fn delta_atom(&self) -> f64 {
        self.inner.delta_atom
    }

    #[getter]
    fn kappa(&self) -> Vec<f64> {
        self.inner.kappa.clone()
    }

    #[getter]
    fn delta_cavity(&self) -> Vec<f64> {
        self.inner.delta_cavity.clone()
    }

    /// Largest step the integrator accepts for this spec.
    fn max_step(&self) -> PyResult<f64> {
        Ok(core::build_cascade(&self.inner).map_err(py_err)?.max_step())
    }

    fn __repr__(&self) -> String {
        format!(
            "ArraySpec(n_cavities={}, g={}, delta_atom={}, kappa={:?}, delta_cavity={:?})",
            self.inner.n_cavities, self.inner.g, self.inner.delta_atom, self.inner.kappa, self.inner.delta_cavity
        )
    }
}

#[pyclass(name = "Trajectory", module = "ringcascade")]
struct PyTrajectory {
    inner: core::TrajectoryResult,
    jump_a: Vec<Complex64>,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.to_vec()
    }

    /// `len(times) × dim` basis-slot probabilities.
    #[getter]
    fn populations(&self) -> Vec<Vec<f64>> {
        self.inner.p_basis.rows().into_iter().map(|r| r.to_vec()).collect()
    }

    #[getter]
    fn p_det_a(&self) -> Vec<f64> {
        self.inner.p_det_a.to_vec()
    }

    #[getter]
    fn p_det_b(&self) -> Vec<f64> {
        self.inner.p_det_b.to_vec()
    }

    /// Output amplitude seen by detector D_a along the grid.
    fn output_a(&self) -> Vec<Complex64> {
        self.inner.output_series(ndarray::ArrayView1::from(&self.jump_a[..])).to_vec()
    }

    fn conservation_defect(&self) -> f64 {
        self.inner.conservation_defect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Evolve the atom-excited initial state to `t_end`.
#[pyfunction]
fn evolve(spec: &PyArraySpec, t_end: f64, dt: f64) -> PyResult<PyTrajectory> {
    let ops = core::build_cascade(&spec.inner).map_err(py_err)?;
    let init = core::StateVector::excited_atom(spec.inner.n_cavities);
    let inner = core::evolve(&ops, &init, t_end, dt).map_err(py_err)?;
    Ok(PyTrajectory {
        inner,
        jump_a: ops.jump_a().to_vec(),
    })
}

/// Closed-form `(c_e, c_1, c_2)` of the source.
#[pyfunction]
fn amplitudes_single(spec: &PyArraySpec, t: f64) -> PyResult<(Complex64, Complex64, Complex64)> {
    core::analytic::amplitudes_single(&spec.inner, t).map_err(py_err)
}

#[pyfunction]
fn stationary_spectrum(delta_k: f64, spec: &PyArraySpec, gamma: f64) -> f64 {
    core::analytic::stationary_spectrum(delta_k, &spec.inner, gamma)
}

/// Exact long-time synthesized spectrum at one filter detuning.
#[pyfunction]
fn filtered_stationary_spectrum(delta_k: f64, spec: &PyArraySpec, gamma: f64) -> PyResult<f64> {
    core::analytic::filtered_stationary_spectrum(delta_k, &spec.inner, gamma).map_err(py_err)
}

/// `(N, N_S)` as `len(delta_k) × len(sample_times)` lists.
#[pyfunction]
#[pyo3(signature = (spec, t_end, dt, gamma, delta_k, sample_times))]
fn spectrum_grid(
    spec: &PyArraySpec,
    t_end: f64,
    dt: f64,
    gamma: f64,
    delta_k: Vec<f64>,
    sample_times: Vec<f64>,
) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let ops = core::build_cascade(&spec.inner).map_err(py_err)?;
    let init = core::StateVector::excited_atom(spec.inner.n_cavities);
    let traj = core::evolve(&ops, &init, t_end, dt).map_err(py_err)?;
    let res = core::spectra::spectrum_grid(&traj, &ops, gamma, &delta_k, &sample_times).map_err(py_err)?;
    let rows = |m: &ndarray::Array2<f64>| m.rows().into_iter().map(|r| r.to_vec()).collect();
    Ok((rows(&res.n_t), rows(&res.n_s)))
}

/// Click fractions `(D_a, D_b)` from `n_traj` sampled trajectories.
#[pyfunction]
fn sample_click_fractions(spec: &PyArraySpec, t_end: f64, dt: f64, n_traj: usize, seed: u64) -> PyResult<(f64, f64)> {
    let ops = core::build_cascade(&spec.inner).map_err(py_err)?;
    let init = core::StateVector::excited_atom(spec.inner.n_cavities);
    let s = core::sample_trajectories(&ops, &init, t_end, dt, n_traj, seed).map_err(py_err)?;
    Ok((
        s.click_fraction(core::dynamics::Detector::A),
        s.click_fraction(core::dynamics::Detector::B),
    ))
}

/// Raman source with a Gaussian pulse, started in `|g, vacuum⟩`.
#[pyfunction]
#[pyo3(signature = (g, delta_raman, delta_c, kappa, peak, width, t_end, dt, center=None, stark_shifts=true))]
#[allow(clippy::too_many_arguments)]
fn run_raman(
    g: Complex64,
    delta_raman: f64,
    delta_c: Vec<f64>,
    kappa: Vec<f64>,
    peak: f64,
    width: f64,
    t_end: f64,
    dt: f64,
    center: Option<f64>,
    stark_shifts: bool,
) -> PyResult<PyTrajectory> {
    let spec = core::raman::RamanSpec {
        g,
        delta_raman,
        delta_c,
        kappa,
        pulse: core::raman::Pulse::Gaussian { peak, width, center },
        stark_shifts,
    };
    let n_empty = spec.n_cavities().saturating_sub(1);
    let cascade = core::raman::build_raman_cascade(&spec, n_empty).map_err(py_err)?;
    let inner = core::raman::evolve_raman(&cascade, t_end, dt).map_err(py_err)?;
    Ok(PyTrajectory {
        inner,
        jump_a: cascade.jump_a().to_vec(),
    })
}

#[pyfunction]
fn classical_transfer(r: f64, phi: f64) -> Complex64 {
    let spec = core::classical::ClassicalRingSpec {
        r,
        tau: 1.0,
        omega_c: 0.0,
        ring_radius: 1.0,
    };
    core::classical::classical_transfer(&spec, phi)
}

#[pyfunction]
fn inout_transfer(omega: f64, omega_c: f64, kappa: f64) -> Complex64 {
    core::classical::inout_transfer(omega, omega_c, kappa)
}

#[pyfunction]
fn list_scenarios() -> Vec<&'static str> {
    core::cli::scenarios::names()
}

#[pymodule]
fn ringcascade(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::VERSION)?;
    m.add_class::<PyArraySpec>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(amplitudes_single, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(filtered_stationary_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_grid, m)?)?;
    m.add_function(wrap_pyfunction!(sample_click_fractions, m)?)?;
    m.add_function(wrap_pyfunction!(run_raman, m)?)?;
    m.add_function(wrap_pyfunction!(classical_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(inout_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    Ok(())
}
